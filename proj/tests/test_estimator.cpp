#include "lmbp/estimator.hpp"

#include "test_helpers.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace lmbp {
namespace {

using testing::make_state;

BernoulliTrack point_track(Label label, double r, const State& x) {
    BernoulliTrack track{label, r, {}};
    track.pdf.push_back(x, 1.0);
    return track;
}

TEST(DetectAndEstimate, StrictThreshold) {
    FilterState state;
    state.tracks.push_back(point_track({1, 1}, 0.51, make_state(1, 2, 3, 4)));
    state.tracks.push_back(point_track({1, 2}, 0.5, make_state(0, 0)));
    const auto est = detect_and_estimate(state, 0.5);
    ASSERT_EQ(est.size(), 1u);
    EXPECT_EQ(est[0].label, (Label{1, 1}));
    EXPECT_EQ(est[0].state, make_state(1, 2, 3, 4));
    EXPECT_DOUBLE_EQ(est[0].existence, 0.51);
}

TEST(DetectAndEstimate, NoTracks) {
    EXPECT_TRUE(detect_and_estimate(FilterState{}, 0.5).empty());
}

TEST(DetectAndEstimate, OrderedByLabelAndDeterministic) {
    FilterState state;
    state.tracks.push_back(point_track({3, 1}, 0.9, make_state(0, 0)));
    state.tracks.push_back(point_track({1, 7}, 0.9, make_state(1, 0)));
    state.tracks.push_back(point_track({1, 2}, 0.9, make_state(2, 0)));
    const auto a = detect_and_estimate(state, 0.5);
    ASSERT_EQ(a.size(), 3u);
    EXPECT_EQ(a[0].label, (Label{1, 2}));
    EXPECT_EQ(a[1].label, (Label{1, 7}));
    EXPECT_EQ(a[2].label, (Label{3, 1}));
    const auto b = detect_and_estimate(state, 0.5);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].state, b[i].state);
}

TEST(EstimateCsv, RowFormat) {
    std::ostringstream os;
    write_estimate_header(os);
    write_estimate_rows(os, 12, {{Label{3, 4}, make_state(1.5, -2, 0.25, 0), 0.75}});
    EXPECT_EQ(os.str(),
              "k,label_birth,label_index,x1,x2,v1,v2,existence\n"
              "12,3,4,1.500000,-2.000000,0.250000,0.000000,0.750000\n");
}

}  // namespace
}  // namespace lmbp
