#include "lmbp/snapshot.hpp"

#include "test_helpers.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace lmbp {
namespace {

using testing::make_state;

FilterState sample_state() {
    FilterState state;
    state.time = 7;
    BernoulliTrack track{Label{3, 2}, 0.123456789012345678, {}};
    track.pdf.push_back(make_state(1.0 / 3.0, -2.5, 0.1, 0.2), 0.25);
    track.pdf.push_back(make_state(4, 5, 6, 7), 0.75);
    state.tracks.push_back(track);
    state.tracks.push_back({Label{5, 1}, 0.9, {}});
    state.tracks.back().pdf.push_back(make_state(0, 0), 1.0);
    state.phd.particles.push_back(make_state(10, 20, 0, 0), 1e-5);
    state.previous_frame = {{100.0, 0.5}, {250.25, -3.0}};
    return state;
}

TEST(Snapshot, RoundTripIsExact) {
    const FilterState state = sample_state();
    std::stringstream ss;
    write_snapshot(ss, state);
    const FilterState back = read_snapshot(ss);
    EXPECT_EQ(back.time, 7);
    ASSERT_EQ(back.tracks.size(), 2u);
    EXPECT_EQ(back.tracks[0].label, (Label{3, 2}));
    EXPECT_EQ(back.tracks[0].existence, state.tracks[0].existence);
    ASSERT_EQ(back.tracks[0].pdf.size(), 2u);
    EXPECT_EQ(back.tracks[0].pdf[0].state, state.tracks[0].pdf[0].state);
    EXPECT_EQ(back.tracks[0].pdf[1].weight, 0.75);
    ASSERT_EQ(back.phd.particles.size(), 1u);
    EXPECT_EQ(back.phd.particles[0].weight, 1e-5);
    ASSERT_EQ(back.previous_frame.size(), 2u);
    EXPECT_EQ(back.previous_frame[1].range, 250.25);
}

TEST(Snapshot, WithoutParticlesKeepsLabelsAndExistence) {
    std::stringstream ss;
    write_snapshot(ss, sample_state(), false);
    const FilterState back = read_snapshot(ss);
    ASSERT_EQ(back.tracks.size(), 2u);
    EXPECT_TRUE(back.tracks[0].pdf.empty());
    EXPECT_EQ(back.tracks[1].label, (Label{5, 1}));
    EXPECT_TRUE(back.phd.particles.empty());
}

TEST(Snapshot, MalformedInputReportsLine) {
    std::stringstream ss("time 3\ntracks 1\nnot-a-track\n");
    try {
        (void)read_snapshot(ss);
        FAIL() << "expected an error";
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
}

}  // namespace
}  // namespace lmbp
