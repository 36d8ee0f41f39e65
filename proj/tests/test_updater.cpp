#include "lmbp/updater.hpp"

#include "test_helpers.hpp"

#include <gtest/gtest.h>

#include <limits>
#include <set>

namespace lmbp {
namespace {

using testing::make_state;

NewComponent component_with_existence(double r) {
    NewComponent comp;
    comp.existence = r;
    comp.beta = 1.0;
    comp.clutter = 1.0 - r;
    comp.pdf.push_back(make_state(0, 0), 1.0);
    return comp;
}

ParticleSet point_pdf(const State& x) {
    ParticleSet pset;
    pset.push_back(x, 1.0);
    return pset;
}

TEST(SelectTransfers, ThresholdSplit) {
    const std::vector<NewComponent> comps{component_with_existence(0.5), component_with_existence(0.001)};
    const std::vector<std::size_t> candidates{0, 1};
    const TransferSplit split = select_transfers(candidates, comps, 0.01, 9);
    ASSERT_EQ(split.labels.size(), 1u);
    EXPECT_EQ(split.labels[0], (Label{9, 1}));
    EXPECT_EQ(split.transferred, (std::vector<std::size_t>{0}));
    EXPECT_EQ(split.remaining, (std::vector<std::size_t>{1}));
}

TEST(SelectTransfers, NothingAboveThreshold) {
    const std::vector<NewComponent> comps{component_with_existence(0.001), component_with_existence(0.002)};
    const std::vector<std::size_t> candidates{0, 1};
    EXPECT_TRUE(select_transfers(candidates, comps, 0.01, 1).labels.empty());
}

TEST(SelectTransfers, BoundaryIsInclusive) {
    const std::vector<NewComponent> comps{component_with_existence(1e-2)};
    const std::vector<std::size_t> candidates{0};
    EXPECT_EQ(select_transfers(candidates, comps, 1e-2, 1).labels.size(), 1u);
}

struct LegacyFixture {
    MissHypothesis miss;
    std::vector<DetectionHypothesis> detections;

    LegacyFixture() {
        miss.beta = 1.0;
        miss.existence = 0.2;
        miss.pdf = point_pdf(make_state(0, 0));
        DetectionHypothesis det;
        det.beta = 1.0;
        det.pdf = point_pdf(make_state(10, 0));
        detections.push_back(det);
    }
};

TEST(UpdateLegacyTrack, PureMiss) {
    LegacyFixture f;
    Rng rng(1);
    const std::vector<double> pmf{1.0, 0.0};
    const auto track = update_legacy_track(Label{1, 1}, pmf, f.miss, f.detections, 0, rng);
    EXPECT_DOUBLE_EQ(track.existence, 0.2);
    ASSERT_EQ(track.pdf.size(), 1u);
    EXPECT_EQ(track.pdf[0].state, make_state(0, 0));
}

TEST(UpdateLegacyTrack, PureDetection) {
    LegacyFixture f;
    Rng rng(1);
    const std::vector<double> pmf{0.0, 1.0};
    const auto track = update_legacy_track(Label{1, 1}, pmf, f.miss, f.detections, 0, rng);
    EXPECT_DOUBLE_EQ(track.existence, 1.0);
    ASSERT_EQ(track.pdf.size(), 1u);
    EXPECT_EQ(track.pdf[0].state, make_state(10, 0));
}

TEST(UpdateLegacyTrack, EvenMixture) {
    LegacyFixture f;
    Rng rng(1);
    const std::vector<double> pmf{0.5, 0.5};
    const auto track = update_legacy_track(Label{1, 1}, pmf, f.miss, f.detections, 0, rng);
    EXPECT_NEAR(track.existence, 0.6, 1e-12);
    ASSERT_EQ(track.pdf.size(), 2u);
    EXPECT_NEAR(track.pdf[0].weight, 1.0 / 6.0, 1e-12);
    EXPECT_NEAR(track.pdf[1].weight, 5.0 / 6.0, 1e-12);

    const auto resampled = update_legacy_track(Label{1, 1}, pmf, f.miss, f.detections, 1000, rng);
    EXPECT_EQ(resampled.pdf.size(), 1000u);
    EXPECT_TRUE(resampled.pdf.is_normalized(1e-9));
}

TEST(UpdateLegacyTrack, ZeroExistence) {
    LegacyFixture f;
    f.miss.existence = 0.0;
    Rng rng(1);
    const std::vector<double> pmf{1.0, 0.0};
    const auto track = update_legacy_track(Label{1, 1}, pmf, f.miss, f.detections, 1000, rng);
    EXPECT_EQ(track.existence, 0.0);
    EXPECT_TRUE(track.pdf.empty());
}

TEST(UpdateTransferredTrack, ExistenceIsProduct) {
    Rng rng(2);
    const NewComponent comp = component_with_existence(0.8);
    EXPECT_DOUBLE_EQ(update_transferred_track(Label{3, 1}, 1.0, comp, 10, rng).existence, 0.8);
    EXPECT_DOUBLE_EQ(update_transferred_track(Label{3, 1}, 0.0, comp, 10, rng).existence, 0.0);
    const auto half = update_transferred_track(Label{3, 1}, 0.5, comp, 10, rng);
    EXPECT_DOUBLE_EQ(half.existence, 0.4);
    EXPECT_EQ(half.pdf.size(), 10u);
    EXPECT_EQ(half.label, (Label{3, 1}));
}

TEST(SplitByRetention, Semantics) {
    std::vector<UpdatedTrack> tracks{
        {{Label{1, 1}, 0.005, {}}, false},
        {{Label{1, 2}, 0.005, {}}, true},
        {{Label{1, 3}, 0.01, {}}, false},
        {{Label{1, 4}, 0.9, {}}, false},
    };
    const RetentionSplit split = split_by_retention(tracks, 0.01);
    ASSERT_EQ(split.kept.size(), 3u);
    EXPECT_EQ(split.kept[0].label, (Label{1, 2}));
    EXPECT_EQ(split.kept[1].label, (Label{1, 3}));
    ASSERT_EQ(split.recycled.size(), 1u);
    EXPECT_EQ(split.recycled[0].label, (Label{1, 1}));
}

PoissonPhd phd_of_mass(double mass, std::size_t n, Rng& rng) {
    PoissonPhd phd;
    phd.particles = testing::cloud(make_state(0, 50), n, 30.0, rng);
    phd.particles.scale_to(mass);
    return phd;
}

TEST(UpdatePhd, UndetectedTermOnly) {
    Rng rng(3);
    const PoissonPhd phd = phd_of_mass(0.37, 500, rng);
    const auto blind = update_phd({}, {}, phd, testing::constant_pd_sensor(0.0), 5000, rng);
    EXPECT_NEAR(blind.mean(), 0.37, 1e-12);
    const auto full = update_phd({}, {}, phd, testing::constant_pd_sensor(1.0), 5000, rng);
    EXPECT_EQ(full.mean(), 0.0);
    EXPECT_TRUE(full.particles.empty());
}

TEST(UpdatePhd, ThreeTermAdditivity) {
    Rng rng(4);
    std::vector<BernoulliTrack> recycled{{Label{1, 1}, 0.3, testing::cloud(make_state(5, 5), 100, 1.0, rng)}};
    std::vector<NewComponent> comps{component_with_existence(0.2)};
    const PoissonPhd phd = phd_of_mass(0.2, 400, rng);
    const auto out = update_phd(recycled, comps, phd, testing::constant_pd_sensor(0.5), 5000, rng);
    EXPECT_NEAR(out.mean(), 0.6, 1e-12);
    EXPECT_EQ(out.particles.size(), 5000u);
}

TEST(UpdatePhd, ZeroExistenceRecycledTracksContributeNothing) {
    Rng rng(5);
    std::vector<BernoulliTrack> recycled{{Label{1, 1}, 0.0, {}}};
    const auto out = update_phd(recycled, {}, PoissonPhd{}, testing::constant_pd_sensor(0.5), 100, rng);
    EXPECT_TRUE(out.particles.empty());
}

FilterConfig quiet_config() {
    FilterConfig config;
    config.motion = make_ncv_motion(0.01, 1.0);
    config.sensor = testing::constant_pd_sensor(0.5);
    config.clutter = {5.0, 300.0};
    config.birth.particle_budget = 500;
    config.phd_particles = 500;
    config.track_particles = 200;
    return config;
}

TEST(LmbpStep, EmptyFrameClosedFormMissUpdate) {
    FilterConfig config = quiet_config();
    Rng rng(6);
    FilterState state;
    state.time = 4;
    state.tracks.push_back({Label{2, 1}, 0.8, testing::cloud(make_state(0, 50), 200, 2.0, rng)});
    const FilterState next = lmbp_step(state, {}, config, rng);
    ASSERT_EQ(next.tracks.size(), 1u);
    EXPECT_EQ(next.time, 5);
    EXPECT_NEAR(next.tracks[0].existence, 2.0 / 3.0, 1e-12);
}

TEST(LmbpStep, MeasurementWithoutEvidenceIsNotTransferred) {
    FilterConfig config = quiet_config();
    config.birth.mean_births = 0.0;
    Rng rng(7);
    FilterState state;
    const MeasurementFrame frame{{100.0, 0.5}};
    StepDiagnostics diag;
    const FilterState next = lmbp_step(state, frame, config, rng, &diag);
    EXPECT_TRUE(next.tracks.empty());
    EXPECT_EQ(diag.transfers, 0u);
    EXPECT_EQ(next.phd.mean(), 0.0);
}

TEST(LmbpStep, FirstStepCreatesTracksOnlyByTransfer) {
    FilterConfig config = quiet_config();
    config.clutter.mean_count = 0.5;
    config.initial_phd_mass = 0.01;
    Rng rng(8);
    FilterState state = initial_state(config, rng);
    EXPECT_TRUE(state.tracks.empty());
    EXPECT_NEAR(state.phd.mean(), 0.01, 1e-12);
    const State object = make_state(20, 40);
    const MeasurementFrame frame{testing::exact_measurement(config.sensor, object)};
    const FilterState next = lmbp_step(state, frame, config, rng);
    for (const auto& t : next.tracks) EXPECT_EQ(t.label.birth_time, 1);
}

/// A few objects and clutter measurements driven through several steps; the
/// result is a realistic mid-run state.
FilterState warm_state(const FilterConfig& config, Rng& rng, int steps, std::vector<State>& objects) {
    FilterState state = initial_state(config, rng);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int k = 0; k < steps; ++k) {
        MeasurementFrame frame;
        for (auto& x : objects) {
            x = transition_sample(config.motion, x, rng);
            if (unit(rng) < detection_prob(config.sensor, x)) frame.push_back(sample_measurement(config.sensor, x, rng));
        }
        std::poisson_distribution<int> clutter(config.clutter.mean_count);
        const int n = clutter(rng);
        for (int i = 0; i < n; ++i) frame.push_back({300.0 * unit(rng), 2 * std::numbers::pi * unit(rng) - std::numbers::pi});
        state = lmbp_step(state, frame, config, rng);
    }
    return state;
}

TEST(LmbpStep, LabelContinuityAndMeasurementAccounting) {
    FilterConfig config = quiet_config();
    config.sensor = SensorModel{};
    config.sensor.pd_max = 0.9;
    Rng rng(9);
    std::vector<State> objects{make_state(0, 50, 0.5, 0), make_state(-60, 100, 0, -0.5), make_state(80, 0, 0, 0)};
    FilterState state = initial_state(config, rng);
    std::set<Label> ever;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int k = 1; k <= 15; ++k) {
        MeasurementFrame frame;
        for (auto& x : objects) {
            x = transition_sample(config.motion, x, rng);
            if (unit(rng) < detection_prob(config.sensor, x)) frame.push_back(sample_measurement(config.sensor, x, rng));
        }
        for (int i = 0; i < 5; ++i) frame.push_back({300.0 * unit(rng), 2 * std::numbers::pi * unit(rng) - std::numbers::pi});
        std::set<Label> previous;
        for (const auto& t : state.tracks) previous.insert(t.label);
        state = lmbp_step(state, frame, config, rng);
        check_state_invariants(state);
        for (const auto& t : state.tracks) {
            if (previous.contains(t.label)) continue;
            EXPECT_EQ(t.label.birth_time, k);
            EXPECT_GE(t.label.index, 1);
            EXPECT_LE(t.label.index, static_cast<int>(frame.size()));
            EXPECT_FALSE(ever.contains(t.label));
        }
        for (const auto& t : state.tracks) {
            ever.insert(t.label);
            EXPECT_TRUE(t.pdf.empty() || t.pdf.is_normalized(1e-9));
            EXPECT_GE(t.existence, 0.0);
            EXPECT_LE(t.existence, 1.0);
        }
    }
    EXPECT_FALSE(state.tracks.empty());
}

TEST(LmbpStep, KeptCountMonotoneInLegacyThreshold) {
    FilterConfig config = quiet_config();
    config.sensor = SensorModel{};
    config.clutter.mean_count = 10.0;
    Rng setup(10);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<State> objects{make_state(10.0 * trial, 30, 0.3, 0), make_state(-50, -20.0 * trial, 0, 0.3)};
        const FilterState state = warm_state(config, setup, 6, objects);
        const MeasurementFrame frame{testing::exact_measurement(config.sensor, objects[0]), {150.0, 1.0}};
        std::size_t previous = std::numeric_limits<std::size_t>::max();
        for (double gamma : {1e-4, 1e-3, 1e-2, 0.05, 0.2, 0.5}) {
            config.thresholds.gamma_leg = gamma;
            Rng rng(100 + trial);
            const std::size_t kept = lmbp_step(state, frame, config, rng).tracks.size();
            EXPECT_LE(kept, previous);
            previous = kept;
        }
    }
}

TEST(LmbpStep, ExactAndBpAgreeOnSmallClusters) {
    FilterConfig config = quiet_config();
    config.sensor = SensorModel{};
    Rng setup(11);
    std::vector<State> objects{make_state(0, 50, 0.5, 0), make_state(5, 52, 0.5, 0)};
    const FilterState state = warm_state(config, setup, 8, objects);
    MeasurementFrame frame;
    for (const auto& x : objects) frame.push_back(testing::exact_measurement(config.sensor, x));

    config.marginals = MarginalMethod::exact;
    Rng a(12);
    StepDiagnostics diag;
    const FilterState exact = lmbp_step(state, frame, config, a, &diag);
    config.marginals = MarginalMethod::bp;
    Rng b(12);
    const FilterState bp = lmbp_step(state, frame, config, b);
    EXPECT_EQ(diag.exact_clusters, diag.clusters);
    ASSERT_EQ(exact.tracks.size(), bp.tracks.size());
    for (std::size_t i = 0; i < exact.tracks.size(); ++i) {
        EXPECT_EQ(exact.tracks[i].label, bp.tracks[i].label);
        EXPECT_NEAR(exact.tracks[i].existence, bp.tracks[i].existence, 0.05);
    }
}

TEST(FilterConfig, ValidateRejectsBadValues) {
    FilterConfig config;
    EXPECT_NO_THROW(config.validate());
    config.thresholds.gamma_tr = 0.0;
    EXPECT_THROW(config.validate(), std::invalid_argument);
    config = FilterConfig{};
    config.bp_iterations = 0;
    EXPECT_THROW(config.validate(), std::invalid_argument);
    EXPECT_THROW((void)parse_marginal_method("gibbs"), std::invalid_argument);
}

}  // namespace
}  // namespace lmbp
