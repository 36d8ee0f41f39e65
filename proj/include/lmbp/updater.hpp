#pragma once

#include "lmbp/association.hpp"
#include "lmbp/models.hpp"
#include "lmbp/types.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace lmbp {

/// Threshold set of the filter. gamma_tr and gamma_leg are inclusive,
/// gamma_d is strict.
struct Thresholds {
    double gamma_c = 1e-10;
    double gamma_tr = 1e-2;
    double gamma_leg = 1e-2;
    double gamma_d = 0.5;

    void validate() const;
};

enum class MarginalMethod { bp, exact };

[[nodiscard]] MarginalMethod parse_marginal_method(const std::string& name);
[[nodiscard]] std::string to_string(MarginalMethod method);

/// Models, thresholds and particle budgets for one filter instance.
struct FilterConfig {
    MotionModel motion = make_ncv_motion(0.01, 0.99);
    SensorModel sensor;
    ClutterModel clutter;
    BirthModel birth;
    Thresholds thresholds;
    std::size_t track_particles = 1000;
    std::size_t phd_particles = 5000;
    double initial_phd_mass = 0.01;
    int bp_iterations = 20;
    MarginalMethod marginals = MarginalMethod::bp;

    void validate() const;
};

struct TransferSplit {
    std::vector<Label> labels;               // (k, m + 1) for each transferred m
    std::vector<std::size_t> transferred;    // measurement indices, aligned with labels
    std::vector<std::size_t> remaining;
};

/// Splits `candidates` into measurements whose new component has existence
/// >= gamma_tr and the rest. `components` is indexed by measurement.
[[nodiscard]] TransferSplit select_transfers(std::span<const std::size_t> candidates,
                                             std::span<const NewComponent> components,
                                             double gamma_tr, int time);

/// Transfer label for measurement index `m` (0-based) at step `time`.
[[nodiscard]] inline Label transfer_label(int time, std::size_t m) {
    return Label{time, static_cast<int>(m) + 1};
}

/// Marginalized update of a legacy track. `pmf` is over {miss} followed by
/// the cluster's measurements, aligned with `detections`. A particle budget
/// of 0 skips the final resampling.
[[nodiscard]] BernoulliTrack update_legacy_track(const Label& label, std::span<const double> pmf,
                                                 const MissHypothesis& miss,
                                                 std::span<const DetectionHypothesis> detections,
                                                 std::size_t particle_budget, Rng& rng);

/// Update of a freshly transferred track: r = p(a=1) * rbar.
[[nodiscard]] BernoulliTrack update_transferred_track(const Label& label, double p_associated,
                                                      const NewComponent& component,
                                                      std::size_t particle_budget, Rng& rng);

struct UpdatedTrack {
    BernoulliTrack track;
    bool transferred_now = false;
};

struct RetentionSplit {
    std::vector<BernoulliTrack> kept;
    std::vector<BernoulliTrack> recycled;
};

/// Keeps tracks with r >= gamma_leg and every track transferred this step.
[[nodiscard]] RetentionSplit split_by_retention(std::vector<UpdatedTrack> tracks, double gamma_leg);

/// PHD update: union of recycled tracks (mass r), untransferred new
/// components (mass rbar) and the undetected predicted PHD, resampled to
/// `particle_budget` (0 skips resampling).
[[nodiscard]] PoissonPhd update_phd(std::span<const BernoulliTrack> recycled,
                                    std::span<const NewComponent> untransferred,
                                    const PoissonPhd& predicted, const SensorModel& sensor,
                                    std::size_t particle_budget, Rng& rng);

/// Counters describing one filter step.
struct StepDiagnostics {
    std::size_t clusters = 0;
    std::size_t largest_cluster_labels = 0;
    std::size_t exact_clusters = 0;
    std::size_t transfers = 0;
    std::size_t recycled = 0;
    std::size_t annihilated = 0;
};

/// Filter state at time 0: no tracks, PHD of mass `initial_phd_mass` spread
/// uniformly over the sensor disk.
[[nodiscard]] FilterState initial_state(const FilterConfig& config, Rng& rng);

/// One full prediction/update cycle. `frame` is the measurement set of step
/// state.time + 1.
[[nodiscard]] FilterState lmbp_step(const FilterState& state, const MeasurementFrame& frame,
                                    const FilterConfig& config, Rng& rng,
                                    StepDiagnostics* diagnostics = nullptr);

}  // namespace lmbp
