#pragma once

#include "lmbp/config.hpp"
#include "lmbp/estimator.hpp"
#include "lmbp/simulator.hpp"

#include <cstdint>
#include <ostream>
#include <vector>

namespace lmbp {

/// Derives the seed of an independent stream from a master seed.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Outcome of one Monte-Carlo run.
struct RunResult {
    GroundTruth truth;
    std::vector<MeasurementFrame> frames;
    std::vector<std::vector<TrackEstimate>> estimates;  // per step
    std::vector<double> ospa;                           // per step
    std::vector<std::size_t> track_count;               // Bernoulli components per step
    double filter_seconds = 0.0;                        // wall time inside the filter
    /// Frames on which a kept label neither existed before nor was born then,
    /// or a label reappeared after being dropped.
    std::size_t continuity_violations = 0;

    /// First step with at least one detected track, or -1.
    [[nodiscard]] int first_detection_step() const;
};

/// Runs run `run_index` of the experiment: simulation, filtering, estimation
/// and OSPA for every step.
[[nodiscard]] RunResult simulate_run(const RunConfig& config, std::size_t run_index);

struct ExperimentSummary {
    std::vector<double> mospa;
    std::vector<double> mean_track_count;
    std::vector<double> mean_estimate_count;
    double mean_step_seconds = 0.0;
    double mean_tracks = 0.0;
    std::size_t continuity_violations = 0;
    double total_seconds = 0.0;
};

/// Executes every run and writes to config.out:
///   mospa.csv (k,mospa), tracks.csv (k,mean_tracks,mean_estimates),
///   run_NNNN/{truth,frames,estimates}.csv when per-run outputs are on,
///   summary.txt (parameters and timing; not byte-stable).
/// On failure, files created by this call are removed and the error rethrown.
ExperimentSummary run_experiment(const RunConfig& config, std::ostream* progress = nullptr);

}  // namespace lmbp
