#include "lmbp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include <fmt/format.h>

namespace lmbp {

namespace {

using Clock = std::chrono::steady_clock;

std::vector<Position> positions(const std::vector<State>& states) {
    std::vector<Position> out;
    out.reserve(states.size());
    for (const auto& x : states) out.emplace_back(x[0], x[1]);
    return out;
}

/// Creates files and directories and removes them again unless committed.
class OutputGuard {
public:
    explicit OutputGuard(std::filesystem::path root) : root_(std::move(root)) {
        std::filesystem::path existing = root_;
        std::vector<std::filesystem::path> missing;
        while (!existing.empty() && !std::filesystem::exists(existing)) {
            missing.push_back(existing);
            existing = existing.parent_path();
        }
        std::filesystem::create_directories(root_);
        created_.insert(created_.end(), missing.rbegin(), missing.rend());
    }

    OutputGuard(const OutputGuard&) = delete;
    OutputGuard& operator=(const OutputGuard&) = delete;

    ~OutputGuard() {
        if (committed_) return;
        std::error_code ec;
        for (auto it = created_.rbegin(); it != created_.rend(); ++it) {
            std::filesystem::remove_all(*it, ec);
        }
    }

    std::ofstream open(const std::filesystem::path& relative) {
        const auto path = root_ / relative;
        if (!std::filesystem::exists(path.parent_path())) {
            std::filesystem::create_directories(path.parent_path());
            created_.push_back(path.parent_path());
        }
        created_.push_back(path);
        std::ofstream os(path);
        if (!os) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
        return os;
    }

    void commit() { committed_ = true; }

private:
    std::filesystem::path root_;
    std::vector<std::filesystem::path> created_;
    bool committed_ = false;
};

void close_checked(std::ofstream& os, const std::string& what) {
    os.close();
    if (!os) throw std::runtime_error(fmt::format("failed writing '{}'", what));
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    // splitmix64 finalizer over a golden-ratio spaced counter.
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

int RunResult::first_detection_step() const {
    for (std::size_t k = 0; k < estimates.size(); ++k) {
        if (!estimates[k].empty()) return static_cast<int>(k) + 1;
    }
    return -1;
}

RunResult simulate_run(const RunConfig& config, std::size_t run_index) {
    Rng scenario_rng(derive_seed(config.seed, 2 * run_index));
    Rng filter_rng(derive_seed(config.seed, 2 * run_index + 1));
    const ScenarioConfig& sc = config.scenario;

    RunResult result;
    result.truth = generate_truth(sc, scenario_rng);
    const auto steps = static_cast<std::size_t>(sc.total_steps);
    result.frames.reserve(steps);
    for (int k = 1; k <= sc.total_steps; ++k) {
        const auto alive = result.truth.alive_states(k);
        result.frames.push_back(generate_frame(alive, sc.sensor, sc.clutter, scenario_rng));
    }

    result.estimates.reserve(steps);
    result.ospa.reserve(steps);
    result.track_count.reserve(steps);
    FilterState state = initial_state(config.filter, filter_rng);
    std::set<Label> ever_seen;
    std::set<Label> previous;
    for (int k = 1; k <= sc.total_steps; ++k) {
        const auto start = Clock::now();
        state = lmbp_step(state, result.frames[static_cast<std::size_t>(k - 1)], config.filter,
                          filter_rng);
        auto estimates = detect_and_estimate(state, config.filter.thresholds.gamma_d);
        result.filter_seconds += std::chrono::duration<double>(Clock::now() - start).count();

        std::set<Label> current;
        bool violated = false;
        for (const auto& track : state.tracks) {
            const bool persisted = previous.contains(track.label);
            const bool fresh = track.label.birth_time == k && !ever_seen.contains(track.label);
            if (!persisted && !fresh) violated = true;
            current.insert(track.label);
        }
        if (violated) ++result.continuity_violations;
        ever_seen.insert(current.begin(), current.end());
        previous = std::move(current);

        std::vector<State> truth_in_roi;
        for (const auto& x : result.truth.alive_states(k)) {
            if (sc.sensor.range_to(x) <= sc.sensor.max_range) truth_in_roi.push_back(x);
        }
        std::vector<State> estimated;
        for (const auto& e : estimates) estimated.push_back(e.state);
        result.ospa.push_back(ospa(positions(truth_in_roi), positions(estimated), config.ospa));
        result.track_count.push_back(state.tracks.size());
        result.estimates.push_back(std::move(estimates));
    }
    return result;
}

ExperimentSummary run_experiment(const RunConfig& config, std::ostream* progress) {
    config.validate();
    const auto wall_start = Clock::now();
    OutputGuard guard(config.out);
    const auto runs = static_cast<std::size_t>(config.mc_runs);
    const auto steps = static_cast<std::size_t>(config.scenario.total_steps);

    std::vector<std::vector<double>> ospa_runs(runs);
    std::vector<std::vector<std::size_t>> track_runs(runs);
    std::vector<std::vector<std::size_t>> estimate_runs(runs);
    std::vector<double> seconds(runs, 0.0);
    std::vector<std::size_t> violations(runs, 0);

    std::mutex io_mutex;
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::exception_ptr failure;
    auto worker = [&] {
        for (;;) {
            const std::size_t run = next.fetch_add(1);
            if (run >= runs) return;
            {
                std::lock_guard lock(io_mutex);
                if (failure) return;
            }
            try {
                RunResult result = simulate_run(config, run);
                ospa_runs[run] = std::move(result.ospa);
                track_runs[run] = std::move(result.track_count);
                estimate_runs[run].reserve(steps);
                for (const auto& e : result.estimates) estimate_runs[run].push_back(e.size());
                seconds[run] = result.filter_seconds;
                violations[run] = result.continuity_violations;

                std::lock_guard lock(io_mutex);
                if (config.per_run_outputs) {
                    const std::filesystem::path dir = fmt::format("run_{:04d}", run);
                    auto truth_os = guard.open(dir / "truth.csv");
                    write_truth_csv(truth_os, result.truth);
                    close_checked(truth_os, "truth.csv");
                    auto frames_os = guard.open(dir / "frames.csv");
                    write_frames_csv(frames_os, result.frames);
                    close_checked(frames_os, "frames.csv");
                    auto est_os = guard.open(dir / "estimates.csv");
                    write_estimate_header(est_os);
                    for (std::size_t k = 0; k < result.estimates.size(); ++k) {
                        write_estimate_rows(est_os, static_cast<int>(k + 1), result.estimates[k]);
                    }
                    close_checked(est_os, "estimates.csv");
                }
                const std::size_t finished = ++done;
                if (progress) {
                    *progress << fmt::format("run {}/{} done ({:.2f} ms/step)\n", finished, runs,
                                             1e3 * seconds[run] / static_cast<double>(steps));
                }
            } catch (...) {
                std::lock_guard lock(io_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };

    const auto thread_count = std::min<std::size_t>(static_cast<std::size_t>(config.threads), runs);
    if (thread_count <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < thread_count; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    ExperimentSummary summary;
    summary.mospa = mospa_curve(ospa_runs);
    summary.mean_track_count.assign(steps, 0.0);
    summary.mean_estimate_count.assign(steps, 0.0);
    double total_seconds = 0.0;
    for (std::size_t run = 0; run < runs; ++run) {
        for (std::size_t k = 0; k < steps; ++k) {
            summary.mean_track_count[k] += static_cast<double>(track_runs[run][k]) / static_cast<double>(runs);
            summary.mean_estimate_count[k] +=
                static_cast<double>(estimate_runs[run][k]) / static_cast<double>(runs);
        }
        total_seconds += seconds[run];
        summary.continuity_violations += violations[run];
    }
    summary.mean_step_seconds = total_seconds / static_cast<double>(runs * steps);
    for (double c : summary.mean_track_count) summary.mean_tracks += c / static_cast<double>(steps);

    auto mospa_os = guard.open("mospa.csv");
    mospa_os << "k,mospa\n";
    for (std::size_t k = 0; k < steps; ++k) mospa_os << fmt::format("{},{:.6f}\n", k + 1, summary.mospa[k]);
    close_checked(mospa_os, "mospa.csv");

    auto tracks_os = guard.open("tracks.csv");
    tracks_os << "k,mean_tracks,mean_estimates\n";
    for (std::size_t k = 0; k < steps; ++k) {
        tracks_os << fmt::format("{},{:.6f},{:.6f}\n", k + 1, summary.mean_track_count[k],
                                 summary.mean_estimate_count[k]);
    }
    close_checked(tracks_os, "tracks.csv");

    summary.total_seconds = std::chrono::duration<double>(Clock::now() - wall_start).count();
    auto summary_os = guard.open("summary.txt");
    summary_os << describe(config);
    summary_os << fmt::format("mean_step_ms = {:.3f}\n", 1e3 * summary.mean_step_seconds);
    summary_os << fmt::format("mean_track_count = {:.3f}\n", summary.mean_tracks);
    summary_os << fmt::format("continuity_violations = {}\n", summary.continuity_violations);
    summary_os << fmt::format("total_seconds = {:.3f}\n", summary.total_seconds);
    close_checked(summary_os, "summary.txt");

    guard.commit();
    return summary;
}

}  // namespace lmbp
