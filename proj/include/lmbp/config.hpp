#pragma once

#include "lmbp/metrics.hpp"
#include "lmbp/simulator.hpp"
#include "lmbp/updater.hpp"

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>

namespace lmbp {

/// Everything one Monte-Carlo experiment needs.
struct RunConfig {
    ScenarioConfig scenario;
    FilterConfig filter;
    OspaParams ospa;
    int mc_runs = 1;
    std::uint64_t seed = 1;
    std::filesystem::path out = "out";
    int threads = 1;
    /// Write truth, frames and estimates for every run.
    bool per_run_outputs = true;

    void validate() const;
};

/// Config errors carry the offending field path, e.g. "filter.gamma_tr".
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses `[section]` headers followed by `key = value` lines; `section.key =
/// value` works anywhere. `#` starts a comment. Selecting `scenario.style =
/// ts2` switches the defaults of unset fields to the TS2 values.
[[nodiscard]] RunConfig parse_run_config(std::istream& is, const std::string& source = "<config>");
[[nodiscard]] RunConfig load_run_config(const std::filesystem::path& path);

/// Human-readable `key = value` dump of the parameters that shape results.
[[nodiscard]] std::string describe(const RunConfig& config);

}  // namespace lmbp
