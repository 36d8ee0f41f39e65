#include "lmbp/config.hpp"

#include <charconv>
#include <limits>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

namespace lmbp {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

struct Entry {
    std::string value;
    int line = 0;
};

class Reader {
public:
    Reader(std::string source, std::map<std::string, Entry> entries)
        : source_(std::move(source)), entries_(std::move(entries)) {}

    template <typename T, typename Parse>
    void read(const std::string& key, T& target, Parse parse) {
        const auto it = entries_.find(key);
        if (it == entries_.end()) return;
        try {
            target = parse(it->second.value);
        } catch (const std::exception& e) {
            throw ConfigError(fmt::format("{}:{}: {}: {}", source_, it->second.line, key, e.what()));
        }
        entries_.erase(it);
    }

    [[nodiscard]] bool has(const std::string& key) const { return entries_.contains(key); }

    void reject_leftovers() const {
        if (entries_.empty()) return;
        const auto& [key, entry] = *entries_.begin();
        throw ConfigError(fmt::format("{}:{}: {}: unknown field", source_, entry.line, key));
    }

private:
    std::string source_;
    std::map<std::string, Entry> entries_;
};

double to_double(const std::string& s) {
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw std::invalid_argument("expected a number, got '" + s + "'");
    }
    return v;
}

long long to_integer(const std::string& s) {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw std::invalid_argument("expected an integer, got '" + s + "'");
    }
    return v;
}

int to_int(const std::string& s) { return static_cast<int>(to_integer(s)); }

std::size_t to_count(const std::string& s) {
    const long long v = to_integer(s);
    if (v < 0) throw std::invalid_argument("expected a nonnegative integer, got '" + s + "'");
    return static_cast<std::size_t>(v);
}

std::uint64_t to_seed(const std::string& s) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw std::invalid_argument("expected an unsigned integer, got '" + s + "'");
    }
    return v;
}

bool to_bool(const std::string& s) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw std::invalid_argument("expected true or false, got '" + s + "'");
}

void apply_ts2_defaults(RunConfig& config) {
    auto& sc = config.scenario;
    sc.style = ScenarioStyle::ts2;
    sc.object_count = 20;
    sc.appear_min = 1;
    sc.appear_max = 100;
    sc.disappear_after = 140;
    sc.total_steps = 250;
    sc.sensor.pd_max = 0.5;
    sc.clutter.mean_count = 150.0;
}

}  // namespace

void RunConfig::validate() const {
    auto wrap = [](const char* section, const std::function<void()>& check) {
        try {
            check();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(fmt::format("{}: {}", section, e.what()));
        }
    };
    wrap("scenario", [&] { scenario.validate(); });
    wrap("filter", [&] { filter.validate(); });
    wrap("ospa", [&] { ospa.validate(); });
    if (mc_runs < 1) throw ConfigError("run.mc_runs: must be at least 1");
    if (threads < 1) throw ConfigError("run.threads: must be at least 1");
}

RunConfig parse_run_config(std::istream& is, const std::string& source) {
    std::map<std::string, Entry> entries;
    std::string section;
    std::string raw;
    int line_no = 0;
    while (std::getline(is, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError(fmt::format("{}:{}: malformed section header", source, line_no));
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(fmt::format("{}:{}: expected key = value", source, line_no));
        }
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(fmt::format("{}:{}: empty key", source, line_no));
        if (key.find('.') == std::string::npos) {
            if (section.empty()) {
                throw ConfigError(fmt::format("{}:{}: {}: key outside any section", source, line_no, key));
            }
            key = section + "." + key;
        }
        if (entries.contains(key)) {
            throw ConfigError(fmt::format("{}:{}: {}: duplicate field", source, line_no, key));
        }
        entries[key] = {value, line_no};
    }

    RunConfig config;
    Reader reader(source, std::move(entries));
    ScenarioStyle style = ScenarioStyle::ts1;
    reader.read("scenario.style", style, parse_scenario_style);
    if (style == ScenarioStyle::ts2) apply_ts2_defaults(config);

    auto& sc = config.scenario;
    reader.read("scenario.object_count", sc.object_count, to_int);
    reader.read("scenario.appear_min", sc.appear_min, to_int);
    reader.read("scenario.appear_max", sc.appear_max, to_int);
    reader.read("scenario.disappear_after", sc.disappear_after, to_int);
    reader.read("scenario.total_steps", sc.total_steps, to_int);
    reader.read("scenario.rendezvous", sc.rendezvous, to_int);
    reader.read("scenario.rendezvous_spread", sc.rendezvous_spread, to_double);
    reader.read("scenario.max_distance", sc.ts2_max_distance, to_double);
    reader.read("scenario.max_speed", sc.ts2_max_speed, to_double);

    double sigma_u = 0.01;
    double p_survival = 0.99;
    reader.read("motion.sigma_u", sigma_u, to_double);
    reader.read("motion.p_survival", p_survival, to_double);

    auto& sensor = sc.sensor;
    reader.read("sensor.x", sensor.position[0], to_double);
    reader.read("sensor.y", sensor.position[1], to_double);
    reader.read("sensor.max_range", sensor.max_range, to_double);
    reader.read("sensor.sigma_range", sensor.sigma_range, to_double);
    double sigma_bearing_deg = sensor.sigma_bearing * 180.0 / std::numbers::pi;
    reader.read("sensor.sigma_bearing_deg", sigma_bearing_deg, to_double);
    sensor.sigma_bearing = sigma_bearing_deg * std::numbers::pi / 180.0;
    reader.read("sensor.pd_max", sensor.pd_max, to_double);
    reader.read("sensor.pd_scale", sensor.pd_scale, to_double);

    reader.read("clutter.mean_count", sc.clutter.mean_count, to_double);
    sc.clutter.max_range = sensor.max_range;

    auto& filter = config.filter;
    reader.read("birth.mean_births", filter.birth.mean_births, to_double);
    reader.read("birth.velocity_sigma", filter.birth.velocity_sigma, to_double);
    reader.read("birth.initial_phd_mass", filter.initial_phd_mass, to_double);
    sc.velocity_sigma = filter.birth.velocity_sigma;

    auto& th = filter.thresholds;
    reader.read("filter.gamma_c", th.gamma_c, to_double);
    reader.read("filter.gamma_tr", th.gamma_tr, to_double);
    reader.read("filter.gamma_leg", th.gamma_leg, to_double);
    reader.read("filter.gamma_d", th.gamma_d, to_double);
    reader.read("filter.track_particles", filter.track_particles, to_count);
    reader.read("filter.phd_particles", filter.phd_particles, to_count);
    reader.read("filter.birth_particles", filter.birth.particle_budget, to_count);
    reader.read("filter.bp_iterations", filter.bp_iterations, to_int);
    reader.read("filter.marginals", filter.marginals, parse_marginal_method);

    reader.read("ospa.cutoff", config.ospa.cutoff, to_double);
    reader.read("ospa.order", config.ospa.order, to_double);

    reader.read("run.mc_runs", config.mc_runs, to_int);
    reader.read("run.seed", config.seed, to_seed);
    reader.read("run.out", config.out, [](const std::string& s) { return std::filesystem::path(s); });
    reader.read("run.threads", config.threads, to_int);
    reader.read("run.per_run_outputs", config.per_run_outputs, to_bool);
    reader.reject_leftovers();

    try {
        sc.motion = make_ncv_motion(sigma_u, 1.0);
        filter.motion = make_ncv_motion(sigma_u, p_survival);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(fmt::format("motion: {}", e.what()));
    }
    filter.sensor = sensor;
    filter.clutter = sc.clutter;
    config.validate();
    return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
    return parse_run_config(in, path.string());
}

std::string describe(const RunConfig& config) {
    const auto& sc = config.scenario;
    const auto& f = config.filter;
    const auto& th = f.thresholds;
    std::ostringstream os;
    os << fmt::format("scenario.style = {}\n", to_string(sc.style));
    os << fmt::format("scenario.object_count = {}\n", sc.object_count);
    os << fmt::format("scenario.appear_window = [{}, {}]\n", sc.appear_min, sc.appear_max);
    os << fmt::format("scenario.disappear_after = {}\n", sc.disappear_after);
    os << fmt::format("scenario.total_steps = {}\n", sc.total_steps);
    if (sc.style == ScenarioStyle::ts2) os << fmt::format("scenario.rendezvous = {}\n", sc.rendezvous);
    os << fmt::format("motion.sigma_u = {}\n", f.motion.sigma_u);
    os << fmt::format("motion.p_survival = {}\n", f.motion.p_survival);
    os << fmt::format("sensor.pd_max = {}\n", f.sensor.pd_max);
    os << fmt::format("sensor.pd_scale = {}\n", f.sensor.pd_scale);
    os << fmt::format("clutter.mean_count = {}\n", f.clutter.mean_count);
    os << fmt::format("birth.mean_births = {}\n", f.birth.mean_births);
    os << fmt::format("filter.gamma_c = {}\n", th.gamma_c);
    os << fmt::format("filter.gamma_tr = {}\n", th.gamma_tr);
    os << fmt::format("filter.gamma_leg = {}\n", th.gamma_leg);
    os << fmt::format("filter.gamma_d = {}\n", th.gamma_d);
    os << fmt::format("filter.track_particles = {}\n", f.track_particles);
    os << fmt::format("filter.phd_particles = {}\n", f.phd_particles);
    os << fmt::format("filter.birth_particles = {}\n", f.birth.particle_budget);
    os << fmt::format("filter.bp_iterations = {}\n", f.bp_iterations);
    os << fmt::format("filter.marginals = {}\n", to_string(f.marginals));
    os << fmt::format("ospa.cutoff = {}\n", config.ospa.cutoff);
    os << fmt::format("ospa.order = {}\n", config.ospa.order);
    os << fmt::format("run.mc_runs = {}\n", config.mc_runs);
    os << fmt::format("run.seed = {}\n", config.seed);
    return os.str();
}

}  // namespace lmbp
