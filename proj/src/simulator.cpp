#include "lmbp/simulator.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace lmbp {

namespace {

/// x_{k-1} = A^{-1} (x_k - W u): the NCV model run backwards in time.
State reverse_transition_sample(const MotionModel& model, const State& state, Rng& rng) {
    State shifted = state;
    if (model.sigma_u > 0.0) {
        std::normal_distribution<double> noise(0.0, model.sigma_u);
        const Eigen::Vector2d u(noise(rng), noise(rng));
        shifted -= model.noise_input * u;
    }
    return model.transition.inverse() * shifted;
}

ObjectTrajectory ts1_object(const ScenarioConfig& config, Rng& rng) {
    std::uniform_int_distribution<int> birth_step(config.appear_min, config.appear_max);
    ObjectTrajectory obj;
    obj.birth = birth_step(rng);
    obj.death = std::min(config.disappear_after, config.total_steps);
    ParticleSet start = sample_uniform_roi(config.sensor, config.velocity_sigma, 1, 1.0, rng);
    State x = start[0].state;
    for (int k = obj.birth; k <= obj.death; ++k) {
        if (k > obj.birth) x = transition_sample(config.motion, x, rng);
        obj.states.push_back(x);
    }
    return obj;
}

ObjectTrajectory ts2_object(const ScenarioConfig& config, Rng& rng) {
    std::uniform_int_distribution<int> birth_step(config.appear_min, config.appear_max);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    ObjectTrajectory obj;
    obj.birth = birth_step(rng);
    obj.death = std::min(config.disappear_after, config.total_steps);

    // Meeting state: a point near the origin, heading inward from direction phi.
    const double radius = config.rendezvous_spread * std::sqrt(unit(rng));
    const double offset_angle = angle(rng);
    const double phi = angle(rng);
    const int lead = std::max(1, config.rendezvous - obj.birth);
    const double speed = std::min(config.ts2_max_speed, config.ts2_max_distance / lead);
    State meet;
    meet << radius * std::cos(offset_angle), radius * std::sin(offset_angle),
        -speed * std::cos(phi), -speed * std::sin(phi);

    const int first = std::min(obj.birth, config.rendezvous);
    const int last = std::max(obj.death, config.rendezvous);
    std::vector<State> path(static_cast<std::size_t>(last - first + 1));
    const auto at = [&](int k) -> State& { return path[static_cast<std::size_t>(k - first)]; };
    at(config.rendezvous) = meet;
    for (int k = config.rendezvous - 1; k >= first; --k) {
        at(k) = reverse_transition_sample(config.motion, at(k + 1), rng);
    }
    for (int k = config.rendezvous + 1; k <= last; ++k) {
        at(k) = transition_sample(config.motion, at(k - 1), rng);
    }
    for (int k = obj.birth; k <= obj.death; ++k) obj.states.push_back(at(k));
    return obj;
}

}  // namespace

ScenarioStyle parse_scenario_style(const std::string& name) {
    if (name == "ts1") return ScenarioStyle::ts1;
    if (name == "ts2") return ScenarioStyle::ts2;
    throw std::invalid_argument("unknown scenario style '" + name + "' (expected ts1 or ts2)");
}

std::string to_string(ScenarioStyle style) {
    return style == ScenarioStyle::ts1 ? "ts1" : "ts2";
}

void ScenarioConfig::validate() const {
    if (object_count < 0) throw std::invalid_argument("scenario: object_count must be nonnegative");
    if (total_steps < 1) throw std::invalid_argument("scenario: total_steps must be positive");
    if (appear_min < 1 || appear_max < appear_min || appear_max > total_steps) {
        throw std::invalid_argument("scenario: appear window must lie within [1, total_steps]");
    }
    if (disappear_after < appear_max) {
        throw std::invalid_argument("scenario: disappear_after must not precede the appear window end");
    }
    if (style == ScenarioStyle::ts2) {
        if (rendezvous < 1) throw std::invalid_argument("scenario: rendezvous must be positive");
        if (!(ts2_max_speed > 0.0) || !(ts2_max_distance > 0.0) || rendezvous_spread < 0.0) {
            throw std::invalid_argument("scenario: ts2 geometry parameters must be positive");
        }
    }
    if (velocity_sigma < 0.0) throw std::invalid_argument("scenario: velocity_sigma must be nonnegative");
    sensor.validate();
}

std::vector<State> GroundTruth::alive_states(int k) const {
    std::vector<State> out;
    for (const auto& obj : objects) {
        if (obj.alive(k)) out.push_back(obj.at(k));
    }
    return out;
}

GroundTruth generate_truth(const ScenarioConfig& config, Rng& rng) {
    config.validate();
    GroundTruth truth;
    truth.objects.reserve(static_cast<std::size_t>(config.object_count));
    for (int i = 0; i < config.object_count; ++i) {
        truth.objects.push_back(config.style == ScenarioStyle::ts1 ? ts1_object(config, rng)
                                                                   : ts2_object(config, rng));
    }
    return truth;
}

MeasurementFrame generate_frame(std::span<const State> states, const SensorModel& sensor,
                                const ClutterModel& clutter, Rng& rng) {
    MeasurementFrame frame;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (const auto& x : states) {
        if (sensor.range_to(x) > sensor.max_range) continue;
        if (unit(rng) < detection_prob(sensor, x)) {
            frame.push_back(sample_measurement(sensor, x, rng));
        }
    }
    std::poisson_distribution<int> clutter_count(clutter.mean_count);
    const int n = clutter.mean_count > 0.0 ? clutter_count(rng) : 0;
    std::uniform_real_distribution<double> range(0.0, clutter.max_range);
    std::uniform_real_distribution<double> bearing(-std::numbers::pi, std::numbers::pi);
    for (int i = 0; i < n; ++i) {
        const double r = range(rng);
        frame.push_back({r, bearing(rng)});
    }
    std::shuffle(frame.begin(), frame.end(), rng);
    return frame;
}

void write_truth_csv(std::ostream& os, const GroundTruth& truth) {
    os << "object_id,k,x1,x2,v1,v2\n";
    for (std::size_t id = 0; id < truth.objects.size(); ++id) {
        const auto& obj = truth.objects[id];
        for (int k = obj.birth; k <= obj.death; ++k) {
            const State& x = obj.at(k);
            os << fmt::format("{},{},{:.6f},{:.6f},{:.6f},{:.6f}\n", id, k, x[0], x[1], x[2], x[3]);
        }
    }
}

void write_frames_csv(std::ostream& os, std::span<const MeasurementFrame> frames) {
    os << "k,range,bearing\n";
    for (std::size_t i = 0; i < frames.size(); ++i) {
        for (const auto& z : frames[i]) {
            os << fmt::format("{},{:.6f},{:.8f}\n", i + 1, z.range, z.bearing);
        }
    }
}

}  // namespace lmbp
