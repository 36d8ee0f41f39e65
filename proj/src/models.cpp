#include "lmbp/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lmbp {

namespace {

double gaussian_pair(double range_residual, double bearing_residual, double inv_var_range,
                     double inv_var_bearing, double peak) {
    const double q = range_residual * range_residual * inv_var_range +
                     bearing_residual * bearing_residual * inv_var_bearing;
    return peak * std::exp(-0.5 * q);
}

double likelihood_peak(const SensorModel& model) {
    return 1.0 / (2.0 * std::numbers::pi * model.sigma_range * model.sigma_bearing);
}

double detection_from_distance_sq(const SensorModel& model, double dist_sq) {
    if (std::isinf(model.pd_scale)) return model.pd_max;
    return model.pd_max * std::exp(-dist_sq / (model.pd_scale * model.pd_scale));
}

}  // namespace

MotionModel make_ncv_motion(double sigma_u, double p_survival, double period) {
    if (sigma_u < 0.0) throw std::invalid_argument("motion: sigma_u must be nonnegative");
    if (p_survival < 0.0 || p_survival > 1.0) {
        throw std::invalid_argument("motion: p_survival must lie in [0, 1]");
    }
    MotionModel model;
    const double t = period;
    model.transition << 1, 0, t, 0,  //
        0, 1, 0, t,                   //
        0, 0, 1, 0,                   //
        0, 0, 0, 1;
    model.noise_input << t * t / 2, 0,  //
        0, t * t / 2,                    //
        t, 0,                            //
        0, t;
    model.sigma_u = sigma_u;
    model.p_survival = p_survival;
    return model;
}

void SensorModel::validate() const {
    if (!(max_range > 0.0)) throw std::invalid_argument("sensor: max_range must be positive");
    if (!(sigma_range > 0.0)) throw std::invalid_argument("sensor: sigma_range must be positive");
    if (!(sigma_bearing > 0.0)) throw std::invalid_argument("sensor: sigma_bearing must be positive");
    if (!(pd_scale > 0.0)) throw std::invalid_argument("sensor: pd_scale must be positive");
    if (pd_max < 0.0 || pd_max > 1.0) throw std::invalid_argument("sensor: pd_max must lie in [0, 1]");
}

double SensorModel::range_to(const State& x) const {
    return std::hypot(x[0] - position[0], x[1] - position[1]);
}

double SensorModel::bearing_to(const State& x) const {
    return std::atan2(x[1] - position[1], x[0] - position[0]);
}

double ClutterModel::density() const {
    return 1.0 / (max_range * 2.0 * std::numbers::pi);
}

State transition_sample(const MotionModel& model, const State& state, Rng& rng) {
    State next = model.transition * state;
    if (model.sigma_u > 0.0) {
        std::normal_distribution<double> noise(0.0, model.sigma_u);
        const Eigen::Vector2d u(noise(rng), noise(rng));
        next += model.noise_input * u;
    }
    return next;
}

double detection_prob(const SensorModel& model, const State& state) {
    const double dx = state[0] - model.position[0];
    const double dy = state[1] - model.position[1];
    return detection_from_distance_sq(model, dx * dx + dy * dy);
}

double likelihood(const SensorModel& model, const Measurement& z, const State& state) {
    const double range_residual = z.range - model.range_to(state);
    const double bearing_residual = wrap_angle(z.bearing - model.bearing_to(state));
    return gaussian_pair(range_residual, bearing_residual,
                         1.0 / (model.sigma_range * model.sigma_range),
                         1.0 / (model.sigma_bearing * model.sigma_bearing), likelihood_peak(model));
}

double clutter_intensity(const ClutterModel& model, const Measurement& z) {
    if (z.range < 0.0 || z.range > model.max_range) return 0.0;
    return model.mean_count * model.density();
}

Measurement sample_measurement(const SensorModel& model, const State& state, Rng& rng) {
    std::normal_distribution<double> range_noise(0.0, model.sigma_range);
    std::normal_distribution<double> bearing_noise(0.0, model.sigma_bearing);
    Measurement z;
    z.range = model.range_to(state) + range_noise(rng);
    z.bearing = wrap_angle(model.bearing_to(state) + bearing_noise(rng));
    z.range = std::clamp(z.range, 0.0, model.max_range);
    return z;
}

ParticleSet sample_uniform_roi(const SensorModel& sensor, double velocity_sigma,
                               std::size_t count, double mass, Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    std::normal_distribution<double> velocity(0.0, velocity_sigma);
    ParticleSet pset;
    pset.reserve(count);
    const double weight = count > 0 ? mass / static_cast<double>(count) : 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const double r = sensor.max_range * std::sqrt(unit(rng));
        const double a = angle(rng);
        State x;
        x << sensor.position[0] + r * std::cos(a), sensor.position[1] + r * std::sin(a),
            velocity(rng), velocity(rng);
        pset.push_back(x, weight);
    }
    return pset;
}

PoissonPhd sample_birth_phd(const BirthModel& model, std::span<const Measurement> prev_measurements,
                            const MotionModel& motion, const SensorModel& sensor, Rng& rng) {
    if (model.mean_births < 0.0) throw std::invalid_argument("birth: mean_births must be nonnegative");
    PoissonPhd birth;
    const std::size_t count = model.particle_budget;
    if (count == 0) return birth;

    if (prev_measurements.empty()) {
        ParticleSet uniform = sample_uniform_roi(sensor, model.velocity_sigma, count, 1.0, rng);
        for (auto& p : uniform) {
            p.state = transition_sample(motion, p.state, rng);
        }
        birth.particles = std::move(uniform);
    } else {
        std::uniform_int_distribution<std::size_t> pick(0, prev_measurements.size() - 1);
        std::normal_distribution<double> range_noise(0.0, sensor.sigma_range);
        std::normal_distribution<double> bearing_noise(0.0, sensor.sigma_bearing);
        std::normal_distribution<double> velocity(0.0, model.velocity_sigma);
        birth.particles.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            const Measurement& z = prev_measurements[pick(rng)];
            const double r = z.range + range_noise(rng);
            const double a = z.bearing + bearing_noise(rng);
            State x;
            x << sensor.position[0] + r * std::cos(a), sensor.position[1] + r * std::sin(a),
                velocity(rng), velocity(rng);
            birth.particles.push_back(transition_sample(motion, x, rng), 1.0);
        }
    }
    // Equal weights summing to mean_births exactly up to rounding of mass / count.
    const double weight = model.mean_births / static_cast<double>(count);
    for (auto& p : birth.particles) p.weight = weight;
    return birth;
}

ProjectedParticles::ProjectedParticles(const SensorModel& sensor, const ParticleSet& pset)
    : inv_var_range_(1.0 / (sensor.sigma_range * sensor.sigma_range)),
      inv_var_bearing_(1.0 / (sensor.sigma_bearing * sensor.sigma_bearing)),
      peak_(likelihood_peak(sensor)) {
    const std::size_t n = pset.size();
    range_.resize(n);
    bearing_.resize(n);
    pd_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const State& x = pset[i].state;
        const double dx = x[0] - sensor.position[0];
        const double dy = x[1] - sensor.position[1];
        range_[i] = std::hypot(dx, dy);
        bearing_[i] = std::atan2(dy, dx);
        pd_[i] = detection_from_distance_sq(sensor, dx * dx + dy * dy);
    }
}

void ProjectedParticles::detection_likelihoods(const Measurement& z, std::vector<double>& out) const {
    const std::size_t n = size();
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double range_residual = z.range - range_[i];
        // exp underflows to zero well before this; skip the trig wrap.
        if (range_residual * range_residual * inv_var_range_ > 1500.0) {
            out[i] = 0.0;
            continue;
        }
        const double bearing_residual = wrap_angle(z.bearing - bearing_[i]);
        out[i] = pd_[i] * gaussian_pair(range_residual, bearing_residual, inv_var_range_,
                                        inv_var_bearing_, peak_);
    }
}

}  // namespace lmbp
