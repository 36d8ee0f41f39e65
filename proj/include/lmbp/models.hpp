#pragma once

#include "lmbp/types.hpp"

#include <Eigen/Core>

#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace lmbp {

using SurvivalFn = std::function<double(const State&)>;

/// Nearly-constant-velocity motion with unit sampling period.
struct MotionModel {
    Eigen::Matrix4d transition = Eigen::Matrix4d::Identity();
    Eigen::Matrix<double, 4, 2> noise_input = Eigen::Matrix<double, 4, 2>::Zero();
    double sigma_u = 0.0;
    double p_survival = 0.99;
    /// Optional state-dependent survival; overrides `p_survival` when set.
    SurvivalFn survival_fn;

    [[nodiscard]] double survival(const State& x) const {
        return survival_fn ? survival_fn(x) : p_survival;
    }
};

[[nodiscard]] MotionModel make_ncv_motion(double sigma_u, double p_survival, double period = 1.0);

/// Range-bearing sensor with distance-dependent detection probability
///     p_D(x) = pd_max * exp(-d^2 / pd_scale^2),
/// d being the distance from the sensor. An infinite `pd_scale` gives a
/// constant p_D = pd_max.
struct SensorModel {
    Position position{0.0, -50.0};
    double max_range = 300.0;
    double sigma_range = 2.0;
    double sigma_bearing = 0.017453292519943295;  // 1 degree
    double pd_max = 0.7;
    double pd_scale = 450.0;

    void validate() const;

    [[nodiscard]] double range_to(const State& x) const;
    [[nodiscard]] double bearing_to(const State& x) const;
};

/// Poisson clutter, uniform in (range, bearing) over [0, max_range] x [-pi, pi).
struct ClutterModel {
    double mean_count = 100.0;
    double max_range = 300.0;

    [[nodiscard]] double density() const;
};

/// Birth intensity built from the previous frame.
struct BirthModel {
    double mean_births = 0.1;
    double velocity_sigma = 0.5;
    std::size_t particle_budget = 5000;
};

[[nodiscard]] State transition_sample(const MotionModel& model, const State& state, Rng& rng);

[[nodiscard]] double detection_prob(const SensorModel& model, const State& state);

/// Product of the range and (wrapped) bearing Gaussian densities.
[[nodiscard]] double likelihood(const SensorModel& model, const Measurement& z, const State& state);

[[nodiscard]] double clutter_intensity(const ClutterModel& model, const Measurement& z);

/// Draws a noisy measurement of `state`, range clamped to [0, max_range].
[[nodiscard]] Measurement sample_measurement(const SensorModel& model, const State& state, Rng& rng);

[[nodiscard]] PoissonPhd sample_birth_phd(const BirthModel& model,
                                          std::span<const Measurement> prev_measurements,
                                          const MotionModel& motion, const SensorModel& sensor,
                                          Rng& rng);

/// Particles drawn uniformly over the sensor disk with zero-mean Gaussian
/// velocities, carrying total weight `mass`.
[[nodiscard]] ParticleSet sample_uniform_roi(const SensorModel& sensor, double velocity_sigma,
                                             std::size_t count, double mass, Rng& rng);

/// Per-particle range, bearing and detection probability, cached so that the
/// likelihood of many measurements against one particle cloud costs one exp each.
class ProjectedParticles {
public:
    ProjectedParticles(const SensorModel& sensor, const ParticleSet& pset);

    [[nodiscard]] std::size_t size() const { return range_.size(); }
    [[nodiscard]] double detection(std::size_t i) const { return pd_[i]; }

    /// p_D(x_i) * f(z | x_i) for every particle.
    void detection_likelihoods(const Measurement& z, std::vector<double>& out) const;

private:
    std::vector<double> range_;
    std::vector<double> bearing_;
    std::vector<double> pd_;
    double inv_var_range_;
    double inv_var_bearing_;
    double peak_;
};

}  // namespace lmbp
