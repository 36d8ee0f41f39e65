#pragma once

#include <Eigen/Core>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <random>
#include <vector>

namespace lmbp {

/// Kinematic state [x1, x2, v1, v2]: 2D position and per-step velocity.
using State = Eigen::Vector4d;
using Position = Eigen::Vector2d;

/// Every sampling routine takes one of these explicitly.
using Rng = std::mt19937_64;

/// Track identity (birth step, index among that step's births).
struct Label {
    int birth_time = 0;
    int index = 0;

    friend auto operator<=>(const Label&, const Label&) = default;
    friend bool operator==(const Label&, const Label&) = default;
};

std::ostream& operator<<(std::ostream& os, const Label& label);

struct Particle {
    State state = State::Zero();
    double weight = 0.0;
};

/// Weighted particle cloud. Used both as a normalized spatial pdf and as an
/// unnormalized intensity (PHD), in which case the weight sum is the expected
/// object count.
class ParticleSet {
public:
    ParticleSet() = default;
    explicit ParticleSet(std::vector<Particle> particles) : particles_(std::move(particles)) {}

    [[nodiscard]] std::size_t size() const { return particles_.size(); }
    [[nodiscard]] bool empty() const { return particles_.empty(); }

    [[nodiscard]] const Particle& operator[](std::size_t i) const { return particles_[i]; }
    [[nodiscard]] Particle& operator[](std::size_t i) { return particles_[i]; }

    [[nodiscard]] auto begin() const { return particles_.begin(); }
    [[nodiscard]] auto end() const { return particles_.end(); }
    [[nodiscard]] auto begin() { return particles_.begin(); }
    [[nodiscard]] auto end() { return particles_.end(); }

    [[nodiscard]] const std::vector<Particle>& particles() const { return particles_; }

    void reserve(std::size_t n) { particles_.reserve(n); }
    void push_back(const State& state, double weight) { particles_.push_back({state, weight}); }
    void append(const ParticleSet& other, double scale = 1.0);

    /// Kahan-compensated weight sum.
    [[nodiscard]] double total_weight() const;

    /// Rescales weights so they sum to `mass`. Throws on a zero-weight set.
    void scale_to(double mass);
    void normalize() { scale_to(1.0); }

    /// True when weights are nonnegative and sum to one within `tol`.
    [[nodiscard]] bool is_normalized(double tol = 1e-9) const;

private:
    std::vector<Particle> particles_;
};

/// Labeled Bernoulli component.
struct BernoulliTrack {
    Label label;
    double existence = 0.0;
    ParticleSet pdf;
};

/// Particle intensity of unlabeled objects that are unlikely to exist.
struct PoissonPhd {
    ParticleSet particles;

    [[nodiscard]] double mean() const { return particles.total_weight(); }
};

/// Range-bearing measurement relative to the sensor. Bearing in [-pi, pi).
struct Measurement {
    double range = 0.0;
    double bearing = 0.0;
};

using MeasurementFrame = std::vector<Measurement>;

/// Joint LMB/Poisson posterior at step `time`.
///
/// `previous_frame` holds the measurements of step `time`; the next prediction
/// builds its birth intensity from them.
struct FilterState {
    std::vector<BernoulliTrack> tracks;
    PoissonPhd phd;
    int time = 0;
    MeasurementFrame previous_frame;
};

/// Systematic (low-variance) resampling to `target_count` equally weighted
/// particles. Total weight is preserved, so this works for pdfs and PHDs.
/// Throws std::domain_error("degenerate particle set") on zero total weight.
[[nodiscard]] ParticleSet resample(const ParticleSet& pset, std::size_t target_count, Rng& rng);

/// Mean state of a normalized particle set.
[[nodiscard]] State weighted_mean(const ParticleSet& pset);

/// Wraps an angle to [-pi, pi).
[[nodiscard]] double wrap_angle(double angle);

/// Throws std::logic_error when labels repeat or a label is born after `time`.
void check_state_invariants(const FilterState& state);

}  // namespace lmbp
