#include "lmbp/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

namespace lmbp {

std::ostream& operator<<(std::ostream& os, const Label& label) {
    return os << '(' << label.birth_time << ',' << label.index << ')';
}

void ParticleSet::append(const ParticleSet& other, double scale) {
    particles_.reserve(particles_.size() + other.size());
    for (const auto& p : other.particles_) {
        particles_.push_back({p.state, p.weight * scale});
    }
}

double ParticleSet::total_weight() const {
    double sum = 0.0;
    double carry = 0.0;
    for (const auto& p : particles_) {
        const double y = p.weight - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    return sum;
}

void ParticleSet::scale_to(double mass) {
    const double total = total_weight();
    if (!(total > 0.0)) {
        throw std::domain_error("degenerate particle set");
    }
    if (total < std::numeric_limits<double>::min()) {
        // Subnormal total: 1/total overflows, so bring the weights up first.
        double largest = 0.0;
        for (const auto& p : particles_) largest = std::max(largest, p.weight);
        for (auto& p : particles_) p.weight /= largest;
        scale_to(mass);
        return;
    }
    const double factor = mass / total;
    for (auto& p : particles_) {
        p.weight *= factor;
    }
}

bool ParticleSet::is_normalized(double tol) const {
    for (const auto& p : particles_) {
        if (p.weight < 0.0) return false;
    }
    return std::abs(total_weight() - 1.0) <= tol;
}

ParticleSet resample(const ParticleSet& pset, std::size_t target_count, Rng& rng) {
    if (target_count == 0) {
        throw std::invalid_argument("resample: target_count must be positive");
    }
    const double total = pset.total_weight();
    if (!(total > 0.0) || !std::isfinite(total)) {
        throw std::domain_error("degenerate particle set");
    }

    const double step = total / static_cast<double>(target_count);
    std::uniform_real_distribution<double> offset(0.0, step);
    const double start = offset(rng);

    std::vector<Particle> out;
    out.reserve(target_count);
    std::size_t i = 0;
    const std::size_t last = pset.size() - 1;
    double cumulative = pset[0].weight;
    for (std::size_t n = 0; n < target_count; ++n) {
        const double u = start + static_cast<double>(n) * step;
        while (u > cumulative && i < last) {
            ++i;
            cumulative += pset[i].weight;
        }
        // Never land on a zero-weight particle through round-off at the tail.
        while (pset[i].weight <= 0.0 && i > 0) {
            --i;
        }
        out.push_back({pset[i].state, step});
    }
    return ParticleSet(std::move(out));
}

State weighted_mean(const ParticleSet& pset) {
    if (pset.empty() || !pset.is_normalized(1e-9)) {
        throw std::invalid_argument("weighted_mean: particle set is not a normalized pdf");
    }
    State mean = State::Zero();
    for (const auto& p : pset) {
        mean += p.weight * p.state;
    }
    return mean;
}

double wrap_angle(double angle) {
    constexpr double pi = std::numbers::pi;
    constexpr double two_pi = 2.0 * std::numbers::pi;
    if (angle >= -pi && angle < pi) return angle;
    if (angle >= pi && angle < 3.0 * pi) {
        const double wrapped = angle - two_pi;
        return wrapped < pi ? wrapped : -pi;
    }
    if (angle < -pi && angle >= -3.0 * pi) {
        const double wrapped = angle + two_pi;
        return wrapped < pi ? wrapped : -pi;
    }
    double wrapped = std::fmod(angle + pi, two_pi);
    if (wrapped < 0.0) wrapped += two_pi;
    wrapped -= pi;
    return wrapped < pi ? wrapped : -pi;
}

void check_state_invariants(const FilterState& state) {
    std::set<Label> seen;
    for (const auto& track : state.tracks) {
        if (!seen.insert(track.label).second) {
            std::ostringstream msg;
            msg << "duplicate track label " << track.label;
            throw std::logic_error(msg.str());
        }
        if (track.label.birth_time > state.time) {
            std::ostringstream msg;
            msg << "track label " << track.label << " born after step " << state.time;
            throw std::logic_error(msg.str());
        }
    }
}

}  // namespace lmbp
