#include "lmbp/predictor.hpp"

#include <stdexcept>

namespace lmbp {

BernoulliTrack predict_track(const BernoulliTrack& track, const MotionModel& motion, Rng& rng) {
    BernoulliTrack predicted;
    predicted.label = track.label;

    ParticleSet survivors;
    survivors.reserve(track.pdf.size());
    for (const auto& p : track.pdf) {
        survivors.push_back(p.state, p.weight * motion.survival(p.state));
    }
    const double survival_mass = survivors.total_weight();
    if (!(survival_mass > 0.0)) {
        throw std::domain_error("track annihilated");
    }
    survivors.scale_to(1.0);
    for (auto& p : survivors) {
        p.state = transition_sample(motion, p.state, rng);
    }

    predicted.existence = track.existence * survival_mass;
    predicted.pdf = std::move(survivors);
    return predicted;
}

PoissonPhd predict_phd(const PoissonPhd& phd, const PoissonPhd& birth, const MotionModel& motion,
                       Rng& rng) {
    PoissonPhd predicted;
    predicted.particles.reserve(phd.particles.size() + birth.particles.size());
    for (const auto& p : phd.particles) {
        const double weight = p.weight * motion.survival(p.state);
        predicted.particles.push_back(transition_sample(motion, p.state, rng), weight);
    }
    predicted.particles.append(birth.particles);
    return predicted;
}

}  // namespace lmbp
