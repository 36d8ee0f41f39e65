#pragma once

#include "lmbp/models.hpp"
#include "lmbp/types.hpp"

namespace lmbp {

/// Bootstrap prediction of one labeled Bernoulli component.
///
/// Existence becomes r * sum_i w_i p_S(x_i); particles are reweighted by
/// p_S, renormalized and pushed through the transition kernel. The label is
/// never touched. Throws std::domain_error("track annihilated") when every
/// survival-weighted weight is zero.
[[nodiscard]] BernoulliTrack predict_track(const BernoulliTrack& track, const MotionModel& motion,
                                           Rng& rng);

/// PHD prediction: survivors scaled by p_S and moved, birth particles appended
/// unchanged. No resampling happens here.
[[nodiscard]] PoissonPhd predict_phd(const PoissonPhd& phd, const PoissonPhd& birth,
                                     const MotionModel& motion, Rng& rng);

}  // namespace lmbp
