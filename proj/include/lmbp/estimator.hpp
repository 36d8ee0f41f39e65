#pragma once

#include "lmbp/types.hpp"

#include <ostream>
#include <vector>

namespace lmbp {

struct TrackEstimate {
    Label label;
    State state = State::Zero();
    double existence = 0.0;
};

/// Tracks with existence strictly above `gamma_d`, each with its mean state,
/// ordered by label.
[[nodiscard]] std::vector<TrackEstimate> detect_and_estimate(const FilterState& state, double gamma_d);

/// Header line `k,label_birth,label_index,x1,x2,v1,v2,existence`.
void write_estimate_header(std::ostream& os);

/// One CSV row per estimate at step `k`.
void write_estimate_rows(std::ostream& os, int k, const std::vector<TrackEstimate>& estimates);

}  // namespace lmbp
