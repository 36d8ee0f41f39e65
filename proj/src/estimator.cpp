#include "lmbp/estimator.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace lmbp {

std::vector<TrackEstimate> detect_and_estimate(const FilterState& state, double gamma_d) {
    std::vector<TrackEstimate> out;
    for (const auto& track : state.tracks) {
        if (track.existence > gamma_d) {
            out.push_back({track.label, weighted_mean(track.pdf), track.existence});
        }
    }
    std::sort(out.begin(), out.end(),
              [](const TrackEstimate& a, const TrackEstimate& b) { return a.label < b.label; });
    return out;
}

void write_estimate_header(std::ostream& os) {
    os << "k,label_birth,label_index,x1,x2,v1,v2,existence\n";
}

void write_estimate_rows(std::ostream& os, int k, const std::vector<TrackEstimate>& estimates) {
    for (const auto& e : estimates) {
        os << fmt::format("{},{},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f}\n", k, e.label.birth_time,
                          e.label.index, e.state[0], e.state[1], e.state[2], e.state[3], e.existence);
    }
}

}  // namespace lmbp
