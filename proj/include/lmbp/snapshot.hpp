#pragma once

#include "lmbp/types.hpp"

#include <iosfwd>

namespace lmbp {

/// Line-oriented text snapshot of a FilterState.
///
///     time <k>
///     tracks <count>
///     <birth>,<index>,<existence> [particles <n>]
///     <x1> <x2> <v1> <v2> <weight>        (n lines, only with particle dumps)
///     phd <n>                              (particle lines follow)
///     frame <count>
///     <range> <bearing>                    (count lines)
///
/// Reals are written with 17 significant digits so a round trip is exact.
/// Without particle dumps the track pdfs and the PHD read back empty.
void write_snapshot(std::ostream& os, const FilterState& state, bool with_particles = true);

/// Throws std::runtime_error with the offending line number on malformed input.
[[nodiscard]] FilterState read_snapshot(std::istream& is);

}  // namespace lmbp
