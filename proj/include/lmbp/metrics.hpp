#pragma once

#include "lmbp/types.hpp"

#include <Eigen/Core>

#include <span>
#include <vector>

namespace lmbp {

struct OspaParams {
    double cutoff = 20.0;
    double order = 2.0;

    void validate() const;
};

/// Minimum-cost assignment of every row to a distinct column of a rows x cols
/// cost matrix with rows <= cols. Returns the column chosen for each row.
[[nodiscard]] std::vector<int> solve_assignment(const Eigen::MatrixXd& cost);

/// OSPA distance between two position sets with Euclidean base distance.
[[nodiscard]] double ospa(std::span<const Position> truth, std::span<const Position> estimates,
                          const OspaParams& params = {});

/// Per-step mean over runs. Throws std::invalid_argument on ragged input.
[[nodiscard]] std::vector<double> mospa_curve(const std::vector<std::vector<double>>& per_run);

}  // namespace lmbp
