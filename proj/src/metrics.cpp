#include "lmbp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lmbp {

void OspaParams::validate() const {
    if (!(cutoff > 0.0)) throw std::invalid_argument("ospa: cutoff must be positive");
    if (!(order >= 1.0)) throw std::invalid_argument("ospa: order must be at least 1");
}

std::vector<int> solve_assignment(const Eigen::MatrixXd& cost) {
    // Shortest augmenting path Hungarian method with row/column potentials.
    const auto n = static_cast<std::size_t>(cost.rows());
    const auto m = static_cast<std::size_t>(cost.cols());
    if (n > m) throw std::invalid_argument("solve_assignment: more rows than columns");
    if (n == 0) return {};

    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0);
    std::vector<double> v(m + 1, 0.0);
    std::vector<std::size_t> match(m + 1, 0);  // column -> row, 1-based, 0 = free
    std::vector<std::size_t> way(m + 1, 0);

    for (std::size_t i = 1; i <= n; ++i) {
        match[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(m + 1, inf);
        std::vector<bool> used(m + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = match[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = cost(static_cast<Eigen::Index>(i0 - 1),
                                        static_cast<Eigen::Index>(j - 1)) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> assignment(n, -1);
    for (std::size_t j = 1; j <= m; ++j) {
        if (match[j] != 0) assignment[match[j] - 1] = static_cast<int>(j - 1);
    }
    return assignment;
}

double ospa(std::span<const Position> truth, std::span<const Position> estimates,
            const OspaParams& params) {
    params.validate();
    std::span<const Position> small = truth;
    std::span<const Position> large = estimates;
    if (small.size() > large.size()) std::swap(small, large);
    const std::size_t m = small.size();
    const std::size_t n = large.size();
    if (n == 0) return 0.0;

    const double c_p = std::pow(params.cutoff, params.order);
    Eigen::MatrixXd cost(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double d = std::min(params.cutoff, (small[i] - large[j]).norm());
            cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::pow(d, params.order);
        }
    }
    double total = c_p * static_cast<double>(n - m);
    const auto assignment = solve_assignment(cost);
    for (std::size_t i = 0; i < m; ++i) {
        total += cost(static_cast<Eigen::Index>(i), assignment[i]);
    }
    return std::pow(total / static_cast<double>(n), 1.0 / params.order);
}

std::vector<double> mospa_curve(const std::vector<std::vector<double>>& per_run) {
    if (per_run.empty()) return {};
    const std::size_t steps = per_run.front().size();
    std::vector<double> mean(steps, 0.0);
    for (const auto& run : per_run) {
        if (run.size() != steps) throw std::invalid_argument("mospa_curve: runs differ in step count");
        for (std::size_t k = 0; k < steps; ++k) mean[k] += run[k];
    }
    for (double& x : mean) x /= static_cast<double>(per_run.size());
    return mean;
}

}  // namespace lmbp
