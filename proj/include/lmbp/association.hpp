#pragma once

#include "lmbp/models.hpp"
#include "lmbp/types.hpp"

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace lmbp {

/// Object `label` generated the measurement: weight r * b, certain existence,
/// pdf proportional to p_D f(z|x) s(x).
struct DetectionHypothesis {
    double beta = 0.0;
    double existence = 1.0;
    ParticleSet pdf;
};

/// Object `label` is absent or undetected: weight 1 - r + r c.
struct MissHypothesis {
    double beta = 0.0;
    double existence = 0.0;
    ParticleSet pdf;
};

/// Measurement explained by clutter or by a previously unlabeled object.
/// `clutter` keeps lambda_C(z) so that d = beta - clutter is recoverable.
struct NewComponent {
    double beta = 0.0;
    double existence = 0.0;
    double clutter = 0.0;
    ParticleSet pdf;
};

[[nodiscard]] DetectionHypothesis detection_hypothesis(const BernoulliTrack& track,
                                                       const Measurement& z,
                                                       const SensorModel& sensor);

[[nodiscard]] MissHypothesis miss_hypothesis(const BernoulliTrack& track, const SensorModel& sensor);

/// Throws std::domain_error("measurement outside model support") when both the
/// clutter intensity and the PHD evidence vanish.
[[nodiscard]] NewComponent new_component(const PoissonPhd& phd, const Measurement& z,
                                         const SensorModel& sensor, const ClutterModel& clutter);

/// Building blocks shared with the batched update. `detection_lik[i]` is
/// p_D(x_i) f(z|x_i) for the i-th particle of `pdf`.
[[nodiscard]] DetectionHypothesis make_detection_hypothesis(double existence, const ParticleSet& pdf,
                                                            std::span<const double> detection_lik);
[[nodiscard]] MissHypothesis make_miss_hypothesis(double existence, const ParticleSet& pdf,
                                                  const ProjectedParticles& projected);
[[nodiscard]] NewComponent make_new_component(const ParticleSet& phd, double clutter,
                                              std::span<const double> detection_lik,
                                              bool with_pdf = true);

// ---------------------------------------------------------------------------
// Partitioning

struct LabelCluster {
    std::vector<std::size_t> labels;        // positions in the input label sequence
    std::vector<std::size_t> measurements;  // measurement indices, ascending
};

struct Partition {
    std::vector<LabelCluster> clusters;
    std::vector<std::size_t> residual;
};

/// Greedy label-by-label clustering of labels and measurements. `betas` is
/// |labels| x meas_count; a pair is plausible when beta >= gamma_c. Labels are
/// visited in the given order; when a label touches several clusters they are
/// merged into the one with the smallest index and the rest are compacted.
[[nodiscard]] Partition partition(std::span<const Label> labels, const Eigen::MatrixXd& betas,
                                  double gamma_c);

// ---------------------------------------------------------------------------
// Association within one cluster

/// One data-association subproblem.
///
/// `legacy_beta` has one row per legacy label: column 0 is the miss weight and
/// column j + 1 the weight for local measurement j. A transfer label (k, m)
/// has miss weight 1 and detection weight meas_beta[transfer_meas[t]].
struct Cluster {
    std::vector<Label> legacy_labels;
    std::vector<Label> transfer_labels;
    std::vector<std::size_t> meas_indices;
    std::vector<std::size_t> transfer_meas;
    Eigen::MatrixXd legacy_beta;
    std::vector<double> meas_beta;

    [[nodiscard]] std::size_t legacy_count() const { return legacy_labels.size(); }
    [[nodiscard]] std::size_t transfer_count() const { return transfer_labels.size(); }
    [[nodiscard]] std::size_t meas_count() const { return meas_indices.size(); }

    /// Throws std::invalid_argument on inconsistent table shapes.
    void validate() const;
};

/// Association vector and its normalized weight. Legacy entries: 0 for a
/// miss, j + 1 for local measurement j. Transfer entries are 0 or 1.
struct AssociationHypothesis {
    std::vector<int> legacy;
    std::vector<int> transfer;
    double weight = 0.0;
};

/// Per-label marginal association pmfs. `legacy[i]` is indexed like a legacy
/// entry of AssociationHypothesis; `transfer[t]` is {p(a=0), p(a=1)}.
struct MarginalAssociation {
    std::vector<std::vector<double>> legacy;
    std::vector<std::array<double, 2>> transfer;
};

/// Size guard for brute-force enumeration.
constexpr std::size_t kEnumerationDegreeLimit = 20;
[[nodiscard]] bool enumerable(const Cluster& cluster);

/// Every admissible association vector with its weight, computed in the log
/// domain and normalized to sum to one.
[[nodiscard]] std::vector<AssociationHypothesis> enumerate_admissible(const Cluster& cluster);

/// Marginals by summing the enumerated joint pmf.
[[nodiscard]] MarginalAssociation exact_marginals(const Cluster& cluster);

/// Loopy belief propagation on the label/measurement association graph.
[[nodiscard]] MarginalAssociation bp_marginals(const Cluster& cluster, int iterations);

/// Largest per-label total-variation distance between two marginal sets.
[[nodiscard]] double max_total_variation(const MarginalAssociation& a, const MarginalAssociation& b);

}  // namespace lmbp
