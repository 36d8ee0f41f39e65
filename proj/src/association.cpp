#include "lmbp/association.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace lmbp {

namespace {

ParticleSet reweighted(const ParticleSet& pdf, std::span<const double> factors) {
    ParticleSet out;
    out.reserve(pdf.size());
    for (std::size_t i = 0; i < pdf.size(); ++i) {
        const double w = pdf[i].weight * factors[i];
        if (w > 0.0) out.push_back(pdf[i].state, w);
    }
    return out;
}

double weighted_sum(const ParticleSet& pdf, std::span<const double> factors) {
    double sum = 0.0;
    for (std::size_t i = 0; i < pdf.size(); ++i) {
        sum += pdf[i].weight * factors[i];
    }
    return sum;
}

double safe_log(double x) {
    return x > 0.0 ? std::log(x) : -std::numeric_limits<double>::infinity();
}

}  // namespace

DetectionHypothesis make_detection_hypothesis(double existence, const ParticleSet& pdf,
                                              std::span<const double> detection_lik) {
    if (detection_lik.size() != pdf.size()) {
        throw std::invalid_argument("detection hypothesis: likelihood size mismatch");
    }
    DetectionHypothesis hyp;
    const double b = weighted_sum(pdf, detection_lik);
    hyp.beta = existence * b;
    if (b > 0.0) {
        hyp.pdf = reweighted(pdf, detection_lik);
        hyp.pdf.scale_to(1.0);
    }
    return hyp;
}

MissHypothesis make_miss_hypothesis(double existence, const ParticleSet& pdf,
                                    const ProjectedParticles& projected) {
    if (projected.size() != pdf.size()) {
        throw std::invalid_argument("miss hypothesis: projection size mismatch");
    }
    std::vector<double> miss(pdf.size());
    for (std::size_t i = 0; i < pdf.size(); ++i) miss[i] = 1.0 - projected.detection(i);

    MissHypothesis hyp;
    const double c = weighted_sum(pdf, miss);
    hyp.beta = 1.0 - existence + existence * c;
    if (!(hyp.beta > 0.0)) {
        hyp.beta = 0.0;
        hyp.existence = 0.0;
        return hyp;
    }
    hyp.existence = existence * c / hyp.beta;
    if (c > 0.0) {
        hyp.pdf = reweighted(pdf, miss);
        hyp.pdf.scale_to(1.0);
    }
    return hyp;
}

NewComponent make_new_component(const ParticleSet& phd, double clutter,
                                std::span<const double> detection_lik, bool with_pdf) {
    if (detection_lik.size() != phd.size()) {
        throw std::invalid_argument("new component: likelihood size mismatch");
    }
    NewComponent comp;
    const double d = weighted_sum(phd, detection_lik);
    comp.clutter = clutter;
    comp.beta = clutter + d;
    if (!(comp.beta > 0.0)) {
        throw std::domain_error("measurement outside model support");
    }
    comp.existence = d / comp.beta;
    if (with_pdf && d > 0.0) {
        comp.pdf = reweighted(phd, detection_lik);
        comp.pdf.scale_to(1.0);
    }
    return comp;
}

DetectionHypothesis detection_hypothesis(const BernoulliTrack& track, const Measurement& z,
                                         const SensorModel& sensor) {
    const ProjectedParticles projected(sensor, track.pdf);
    std::vector<double> lik;
    projected.detection_likelihoods(z, lik);
    return make_detection_hypothesis(track.existence, track.pdf, lik);
}

MissHypothesis miss_hypothesis(const BernoulliTrack& track, const SensorModel& sensor) {
    return make_miss_hypothesis(track.existence, track.pdf, ProjectedParticles(sensor, track.pdf));
}

NewComponent new_component(const PoissonPhd& phd, const Measurement& z, const SensorModel& sensor,
                           const ClutterModel& clutter) {
    const ProjectedParticles projected(sensor, phd.particles);
    std::vector<double> lik;
    projected.detection_likelihoods(z, lik);
    return make_new_component(phd.particles, clutter_intensity(clutter, z), lik);
}

// ---------------------------------------------------------------------------

Partition partition(std::span<const Label> labels, const Eigen::MatrixXd& betas, double gamma_c) {
    if (static_cast<std::size_t>(betas.rows()) != labels.size()) {
        throw std::invalid_argument("partition: beta table rows must match label count");
    }
    const auto meas_count = static_cast<std::size_t>(betas.cols());

    auto plausible = [&](std::size_t l) {
        std::vector<std::size_t> out;
        for (std::size_t m = 0; m < meas_count; ++m) {
            if (betas(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(m)) >= gamma_c) {
                out.push_back(m);
            }
        }
        return out;
    };
    auto intersects = [](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
        auto ia = a.begin();
        auto ib = b.begin();
        while (ia != a.end() && ib != b.end()) {
            if (*ia == *ib) return true;
            if (*ia < *ib) ++ia;
            else ++ib;
        }
        return false;
    };
    auto merge_into = [](std::vector<std::size_t>& dst, const std::vector<std::size_t>& src) {
        std::vector<std::size_t> merged;
        merged.reserve(dst.size() + src.size());
        std::set_union(dst.begin(), dst.end(), src.begin(), src.end(), std::back_inserter(merged));
        dst = std::move(merged);
    };

    Partition result;
    auto& clusters = result.clusters;
    for (std::size_t j = 0; j < labels.size(); ++j) {
        std::vector<std::size_t> meas = plausible(j);
        std::vector<std::size_t> touching;
        for (std::size_t c = 0; c < clusters.size(); ++c) {
            if (intersects(clusters[c].measurements, meas)) touching.push_back(c);
        }
        if (touching.empty()) {
            clusters.push_back({{j}, std::move(meas)});
            continue;
        }
        // Merge into the smallest touching index; survivors keep their relative order.
        LabelCluster& target = clusters[touching.front()];
        for (std::size_t t = 1; t < touching.size(); ++t) {
            const LabelCluster& other = clusters[touching[t]];
            merge_into(target.labels, other.labels);
            merge_into(target.measurements, other.measurements);
        }
        merge_into(target.labels, {j});
        merge_into(target.measurements, meas);
        for (auto it = touching.rbegin(); it + 1 != touching.rend(); ++it) {
            clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(*it));
        }
    }

    std::vector<bool> used(meas_count, false);
    for (const auto& c : clusters) {
        for (std::size_t m : c.measurements) used[m] = true;
    }
    for (std::size_t m = 0; m < meas_count; ++m) {
        if (!used[m]) result.residual.push_back(m);
    }
    return result;
}

// ---------------------------------------------------------------------------

void Cluster::validate() const {
    const auto legacy = static_cast<Eigen::Index>(legacy_count());
    const auto meas = static_cast<Eigen::Index>(meas_count());
    if (legacy > 0 && (legacy_beta.rows() != legacy || legacy_beta.cols() != meas + 1)) {
        throw std::invalid_argument("cluster: legacy beta table must be |legacy| x (1 + |meas|)");
    }
    if (meas_beta.size() != meas_count()) {
        throw std::invalid_argument("cluster: one clutter/new-object weight per measurement required");
    }
    if (transfer_meas.size() != transfer_count()) {
        throw std::invalid_argument("cluster: one measurement per transfer label required");
    }
    for (std::size_t j : transfer_meas) {
        if (j >= meas_count()) throw std::invalid_argument("cluster: transfer measurement out of range");
    }
}

bool enumerable(const Cluster& cluster) {
    return cluster.legacy_count() * cluster.meas_count() + cluster.transfer_count() <=
           kEnumerationDegreeLimit;
}

std::vector<AssociationHypothesis> enumerate_admissible(const Cluster& cluster) {
    cluster.validate();
    const std::size_t legacy = cluster.legacy_count();
    const std::size_t transfer = cluster.transfer_count();
    const std::size_t meas = cluster.meas_count();

    std::vector<double> log_meas(meas);
    for (std::size_t j = 0; j < meas; ++j) log_meas[j] = safe_log(cluster.meas_beta[j]);
    Eigen::MatrixXd log_legacy = cluster.legacy_beta.unaryExpr([](double b) { return safe_log(b); });

    std::vector<AssociationHypothesis> out;
    std::vector<double> log_weights;
    AssociationHypothesis current;
    current.legacy.assign(legacy, 0);
    current.transfer.assign(transfer, 0);
    std::vector<bool> used(meas, false);

    auto finish = [&](double log_w) {
        for (std::size_t j = 0; j < meas; ++j) {
            if (!used[j]) log_w += log_meas[j];
        }
        if (log_w == -std::numeric_limits<double>::infinity()) return;
        out.push_back(current);
        log_weights.push_back(log_w);
    };

    // Depth-first over legacy labels, then transfer labels.
    auto recurse = [&](auto&& self, std::size_t depth, double log_w) -> void {
        if (depth < legacy) {
            const auto row = static_cast<Eigen::Index>(depth);
            current.legacy[depth] = 0;
            self(self, depth + 1, log_w + log_legacy(row, 0));
            for (std::size_t j = 0; j < meas; ++j) {
                if (used[j]) continue;
                const double lb = log_legacy(row, static_cast<Eigen::Index>(j + 1));
                if (lb == -std::numeric_limits<double>::infinity()) continue;
                used[j] = true;
                current.legacy[depth] = static_cast<int>(j + 1);
                self(self, depth + 1, log_w + lb);
                used[j] = false;
            }
            current.legacy[depth] = 0;
            return;
        }
        const std::size_t t = depth - legacy;
        if (t < transfer) {
            current.transfer[t] = 0;
            self(self, depth + 1, log_w);
            const std::size_t j = cluster.transfer_meas[t];
            if (!used[j]) {
                used[j] = true;
                current.transfer[t] = 1;
                self(self, depth + 1, log_w + log_meas[j]);
                used[j] = false;
            }
            current.transfer[t] = 0;
            return;
        }
        finish(log_w);
    };
    recurse(recurse, 0, 0.0);

    if (out.empty()) {
        throw std::domain_error("cluster has no admissible association with positive weight");
    }
    const double peak = *std::max_element(log_weights.begin(), log_weights.end());
    double total = 0.0;
    for (double lw : log_weights) total += std::exp(lw - peak);
    const double log_norm = peak + std::log(total);
    for (std::size_t h = 0; h < out.size(); ++h) {
        out[h].weight = std::exp(log_weights[h] - log_norm);
    }
    return out;
}

MarginalAssociation exact_marginals(const Cluster& cluster) {
    if (!enumerable(cluster)) {
        throw std::invalid_argument("exact_marginals: cluster exceeds the enumeration guard");
    }
    const auto hypotheses = enumerate_admissible(cluster);
    MarginalAssociation marg;
    marg.legacy.assign(cluster.legacy_count(), std::vector<double>(cluster.meas_count() + 1, 0.0));
    marg.transfer.assign(cluster.transfer_count(), {0.0, 0.0});
    for (const auto& h : hypotheses) {
        for (std::size_t i = 0; i < h.legacy.size(); ++i) {
            marg.legacy[i][static_cast<std::size_t>(h.legacy[i])] += h.weight;
        }
        for (std::size_t t = 0; t < h.transfer.size(); ++t) {
            marg.transfer[t][static_cast<std::size_t>(h.transfer[t])] += h.weight;
        }
    }
    return marg;
}

MarginalAssociation bp_marginals(const Cluster& cluster, int iterations) {
    cluster.validate();
    if (iterations < 1) throw std::invalid_argument("bp_marginals: iterations must be positive");
    const std::size_t legacy = cluster.legacy_count();
    const std::size_t meas = cluster.meas_count();

    // Each label becomes a row with a miss weight and a list of measurement
    // edges. Edge weights are divided by the measurement's own weight so that
    // the measurement side carries unit weight; this leaves the joint pmf
    // unchanged up to a constant.
    struct Edge {
        std::size_t meas;
        double weight;
        double mu = 0.0;   // label -> measurement
        double nu = 1.0;   // measurement -> label
    };
    struct Row {
        double miss;
        std::vector<Edge> edges;
    };
    std::vector<Row> rows;
    rows.reserve(legacy + cluster.transfer_count());
    for (std::size_t i = 0; i < legacy; ++i) {
        Row row{cluster.legacy_beta(static_cast<Eigen::Index>(i), 0), {}};
        for (std::size_t j = 0; j < meas; ++j) {
            const double b = cluster.legacy_beta(static_cast<Eigen::Index>(i),
                                                 static_cast<Eigen::Index>(j + 1));
            if (b > 0.0) row.edges.push_back({j, b / cluster.meas_beta[j]});
        }
        rows.push_back(std::move(row));
    }
    for (std::size_t t = 0; t < cluster.transfer_count(); ++t) {
        rows.push_back({1.0, {{cluster.transfer_meas[t], 1.0}}});
    }

    constexpr double tiny = std::numeric_limits<double>::min();
    for (int iter = 0; iter < iterations; ++iter) {
        for (auto& row : rows) {
            for (std::size_t e = 0; e < row.edges.size(); ++e) {
                double den = row.miss;
                for (std::size_t f = 0; f < row.edges.size(); ++f) {
                    if (f != e) den += row.edges[f].weight * row.edges[f].nu;
                }
                row.edges[e].mu = row.edges[e].weight / std::max(den, tiny);
            }
        }
        // Leave-one-out sums computed directly: subtracting a dominant own
        // contribution from the total would cancel badly.
        for (std::size_t r = 0; r < rows.size(); ++r) {
            for (auto& edge : rows[r].edges) {
                double others = 0.0;
                for (std::size_t q = 0; q < rows.size(); ++q) {
                    if (q == r) continue;
                    for (const auto& o : rows[q].edges) {
                        if (o.meas == edge.meas) others += o.mu;
                    }
                }
                edge.nu = 1.0 / (1.0 + others);
            }
        }
    }

    MarginalAssociation marg;
    marg.legacy.assign(legacy, std::vector<double>(meas + 1, 0.0));
    marg.transfer.assign(cluster.transfer_count(), {1.0, 0.0});
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const Row& row = rows[r];
        double total = row.miss;
        for (const auto& edge : row.edges) total += edge.weight * edge.nu;
        if (!(total > 0.0)) {
            throw std::domain_error("cluster has no admissible association with positive weight");
        }
        if (r < legacy) {
            marg.legacy[r][0] = row.miss / total;
            for (const auto& edge : row.edges) {
                marg.legacy[r][edge.meas + 1] = edge.weight * edge.nu / total;
            }
        } else {
            const double p1 = row.edges.front().weight * row.edges.front().nu / total;
            marg.transfer[r - legacy] = {row.miss / total, p1};
        }
    }
    return marg;
}

double max_total_variation(const MarginalAssociation& a, const MarginalAssociation& b) {
    if (a.legacy.size() != b.legacy.size() || a.transfer.size() != b.transfer.size()) {
        throw std::invalid_argument("max_total_variation: marginal sets differ in shape");
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < a.legacy.size(); ++i) {
        if (a.legacy[i].size() != b.legacy[i].size()) {
            throw std::invalid_argument("max_total_variation: pmf sizes differ");
        }
        double tv = 0.0;
        for (std::size_t j = 0; j < a.legacy[i].size(); ++j) {
            tv += std::abs(a.legacy[i][j] - b.legacy[i][j]);
        }
        worst = std::max(worst, 0.5 * tv);
    }
    for (std::size_t t = 0; t < a.transfer.size(); ++t) {
        const double tv = 0.5 * (std::abs(a.transfer[t][0] - b.transfer[t][0]) +
                                 std::abs(a.transfer[t][1] - b.transfer[t][1]));
        worst = std::max(worst, tv);
    }
    return worst;
}

}  // namespace lmbp
