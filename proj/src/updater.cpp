#include "lmbp/updater.hpp"

#include "lmbp/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lmbp {

namespace {

void check_unit_interval(double value, const char* what) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw std::invalid_argument(std::string("thresholds: ") + what + " must lie in [0, 1]");
    }
}

ParticleSet maybe_resample(const ParticleSet& pset, std::size_t budget, Rng& rng) {
    if (budget == 0 || pset.empty()) return pset;
    return resample(pset, budget, rng);
}

}  // namespace

void Thresholds::validate() const {
    check_unit_interval(gamma_c, "gamma_c");
    check_unit_interval(gamma_tr, "gamma_tr");
    check_unit_interval(gamma_leg, "gamma_leg");
    check_unit_interval(gamma_d, "gamma_d");
    if (!(gamma_tr > 0.0)) throw std::invalid_argument("thresholds: gamma_tr must be positive");
    if (!(gamma_leg > 0.0)) throw std::invalid_argument("thresholds: gamma_leg must be positive");
    if (!(gamma_d > 0.0)) throw std::invalid_argument("thresholds: gamma_d must be positive");
}

MarginalMethod parse_marginal_method(const std::string& name) {
    if (name == "bp") return MarginalMethod::bp;
    if (name == "exact") return MarginalMethod::exact;
    throw std::invalid_argument("unknown marginal method '" + name + "' (expected exact or bp)");
}

std::string to_string(MarginalMethod method) {
    return method == MarginalMethod::exact ? "exact" : "bp";
}

void FilterConfig::validate() const {
    sensor.validate();
    thresholds.validate();
    if (!(clutter.mean_count >= 0.0)) throw std::invalid_argument("clutter: mean_count must be nonnegative");
    if (!(clutter.max_range > 0.0)) throw std::invalid_argument("clutter: max_range must be positive");
    if (birth.mean_births < 0.0) throw std::invalid_argument("birth: mean_births must be nonnegative");
    if (track_particles == 0) throw std::invalid_argument("filter: track_particles must be positive");
    if (phd_particles == 0) throw std::invalid_argument("filter: phd_particles must be positive");
    if (initial_phd_mass < 0.0) throw std::invalid_argument("filter: initial_phd_mass must be nonnegative");
    if (bp_iterations < 1) throw std::invalid_argument("filter: bp_iterations must be at least 1");
}

TransferSplit select_transfers(std::span<const std::size_t> candidates,
                               std::span<const NewComponent> components, double gamma_tr, int time) {
    TransferSplit split;
    for (std::size_t m : candidates) {
        if (m >= components.size()) throw std::out_of_range("select_transfers: measurement index");
        if (components[m].existence >= gamma_tr) {
            split.labels.push_back(transfer_label(time, m));
            split.transferred.push_back(m);
        } else {
            split.remaining.push_back(m);
        }
    }
    return split;
}

BernoulliTrack update_legacy_track(const Label& label, std::span<const double> pmf,
                                   const MissHypothesis& miss,
                                   std::span<const DetectionHypothesis> detections,
                                   std::size_t particle_budget, Rng& rng) {
    if (pmf.size() != detections.size() + 1) {
        throw std::invalid_argument("update_legacy_track: pmf must cover miss plus each detection");
    }
    BernoulliTrack track;
    track.label = label;

    // Mixture weights p(a) r^(l,a); detections have r^(l,m) = 1.
    std::vector<double> mix(pmf.size());
    mix[0] = pmf[0] * miss.existence;
    for (std::size_t j = 0; j < detections.size(); ++j) {
        mix[j + 1] = pmf[j + 1] * detections[j].existence;
    }
    double r = 0.0;
    for (double w : mix) r += w;
    track.existence = std::clamp(r, 0.0, 1.0);
    if (!(r > 0.0)) return track;

    ParticleSet merged;
    if (mix[0] > 0.0 && !miss.pdf.empty()) merged.append(miss.pdf, mix[0] / r);
    for (std::size_t j = 0; j < detections.size(); ++j) {
        if (mix[j + 1] > 0.0 && !detections[j].pdf.empty()) {
            merged.append(detections[j].pdf, mix[j + 1] / r);
        }
    }
    if (merged.empty()) {
        throw std::logic_error("update_legacy_track: positive existence without a spatial pdf");
    }
    track.pdf = maybe_resample(merged, particle_budget, rng);
    return track;
}

BernoulliTrack update_transferred_track(const Label& label, double p_associated,
                                        const NewComponent& component, std::size_t particle_budget,
                                        Rng& rng) {
    if (!(p_associated >= 0.0 && p_associated <= 1.0)) {
        throw std::invalid_argument("update_transferred_track: p(a=1) must lie in [0, 1]");
    }
    BernoulliTrack track;
    track.label = label;
    track.existence = p_associated * component.existence;
    if (track.existence > 0.0) {
        track.pdf = maybe_resample(component.pdf, particle_budget, rng);
    }
    return track;
}

RetentionSplit split_by_retention(std::vector<UpdatedTrack> tracks, double gamma_leg) {
    RetentionSplit split;
    for (auto& t : tracks) {
        if (t.transferred_now || t.track.existence >= gamma_leg) {
            split.kept.push_back(std::move(t.track));
        } else {
            split.recycled.push_back(std::move(t.track));
        }
    }
    return split;
}

PoissonPhd update_phd(std::span<const BernoulliTrack> recycled,
                      std::span<const NewComponent> untransferred, const PoissonPhd& predicted,
                      const SensorModel& sensor, std::size_t particle_budget, Rng& rng) {
    ParticleSet merged;
    for (const auto& track : recycled) {
        if (track.existence > 0.0 && !track.pdf.empty()) {
            merged.append(track.pdf, track.existence / track.pdf.total_weight());
        }
    }
    for (const auto& comp : untransferred) {
        if (comp.existence > 0.0 && !comp.pdf.empty()) {
            merged.append(comp.pdf, comp.existence / comp.pdf.total_weight());
        }
    }
    merged.reserve(merged.size() + predicted.particles.size());
    for (const auto& p : predicted.particles) {
        const double w = p.weight * (1.0 - detection_prob(sensor, p.state));
        if (w > 0.0) merged.push_back(p.state, w);
    }

    PoissonPhd out;
    if (merged.empty()) return out;
    out.particles = maybe_resample(merged, particle_budget, rng);
    return out;
}

FilterState initial_state(const FilterConfig& config, Rng& rng) {
    FilterState state;
    state.time = 0;
    state.phd.particles = sample_uniform_roi(config.sensor, config.birth.velocity_sigma,
                                             config.phd_particles, config.initial_phd_mass, rng);
    return state;
}

FilterState lmbp_step(const FilterState& state, const MeasurementFrame& frame,
                      const FilterConfig& config, Rng& rng, StepDiagnostics* diagnostics) {
    StepDiagnostics diag;
    const int k = state.time + 1;
    const SensorModel& sensor = config.sensor;

    // Prediction.
    const PoissonPhd birth =
        sample_birth_phd(config.birth, state.previous_frame, config.motion, sensor, rng);
    std::vector<BernoulliTrack> predicted;
    predicted.reserve(state.tracks.size());
    for (const auto& track : state.tracks) {
        try {
            predicted.push_back(predict_track(track, config.motion, rng));
        } catch (const std::domain_error&) {
            ++diag.annihilated;
        }
    }
    const PoissonPhd phd = predict_phd(state.phd, birth, config.motion, rng);

    // Association weights for every (label, measurement) pair and every measurement.
    const std::size_t label_count = predicted.size();
    const std::size_t meas_count = frame.size();
    std::vector<ProjectedParticles> projections;
    projections.reserve(label_count);
    std::vector<MissHypothesis> misses;
    misses.reserve(label_count);
    Eigen::MatrixXd betas(static_cast<Eigen::Index>(label_count), static_cast<Eigen::Index>(meas_count));
    std::vector<double> lik;
    for (std::size_t l = 0; l < label_count; ++l) {
        const BernoulliTrack& track = predicted[l];
        projections.emplace_back(sensor, track.pdf);
        misses.push_back(make_miss_hypothesis(track.existence, track.pdf, projections.back()));
        for (std::size_t m = 0; m < meas_count; ++m) {
            projections.back().detection_likelihoods(frame[m], lik);
            double b = 0.0;
            for (std::size_t i = 0; i < lik.size(); ++i) b += track.pdf[i].weight * lik[i];
            betas(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(m)) = track.existence * b;
        }
    }

    const ProjectedParticles phd_projection(sensor, phd.particles);
    std::vector<std::vector<double>> phd_lik(meas_count);
    std::vector<NewComponent> components;
    components.reserve(meas_count);
    for (std::size_t m = 0; m < meas_count; ++m) {
        phd_projection.detection_likelihoods(frame[m], phd_lik[m]);
        components.push_back(make_new_component(phd.particles, clutter_intensity(config.clutter, frame[m]),
                                                phd_lik[m], false));
    }
    auto materialize = [&](std::size_t m) -> const NewComponent& {
        NewComponent& comp = components[m];
        if (comp.pdf.empty() && comp.existence > 0.0) {
            comp = make_new_component(phd.particles, comp.clutter, phd_lik[m], true);
        }
        return comp;
    };

    std::vector<Label> labels;
    labels.reserve(label_count);
    for (const auto& track : predicted) labels.push_back(track.label);
    const Partition parts = partition(labels, betas, config.thresholds.gamma_c);
    diag.clusters = parts.clusters.size();

    std::vector<UpdatedTrack> updated;
    updated.reserve(label_count + meas_count);

    // Per-cluster association and update.
    for (const auto& part : parts.clusters) {
        const TransferSplit split =
            select_transfers(part.measurements, components, config.thresholds.gamma_tr, k);

        Cluster cluster;
        cluster.meas_indices = part.measurements;
        const auto local_meas = static_cast<Eigen::Index>(part.measurements.size());
        cluster.legacy_beta.resize(static_cast<Eigen::Index>(part.labels.size()), local_meas + 1);
        for (std::size_t i = 0; i < part.labels.size(); ++i) {
            const std::size_t l = part.labels[i];
            const auto row = static_cast<Eigen::Index>(i);
            cluster.legacy_labels.push_back(labels[l]);
            cluster.legacy_beta(row, 0) = misses[l].beta;
            for (Eigen::Index j = 0; j < local_meas; ++j) {
                cluster.legacy_beta(row, j + 1) =
                    betas(static_cast<Eigen::Index>(l),
                          static_cast<Eigen::Index>(part.measurements[static_cast<std::size_t>(j)]));
            }
        }
        for (std::size_t m : part.measurements) cluster.meas_beta.push_back(components[m].beta);
        for (std::size_t t = 0; t < split.transferred.size(); ++t) {
            cluster.transfer_labels.push_back(split.labels[t]);
            const auto pos = std::lower_bound(part.measurements.begin(), part.measurements.end(),
                                              split.transferred[t]);
            cluster.transfer_meas.push_back(
                static_cast<std::size_t>(pos - part.measurements.begin()));
        }

        const bool exact = config.marginals == MarginalMethod::exact && enumerable(cluster);
        const MarginalAssociation marg =
            exact ? exact_marginals(cluster) : bp_marginals(cluster, config.bp_iterations);
        if (exact) ++diag.exact_clusters;
        diag.largest_cluster_labels = std::max(
            diag.largest_cluster_labels, cluster.legacy_count() + cluster.transfer_count());

        for (std::size_t i = 0; i < part.labels.size(); ++i) {
            const std::size_t l = part.labels[i];
            const BernoulliTrack& track = predicted[l];
            std::vector<DetectionHypothesis> detections(part.measurements.size());
            for (std::size_t j = 0; j < part.measurements.size(); ++j) {
                if (!(marg.legacy[i][j + 1] > 0.0)) continue;
                projections[l].detection_likelihoods(frame[part.measurements[j]], lik);
                detections[j] = make_detection_hypothesis(track.existence, track.pdf, lik);
            }
            updated.push_back({update_legacy_track(labels[l], marg.legacy[i], misses[l], detections,
                                                   config.track_particles, rng),
                               false});
        }
        for (std::size_t t = 0; t < split.transferred.size(); ++t) {
            const NewComponent& comp = materialize(split.transferred[t]);
            updated.push_back({update_transferred_track(split.labels[t], marg.transfer[t][1], comp,
                                                        config.track_particles, rng),
                               true});
        }
        // Cluster measurements that were not transferred are pruned.
        diag.transfers += split.transferred.size();
    }

    // Residual measurements: transfer outright or hand to the PHD.
    const TransferSplit residual =
        select_transfers(parts.residual, components, config.thresholds.gamma_tr, k);
    for (std::size_t t = 0; t < residual.transferred.size(); ++t) {
        const NewComponent& comp = materialize(residual.transferred[t]);
        updated.push_back(
            {update_transferred_track(residual.labels[t], 1.0, comp, config.track_particles, rng), true});
    }
    diag.transfers += residual.transferred.size();
    std::vector<NewComponent> untransferred;
    untransferred.reserve(residual.remaining.size());
    for (std::size_t m : residual.remaining) untransferred.push_back(materialize(m));

    RetentionSplit retention = split_by_retention(std::move(updated), config.thresholds.gamma_leg);
    diag.recycled = retention.recycled.size();

    FilterState next;
    next.time = k;
    next.tracks = std::move(retention.kept);
    std::sort(next.tracks.begin(), next.tracks.end(),
              [](const BernoulliTrack& a, const BernoulliTrack& b) { return a.label < b.label; });
    next.phd = update_phd(retention.recycled, untransferred, phd, sensor, config.phd_particles, rng);
    next.previous_frame = frame;
    if (diagnostics) *diagnostics = diag;
    return next;
}

}  // namespace lmbp
