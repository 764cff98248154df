#include "dinfo/directed_measures.hpp"

#include <stdexcept>

namespace dinfo {

namespace {

RowMatrix hstack(const RowMatrix& a, const RowMatrix& b) {
    if (a.cols() == 0) return b;
    if (b.cols() == 0) return a;
    RowMatrix out(a.rows(), a.cols() + b.cols());
    out.block(0, 0, a.rows(), a.cols()) = a;
    out.block(0, a.cols(), b.rows(), b.cols()) = b;
    return out;
}

std::vector<std::string> cond_names(const TimeSeriesSet& ts, const std::vector<Eigen::Index>& cond) {
    std::vector<std::string> names;
    for (Eigen::Index c : cond) names.push_back(ts.names[static_cast<std::size_t>(c)]);
    return names;
}

MeasureEstimate make_result(MeasureKind kind, const TimeSeriesSet& ts, Eigen::Index source,
                            Eigen::Index target, const std::vector<Eigen::Index>& cond,
                            const EmbeddingSpec& spec, const EstimatorConfig& est,
                            Eigen::Index n_effective) {
    MeasureEstimate r;
    r.kind = kind;
    r.source = ts.names[static_cast<std::size_t>(source)];
    r.target = ts.names[static_cast<std::size_t>(target)];
    r.cond = cond_names(ts, cond);
    r.spec = spec;
    r.estimator = est;
    r.n_effective = n_effective;
    return r;
}

double te_from_cloud(const EmbeddedCloud& cloud, const EstimatorConfig& est,
                     NeighborBackend backend) {
    const RowMatrix z = cloud.cond_block ? hstack(cloud.target_past, *cloud.cond_block)
                                         : cloud.target_past;
    return fp_cmi(cloud.source_past, cloud.target_now, z, est, backend);
}

double iie_from_cloud(const EmbeddedCloud& cloud, const EstimatorConfig& est,
                      NeighborBackend backend) {
    RowMatrix z = hstack(cloud.source_past, cloud.target_past);
    if (cloud.cond_block) z = hstack(z, *cloud.cond_block);
    return fp_cmi(*cloud.source_now, cloud.target_now, z, est, backend);
}

}  // namespace

std::string to_string(MeasureKind kind) {
    switch (kind) {
        case MeasureKind::TE: return "TE";
        case MeasureKind::IIE: return "IIE";
        case MeasureKind::DI: return "DI";
    }
    throw std::logic_error("unknown measure kind");
}

MeasureKind measure_kind_from_string(const std::string& s) {
    if (s == "TE") return MeasureKind::TE;
    if (s == "IIE") return MeasureKind::IIE;
    if (s == "DI") return MeasureKind::DI;
    throw std::invalid_argument("unknown measure kind: " + s);
}

MeasureEstimate transfer_entropy_rate(const TimeSeriesSet& ts, Eigen::Index source,
                                      Eigen::Index target, const std::vector<Eigen::Index>& cond,
                                      const EmbeddingSpec& spec, const EstimatorConfig& est,
                                      NeighborBackend backend) {
    EmbeddingSpec effective = spec;
    effective.source_includes_present = false;
    const EmbeddedCloud cloud = embed(ts, effective, source, target, cond);
    MeasureEstimate r = make_result(MeasureKind::TE, ts, source, target, cond, effective, est, cloud.n);
    r.value = r.te = te_from_cloud(cloud, est, backend);
    return r;
}

MeasureEstimate instantaneous_exchange_rate(const TimeSeriesSet& ts, Eigen::Index source,
                                            Eigen::Index target,
                                            const std::vector<Eigen::Index>& cond,
                                            const EmbeddingSpec& spec, const EstimatorConfig& est,
                                            NeighborBackend backend) {
    EmbeddingSpec effective = spec;
    effective.source_includes_present = true;
    const EmbeddedCloud cloud = embed(ts, effective, source, target, cond);
    MeasureEstimate r =
        make_result(MeasureKind::IIE, ts, source, target, cond, effective, est, cloud.n);
    r.value = r.iie = iie_from_cloud(cloud, est, backend);
    return r;
}

MeasureEstimate directed_info_rate(const TimeSeriesSet& ts, Eigen::Index source,
                                   Eigen::Index target, const std::vector<Eigen::Index>& cond,
                                   const EmbeddingSpec& spec, const EstimatorConfig& est,
                                   NeighborBackend backend) {
    EmbeddingSpec effective = spec;
    effective.source_includes_present = true;
    const EmbeddedCloud cloud = embed(ts, effective, source, target, cond);
    MeasureEstimate r = make_result(MeasureKind::DI, ts, source, target, cond, effective, est, cloud.n);
    r.te = te_from_cloud(cloud, est, backend);
    r.iie = iie_from_cloud(cloud, est, backend);
    r.value = r.te + r.iie;
    return r;
}

MeasureEstimate estimate_measure(MeasureKind kind, const TimeSeriesSet& ts, Eigen::Index source,
                                 Eigen::Index target, const std::vector<Eigen::Index>& cond,
                                 const EmbeddingSpec& spec, const EstimatorConfig& est,
                                 NeighborBackend backend) {
    switch (kind) {
        case MeasureKind::TE:
            return transfer_entropy_rate(ts, source, target, cond, spec, est, backend);
        case MeasureKind::IIE:
            return instantaneous_exchange_rate(ts, source, target, cond, spec, est, backend);
        case MeasureKind::DI:
            return directed_info_rate(ts, source, target, cond, spec, est, backend);
    }
    throw std::logic_error("unknown measure kind");
}

MeasureEngine::MeasureEngine(MeasureKind kind, const TimeSeriesSet& ts, Eigen::Index source,
                             Eigen::Index target, const std::vector<Eigen::Index>& cond,
                             const EmbeddingSpec& spec, const EstimatorConfig& est,
                             NeighborBackend backend)
    : kind_(kind),
      source_(source),
      target_(target),
      cond_(cond),
      spec_(spec),
      est_(est),
      backend_(backend) {
    spec_.source_includes_present = kind == MeasureKind::IIE;
    const bool eligible = backend == NeighborBackend::KdTreeIndex &&
                          est.jitter_scale == 0.0 && kind != MeasureKind::DI;
    if (!eligible) return;

    // The fixed conditioning block never involves the source channel:
    // target past plus the conditioning channels' windows.
    const EmbeddedCloud cloud = embed(ts, spec_, source, target, cond);
    const RowMatrix z_fixed = cloud.cond_block ? hstack(cloud.target_past, *cloud.cond_block)
                                               : cloud.target_past;
    if (z_fixed.cols() < 2) return;
    workspace_ = std::make_unique<FpCmiWorkspace>(z_fixed, cloud.target_now, est);
}

double MeasureEngine::evaluate(const TimeSeriesSet& ts_variant) const {
    if (!workspace_)
        return estimate_measure(kind_, ts_variant, source_, target_, cond_, spec_, est_, backend_)
            .value;
    const EmbeddedCloud cloud = embed(ts_variant, spec_, source_, target_, cond_);
    const RowMatrix empty(cloud.n, 0);
    if (kind_ == MeasureKind::TE) return workspace_->evaluate(cloud.source_past, empty);
    return workspace_->evaluate(*cloud.source_now, cloud.source_past);
}

}  // namespace dinfo
