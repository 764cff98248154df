#include "dinfo/json_io.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace dinfo {

void reject_unknown_keys(const json& obj, const std::vector<std::string>& allowed,
                         const std::string& where) {
    if (!obj.is_object()) throw std::invalid_argument(where + ": expected a JSON object");
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const auto& a : allowed)
            if (key == a) {
                known = true;
                break;
            }
        if (!known) throw std::invalid_argument(where + ": unknown key \"" + key + "\"");
    }
}

json embedding_spec_to_json(const EmbeddingSpec& spec) {
    return json{{"target_past_lag", spec.target_past_lag},
                {"source_past_lag", spec.source_past_lag},
                {"cond_past_lag", spec.cond_past_lag},
                {"cond_includes_present", spec.cond_includes_present},
                {"source_includes_present", spec.source_includes_present}};
}

EmbeddingSpec embedding_spec_from_json(const json& j) {
    reject_unknown_keys(j,
                        {"target_past_lag", "source_past_lag", "cond_past_lag",
                         "cond_includes_present", "source_includes_present"},
                        "embedding spec");
    EmbeddingSpec spec;
    if (j.contains("target_past_lag")) spec.target_past_lag = j.at("target_past_lag").get<int>();
    if (j.contains("source_past_lag")) spec.source_past_lag = j.at("source_past_lag").get<int>();
    if (j.contains("cond_past_lag")) spec.cond_past_lag = j.at("cond_past_lag").get<int>();
    if (j.contains("cond_includes_present"))
        spec.cond_includes_present = j.at("cond_includes_present").get<bool>();
    if (j.contains("source_includes_present"))
        spec.source_includes_present = j.at("source_includes_present").get<bool>();
    spec.validate();
    return spec;
}

json estimator_config_to_json(const EstimatorConfig& cfg) {
    return json{{"k", cfg.k}, {"jitter_scale", cfg.jitter_scale}, {"seed", cfg.seed}};
}

EstimatorConfig estimator_config_from_json(const json& j) {
    reject_unknown_keys(j, {"k", "jitter_scale", "seed"}, "estimator config");
    EstimatorConfig cfg;
    if (j.contains("k")) cfg.k = j.at("k").get<int>();
    if (j.contains("jitter_scale")) cfg.jitter_scale = j.at("jitter_scale").get<double>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.validate();
    return cfg;
}

json inference_config_to_json(const InferenceConfig& cfg) {
    return json{{"spec", embedding_spec_to_json(cfg.spec)},
                {"estimator", estimator_config_to_json(cfg.estimator)},
                {"n_surrogates", cfg.n_surrogates},
                {"alpha", cfg.alpha},
                {"fdr_q", cfg.fdr_q},
                {"correction", to_string(cfg.correction)},
                {"seed", cfg.seed},
                {"min_shift", cfg.min_shift}};
}

InferenceConfig inference_config_from_json(const json& j) {
    reject_unknown_keys(j,
                        {"spec", "estimator", "n_surrogates", "alpha", "fdr_q", "correction",
                         "seed", "min_shift"},
                        "inference config");
    InferenceConfig cfg;
    if (j.contains("spec")) cfg.spec = embedding_spec_from_json(j.at("spec"));
    if (j.contains("estimator")) cfg.estimator = estimator_config_from_json(j.at("estimator"));
    if (j.contains("n_surrogates")) cfg.n_surrogates = j.at("n_surrogates").get<int>();
    if (j.contains("alpha")) cfg.alpha = j.at("alpha").get<double>();
    if (j.contains("fdr_q")) cfg.fdr_q = j.at("fdr_q").get<double>();
    if (j.contains("correction"))
        cfg.correction = correction_from_string(j.at("correction").get<std::string>());
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("min_shift")) cfg.min_shift = j.at("min_shift").get<double>();
    cfg.validate();
    return cfg;
}

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw std::invalid_argument(where + ": expected a matrix");
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    const Eigen::Index cols = static_cast<Eigen::Index>(j.at(0).size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = j.at(static_cast<std::size_t>(r));
        if (static_cast<Eigen::Index>(row.size()) != cols)
            throw std::invalid_argument(where + ": ragged matrix rows");
        for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
    return m;
}

json nan_to_null(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

}  // namespace

json var_model_to_json(const VarModel& model) {
    json coeffs = json::array();
    for (const auto& a : model.coeffs) coeffs.push_back(matrix_to_json(a));
    return json{{"order", model.order()},
                {"coeffs", coeffs},
                {"noise_cov", matrix_to_json(model.noise_cov)},
                {"names", model.names}};
}

VarModel var_model_from_json(const json& j) {
    reject_unknown_keys(j, {"order", "coeffs", "noise_cov", "names"}, "VAR model");
    VarModel model;
    const auto& coeffs = j.at("coeffs");
    if (!coeffs.is_array()) throw std::invalid_argument("VAR model: coeffs must be an array");
    for (const auto& a : coeffs) model.coeffs.push_back(matrix_from_json(a, "VAR coefficients"));
    model.noise_cov = matrix_from_json(j.at("noise_cov"), "VAR noise covariance");
    model.names = j.at("names").get<std::vector<std::string>>();
    if (j.contains("order") && j.at("order").get<int>() != model.order())
        throw std::invalid_argument("VAR model: order field disagrees with coeffs length");
    model.validate();
    return model;
}

VarModel load_var_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error(path + ": invalid JSON: " + e.what());
    }
    return var_model_from_json(j);
}

json measure_to_json(const MeasureEstimate& m) {
    return json{{"kind", to_string(m.kind)},
                {"source", m.source},
                {"target", m.target},
                {"cond", m.cond},
                {"value_nats", m.value},
                {"te_nats", nan_to_null(m.te)},
                {"iie_nats", nan_to_null(m.iie)},
                {"spec", embedding_spec_to_json(m.spec)},
                {"estimator", estimator_config_to_json(m.estimator)},
                {"n_effective", m.n_effective}};
}

json graph_to_json(const CausalityGraph& graph) {
    json directed = json::array();
    json undirected = json::array();
    if (!graph.results.empty()) {
        for (const auto& r : graph.results) {
            json entry{{"from", graph.nodes[static_cast<std::size_t>(r.from)]},
                       {"to", graph.nodes[static_cast<std::size_t>(r.to)]},
                       {"stat", r.statistic},
                       {"p", r.p_value},
                       {"reject", r.reject}};
            (r.kind == EdgeKind::Directed ? directed : undirected).push_back(std::move(entry));
        }
    } else {
        // Ground-truth graphs carry no test results, only the edge sets.
        for (const auto& [from, to] : graph.directed)
            directed.push_back(json{{"from", graph.nodes[static_cast<std::size_t>(from)]},
                                    {"to", graph.nodes[static_cast<std::size_t>(to)]}});
        for (const auto& [from, to] : graph.undirected)
            undirected.push_back(json{{"from", graph.nodes[static_cast<std::size_t>(from)]},
                                      {"to", graph.nodes[static_cast<std::size_t>(to)]}});
    }
    return json{{"nodes", graph.nodes}, {"directed", directed}, {"undirected", undirected}};
}

json joint_pmf_to_json(const JointPmf& pmf) {
    return json{{"t", pmf.t}, {"ax", pmf.ax}, {"ay", pmf.ay}, {"probs", pmf.probs}};
}

JointPmf joint_pmf_from_json(const json& j) {
    reject_unknown_keys(j, {"t", "ax", "ay", "probs"}, "joint pmf");
    JointPmf pmf;
    pmf.t = j.at("t").get<int>();
    pmf.ax = j.at("ax").get<int>();
    pmf.ay = j.at("ay").get<int>();
    pmf.probs = j.at("probs").get<std::vector<double>>();
    pmf.validate();
    return pmf;
}

}  // namespace dinfo
