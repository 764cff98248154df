#pragma once

#include <json.hpp>
#include <string>

#include "dinfo/discrete_exact.hpp"
#include "dinfo/directed_measures.hpp"
#include "dinfo/gaussian_oracle.hpp"
#include "dinfo/graph_inference.hpp"

namespace dinfo {

using nlohmann::json;

/// Throws if obj carries a key outside `allowed` (config files are validated
/// strictly so typos cannot silently change a run).
void reject_unknown_keys(const json& obj, const std::vector<std::string>& allowed,
                         const std::string& where);

json embedding_spec_to_json(const EmbeddingSpec& spec);
EmbeddingSpec embedding_spec_from_json(const json& j);

json estimator_config_to_json(const EstimatorConfig& cfg);
EstimatorConfig estimator_config_from_json(const json& j);

json inference_config_to_json(const InferenceConfig& cfg);
InferenceConfig inference_config_from_json(const json& j);

/// {order, coeffs, noise_cov, names}: coeffs is a list of M x M matrices in
/// nested-array form.
json var_model_to_json(const VarModel& model);
VarModel var_model_from_json(const json& j);
VarModel load_var_model(const std::string& path);

/// {kind, source, target, cond, value_nats, te_nats, iie_nats, spec,
///  estimator, n_effective}; absent addends serialize as null.
json measure_to_json(const MeasureEstimate& m);

/// {nodes, directed:[{from,to,stat,p,reject}], undirected:[...]}; the caller
/// may attach the resolved config under "config".
json graph_to_json(const CausalityGraph& graph);

/// Test-fixture form {t, ax, ay, probs} with probs row-major over
/// (x_{1:t}, y_{1:t}).
json joint_pmf_to_json(const JointPmf& pmf);
JointPmf joint_pmf_from_json(const json& j);

}  // namespace dinfo
