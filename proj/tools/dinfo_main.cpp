// dinfo: simulate VAR models, estimate directed-information rate measures,
// infer Granger causality graphs, and print analytic oracle values.
//
// Exit codes: 0 ok, 2 config/usage error, 3 invalid model, 4 numerical failure.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "dinfo/gaussian_oracle.hpp"
#include "dinfo/graph_inference.hpp"
#include "dinfo/json_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitModel = 3;
constexpr int kExitNumerical = 4;

int fail(int code, const std::string& message) {
    std::cerr << "dinfo: " << message << "\n";
    return code;
}

struct SpecFlags {
    int lags = 0;  // 0: keep per-block values
    dinfo::EmbeddingSpec spec;

    dinfo::EmbeddingSpec resolve() const {
        dinfo::EmbeddingSpec s = spec;
        if (lags > 0) {
            s.target_past_lag = lags;
            s.source_past_lag = lags;
            s.cond_past_lag = lags;
        }
        s.validate();
        return s;
    }
};

void add_spec_flags(CLI::App* cmd, SpecFlags& flags) {
    cmd->add_option("--lags", flags.lags, "Set target, source and cond past lags at once");
    cmd->add_option("--target-lag", flags.spec.target_past_lag, "Target past lag q");
    cmd->add_option("--source-lag", flags.spec.source_past_lag, "Source past lag p");
    cmd->add_option("--cond-lag", flags.spec.cond_past_lag, "Conditioning past lag r");
    cmd->add_flag("--cond-present,!--no-cond-present", flags.spec.cond_includes_present,
                  "Include the conditioning channels' present samples (default on)");
}

void add_estimator_flags(CLI::App* cmd, dinfo::EstimatorConfig& est) {
    cmd->add_option("--k", est.k, "Neighbor count for the k-NN estimator");
    cmd->add_option("--jitter", est.jitter_scale, "Relative tie-breaking jitter amplitude");
    cmd->add_option("--est-seed", est.seed, "Estimator jitter seed");
}

std::vector<Eigen::Index> resolve_channels(const dinfo::TimeSeriesSet& ts,
                                           const std::vector<std::string>& names) {
    std::vector<Eigen::Index> out;
    for (const auto& n : names) out.push_back(ts.channel_index(n));
    return out;
}

bool parse_lag_range(const std::string& text, int& lo, int& hi) {
    const auto pos = text.find("..");
    if (pos == std::string::npos) return false;
    try {
        lo = std::stoi(text.substr(0, pos));
        hi = std::stoi(text.substr(pos + 2));
    } catch (...) {
        return false;
    }
    return lo >= 1 && hi >= lo;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

int run_simulate(const std::string& model_path, long samples, std::uint64_t seed, long burn_in,
                 const std::string& out_path) {
    dinfo::VarModel model;
    try {
        model = dinfo::load_var_model(model_path);
        model.require_stationary();
    } catch (const std::exception& e) {
        return fail(kExitModel, e.what());
    }
    try {
        const dinfo::TimeSeriesSet ts = dinfo::simulate_var(model, samples, seed, burn_in);
        dinfo::write_csv(ts, out_path);
    } catch (const std::exception& e) {
        return fail(kExitConfig, e.what());
    }
    return kExitOk;
}

int run_estimate(const std::string& data_path, bool no_header, bool no_standardize,
                 const std::string& measure, const std::string& source, const std::string& target,
                 const std::vector<std::string>& cond, const SpecFlags& spec_flags,
                 const dinfo::EstimatorConfig& est, const std::string& sweep) {
    dinfo::TimeSeriesSet ts;
    dinfo::MeasureKind kind;
    std::vector<Eigen::Index> cond_idx;
    Eigen::Index src = 0, tgt = 0;
    dinfo::EmbeddingSpec spec;
    int sweep_lo = 0, sweep_hi = 0;
    try {
        kind = dinfo::measure_kind_from_string(measure);
        est.validate();
        spec = spec_flags.resolve();
        ts = dinfo::load_csv(data_path, !no_header);
        src = ts.channel_index(source);
        tgt = ts.channel_index(target);
        cond_idx = resolve_channels(ts, cond);
        if (!no_standardize) ts = dinfo::standardize(ts);
        if (!sweep.empty() && !parse_lag_range(sweep, sweep_lo, sweep_hi))
            throw std::invalid_argument("--sweep-lags expects L1..L2 with 1 <= L1 <= L2");
    } catch (const std::exception& e) {
        return fail(kExitConfig, e.what());
    }

    try {
        if (sweep.empty()) {
            const dinfo::MeasureEstimate m =
                dinfo::estimate_measure(kind, ts, src, tgt, cond_idx, spec, est);
            std::cout << dinfo::measure_to_json(m).dump(2) << "\n";
        } else {
            dinfo::json all = dinfo::json::array();
            for (int lag = sweep_lo; lag <= sweep_hi; ++lag) {
                dinfo::EmbeddingSpec s = spec;
                s.target_past_lag = s.source_past_lag = s.cond_past_lag = lag;
                all.push_back(dinfo::measure_to_json(
                    dinfo::estimate_measure(kind, ts, src, tgt, cond_idx, s, est)));
            }
            std::cout << all.dump(2) << "\n";
        }
    } catch (const std::exception& e) {
        return fail(kExitNumerical, e.what());
    }
    return kExitOk;
}

struct InferOverrides {
    std::optional<int> n_surrogates, lags, k;
    std::optional<double> alpha, fdr_q, min_shift;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> correction;
};

int run_infer(const std::string& data_path, bool no_header, bool no_standardize,
              const std::string& config_path, const std::string& out_dot,
              const std::string& out_json, const InferOverrides& overrides) {
    dinfo::TimeSeriesSet ts;
    dinfo::InferenceConfig cfg;
    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw std::runtime_error("cannot open config file: " + config_path);
            dinfo::json j;
            in >> j;
            cfg = dinfo::inference_config_from_json(j);
        }
        // Flags override config-file values.
        dinfo::json merged = dinfo::inference_config_to_json(cfg);
        if (overrides.n_surrogates) merged["n_surrogates"] = *overrides.n_surrogates;
        if (overrides.seed) merged["seed"] = *overrides.seed;
        if (overrides.alpha) merged["alpha"] = *overrides.alpha;
        if (overrides.fdr_q) merged["fdr_q"] = *overrides.fdr_q;
        if (overrides.correction) merged["correction"] = *overrides.correction;
        if (overrides.min_shift) merged["min_shift"] = *overrides.min_shift;
        if (overrides.k) merged["estimator"]["k"] = *overrides.k;
        if (overrides.lags) {
            merged["spec"]["target_past_lag"] = *overrides.lags;
            merged["spec"]["source_past_lag"] = *overrides.lags;
            merged["spec"]["cond_past_lag"] = *overrides.lags;
        }
        cfg = dinfo::inference_config_from_json(merged);
        ts = dinfo::load_csv(data_path, !no_header);
        if (!no_standardize) ts = dinfo::standardize(ts);
    } catch (const std::exception& e) {
        return fail(kExitConfig, e.what());
    }

    dinfo::CausalityGraph graph;
    try {
        graph = dinfo::infer_graph(ts, cfg);
    } catch (const std::exception& e) {
        return fail(kExitNumerical, e.what());
    }

    try {
        dinfo::json out = dinfo::graph_to_json(graph);
        out["config"] = dinfo::inference_config_to_json(cfg);
        if (!out_json.empty()) write_text_file(out_json, out.dump(2) + "\n");
        if (!out_dot.empty()) write_text_file(out_dot, dinfo::graph_to_dot(graph));
    } catch (const std::exception& e) {
        return fail(kExitConfig, e.what());
    }

    for (const auto& r : graph.results) {
        const auto& a = graph.nodes[static_cast<std::size_t>(r.from)];
        const auto& b = graph.nodes[static_cast<std::size_t>(r.to)];
        std::cout << dinfo::to_string(r.kind) << " " << a
                  << (r.kind == dinfo::EdgeKind::Directed ? " -> " : " -- ") << b
                  << "  stat=" << r.statistic << "  p=" << r.p_value
                  << (r.reject ? "  [edge]" : "") << "\n";
    }
    return kExitOk;
}

int run_oracle(const std::string& model_path, const std::string& measure,
               const std::string& source, const std::string& target,
               const std::vector<std::string>& cond, const SpecFlags& spec_flags, double tol) {
    dinfo::VarModel model;
    try {
        model = dinfo::load_var_model(model_path);
        model.require_stationary();
    } catch (const std::exception& e) {
        return fail(kExitModel, e.what());
    }

    try {
        if (measure == "graph") {
            const dinfo::CausalityGraph g = dinfo::true_graph(model, tol);
            std::cout << dinfo::graph_to_json(g).dump(2) << "\n";
            return kExitOk;
        }
        const dinfo::MeasureKind kind = dinfo::measure_kind_from_string(measure);
        dinfo::TimeSeriesSet dummy;  // only used to resolve channel names
        dummy.names = model.names;
        dummy.values.setZero(1, model.channel_count());
        const Eigen::Index src = dummy.channel_index(source);
        const Eigen::Index tgt = dummy.channel_index(target);
        const std::vector<Eigen::Index> cond_idx = resolve_channels(dummy, cond);
        const double value =
            dinfo::analytic_rate(model, kind, src, tgt, cond_idx, spec_flags.resolve());
        std::cout.precision(17);
        std::cout << value << "\n";
    } catch (const std::invalid_argument& e) {
        return fail(kExitConfig, e.what());
    } catch (const std::exception& e) {
        return fail(kExitNumerical, e.what());
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"directed information rate measures and Granger causality graphs"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Simulate a VAR model to CSV");
    std::string sim_model, sim_out;
    long sim_samples = 0, sim_burn_in = 0;
    std::uint64_t sim_seed = 0;
    sim->add_option("--model", sim_model, "VAR model JSON file")->required();
    sim->add_option("--samples", sim_samples, "Number of output samples")->required();
    sim->add_option("--seed", sim_seed, "Simulation seed");
    sim->add_option("--burn-in", sim_burn_in, "Samples discarded before recording starts");
    sim->add_option("--out", sim_out, "Output CSV path")->required();

    // estimate
    auto* est_cmd = app.add_subcommand("estimate", "Estimate TE, IIE or DI from CSV data");
    std::string est_data, est_measure, est_source, est_target, est_sweep;
    std::vector<std::string> est_cond;
    bool est_no_header = false, est_no_standardize = false;
    SpecFlags est_spec;
    dinfo::EstimatorConfig est_cfg;
    est_cmd->add_option("--data", est_data, "Input CSV")->required();
    est_cmd->add_flag("--no-header", est_no_header, "Input CSV has no header row");
    est_cmd->add_flag("--no-standardize", est_no_standardize,
                      "Skip channel standardization before estimation");
    est_cmd->add_option("--measure", est_measure, "TE, IIE or DI")->required();
    est_cmd->add_option("--source", est_source, "Source channel name")->required();
    est_cmd->add_option("--target", est_target, "Target channel name")->required();
    est_cmd->add_option("--cond", est_cond, "Conditioning channel names");
    est_cmd->add_option("--sweep-lags", est_sweep,
                        "Emit the measure at every lag in L1..L2 (truncation-bias sweep)");
    add_spec_flags(est_cmd, est_spec);
    add_estimator_flags(est_cmd, est_cfg);

    // infer
    auto* inf = app.add_subcommand("infer", "Infer the Granger causality graph from CSV data");
    std::string inf_data, inf_config, inf_dot, inf_json;
    bool inf_no_header = false, inf_no_standardize = false;
    std::optional<int> inf_surrogates, inf_lags, inf_k;
    std::optional<double> inf_alpha, inf_q, inf_min_shift;
    std::optional<std::uint64_t> inf_seed;
    std::optional<std::string> inf_correction;
    inf->add_option("--data", inf_data, "Input CSV")->required();
    inf->add_flag("--no-header", inf_no_header, "Input CSV has no header row");
    inf->add_flag("--no-standardize", inf_no_standardize,
                  "Skip channel standardization before inference");
    inf->add_option("--config", inf_config, "Inference config JSON file");
    inf->add_option("--out-dot", inf_dot, "Graph output in DOT form");
    inf->add_option("--out-json", inf_json, "Graph output in JSON form");
    inf->add_option("--n-surrogates", inf_surrogates, "Surrogates per edge test");
    inf->add_option("--seed", inf_seed, "Master seed");
    inf->add_option("--alpha", inf_alpha, "Bonferroni level");
    inf->add_option("--q", inf_q, "BH false discovery rate target");
    inf->add_option("--correction", inf_correction, "BH or bonferroni");
    inf->add_option("--min-shift", inf_min_shift, "Minimum surrogate shift fraction");
    inf->add_option("--lags", inf_lags, "Set all embedding lags");
    inf->add_option("--k", inf_k, "Estimator neighbor count");

    // oracle
    auto* settings = app.add_subcommand("oracle", "Analytic rates / true graph of a VAR model");
    std::string ora_model, ora_measure, ora_source, ora_target;
    std::vector<std::string> ora_cond;
    double ora_tol = 1e-9;
    SpecFlags ora_spec;
    settings->add_option("--model", ora_model, "VAR model JSON file")->required();
    settings->add_option("--measure", ora_measure, "TE, IIE, DI or graph")->required();
    settings->add_option("--source", ora_source, "Source channel name");
    settings->add_option("--target", ora_target, "Target channel name");
    settings->add_option("--cond", ora_cond, "Conditioning channel names");
    settings->add_option("--tol", ora_tol, "Edge threshold for the true graph");
    add_spec_flags(settings, ora_spec);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitConfig;
    }

    if (sim->parsed()) return run_simulate(sim_model, sim_samples, sim_seed, sim_burn_in, sim_out);
    if (est_cmd->parsed())
        return run_estimate(est_data, est_no_header, est_no_standardize, est_measure, est_source,
                            est_target, est_cond, est_spec, est_cfg, est_sweep);
    if (inf->parsed()) {
        InferOverrides overrides;
        overrides.n_surrogates = inf_surrogates;
        overrides.seed = inf_seed;
        overrides.alpha = inf_alpha;
        overrides.fdr_q = inf_q;
        overrides.correction = inf_correction;
        overrides.min_shift = inf_min_shift;
        overrides.k = inf_k;
        overrides.lags = inf_lags;
        return run_infer(inf_data, inf_no_header, inf_no_standardize, inf_config, inf_dot,
                         inf_json, overrides);
    }
    if (settings->parsed())
        return run_oracle(ora_model, ora_measure, ora_source, ora_target, ora_cond, ora_spec,
                          ora_tol);
    return kExitConfig;
}
