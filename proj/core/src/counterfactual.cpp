#include "causal/counterfactual.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "causal/csv.hpp"
#include "causal/errors.hpp"

namespace causal {

namespace {

constexpr double kUnderflowDensity = 1e-300;
constexpr double kLogUnderflow = -690.7755278982137;  // ln(1e-300)
constexpr double kMaxLogWeight = 700.0;

double log_normal_density(double x, double mean, double sd) {
    const double z = (x - mean) / sd;
    return -0.5 * z * z - std::log(sd) - 0.9189385332046727;  // ln sqrt(2 pi)
}

}  // namespace

ImportanceWeights importance_weights(const GbnModel& model, const FactorReplacement& repl,
                                     const Dataset& data) {
    if (repl.node < 0 || repl.node >= model.num_nodes()) {
        throw std::invalid_argument("unknown node in factor replacement");
    }
    if (!(repl.new_noise_sd > 0.0)) {
        throw std::invalid_argument("replacement noise_sd must be positive");
    }
    const auto& base_weights = model.parent_weights(repl.node);
    if (repl.new_weights.size() != base_weights.size()) {
        throw std::invalid_argument("replacement must cover exactly the node's parents");
    }
    for (const auto& [p, w] : repl.new_weights) {
        if (!base_weights.count(p)) {
            throw std::invalid_argument("replacement weight for a non-parent");
        }
    }
    if (data.num_vars() != model.num_nodes()) {
        throw std::invalid_argument("data columns must match model nodes");
    }

    const long n = data.num_samples();
    ImportanceWeights out;
    out.values.resize(n);
    const double base_intercept = model.intercept(repl.node);
    const double base_sd = model.noise_sd(repl.node);
    for (long i = 0; i < n; ++i) {
        double mean_base = base_intercept;
        double mean_new = repl.new_intercept;
        for (const auto& [p, w] : base_weights) mean_base += w * data.value(i, p);
        for (const auto& [p, w] : repl.new_weights) mean_new += w * data.value(i, p);
        const double x = data.value(i, repl.node);
        const double log_base = log_normal_density(x, mean_base, base_sd);
        const double log_new = log_normal_density(x, mean_new, repl.new_noise_sd);
        double log_ratio = log_new - log_base;
        if (log_base < kLogUnderflow) {
            ++out.flagged;
            log_ratio = std::min(log_ratio, kMaxLogWeight);
        }
        out.values[i] = std::exp(log_ratio);
    }
    return out;
}

std::vector<double> winsorize_weights(std::vector<double> weights, double quantile) {
    if (quantile <= 0.0 || quantile > 1.0) {
        throw std::invalid_argument("winsorization quantile must lie in (0,1]");
    }
    if (weights.size() < 2 || quantile == 1.0) return weights;
    std::vector<double> sorted = weights;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t idx = std::min(
        sorted.size() - 1,
        static_cast<std::size_t>(quantile * static_cast<double>(sorted.size() - 1)));
    const double cap = sorted[idx];
    for (double& w : weights) w = std::min(w, cap);
    return weights;
}

SnisEstimate counterfactual_mean(const std::vector<double>& weights,
                                 const std::vector<double>& targets) {
    if (weights.size() != targets.size()) {
        throw std::invalid_argument("weights and targets must have equal length");
    }
    if (weights.empty()) throw std::invalid_argument("empty weight vector");
    double sum_w = 0.0;
    double sum_w2 = 0.0;
    double sum_wd = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] < 0.0) throw std::invalid_argument("negative importance weight");
        sum_w += weights[i];
        sum_w2 += weights[i] * weights[i];
        sum_wd += weights[i] * targets[i];
    }
    if (sum_w <= 0.0) {
        throw DegeneracyError("all importance weights are zero");
    }
    return {sum_wd / sum_w, sum_w * sum_w / sum_w2};
}

CeResult counterfactual_error(const CounterfactualQuery& query, const Pdag& learned_graph) {
    if (query.targets.empty()) throw std::invalid_argument("query has no target nodes");
    for (NodeId t : query.targets) {
        if (t == query.replacement.node) {
            throw std::invalid_argument("intervened node cannot be a target");
        }
    }
    if (learned_graph.num_nodes() != query.base_model.num_nodes()) {
        throw std::invalid_argument("learned graph node count does not match the model");
    }

    const DagExtension ext = extend_to_dag(learned_graph);
    const GbnModel fitted = fit_gbn(ext.dag, query.observational);

    // Transfer the query's factor changes onto the fitted factor: replaced
    // edges present in the learned parent set get the new weight, the rest of
    // the factor stays as fitted. Changed intercept/noise carry over as-is.
    const NodeId node = query.replacement.node;
    std::map<NodeId, double> new_weights(fitted.parent_weights(node));
    int missing = 0;
    for (const auto& [p, w_new] : query.replacement.new_weights) {
        if (w_new == query.base_model.weight(p, node)) continue;  // unchanged edge
        auto it = new_weights.find(p);
        if (it == new_weights.end()) {
            ++missing;
        } else {
            it->second = w_new;
        }
    }
    FactorReplacement fitted_repl;
    fitted_repl.node = node;
    fitted_repl.new_weights = std::move(new_weights);
    fitted_repl.new_intercept =
        query.replacement.new_intercept != query.base_model.intercept(node)
            ? query.replacement.new_intercept
            : fitted.intercept(node);
    fitted_repl.new_noise_sd =
        query.replacement.new_noise_sd != query.base_model.noise_sd(node)
            ? query.replacement.new_noise_sd
            : fitted.noise_sd(node);

    ImportanceWeights w = importance_weights(fitted, fitted_repl, query.observational);
    std::vector<double> weights =
        query.winsorize ? winsorize_weights(std::move(w.values)) : std::move(w.values);

    double sum_act = 0.0;
    double sum_diff = 0.0;
    double ess = 0.0;
    for (NodeId t : query.targets) {
        const double mean_obs = query.observational.column_mean(t);
        const double mean_int = query.interventional.column_mean(t);
        const Eigen::VectorXd col = query.observational.column(t);
        const SnisEstimate est = counterfactual_mean(
            weights, std::vector<double>(col.begin(), col.end()));
        ess = est.ess;
        const double delta_act = std::abs(mean_obs - mean_int);
        const double delta_pred = std::abs(mean_obs - est.mean);
        sum_act += delta_act;
        sum_diff += delta_act - delta_pred;
    }
    if (sum_act == 0.0) {
        throw DegeneracyError("null intervention: actual target shifts sum to zero");
    }
    return {sum_diff / sum_act, ess, missing, ext.used_fallback};
}

CounterfactualQuery load_counterfactual_query(const std::string& json_text,
                                              const GbnModel& base_model,
                                              const std::string& base_dir) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid counterfactual query JSON: ") + e.what());
    }
    auto node_by_name = [&](const std::string& name) -> NodeId {
        const auto& names = base_model.node_names();
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (names[i] == name) return static_cast<NodeId>(i);
        }
        throw ParseError("unknown node '" + name + "' in counterfactual query");
    };
    auto resolve = [&](const std::string& p) {
        return p.empty() || p.front() == '/' || base_dir.empty() ? p : base_dir + "/" + p;
    };
    try {
        const NodeId node = node_by_name(j.at("intervene").get<std::string>());
        FactorReplacement repl;
        repl.node = node;
        repl.new_weights = base_model.parent_weights(node);
        for (const auto& [name, w] : j.at("new_weights").items()) {
            const NodeId p = node_by_name(name);
            if (!repl.new_weights.count(p)) {
                throw ParseError("'" + name + "' is not a parent of the intervened node");
            }
            repl.new_weights[p] = w.get<double>();
        }
        repl.new_intercept = j.value("new_intercept", base_model.intercept(node));
        repl.new_noise_sd = j.value("new_noise_sd", base_model.noise_sd(node));
        std::vector<NodeId> targets;
        for (const auto& t : j.at("targets")) targets.push_back(node_by_name(t.get<std::string>()));
        if (targets.empty()) throw ParseError("counterfactual query has no targets");
        Dataset obs = read_csv(resolve(j.at("obs").get<std::string>()));
        Dataset intv = read_csv(resolve(j.at("int").get<std::string>()));
        return CounterfactualQuery{base_model, std::move(repl), std::move(targets),
                                   std::move(obs), std::move(intv),
                                   j.value("winsorize", true)};
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid counterfactual query JSON: ") + e.what());
    }
}

std::string counterfactual_query_to_json(const CounterfactualQuery& query,
                                         const std::string& obs_path,
                                         const std::string& int_path) {
    const auto& names = query.base_model.node_names();
    nlohmann::json j;
    j["intervene"] = names[query.replacement.node];
    nlohmann::json w = nlohmann::json::object();
    for (const auto& [p, val] : query.replacement.new_weights) {
        if (val != query.base_model.weight(p, query.replacement.node)) w[names[p]] = val;
    }
    j["new_weights"] = w;
    nlohmann::json t = nlohmann::json::array();
    for (NodeId v : query.targets) t.push_back(names[v]);
    j["targets"] = t;
    j["obs"] = obs_path;
    j["int"] = int_path;
    j["winsorize"] = query.winsorize;
    return j.dump(2);
}

}  // namespace causal
