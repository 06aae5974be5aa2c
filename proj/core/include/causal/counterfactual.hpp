#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "causal/dataset.hpp"
#include "causal/gbn.hpp"
#include "causal/graph.hpp"

namespace causal {

/// Replacement of the conditional factor of one node: same parents, new
/// weights/intercept/noise.
struct FactorReplacement {
    NodeId node = 0;
    std::map<NodeId, double> new_weights;  // must cover exactly the node's parents
    double new_intercept = 0.0;
    double new_noise_sd = 1.0;
};

struct ImportanceWeights {
    std::vector<double> values;
    /// Samples whose base factor density underflowed (< 1e-300); their
    /// weights are capped rather than propagated as inf.
    long flagged = 0;
};

/// Per-sample density ratio of the replacement factor to the model's current
/// factor for the replaced node, evaluated at each sample's parent values.
ImportanceWeights importance_weights(const GbnModel& model, const FactorReplacement& repl,
                                     const Dataset& data);

/// Caps weights above the given quantile at that quantile (guard against
/// weight degeneracy under heavy distribution shift).
std::vector<double> winsorize_weights(std::vector<double> weights, double quantile = 0.999);

struct SnisEstimate {
    double mean = 0.0;
    /// Kish effective sample size (sum w)^2 / sum w^2.
    double ess = 0.0;
};

/// Self-normalized importance-sampling mean: sum(w_i d_i) / sum(w_i).
SnisEstimate counterfactual_mean(const std::vector<double>& weights,
                                 const std::vector<double>& targets);

/// A counterfactual benchmark query: the data-generating model, a factor
/// replacement on it, target nodes, and the observational/interventional
/// datasets (the latter sampled under the replacement).
struct CounterfactualQuery {
    GbnModel base_model;
    FactorReplacement replacement;
    std::vector<NodeId> targets;
    Dataset observational;
    Dataset interventional;
    bool winsorize = true;
};

struct CeResult {
    double ce = 0.0;
    double ess = 0.0;
    /// Replaced edges absent from the learned graph (factor used as fitted).
    int missing_edges = 0;
    bool used_fallback_extension = false;
};

/// Counterfactual error of a learned graph: fit a GBN on the observational
/// data over extend_to_dag(learned), apply the query's edge replacements to
/// the fitted factor, estimate each target's counterfactual mean by
/// reweighting, and compare the predicted shifts against the actual ones:
///   CE = sum_t (delta_act - delta_pred) / sum_t delta_act.
CeResult counterfactual_error(const CounterfactualQuery& query, const Pdag& learned_graph);

/// Query JSON:
///   {"intervene":"G6","new_weights":{"G3":0.8},"targets":["G1","G5"],
///    "obs":"obs.csv","int":"int.csv"}
/// Node names resolve against the base model; datasets load from the paths
/// (relative to base_dir).
CounterfactualQuery load_counterfactual_query(const std::string& json_text,
                                              const GbnModel& base_model,
                                              const std::string& base_dir);

std::string counterfactual_query_to_json(const CounterfactualQuery& query,
                                         const std::string& obs_path,
                                         const std::string& int_path);

}  // namespace causal
