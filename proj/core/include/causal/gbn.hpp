#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "causal/dataset.hpp"
#include "causal/graph.hpp"

namespace causal {

/// Clamp intervention: fix one node to a value, severing its mechanism.
struct ClampSpec {
    NodeId node;
    double value;
};

/// Linear-Gaussian Bayesian network: x_v = intercept_v + sum_p w(p,v) x_p + eps_v
/// with eps_v ~ N(0, noise_sd_v^2).
class GbnModel {
public:
    GbnModel(Dag dag, std::map<Edge, double> weights, Eigen::VectorXd intercepts,
             Eigen::VectorXd noise_sd);

    const Dag& dag() const { return dag_; }
    int num_nodes() const { return dag_.num_nodes(); }
    const std::vector<std::string>& node_names() const { return dag_.node_names(); }
    void set_node_names(std::vector<std::string> names) { dag_.set_node_names(std::move(names)); }

    double weight(NodeId parent, NodeId child) const;
    const std::map<NodeId, double>& parent_weights(NodeId child) const;
    double intercept(NodeId v) const { return intercepts_(v); }
    double noise_sd(NodeId v) const { return noise_sd_(v); }
    const Eigen::VectorXd& intercepts() const { return intercepts_; }
    const Eigen::VectorXd& noise_sds() const { return noise_sd_; }

    /// Copy of the model with the factor of one node replaced. The new weight
    /// map must cover exactly the node's parents.
    GbnModel with_factor(NodeId node, const std::map<NodeId, double>& weights, double intercept,
                         double noise_sd) const;

    /// Child-indexed weight matrix: A(child, parent) = w(parent, child).
    Eigen::MatrixXd weight_matrix() const;

private:
    Dag dag_;
    std::vector<std::map<NodeId, double>> weights_;  // by child
    Eigen::VectorXd intercepts_;
    Eigen::VectorXd noise_sd_;
};

/// Random model per the simulation protocol: DAG over a random topological
/// order with the given edge probability, weights uniform on
/// (-1,-0.25) u (0.25,1), intercepts uniform on (50,500), noise standard
/// deviations uniform on (5,100). Fully determined by the seed.
GbnModel random_gbn(int num_nodes, double edge_probability = 0.3, std::uint64_t seed = 0);

/// Ancestral sampling in topological order.
Dataset sample_observational(const GbnModel& model, int n, std::uint64_t seed);

/// Graph-surgery sampling: the clamped node is fixed and its structural
/// equation ignored; every row carries the intervention tag.
Dataset sample_interventional(const GbnModel& model, const ClampSpec& clamp, int n,
                              std::uint64_t seed);

struct Gaussian {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

/// Exact joint distribution: mean = (I-A)^-1 c, cov = (I-A)^-1 D (I-A)^-T.
Gaussian joint_gaussian(const GbnModel& model);

/// Joint distribution of the mutilated model: incoming edges of the clamped
/// node removed, its marginal a point mass at the clamp value.
Gaussian interventional_gaussian(const GbnModel& model, const ClampSpec& clamp);

/// Per-node OLS fit on the given DAG. noise_sd uses the (n - |parents| - 1)
/// denominator, floored at 1e-12 to keep it positive on interpolating fits.
GbnModel fit_gbn(const Dag& dag, const Dataset& data);

/// Linear form of E[x_v | rest]: prediction = bias + coef . x_rest, where
/// x_rest are the other m-1 coordinates in ascending node order.
struct LinearPredictor {
    double bias = 0.0;
    Eigen::VectorXd coef;
};
LinearPredictor predictor_given_rest(const Gaussian& joint, NodeId node);

/// Conditional mean of `node` given values for all other nodes. `assignment`
/// has one entry per node; the entry at `node` is ignored.
double predict_node_given_rest(const GbnModel& model, NodeId node,
                               const std::vector<double>& assignment);

/// Model JSON:
///   {"nodes":[...], "edges":[{"from":i,"to":j,"weight":w}],
///    "intercepts":[...], "noise_sd":[...]}
std::string to_json(const GbnModel& model);
GbnModel gbn_from_json(const std::string& text);

}  // namespace causal
