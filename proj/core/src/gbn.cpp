#include "causal/gbn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "causal/errors.hpp"
#include "causal/rng.hpp"

namespace causal {

GbnModel::GbnModel(Dag dag, std::map<Edge, double> weights, Eigen::VectorXd intercepts,
                   Eigen::VectorXd noise_sd)
    : dag_(std::move(dag)),
      weights_(dag_.num_nodes()),
      intercepts_(std::move(intercepts)),
      noise_sd_(std::move(noise_sd)) {
    const int m = dag_.num_nodes();
    if (intercepts_.size() != m || noise_sd_.size() != m) {
        throw std::invalid_argument("parameter vectors must match node count");
    }
    for (int v = 0; v < m; ++v) {
        if (!(noise_sd_(v) > 0.0)) {
            throw std::invalid_argument("noise_sd must be positive for node " + std::to_string(v));
        }
    }
    for (const auto& [edge, w] : weights) {
        if (!dag_.has_edge(edge.first, edge.second)) {
            throw std::invalid_argument("weight given for a non-edge");
        }
        weights_[edge.second][edge.first] = w;
    }
    for (const auto& [from, to] : dag_.edges()) {
        if (!weights_[to].count(from)) {
            throw std::invalid_argument("missing weight for an edge of the DAG");
        }
    }
}

double GbnModel::weight(NodeId parent, NodeId child) const {
    const auto& w = parent_weights(child);
    auto it = w.find(parent);
    if (it == w.end()) throw std::invalid_argument("no such edge in the model");
    return it->second;
}

const std::map<NodeId, double>& GbnModel::parent_weights(NodeId child) const {
    if (child < 0 || child >= num_nodes()) throw std::invalid_argument("unknown node");
    return weights_[child];
}

GbnModel GbnModel::with_factor(NodeId node, const std::map<NodeId, double>& weights,
                               double intercept, double noise_sd) const {
    if (node < 0 || node >= num_nodes()) throw std::invalid_argument("unknown node");
    if (weights.size() != weights_[node].size()) {
        throw std::invalid_argument("replacement must cover exactly the node's parents");
    }
    for (const auto& [p, w] : weights) {
        if (!weights_[node].count(p)) {
            throw std::invalid_argument("replacement weight for a non-parent");
        }
    }
    std::map<Edge, double> all;
    for (NodeId c = 0; c < num_nodes(); ++c) {
        for (const auto& [p, w] : weights_[c]) {
            all[{p, c}] = (c == node) ? weights.at(p) : w;
        }
    }
    Eigen::VectorXd intercepts = intercepts_;
    Eigen::VectorXd sds = noise_sd_;
    intercepts(node) = intercept;
    sds(node) = noise_sd;
    return GbnModel(dag_, std::move(all), std::move(intercepts), std::move(sds));
}

Eigen::MatrixXd GbnModel::weight_matrix() const {
    const int m = num_nodes();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    for (NodeId c = 0; c < m; ++c) {
        for (const auto& [p, w] : weights_[c]) a(c, p) = w;
    }
    return a;
}

GbnModel random_gbn(int num_nodes, double edge_probability, std::uint64_t seed) {
    if (num_nodes < 1) throw std::invalid_argument("need at least one node");
    if (edge_probability < 0.0 || edge_probability > 1.0) {
        throw std::invalid_argument("edge probability must lie in [0,1]");
    }
    Rng rng(seed);

    // Random topological order (Fisher-Yates), then independent edge coins.
    std::vector<NodeId> perm(num_nodes);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = num_nodes - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(i) + 1));
        std::swap(perm[i], perm[j]);
    }

    EdgeList edges;
    std::map<Edge, double> weights;
    for (int i = 0; i < num_nodes; ++i) {
        for (int j = i + 1; j < num_nodes; ++j) {
            if (rng.uniform() < edge_probability) {
                const NodeId from = perm[i];
                const NodeId to = perm[j];
                edges.emplace_back(from, to);
                const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
                weights[{from, to}] = sign * rng.uniform(0.25, 1.0);
            }
        }
    }
    Eigen::VectorXd intercepts(num_nodes);
    for (int v = 0; v < num_nodes; ++v) intercepts(v) = rng.uniform(50.0, 500.0);
    Eigen::VectorXd noise_sd(num_nodes);
    for (int v = 0; v < num_nodes; ++v) noise_sd(v) = rng.uniform(5.0, 100.0);

    return GbnModel(Dag(num_nodes, edges), std::move(weights), std::move(intercepts),
                    std::move(noise_sd));
}

namespace {

Eigen::MatrixXd ancestral_samples(const GbnModel& model, int n, std::uint64_t seed,
                                  const ClampSpec* clamp) {
    const int m = model.num_nodes();
    const std::vector<NodeId> order = model.dag().topological_order();
    Rng rng(seed);
    Eigen::MatrixXd x(n, m);
    for (int i = 0; i < n; ++i) {
        for (NodeId v : order) {
            if (clamp && v == clamp->node) {
                x(i, v) = clamp->value;
                continue;
            }
            double val = model.intercept(v);
            for (const auto& [p, w] : model.parent_weights(v)) val += w * x(i, p);
            x(i, v) = val + model.noise_sd(v) * rng.normal();
        }
    }
    return x;
}

}  // namespace

Dataset sample_observational(const GbnModel& model, int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("need at least one sample");
    return Dataset(model.node_names(), ancestral_samples(model, n, seed, nullptr));
}

Dataset sample_interventional(const GbnModel& model, const ClampSpec& clamp, int n,
                              std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("need at least one sample");
    if (clamp.node < 0 || clamp.node >= model.num_nodes()) {
        throw std::invalid_argument("unknown node in clamp");
    }
    std::vector<std::optional<InterventionTag>> tags(
        n, InterventionTag{clamp.node, clamp.value});
    return Dataset(model.node_names(), ancestral_samples(model, n, seed, &clamp),
                   std::move(tags));
}

Gaussian joint_gaussian(const GbnModel& model) {
    const int m = model.num_nodes();
    const Eigen::MatrixXd ima = Eigen::MatrixXd::Identity(m, m) - model.weight_matrix();
    // I - A is invertible: A is strictly triangular under a topological order.
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(ima);
    const Eigen::MatrixXd t = lu.inverse();
    Gaussian g;
    g.mean = t * model.intercepts();
    g.cov = t * model.noise_sds().array().square().matrix().asDiagonal() * t.transpose();
    return g;
}

Gaussian interventional_gaussian(const GbnModel& model, const ClampSpec& clamp) {
    const int m = model.num_nodes();
    if (clamp.node < 0 || clamp.node >= m) throw std::invalid_argument("unknown node in clamp");
    Eigen::MatrixXd a = model.weight_matrix();
    a.row(clamp.node).setZero();
    Eigen::VectorXd c = model.intercepts();
    c(clamp.node) = clamp.value;
    Eigen::VectorXd d = model.noise_sds().array().square();
    d(clamp.node) = 0.0;
    const Eigen::MatrixXd ima = Eigen::MatrixXd::Identity(m, m) - a;
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(ima);
    const Eigen::MatrixXd t = lu.inverse();
    Gaussian g;
    g.mean = t * c;
    g.cov = t * d.asDiagonal() * t.transpose();
    return g;
}

GbnModel fit_gbn(const Dag& dag, const Dataset& data) {
    const int m = dag.num_nodes();
    if (data.num_vars() != m) throw std::invalid_argument("data columns must match DAG nodes");
    const long n = data.num_samples();

    std::map<Edge, double> weights;
    Eigen::VectorXd intercepts(m);
    Eigen::VectorXd noise_sd(m);
    for (NodeId v = 0; v < m; ++v) {
        const std::vector<NodeId> parents(dag.parents(v).begin(), dag.parents(v).end());
        const int k = static_cast<int>(parents.size());
        if (n <= k + 1) {
            throw std::invalid_argument("too few samples to fit node " + data.names()[v]);
        }
        Eigen::MatrixXd design(n, k + 1);
        design.col(0).setOnes();
        for (int j = 0; j < k; ++j) design.col(j + 1) = data.values().col(parents[j]);
        const Eigen::VectorXd y = data.values().col(v);
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
        qr.setThreshold(1e-10);
        if (qr.rank() < k + 1) {
            throw DegeneracyError("rank-deficient design fitting node '" + data.names()[v] + "'");
        }
        const Eigen::VectorXd beta = qr.solve(y);
        intercepts(v) = beta(0);
        for (int j = 0; j < k; ++j) weights[{parents[j], v}] = beta(j + 1);
        const double rss = (y - design * beta).squaredNorm();
        noise_sd(v) = std::max(std::sqrt(std::max(rss, 0.0) / static_cast<double>(n - k - 1)),
                               1e-12);
    }
    GbnModel model(dag, std::move(weights), std::move(intercepts), std::move(noise_sd));
    model.set_node_names(data.names());
    return model;
}

LinearPredictor predictor_given_rest(const Gaussian& joint, NodeId node) {
    const int m = static_cast<int>(joint.mean.size());
    if (node < 0 || node >= m) throw std::invalid_argument("unknown node");
    std::vector<int> rest;
    rest.reserve(m - 1);
    for (int v = 0; v < m; ++v) {
        if (v != node) rest.push_back(v);
    }
    Eigen::MatrixXd s22(m - 1, m - 1);
    Eigen::VectorXd s12(m - 1);
    for (int i = 0; i < m - 1; ++i) {
        s12(i) = joint.cov(node, rest[i]);
        for (int j = 0; j < m - 1; ++j) s22(i, j) = joint.cov(rest[i], rest[j]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(s22);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) {
        throw DegeneracyError("singular conditioning covariance for node " + std::to_string(node));
    }
    LinearPredictor out;
    out.coef = lu.solve(s12);
    double bias = joint.mean(node);
    for (int i = 0; i < m - 1; ++i) bias -= out.coef(i) * joint.mean(rest[i]);
    out.bias = bias;
    return out;
}

double predict_node_given_rest(const GbnModel& model, NodeId node,
                               const std::vector<double>& assignment) {
    const int m = model.num_nodes();
    if (static_cast<int>(assignment.size()) != m) {
        throw std::invalid_argument("assignment must provide a value per node (self ignored)");
    }
    const LinearPredictor pred = predictor_given_rest(joint_gaussian(model), node);
    double val = pred.bias;
    int j = 0;
    for (int v = 0; v < m; ++v) {
        if (v == node) continue;
        val += pred.coef(j++) * assignment[v];
    }
    return val;
}

std::string to_json(const GbnModel& model) {
    nlohmann::json j;
    j["nodes"] = model.node_names();
    j["edges"] = nlohmann::json::array();
    for (const auto& [from, to] : model.dag().edges()) {
        j["edges"].push_back({{"from", from}, {"to", to}, {"weight", model.weight(from, to)}});
    }
    std::vector<double> intercepts(model.intercepts().begin(), model.intercepts().end());
    std::vector<double> sds(model.noise_sds().begin(), model.noise_sds().end());
    j["intercepts"] = intercepts;
    j["noise_sd"] = sds;
    return j.dump(2);
}

GbnModel gbn_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid model JSON: ") + e.what());
    }
    try {
        const std::vector<std::string> names = j.at("nodes").get<std::vector<std::string>>();
        const int m = static_cast<int>(names.size());
        EdgeList edges;
        std::map<Edge, double> weights;
        for (const auto& e : j.at("edges")) {
            const NodeId from = e.at("from").get<NodeId>();
            const NodeId to = e.at("to").get<NodeId>();
            edges.emplace_back(from, to);
            weights[{from, to}] = e.at("weight").get<double>();
        }
        const std::vector<double> intercepts = j.at("intercepts").get<std::vector<double>>();
        const std::vector<double> sds = j.at("noise_sd").get<std::vector<double>>();
        if (static_cast<int>(intercepts.size()) != m || static_cast<int>(sds.size()) != m) {
            throw ParseError("model JSON parameter arrays must match node count");
        }
        Eigen::VectorXd ic = Eigen::Map<const Eigen::VectorXd>(intercepts.data(), m);
        Eigen::VectorXd sd = Eigen::Map<const Eigen::VectorXd>(sds.data(), m);
        GbnModel model(Dag(m, edges), std::move(weights), std::move(ic), std::move(sd));
        model.set_node_names(names);
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid model JSON: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("invalid model: ") + e.what());
    }
}

}  // namespace causal
