#include "causal/discovery.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "causal/errors.hpp"
#include "causal/metrics.hpp"

namespace causal {

namespace {

int effective_max_cond(const DiscoveryOptions& opts, int m) {
    if (opts.max_cond_size) {
        if (*opts.max_cond_size < 0) throw std::invalid_argument("max_cond_size must be >= 0");
        return *opts.max_cond_size;
    }
    return m >= 50 ? 4 : m;  // runtime guard for wide datasets only
}

/// Enumerates k-subsets of `pool` (assumed sorted ascending) in lexicographic
/// order, invoking fn(subset) until it returns true. Returns whether fn did.
bool for_each_subset(const std::vector<NodeId>& pool, int k,
                     const std::function<bool(const std::vector<NodeId>&)>& fn) {
    const int n = static_cast<int>(pool.size());
    if (k > n) return false;
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    std::vector<NodeId> subset(k);
    while (true) {
        for (int i = 0; i < k; ++i) subset[i] = pool[idx[i]];
        if (fn(subset)) return true;
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i) --i;
        if (i < 0) return false;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

struct SkeletonResult {
    std::vector<std::set<NodeId>> adj;
    SepsetMap sepsets;
    long ci_tests = 0;
};

SkeletonResult pc_skeleton(int m, const CiOracle& test, const DiscoveryOptions& opts) {
    SkeletonResult res;
    res.adj.assign(m, {});
    for (NodeId a = 0; a < m; ++a) {
        for (NodeId b = a + 1; b < m; ++b) {
            res.adj[a].insert(b);
            res.adj[b].insert(a);
        }
    }
    const int max_cond = effective_max_cond(opts, m);

    for (int level = 0; level <= max_cond; ++level) {
        // With the stable skeleton, conditioning candidates are frozen at the
        // start of the level; edge removals still take effect immediately.
        const std::vector<std::set<NodeId>> frozen = res.adj;
        const auto& cand_adj = opts.stable_skeleton ? frozen : res.adj;

        bool level_feasible = false;
        for (NodeId a = 0; a < m && !level_feasible; ++a) {
            level_feasible =
                !res.adj[a].empty() && static_cast<int>(cand_adj[a].size()) - 1 >= level;
        }
        if (!level_feasible) break;

        for (NodeId x = 0; x < m; ++x) {
            const std::set<NodeId> partners(res.adj[x].lower_bound(x + 1), res.adj[x].end());
            for (NodeId y : partners) {
                if (!res.adj[x].count(y)) continue;  // removed earlier in this level
                bool removed = false;
                for (NodeId side : {x, y}) {
                    const NodeId other = side == x ? y : x;
                    std::vector<NodeId> pool(cand_adj[side].begin(), cand_adj[side].end());
                    pool.erase(std::remove(pool.begin(), pool.end(), other), pool.end());
                    removed = for_each_subset(
                        pool, level, [&](const std::vector<NodeId>& s) {
                            ++res.ci_tests;
                            if (test(x, y, s)) {
                                res.adj[x].erase(y);
                                res.adj[y].erase(x);
                                res.sepsets.set(x, y, s);
                                return true;
                            }
                            return false;
                        });
                    if (removed) break;
                }
            }
        }
    }
    return res;
}

/// Orients unshielded colliders on an undirected skeleton. Pairs demanded in
/// both directions stay undirected; an orientation that would close a
/// directed cycle is skipped. Deterministic in ascending pair order.
Pdag orient_colliders(int m, const std::vector<std::set<NodeId>>& adj,
                      const SepsetMap& sepsets) {
    Pdag g(m);
    for (NodeId a = 0; a < m; ++a) {
        for (NodeId b : adj[a]) {
            if (a < b) g.add_undirected(a, b);
        }
    }
    std::set<Edge> demands;
    for (NodeId z = 0; z < m; ++z) {
        for (auto it_x = adj[z].begin(); it_x != adj[z].end(); ++it_x) {
            for (auto it_y = std::next(it_x); it_y != adj[z].end(); ++it_y) {
                const NodeId x = *it_x;
                const NodeId y = *it_y;
                if (adj[x].count(y)) continue;  // shielded
                if (!sepsets.has(x, y)) continue;
                const auto& s = sepsets.get(x, y);
                if (!std::binary_search(s.begin(), s.end(), z)) {
                    demands.insert({x, z});
                    demands.insert({y, z});
                }
            }
        }
    }
    std::set<std::pair<NodeId, NodeId>> pairs;
    for (const auto& [from, to] : demands) {
        pairs.insert(from < to ? std::make_pair(from, to) : std::make_pair(to, from));
    }
    for (const auto& [a, b] : pairs) {
        const bool fwd = demands.count({a, b}) > 0;
        const bool bwd = demands.count({b, a}) > 0;
        if (fwd == bwd) continue;  // conflicting v-structures
        const NodeId from = fwd ? a : b;
        const NodeId to = fwd ? b : a;
        if (g.directed_path_exists(to, from)) continue;
        g.orient(from, to);
    }
    return g;
}

PcResult pc_core(int m, const CiOracle& test, const DiscoveryOptions& opts) {
    SkeletonResult skel = pc_skeleton(m, test, opts);
    Pdag oriented = orient_colliders(m, skel.adj, skel.sepsets);
    // Sample data can yield PDAGs with no consistent extension; inconsistent
    // rule applications are skipped rather than raised.
    Pdag closed = meek_closure(oriented, OrientationConflict::Skip);
    return {std::move(closed), std::move(skel.sepsets), skel.ci_tests};
}

}  // namespace

CiOracle d_separation_oracle(const Dag& truth) {
    return [truth](NodeId x, NodeId y, const std::vector<NodeId>& s) {
        return d_separated(truth, x, y, s);
    };
}

CiOracle fisher_z_oracle(const CorrelationMatrix& corr, double alpha) {
    return [corr, alpha](NodeId x, NodeId y, const std::vector<NodeId>& s) {
        return fisher_z_test(corr, x, y, std::vector<int>(s.begin(), s.end()), alpha)
            .independent;
    };
}

PcResult pc(const Dataset& data, const DiscoveryOptions& opts) {
    PcResult res = pc(correlation_matrix(data), opts);
    res.graph.set_node_names(data.names());
    return res;
}

PcResult pc(const CorrelationMatrix& corr, const DiscoveryOptions& opts) {
    if (corr.num_vars() < 2) throw std::invalid_argument("need at least two variables");
    if (opts.alpha < 0.0 || opts.alpha > 1.0) {
        throw std::invalid_argument("alpha must lie in [0,1]");
    }
    return pc_core(corr.num_vars(), fisher_z_oracle(corr, opts.alpha), opts);
}

PcResult pc_with_oracle(int num_nodes, const CiOracle& test, const DiscoveryOptions& opts) {
    if (num_nodes < 2) throw std::invalid_argument("need at least two variables");
    return pc_core(num_nodes, test, opts);
}

// ---------------------------------------------------------------------------
// Scoring and GES

namespace {

/// Centered second-moment (maximum-likelihood covariance) scorer. The RSS of
/// the node-on-parents regression comes from the Schur complement, so that
/// Markov-equivalent structures score identically up to rounding.
class BicScorer {
public:
    BicScorer(const Dataset& data, double penalty)
        : n_(data.num_samples()), penalty_(penalty) {
        const Eigen::MatrixXd& x = data.values();
        const Eigen::RowVectorXd means = x.colwise().mean();
        const Eigen::MatrixXd centered = x.rowwise() - means;
        cov_ = (centered.transpose() * centered) / static_cast<double>(n_);
    }

    double score(NodeId v, const std::vector<NodeId>& parents) const {
        double resid_var = cov_(v, v);
        const int k = static_cast<int>(parents.size());
        if (k > 0) {
            Eigen::MatrixXd spp(k, k);
            Eigen::VectorXd spv(k);
            for (int i = 0; i < k; ++i) {
                spv(i) = cov_(parents[i], v);
                for (int j = 0; j < k; ++j) spp(i, j) = cov_(parents[i], parents[j]);
            }
            Eigen::FullPivLU<Eigen::MatrixXd> lu(spp);
            lu.setThreshold(1e-12);
            if (!lu.isInvertible()) {
                throw DegeneracyError("rank-deficient parent set scoring node " +
                                      std::to_string(v));
            }
            resid_var -= spv.dot(lu.solve(spv));
        }
        if (!(resid_var > 0.0) || !std::isfinite(resid_var)) {
            throw DegeneracyError("non-positive residual variance scoring node " +
                                  std::to_string(v));
        }
        const double n = static_cast<double>(n_);
        return -0.5 * n * std::log(resid_var) -
               penalty_ * (k + 1) * 0.5 * std::log(n);
    }

private:
    Eigen::MatrixXd cov_;
    long n_;
    double penalty_;
};

constexpr double kMinScoreGain = 1e-9;

}  // namespace

double node_bic(const Dataset& data, NodeId node, const std::vector<NodeId>& parents,
                double penalty_multiplier) {
    if (node < 0 || node >= data.num_vars()) throw std::invalid_argument("unknown node");
    if (static_cast<long>(parents.size()) >= data.num_samples() - 1) {
        throw std::invalid_argument("parent set too large for the sample count");
    }
    if (!(penalty_multiplier > 0.0)) {
        throw std::invalid_argument("penalty multiplier must be positive");
    }
    for (NodeId p : parents) {
        if (p < 0 || p >= data.num_vars() || p == node) {
            throw std::invalid_argument("invalid parent index");
        }
    }
    return BicScorer(data, penalty_multiplier).score(node, parents);
}

Pdag ges(const Dataset& data, const DiscoveryOptions& opts) {
    const int m = data.num_vars();
    const long n = data.num_samples();
    if (n <= m) throw std::invalid_argument("ges requires more samples than variables");
    if (!(opts.penalty_multiplier > 0.0)) {
        throw std::invalid_argument("penalty multiplier must be positive");
    }
    const BicScorer scorer(data, opts.penalty_multiplier);

    std::vector<std::set<NodeId>> parents(m), children(m);
    std::vector<double> node_scores(m);
    for (NodeId v = 0; v < m; ++v) node_scores[v] = scorer.score(v, {});

    auto creates_cycle = [&](NodeId from, NodeId to) {
        std::vector<NodeId> stack{to};
        std::set<NodeId> seen{to};
        while (!stack.empty()) {
            NodeId u = stack.back();
            stack.pop_back();
            if (u == from) return true;
            for (NodeId c : children[u]) {
                if (seen.insert(c).second) stack.push_back(c);
            }
        }
        return false;
    };
    auto with_parent = [&](NodeId j, NodeId extra) {
        std::vector<NodeId> ps(parents[j].begin(), parents[j].end());
        ps.push_back(extra);
        std::sort(ps.begin(), ps.end());
        return ps;
    };
    auto without_parent = [&](NodeId j, NodeId gone) {
        std::vector<NodeId> ps;
        for (NodeId p : parents[j]) {
            if (p != gone) ps.push_back(p);
        }
        return ps;
    };

    // Forward: best single-edge addition until no strict improvement.
    while (true) {
        double best_gain = kMinScoreGain;
        NodeId best_from = -1, best_to = -1;
        double best_score = 0.0;
        for (NodeId i = 0; i < m; ++i) {
            for (NodeId j = 0; j < m; ++j) {
                if (i == j || parents[j].count(i) || parents[i].count(j)) continue;
                if (creates_cycle(i, j)) continue;
                const double s = scorer.score(j, with_parent(j, i));
                const double gain = s - node_scores[j];
                if (gain > best_gain) {
                    best_gain = gain;
                    best_from = i;
                    best_to = j;
                    best_score = s;
                }
            }
        }
        if (best_from < 0) break;
        parents[best_to].insert(best_from);
        children[best_from].insert(best_to);
        node_scores[best_to] = best_score;
    }

    // Backward: best single-edge deletion until no strict improvement.
    while (true) {
        double best_gain = kMinScoreGain;
        NodeId best_from = -1, best_to = -1;
        double best_score = 0.0;
        for (NodeId j = 0; j < m; ++j) {
            for (NodeId i : parents[j]) {
                const double s = scorer.score(j, without_parent(j, i));
                const double gain = s - node_scores[j];
                if (gain > best_gain) {
                    best_gain = gain;
                    best_from = i;
                    best_to = j;
                    best_score = s;
                }
            }
        }
        if (best_from < 0) break;
        parents[best_to].erase(best_from);
        children[best_from].erase(best_to);
        node_scores[best_to] = best_score;
    }

    EdgeList edges;
    for (NodeId j = 0; j < m; ++j) {
        for (NodeId i : parents[j]) edges.emplace_back(i, j);
    }
    Dag dag(m, edges);
    dag.set_node_names(data.names());
    return dag_to_cpdag(dag);
}

// ---------------------------------------------------------------------------
// FCI

namespace {

void orient_pag_colliders(Pag& pag, const SepsetMap& sepsets) {
    const int m = pag.num_nodes();
    for (NodeId z = 0; z < m; ++z) {
        const std::vector<NodeId> nbrs = pag.neighbors(z);
        for (std::size_t i = 0; i < nbrs.size(); ++i) {
            for (std::size_t j = i + 1; j < nbrs.size(); ++j) {
                const NodeId x = nbrs[i];
                const NodeId y = nbrs[j];
                if (pag.adjacent(x, y)) continue;
                if (!sepsets.has(x, y)) continue;
                const auto& s = sepsets.get(x, y);
                if (!std::binary_search(s.begin(), s.end(), z)) {
                    pag.set_mark(z, x, Mark::Arrow);
                    pag.set_mark(z, y, Mark::Arrow);
                }
            }
        }
    }
}

/// Endpoint-orientation rules: arrowhead/tail propagation analogues of Meek
/// R1-R3 that only upgrade circle marks.
void apply_fci_rules(Pag& pag) {
    const int m = pag.num_nodes();
    bool changed = true;
    while (changed) {
        changed = false;
        // R1: a*->b o-* c, a and c nonadjacent  =>  b -> c
        for (NodeId b = 0; b < m; ++b) {
            for (NodeId a : pag.neighbors(b)) {
                if (pag.mark_at(b, a) != Mark::Arrow) continue;
                for (NodeId c : pag.neighbors(b)) {
                    if (c == a || pag.adjacent(a, c)) continue;
                    if (pag.mark_at(b, c) != Mark::Circle) continue;
                    pag.set_mark(b, c, Mark::Tail);
                    if (pag.mark_at(c, b) == Mark::Circle) pag.set_mark(c, b, Mark::Arrow);
                    changed = true;
                }
            }
        }
        // R2: a -> b *-> c or a *-> b -> c, with circle at c on edge a-c  =>  a *-> c
        for (NodeId a = 0; a < m; ++a) {
            for (NodeId c : pag.neighbors(a)) {
                if (pag.mark_at(c, a) != Mark::Circle) continue;
                bool fires = false;
                for (NodeId b : pag.neighbors(a)) {
                    if (b == c || !pag.adjacent(b, c)) continue;
                    const bool a_to_b = pag.mark_at(a, b) == Mark::Tail &&
                                        pag.mark_at(b, a) == Mark::Arrow;
                    const bool b_into_c = pag.mark_at(c, b) == Mark::Arrow;
                    const bool a_into_b = pag.mark_at(b, a) == Mark::Arrow;
                    const bool b_to_c = pag.mark_at(b, c) == Mark::Tail &&
                                        pag.mark_at(c, b) == Mark::Arrow;
                    if ((a_to_b && b_into_c) || (a_into_b && b_to_c)) {
                        fires = true;
                        break;
                    }
                }
                if (fires) {
                    pag.set_mark(c, a, Mark::Arrow);
                    changed = true;
                }
            }
        }
        // R3: a*->b<-*c, a*-o d o-*c, a and c nonadjacent, d*-o b  =>  d *-> b
        for (NodeId b = 0; b < m; ++b) {
            for (NodeId d : pag.neighbors(b)) {
                if (pag.mark_at(b, d) != Mark::Circle) continue;
                bool fires = false;
                const std::vector<NodeId> nbrs_b = pag.neighbors(b);
                for (std::size_t i = 0; i < nbrs_b.size() && !fires; ++i) {
                    const NodeId a = nbrs_b[i];
                    if (a == d || pag.mark_at(b, a) != Mark::Arrow) continue;
                    if (!pag.adjacent(a, d) || pag.mark_at(d, a) != Mark::Circle) continue;
                    for (std::size_t j = 0; j < nbrs_b.size(); ++j) {
                        const NodeId c = nbrs_b[j];
                        if (c == a || c == d || pag.mark_at(b, c) != Mark::Arrow) continue;
                        if (pag.adjacent(a, c)) continue;
                        if (!pag.adjacent(c, d) || pag.mark_at(d, c) != Mark::Circle) continue;
                        fires = true;
                        break;
                    }
                }
                if (fires) {
                    pag.set_mark(b, d, Mark::Arrow);
                    changed = true;
                }
            }
        }
    }
}

FciResult fci_core(int m, const CiOracle& test, const DiscoveryOptions& opts) {
    SkeletonResult skel = pc_skeleton(m, test, opts);
    const int max_cond = effective_max_cond(opts, m);

    Pag pag(m);
    for (NodeId a = 0; a < m; ++a) {
        for (NodeId b : skel.adj[a]) {
            if (a < b) pag.add_edge(a, b, Mark::Circle, Mark::Circle);
        }
    }
    orient_pag_colliders(pag, skel.sepsets);

    // Possible-D-SEP stage: test remaining edges against subsets of the
    // Possible-D-SEP sets of both endpoints. Size 0 was already covered by
    // the level-0 skeleton pass.
    std::vector<std::pair<NodeId, NodeId>> edge_list;
    for (NodeId a = 0; a < m; ++a) {
        for (NodeId b : skel.adj[a]) {
            if (a < b) edge_list.emplace_back(a, b);
        }
    }
    for (const auto& [x, y] : edge_list) {
        if (!pag.adjacent(x, y)) continue;
        bool removed = false;
        for (NodeId side : {x, y}) {
            const NodeId other = side == x ? y : x;
            const std::vector<NodeId> pds = possible_d_sep(pag, side, other);
            const int top = std::min<int>(max_cond, static_cast<int>(pds.size()));
            for (int size = 1; size <= top && !removed; ++size) {
                removed = for_each_subset(pds, size, [&](const std::vector<NodeId>& s) {
                    ++skel.ci_tests;
                    if (test(x, y, s)) {
                        pag.remove_edge(x, y);
                        skel.sepsets.set(x, y, s);
                        return true;
                    }
                    return false;
                });
            }
            if (removed) break;
        }
    }

    // Re-orient on the reduced skeleton with the updated separation sets.
    for (const auto& [a, b, ma, mb] : pag.edges()) {
        pag.set_mark(a, b, Mark::Circle);
        pag.set_mark(b, a, Mark::Circle);
    }
    orient_pag_colliders(pag, skel.sepsets);
    apply_fci_rules(pag);

    return {std::move(pag), std::move(skel.sepsets), skel.ci_tests};
}

}  // namespace

FciResult fci(const Dataset& data, const DiscoveryOptions& opts) {
    if (data.num_vars() < 2) throw std::invalid_argument("need at least two variables");
    if (opts.alpha < 0.0 || opts.alpha > 1.0) {
        throw std::invalid_argument("alpha must lie in [0,1]");
    }
    FciResult res = fci_core(data.num_vars(), fisher_z_oracle(correlation_matrix(data), opts.alpha),
                             opts);
    res.graph.set_node_names(data.names());
    return res;
}

FciResult fci_with_oracle(int num_nodes, const CiOracle& test, const DiscoveryOptions& opts) {
    if (num_nodes < 2) throw std::invalid_argument("need at least two variables");
    return fci_core(num_nodes, test, opts);
}

// ---------------------------------------------------------------------------
// Threshold sweep

double ges_penalty_from_threshold(double t) {
    if (t <= 0.0) return 1e-9;
    if (t >= 1.0) return 1e9;
    return t / (1.0 - t);
}

SweepResult threshold_sweep(const Dataset& data, const std::string& algorithm,
                            const std::vector<double>& grid, const Dag* truth,
                            const DiscoveryOptions& base_opts, Deadline deadline) {
    if (grid.empty()) throw std::invalid_argument("threshold grid must be nonempty");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw std::invalid_argument("threshold grid must be strictly increasing");
        }
    }
    if (algorithm != "pc" && algorithm != "ges" && algorithm != "fci") {
        throw ConfigError("unknown algorithm id '" + algorithm + "'");
    }
    if (truth && truth->num_nodes() != data.num_vars()) {
        throw std::invalid_argument("truth graph node count does not match data");
    }

    std::optional<CorrelationMatrix> corr;
    if (algorithm != "ges") corr = correlation_matrix(data);

    SweepResult out;
    out.entries.reserve(grid.size());
    for (double t : grid) {
        if (deadline && std::chrono::steady_clock::now() > *deadline) {
            throw TimeoutError("algorithm '" + algorithm + "' exceeded its wall-clock budget");
        }
        DiscoveryOptions opts = base_opts;
        SweepEntry entry;
        entry.threshold = t;
        if (algorithm == "pc") {
            opts.alpha = t;
            PcResult r = pc(*corr, opts);
            r.graph.set_node_names(data.names());
            out.ci_tests += r.ci_tests;
            entry.graph = std::move(r.graph);
        } else if (algorithm == "fci") {
            opts.alpha = t;
            FciResult r = fci_core(data.num_vars(), fisher_z_oracle(*corr, t), opts);
            r.graph.set_node_names(data.names());
            out.ci_tests += r.ci_tests;
            entry.graph = r.graph.to_pdag();
            entry.pag = std::move(r.graph);
        } else {
            opts.penalty_multiplier = ges_penalty_from_threshold(t);
            entry.graph = ges(data, opts);
        }
        out.entries.push_back(std::move(entry));
    }

    if (truth) {
        double best_f = -1.0;
        std::size_t best = 0;
        for (std::size_t i = 0; i < out.entries.size(); ++i) {
            const double f = prf(edge_confusion(out.entries[i].graph, *truth)).f_score;
            if (f > best_f) {
                best_f = f;
                best = i;
            }
        }
        out.selected = best;
    } else if (out.entries.size() == 1) {
        out.selected = 0;
    }
    return out;
}

}  // namespace causal
