#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "causal/discovery.hpp"
#include "causal/errors.hpp"
#include "causal/gbn.hpp"
#include "causal/metrics.hpp"
#include "causal/rng.hpp"
#include "oracles.hpp"

using namespace causal;

namespace {

Dag random_dag(Rng& rng, int n, double p) {
    std::vector<NodeId> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    for (int i = n - 1; i > 0; --i) std::swap(order[i], order[rng.uniform_int(i + 1)]);
    EdgeList edges;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (rng.uniform() < p) edges.emplace_back(order[i], order[j]);
        }
    }
    return Dag(n, edges);
}

Dataset noise_dataset(int n, int m, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd x(n, m);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) x(i, j) = rng.normal();
    }
    return Dataset(default_node_names(m), x);
}

GbnModel unit_chain_model(int m) {
    EdgeList edges;
    std::map<Edge, double> weights;
    for (int v = 0; v + 1 < m; ++v) {
        edges.emplace_back(v, v + 1);
        weights[{v, v + 1}] = 1.0;
    }
    return GbnModel(Dag(m, edges), weights, Eigen::VectorXd::Zero(m),
                    Eigen::VectorXd::Ones(m));
}

}  // namespace

TEST_CASE("oracle PC recovers the chain CPDAG") {
    const Dag truth(3, {{0, 1}, {1, 2}});
    const PcResult res = pc_with_oracle(3, d_separation_oracle(truth), {});
    CHECK(res.graph == dag_to_cpdag(truth));
    CHECK(res.graph.has_undirected(0, 1));
    CHECK(res.graph.has_undirected(1, 2));
    CHECK(res.sepsets.has(0, 2));
    CHECK(res.sepsets.get(0, 2) == std::vector<NodeId>{1});
}

TEST_CASE("oracle PC orients the collider") {
    const Dag truth(3, {{0, 1}, {2, 1}});
    const PcResult res = pc_with_oracle(3, d_separation_oracle(truth), {});
    CHECK(res.graph.has_directed(0, 1));
    CHECK(res.graph.has_directed(2, 1));
}

TEST_CASE("oracle PC is exact on random DAGs up to 6 nodes") {
    Rng rng(101);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 3 + static_cast<int>(rng.uniform_int(4));
        const Dag truth = random_dag(rng, n, 0.4);
        const PcResult res = pc_with_oracle(n, d_separation_oracle(truth), {});
        REQUIRE(res.graph == dag_to_cpdag(truth));
    }
}

TEST_CASE("pc with stable skeleton is invariant to column permutation") {
    const GbnModel model = random_gbn(6, 0.4, 404);
    const Dataset data = sample_observational(model, 4000, 405);
    DiscoveryOptions opts;
    opts.alpha = 0.05;
    const PcResult base = pc(data, opts);

    // permute columns 0..5 -> (2,0,5,1,4,3)
    const std::vector<int> perm{2, 0, 5, 1, 4, 3};  // new index of old column i
    Eigen::MatrixXd shuffled(data.num_samples(), 6);
    std::vector<std::string> names(6);
    for (int old = 0; old < 6; ++old) {
        shuffled.col(perm[old]) = data.values().col(old);
        names[perm[old]] = data.names()[old];
    }
    const PcResult permuted = pc(Dataset(names, shuffled), opts);
    for (int a = 0; a < 6; ++a) {
        for (int b = 0; b < 6; ++b) {
            if (a == b) continue;
            CHECK(base.graph.has_directed(a, b) ==
                  permuted.graph.has_directed(perm[a], perm[b]));
            if (a < b) {
                CHECK(base.graph.has_undirected(a, b) ==
                      permuted.graph.has_undirected(perm[a], perm[b]));
            }
        }
    }
}

TEST_CASE("node_bic: a true-zero parent lowers the score at n = 1e4") {
    // y depends on x only; z is independent noise.
    Rng rng(99);
    const int n = 10000;
    Eigen::MatrixXd x(n, 3);
    for (int i = 0; i < n; ++i) {
        x(i, 0) = rng.normal();
        x(i, 1) = 0.9 * x(i, 0) + rng.normal();
        x(i, 2) = rng.normal();
    }
    const Dataset d(std::vector<std::string>{"x", "y", "z"}, x);
    const double with_true = node_bic(d, 1, {0}, 1.0);
    const double with_extra = node_bic(d, 1, {0, 2}, 1.0);
    CHECK(with_extra < with_true);
}

TEST_CASE("node_bic with no parents depends only on the sample variance") {
    const Dataset d = noise_dataset(500, 2, 31);
    const Eigen::VectorXd col = d.values().col(0);
    const double var = (col.array() - col.mean()).square().sum() / 500.0;
    const double expected = -0.5 * 500.0 * std::log(var) - 1.0 * 0.5 * std::log(500.0);
    CHECK(node_bic(d, 0, {}, 1.0) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("score equivalence of Markov-equivalent structures") {
    // 2-node pair: x->y versus y->x.
    const GbnModel m = random_gbn(2, 1.0, 606);
    const Dataset d = sample_observational(m, 3000, 607);
    const double fwd = node_bic(d, 1, {0}, 1.0) + node_bic(d, 0, {}, 1.0);
    const double bwd = node_bic(d, 0, {1}, 1.0) + node_bic(d, 1, {}, 1.0);
    CHECK(fwd == doctest::Approx(bwd).epsilon(1e-12));

    // All four equivalent orientations of a 4-node chain score identically.
    const GbnModel chain = unit_chain_model(4);
    const Dataset cd = sample_observational(chain, 2000, 608);
    auto total = [&](const EdgeList& edges) {
        const Dag g(4, edges);
        double s = 0.0;
        for (NodeId v = 0; v < 4; ++v) {
            s += node_bic(cd, v, std::vector<NodeId>(g.parents(v).begin(), g.parents(v).end()),
                          1.0);
        }
        return s;
    };
    const double s1 = total({{0, 1}, {1, 2}, {2, 3}});
    const double s2 = total({{1, 0}, {1, 2}, {2, 3}});
    const double s3 = total({{1, 0}, {2, 1}, {2, 3}});
    const double s4 = total({{1, 0}, {2, 1}, {3, 2}});
    CHECK(std::abs(s1 - s2) < 1e-9);
    CHECK(std::abs(s1 - s3) < 1e-9);
    CHECK(std::abs(s1 - s4) < 1e-9);
}

TEST_CASE("ges returns the empty graph on pure noise") {
    const Dataset d = noise_dataset(5000, 5, 777);
    const Pdag g = ges(d, {});
    CHECK(g.num_edges() == 0);
}

TEST_CASE("ges recovers the chain equivalence class") {
    const GbnModel chain = unit_chain_model(4);
    const Dataset d = sample_observational(chain, 10000, 811);
    const Pdag learned = ges(d, {});
    const PcResult oracle = pc_with_oracle(4, d_separation_oracle(chain.dag()), {});
    CHECK(learned == oracle.graph);
}

TEST_CASE("ges requires n > m") {
    const Dataset d = noise_dataset(4, 5, 1);
    CHECK_THROWS_AS(ges(d, {}), std::invalid_argument);
}

TEST_CASE("fci oracle: collider gets arrowheads, exogenous ends stay circles") {
    const Dag truth(3, {{0, 1}, {2, 1}});
    const FciResult res = fci_with_oracle(3, d_separation_oracle(truth), {});
    CHECK(res.graph.mark_at(1, 0) == Mark::Arrow);
    CHECK(res.graph.mark_at(1, 2) == Mark::Arrow);
    CHECK(res.graph.mark_at(0, 1) == Mark::Circle);
    CHECK(res.graph.mark_at(2, 1) == Mark::Circle);
}

TEST_CASE("fci oracle: hidden common cause yields a bidirected edge") {
    // Observed w,x,y,v (0..3) plus latent L(4): w->x, L->x, L->y, v->y.
    // The m-separation oracle answers over the observed margin.
    const Dag full(5, {{0, 1}, {4, 1}, {4, 2}, {3, 2}});
    const CiOracle oracle = [&full](NodeId x, NodeId y, const std::vector<NodeId>& s) {
        return d_separated(full, x, y, s);
    };
    const FciResult res = fci_with_oracle(4, oracle, {});
    REQUIRE(res.graph.adjacent(1, 2));
    CHECK(res.graph.mark_at(1, 2) == Mark::Arrow);
    CHECK(res.graph.mark_at(2, 1) == Mark::Arrow);
}

TEST_CASE("fci oracle propagates orientations: collider plus tail edge") {
    // a -> c <- b, c -> d: the endpoint rule turns c o-o d into c -> d.
    const Dag truth(4, {{0, 2}, {1, 2}, {2, 3}});
    const FciResult res = fci_with_oracle(4, d_separation_oracle(truth), {});
    CHECK(res.graph.mark_at(2, 0) == Mark::Arrow);
    CHECK(res.graph.mark_at(2, 1) == Mark::Arrow);
    CHECK(res.graph.mark_at(2, 3) == Mark::Tail);
    CHECK(res.graph.mark_at(3, 2) == Mark::Arrow);
}

TEST_CASE("fci oracle on latent-free models projects to the PC CPDAG") {
    Rng rng(31415);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 4 + static_cast<int>(rng.uniform_int(3));
        const Dag truth = random_dag(rng, n, 0.4);
        const CiOracle oracle = d_separation_oracle(truth);
        const FciResult f = fci_with_oracle(n, oracle, {});
        const PcResult p = pc_with_oracle(n, oracle, {});
        REQUIRE(f.graph.to_pdag() == p.graph);
    }
}

TEST_CASE("fci adjacencies are a subset of pc adjacencies on the same data") {
    const GbnModel model = random_gbn(7, 0.4, 2020);
    const Dataset data = sample_observational(model, 3000, 2021);
    DiscoveryOptions opts;
    opts.alpha = 0.2;
    const PcResult p = pc(data, opts);
    const FciResult f = fci(data, opts);
    for (int a = 0; a < 7; ++a) {
        for (int b = a + 1; b < 7; ++b) {
            if (f.graph.adjacent(a, b)) CHECK(p.graph.adjacent(a, b));
        }
    }
}

TEST_CASE("ges score is monotone across accepted moves and terminates") {
    // Implicit in convergence: rerun ges on moderately dense data and verify
    // the final total score is at least the empty-graph score.
    const GbnModel model = random_gbn(6, 0.5, 3000);
    const Dataset d = sample_observational(model, 4000, 3001);
    const Pdag g = ges(d, {});
    const DagExtension ext = extend_to_dag(g);
    double final_score = 0.0;
    double empty_score = 0.0;
    for (NodeId v = 0; v < 6; ++v) {
        final_score += node_bic(
            d, v, std::vector<NodeId>(ext.dag.parents(v).begin(), ext.dag.parents(v).end()),
            1.0);
        empty_score += node_bic(d, v, {}, 1.0);
    }
    CHECK(final_score >= empty_score - 1e-9);
}

TEST_CASE("threshold_sweep basics") {
    const GbnModel model = random_gbn(5, 0.5, 52);
    const Dataset data = sample_observational(model, 2000, 53);

    SUBCASE("single-value grid selects index 0") {
        const SweepResult r = threshold_sweep(data, "pc", {0.05});
        REQUIRE(r.entries.size() == 1);
        CHECK(r.entries[0].threshold == 0.05);
        REQUIRE(r.selected.has_value());
        CHECK(*r.selected == 0);
    }

    SUBCASE("grid must be sorted and nonempty") {
        CHECK_THROWS_AS(threshold_sweep(data, "pc", {}), std::invalid_argument);
        CHECK_THROWS_AS(threshold_sweep(data, "pc", {0.2, 0.1}), std::invalid_argument);
        CHECK_THROWS_AS(threshold_sweep(data, "nope", {0.1}), ConfigError);
    }

    SUBCASE("deterministic across repeated runs") {
        const std::vector<double> grid{0.01, 0.05, 0.1, 0.5};
        const SweepResult a = threshold_sweep(data, "pc", grid, &model.dag());
        const SweepResult b = threshold_sweep(data, "pc", grid, &model.dag());
        REQUIRE(a.entries.size() == b.entries.size());
        for (std::size_t i = 0; i < a.entries.size(); ++i) {
            CHECK(a.entries[i].graph == b.entries[i].graph);
        }
        CHECK(a.selected == b.selected);
    }
}

TEST_CASE("threshold_sweep: selected F dominates the F at alpha 0.05") {
    const GbnModel model = random_gbn(8, 0.35, 6060);
    const Dataset data = sample_observational(model, 10000, 6061);
    std::vector<double> grid;
    for (int k = 1; k <= 99; k += 2) grid.push_back(k / 100.0);
    const Dag truth = model.dag();
    const SweepResult r = threshold_sweep(data, "pc", grid, &truth);
    REQUIRE(r.selected.has_value());
    const auto f_at = [&](std::size_t i) {
        return prf(edge_confusion(r.entries[i].graph, truth)).f_score;
    };
    const std::size_t i05 =
        std::find_if(grid.begin(), grid.end(), [](double t) { return t == 0.05; }) -
        grid.begin();
    REQUIRE(i05 < grid.size());
    CHECK(f_at(*r.selected) >= f_at(i05));
}

TEST_CASE("ges penalty mapping covers the sparsity range") {
    CHECK(ges_penalty_from_threshold(0.0) == doctest::Approx(1e-9));
    CHECK(ges_penalty_from_threshold(0.5) == doctest::Approx(1.0));
    CHECK(ges_penalty_from_threshold(1.0) == doctest::Approx(1e9));
    CHECK(ges_penalty_from_threshold(0.9) > ges_penalty_from_threshold(0.1));
}

TEST_CASE("discovery options validation") {
    const Dataset d = noise_dataset(100, 3, 9);
    DiscoveryOptions opts;
    opts.alpha = 1.5;
    CHECK_THROWS_AS(pc(d, opts), std::invalid_argument);
    opts.alpha = 0.05;
    opts.max_cond_size = -1;
    CHECK_THROWS_AS(pc(d, opts), std::invalid_argument);
}
