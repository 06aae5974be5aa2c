#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "causal/dataset.hpp"
#include "causal/graph.hpp"
#include "causal/stats.hpp"

namespace causal {

struct DiscoveryOptions {
    double alpha = 0.05;
    bool stable_skeleton = true;
    /// Conditioning-set cap. Unset: unbounded below 50 nodes, 4 from 50 up.
    std::optional<int> max_cond_size;
    double penalty_multiplier = 1.0;  // BIC scale for score-based search
};

/// Conditional-independence oracle: true iff x and y are independent given s.
using CiOracle = std::function<bool(NodeId, NodeId, const std::vector<NodeId>&)>;

/// Oracle that answers d-separation queries on a known DAG (for tests and
/// soundness checks).
CiOracle d_separation_oracle(const Dag& truth);
/// Oracle backed by the Fisher-Z test at the given significance level.
CiOracle fisher_z_oracle(const CorrelationMatrix& corr, double alpha);

struct PcResult {
    Pdag graph;
    SepsetMap sepsets;
    long ci_tests = 0;
};

/// PC: level-wise skeleton search, unshielded-collider orientation, Meek
/// closure. Orientations that would create a directed cycle or a new
/// unshielded collider on sample data are skipped deterministically.
PcResult pc(const Dataset& data, const DiscoveryOptions& opts);
PcResult pc(const CorrelationMatrix& corr, const DiscoveryOptions& opts);
PcResult pc_with_oracle(int num_nodes, const CiOracle& test, const DiscoveryOptions& opts);

/// Per-node BIC term: -(n/2) ln(RSS/n) - penalty * (|parents|+1) * ln(n)/2.
double node_bic(const Dataset& data, NodeId node, const std::vector<NodeId>& parents,
                double penalty_multiplier);

/// Greedy forward/backward search over DAGs scored by the sum of node_bic
/// terms; the final DAG is reduced to its CPDAG.
Pdag ges(const Dataset& data, const DiscoveryOptions& opts);

struct FciResult {
    Pag graph;
    SepsetMap sepsets;
    long ci_tests = 0;
};

/// FCI: PC-style skeleton, collider orientation, Possible-D-SEP edge removal,
/// re-orientation, then arrowhead-propagation rules on circle marks.
FciResult fci(const Dataset& data, const DiscoveryOptions& opts);
FciResult fci_with_oracle(int num_nodes, const CiOracle& test, const DiscoveryOptions& opts);

struct SweepEntry {
    double threshold = 0.0;
    Pdag graph;
    std::optional<Pag> pag;  // present for FCI entries
};

struct SweepResult {
    std::vector<SweepEntry> entries;
    std::optional<std::size_t> selected;
    long ci_tests = 0;
};

using Deadline = std::optional<std::chrono::steady_clock::time_point>;

/// Runs the algorithm ("pc", "ges", "fci") once per grid value. For PC/FCI
/// the value is the test significance level; for GES it is mapped to the BIC
/// penalty multiplier t/(1-t) (clamped at the endpoints). With a truth graph
/// the selected entry maximizes the F-score, ties broken toward the smaller
/// threshold; a single-entry sweep selects index 0 either way.
SweepResult threshold_sweep(const Dataset& data, const std::string& algorithm,
                            const std::vector<double>& grid, const Dag* truth = nullptr,
                            const DiscoveryOptions& base_opts = {}, Deadline deadline = {});

/// Grid value -> GES penalty multiplier map used by threshold_sweep.
double ges_penalty_from_threshold(double t);

}  // namespace causal
