#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "causal/dataset.hpp"
#include "causal/discovery.hpp"
#include "causal/graph.hpp"

namespace causal {

/// Edge confusion over ordered node pairs. A pair (a,b) is predicted
/// positive when the learned graph has a->b directed or a-b undirected, and
/// actually positive when the truth has a->b.
struct ConfusionCounts {
    long tp = 0;
    long fp = 0;
    long fn = 0;
    long tn = 0;
};

ConfusionCounts edge_confusion(const Pdag& learned, const Dag& truth);
ConfusionCounts edge_confusion(const Dag& learned, const Dag& truth);

struct PrfScores {
    double precision = 1.0;
    double recall = 1.0;
    double fpr = 0.0;
    double f_score = 1.0;
};

/// Precision/recall/FPR/F with empty-denominator conventions:
/// precision = recall = 1 on 0/0, fpr = 0 on 0/0, f = 0 when p + r = 0.
PrfScores prf(const ConfusionCounts& c);

/// Area under recall-vs-FPR across the sweep: points per threshold plus the
/// (0,0) and (1,1) endpoints, deduplicated, sorted by (fpr, recall),
/// trapezoidal rule.
double auc(const SweepResult& sweep, const Dag& truth);

/// Structural Hamming distance: number of unordered pairs whose edge status
/// (absent / undirected / either direction) differs.
int shd(const Pdag& g1, const Pdag& g2);
int shd(const Dag& g1, const Dag& g2);

/// Structural intervention distance: ordered pairs (i,j) whose causal effect
/// is misestimated when adjusting for the estimate's parents of i in the
/// truth DAG (generalized adjustment criterion).
int sid(const Dag& truth, const Dag& estimate);

/// Monte-Carlo oracle for sid: draws random edge weights for the truth,
/// compares the true total effect of i on j against the coefficient of x_i
/// in the population regression of x_j on {x_i} plus the estimated parents.
/// A pair counts when any draw mismatches by more than 1e-7.
int sid_oracle_mc(const Dag& truth, const Dag& estimate, std::uint64_t seed, int draws);

/// Averaged predictive error: extend the graph to a DAG, fit a GBN, predict
/// each node from the rest via exact conditioning; per-node NRMSE is
/// 100 * RMSE / |sample mean|, averaged over nodes.
double nrmse_av(const Pdag& graph, const Dataset& data);

/// One report line per algorithm and threshold; sweep-level metrics are only
/// present on the selected row. Absent metrics serialize as empty cells.
struct MetricRow {
    std::string algorithm;
    std::optional<double> threshold;
    bool selected = false;
    std::optional<double> f_score;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> fpr;
    std::optional<double> auc;
    std::optional<int> shd;
    std::optional<int> sid;
    std::optional<double> nrmse_av;
    std::optional<double> counterfactual_error;
    std::string status = "ok";
};

struct MetricReport {
    std::vector<MetricRow> rows;
};

/// CSV with a fixed column set; one row per algorithm and threshold.
std::string to_csv(const MetricReport& report);
/// Markdown summary of the selected rows, metrics as rows and algorithms as
/// columns.
std::string to_markdown(const MetricReport& report);

}  // namespace causal
