#include "causal/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "causal/errors.hpp"
#include "causal/gbn.hpp"
#include "causal/rng.hpp"

namespace causal {

namespace {

void check_same_nodes(int a, int b) {
    if (a != b) throw std::invalid_argument("graphs are over different node sets");
}

}  // namespace

ConfusionCounts edge_confusion(const Pdag& learned, const Dag& truth) {
    check_same_nodes(learned.num_nodes(), truth.num_nodes());
    const int m = truth.num_nodes();
    ConfusionCounts c;
    for (NodeId a = 0; a < m; ++a) {
        for (NodeId b = 0; b < m; ++b) {
            if (a == b) continue;
            const bool predicted = learned.has_directed(a, b) || learned.has_undirected(a, b);
            const bool actual = truth.has_edge(a, b);
            if (predicted && actual) ++c.tp;
            else if (predicted && !actual) ++c.fp;
            else if (!predicted && actual) ++c.fn;
            else ++c.tn;
        }
    }
    return c;
}

ConfusionCounts edge_confusion(const Dag& learned, const Dag& truth) {
    return edge_confusion(Pdag::from_dag(learned), truth);
}

PrfScores prf(const ConfusionCounts& c) {
    PrfScores s;
    s.precision = (c.tp + c.fp == 0) ? 1.0 : static_cast<double>(c.tp) / (c.tp + c.fp);
    s.recall = (c.tp + c.fn == 0) ? 1.0 : static_cast<double>(c.tp) / (c.tp + c.fn);
    s.fpr = (c.fp + c.tn == 0) ? 0.0 : static_cast<double>(c.fp) / (c.fp + c.tn);
    const double pr = s.precision + s.recall;
    s.f_score = (pr == 0.0) ? 0.0 : 2.0 * s.precision * s.recall / pr;
    return s;
}

double auc(const SweepResult& sweep, const Dag& truth) {
    if (sweep.entries.empty()) throw std::invalid_argument("sweep is empty");
    std::vector<std::pair<double, double>> pts;
    pts.reserve(sweep.entries.size() + 2);
    for (const SweepEntry& e : sweep.entries) {
        const PrfScores s = prf(edge_confusion(e.graph, truth));
        pts.emplace_back(s.fpr, s.recall);
    }
    pts.emplace_back(0.0, 0.0);
    pts.emplace_back(1.0, 1.0);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    double area = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        area += (pts[i].first - pts[i - 1].first) * (pts[i].second + pts[i - 1].second) * 0.5;
    }
    return area;
}

int shd(const Pdag& g1, const Pdag& g2) {
    check_same_nodes(g1.num_nodes(), g2.num_nodes());
    int d = 0;
    for (NodeId a = 0; a < g1.num_nodes(); ++a) {
        for (NodeId b = a + 1; b < g1.num_nodes(); ++b) {
            if (g1.status(a, b) != g2.status(a, b)) ++d;
        }
    }
    return d;
}

int shd(const Dag& g1, const Dag& g2) {
    return shd(Pdag::from_dag(g1), Pdag::from_dag(g2));
}

// ---------------------------------------------------------------------------
// SID

int sid(const Dag& truth, const Dag& estimate) {
    check_same_nodes(truth.num_nodes(), estimate.num_nodes());
    const int m = truth.num_nodes();

    std::vector<std::set<NodeId>> desc(m);
    for (NodeId v = 0; v < m; ++v) desc[v] = truth.descendants(v);

    int mistakes = 0;
    for (NodeId i = 0; i < m; ++i) {
        const std::set<NodeId>& pa = estimate.parents(i);
        const std::vector<NodeId> z(pa.begin(), pa.end());
        for (NodeId j = 0; j < m; ++j) {
            if (j == i) continue;
            if (pa.count(j)) {
                // The estimate claims j causes i, hence a null effect of i on
                // j; wrong whenever the truth has a causal path i -> ... -> j.
                if (desc[i].count(j)) ++mistakes;
                continue;
            }
            if (!desc[i].count(j)) {
                // Null true effect; the adjusted estimate is null for every
                // Markov distribution iff Z blocks all paths.
                if (!d_separated(truth, i, j, z)) ++mistakes;
                continue;
            }
            // Nodes on proper causal paths from i to j (excluding i).
            std::set<NodeId> cn;
            for (NodeId w : desc[i]) {
                if (w != i && desc[w].count(j)) cn.insert(w);
            }
            // Adjusting for a descendant of a causal-path node biases the
            // effect estimate.
            std::set<NodeId> forbidden;
            for (NodeId w : cn) forbidden.insert(desc[w].begin(), desc[w].end());
            bool bad = false;
            for (NodeId zv : z) {
                if (forbidden.count(zv)) {
                    bad = true;
                    break;
                }
            }
            if (!bad) {
                // Remaining requirement: Z blocks every proper non-causal
                // path, i.e. i and j are d-separated once the first edges of
                // causal paths are removed.
                EdgeList pruned;
                for (const auto& [from, to] : truth.edges()) {
                    if (from == i && cn.count(to)) continue;
                    pruned.emplace_back(from, to);
                }
                const Dag gp(m, pruned);
                if (!d_separated(gp, i, j, z)) bad = true;
            }
            if (bad) ++mistakes;
        }
    }
    return mistakes;
}

int sid_oracle_mc(const Dag& truth, const Dag& estimate, std::uint64_t seed, int draws) {
    check_same_nodes(truth.num_nodes(), estimate.num_nodes());
    if (draws < 3) throw std::invalid_argument("sid oracle needs at least 3 draws");
    const int m = truth.num_nodes();
    const EdgeList edges = truth.edges();

    std::vector<std::vector<bool>> counted(m, std::vector<bool>(m, false));
    for (int d = 0; d < draws; ++d) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(d)));
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
        for (const auto& [from, to] : edges) {
            const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
            a(to, from) = sign * rng.uniform(0.25, 1.0);
        }
        const Eigen::MatrixXd t =
            (Eigen::MatrixXd::Identity(m, m) - a).partialPivLu().inverse();
        const Eigen::MatrixXd sigma = t * t.transpose();  // unit noise

        for (NodeId i = 0; i < m; ++i) {
            const std::set<NodeId>& pa = estimate.parents(i);
            std::vector<NodeId> reg{i};
            for (NodeId p : pa) {
                if (p != i) reg.push_back(p);
            }
            for (NodeId j = 0; j < m; ++j) {
                if (j == i || counted[i][j]) continue;
                const double true_effect = t(j, i);
                double adjusted = 0.0;
                if (!pa.count(j)) {
                    const int k = static_cast<int>(reg.size());
                    Eigen::MatrixXd srr(k, k);
                    Eigen::VectorXd srj(k);
                    for (int u = 0; u < k; ++u) {
                        srj(u) = sigma(reg[u], j);
                        for (int v = 0; v < k; ++v) srr(u, v) = sigma(reg[u], reg[v]);
                    }
                    Eigen::LDLT<Eigen::MatrixXd> ldlt(srr);
                    if (ldlt.info() != Eigen::Success) {
                        throw DegeneracyError("singular population regression in sid oracle");
                    }
                    adjusted = ldlt.solve(srj)(0);
                }
                if (std::abs(true_effect - adjusted) > 1e-7) counted[i][j] = true;
            }
        }
    }
    int total = 0;
    for (NodeId i = 0; i < m; ++i) {
        for (NodeId j = 0; j < m; ++j) {
            if (counted[i][j]) ++total;
        }
    }
    return total;
}

// ---------------------------------------------------------------------------
// Predictive NRMSE

double nrmse_av(const Pdag& graph, const Dataset& data) {
    const int m = data.num_vars();
    check_same_nodes(graph.num_nodes(), m);
    if (data.num_samples() <= m + 1) {
        throw std::invalid_argument("nrmse needs more samples than variables");
    }
    const DagExtension ext = extend_to_dag(graph);
    const GbnModel model = fit_gbn(ext.dag, data);
    const Gaussian joint = joint_gaussian(model);

    double total = 0.0;
    for (NodeId v = 0; v < m; ++v) {
        const double mean_v = data.column_mean(v);
        if (std::abs(mean_v) < 1e-12) {
            throw DegeneracyError("zero sample mean normalizing node '" + data.names()[v] + "'");
        }
        const LinearPredictor pred = predictor_given_rest(joint, v);
        Eigen::VectorXd coef_full = Eigen::VectorXd::Zero(m);
        int k = 0;
        for (NodeId u = 0; u < m; ++u) {
            if (u != v) coef_full(u) = pred.coef(k++);
        }
        const Eigen::VectorXd predicted =
            (data.values() * coef_full).array() + pred.bias;
        const double rmse = std::sqrt(
            (predicted - data.values().col(v)).squaredNorm() / data.num_samples());
        total += 100.0 * rmse / std::abs(mean_v);
    }
    return total / m;
}

// ---------------------------------------------------------------------------
// Report serialization

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string cell(const std::optional<double>& v) { return v ? fmt_double(*v) : ""; }
std::string cell(const std::optional<int>& v) { return v ? std::to_string(*v) : ""; }

}  // namespace

std::string to_csv(const MetricReport& report) {
    std::ostringstream out;
    out << "algorithm,threshold,selected,f_score,precision,recall,fpr,auc,shd,sid,"
           "nrmse_av,counterfactual_error,status\n";
    for (const MetricRow& r : report.rows) {
        out << r.algorithm << ',' << cell(r.threshold) << ',' << (r.selected ? "1" : "0") << ','
            << cell(r.f_score) << ',' << cell(r.precision) << ',' << cell(r.recall) << ','
            << cell(r.fpr) << ',' << cell(r.auc) << ',' << cell(r.shd) << ',' << cell(r.sid)
            << ',' << cell(r.nrmse_av) << ',' << cell(r.counterfactual_error) << ',' << r.status
            << '\n';
    }
    return out.str();
}

std::string to_markdown(const MetricReport& report) {
    std::vector<const MetricRow*> picked;
    for (const MetricRow& r : report.rows) {
        if (r.selected || r.status != "ok") picked.push_back(&r);
    }
    std::ostringstream out;
    out << "| Score |";
    for (const MetricRow* r : picked) out << ' ' << r->algorithm << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < picked.size(); ++i) out << "---|";
    out << '\n';
    auto row = [&](const std::string& label, auto getter) {
        out << "| " << label << " |";
        for (const MetricRow* r : picked) {
            if (r->status != "ok") {
                out << ' ' << r->status << " |";
            } else {
                out << ' ' << getter(*r) << " |";
            }
        }
        out << '\n';
    };
    row("F-Score", [](const MetricRow& r) { return cell(r.f_score); });
    row("AUC", [](const MetricRow& r) { return cell(r.auc); });
    row("SHD", [](const MetricRow& r) { return cell(r.shd); });
    row("SID", [](const MetricRow& r) { return cell(r.sid); });
    row("NRMSE", [](const MetricRow& r) { return cell(r.nrmse_av); });
    row("CE", [](const MetricRow& r) { return cell(r.counterfactual_error); });
    row("threshold", [](const MetricRow& r) { return cell(r.threshold); });
    return out.str();
}

}  // namespace causal
