#include "causal/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "causal/errors.hpp"

namespace causal {

CorrelationMatrix correlation_matrix(const Dataset& data) {
    const long n = data.num_samples();
    const int m = data.num_vars();
    if (n < 2) throw std::invalid_argument("correlation needs at least two samples");

    const Eigen::MatrixXd& x = data.values();
    const Eigen::RowVectorXd means = x.colwise().mean();
    Eigen::MatrixXd centered = x.rowwise() - means;
    Eigen::VectorXd sd(m);
    for (int j = 0; j < m; ++j) {
        const double var = centered.col(j).squaredNorm() / static_cast<double>(n - 1);
        if (var <= 0.0) {
            throw DegeneracyError("degenerate variance in column '" + data.names()[j] + "'");
        }
        sd(j) = std::sqrt(var);
    }
    Eigen::MatrixXd corr(m, m);
    for (int i = 0; i < m; ++i) {
        corr(i, i) = 1.0;
        for (int j = i + 1; j < m; ++j) {
            const double cov = centered.col(i).dot(centered.col(j)) / static_cast<double>(n - 1);
            const double r = std::clamp(cov / (sd(i) * sd(j)), -1.0, 1.0);
            corr(i, j) = r;
            corr(j, i) = r;
        }
    }
    return {std::move(corr), n};
}

CorrelationMatrix correlation_from_covariance(const Eigen::MatrixXd& cov, long n) {
    if (cov.rows() != cov.cols()) throw std::invalid_argument("covariance must be square");
    const int m = static_cast<int>(cov.rows());
    Eigen::MatrixXd corr(m, m);
    for (int i = 0; i < m; ++i) {
        if (cov(i, i) <= 0.0) throw DegeneracyError("non-positive variance in covariance matrix");
    }
    for (int i = 0; i < m; ++i) {
        corr(i, i) = 1.0;
        for (int j = i + 1; j < m; ++j) {
            const double r =
                std::clamp(cov(i, j) / std::sqrt(cov(i, i) * cov(j, j)), -1.0, 1.0);
            corr(i, j) = r;
            corr(j, i) = r;
        }
    }
    return {std::move(corr), n};
}

double partial_correlation(const CorrelationMatrix& corr, int x, int y,
                           const std::vector<int>& s) {
    const int m = corr.num_vars();
    if (x == y) throw std::invalid_argument("partial correlation requires distinct nodes");
    auto check = [m](int v) {
        if (v < 0 || v >= m) throw std::invalid_argument("index out of range");
    };
    check(x);
    check(y);
    // Canonical argument order makes the computation bit-identical under
    // swaps of x,y and permutations of S.
    std::vector<int> cond = s;
    std::sort(cond.begin(), cond.end());
    if (std::adjacent_find(cond.begin(), cond.end()) != cond.end()) {
        throw std::invalid_argument("conditioning set has repeated indices");
    }
    for (int v : cond) {
        check(v);
        if (v == x || v == y) {
            throw std::invalid_argument("conditioning set must exclude the pair");
        }
    }
    if (static_cast<int>(cond.size()) > m - 2) {
        throw std::invalid_argument("conditioning set too large");
    }
    if (cond.empty()) return corr.corr(x, y);

    const int lo = std::min(x, y);
    const int hi = std::max(x, y);
    std::vector<int> idx{lo, hi};
    idx.insert(idx.end(), cond.begin(), cond.end());
    const int k = static_cast<int>(idx.size());
    Eigen::MatrixXd sub(k, k);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) sub(i, j) = corr.corr(idx[i], idx[j]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) {
        throw DegeneracyError("singular correlation submatrix in partial correlation");
    }
    const Eigen::MatrixXd prec = lu.inverse();
    const double denom = prec(0, 0) * prec(1, 1);
    if (denom <= 0.0) {
        throw DegeneracyError("indefinite precision submatrix in partial correlation");
    }
    return std::clamp(-prec(0, 1) / std::sqrt(denom), -1.0, 1.0);
}

double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

FisherZResult fisher_z_test(const CorrelationMatrix& corr, int x, int y,
                            const std::vector<int>& s, double alpha) {
    if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("alpha must lie in [0,1]");
    const long dof = corr.n - static_cast<long>(s.size()) - 3;
    if (dof < 1) {
        throw std::invalid_argument("insufficient samples for fisher-z: n - |S| - 3 < 1");
    }
    const double r = partial_correlation(corr, x, y, s);
    if (std::abs(r) >= 1.0) {
        return {r > 0 ? std::numeric_limits<double>::infinity()
                      : -std::numeric_limits<double>::infinity(),
                0.0, false};
    }
    const double z = std::atanh(r) * std::sqrt(static_cast<double>(dof));
    const double p = std::erfc(std::abs(z) / std::sqrt(2.0));
    return {z, p, p > alpha};
}

}  // namespace causal
