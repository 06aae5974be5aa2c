#pragma once

#include <vector>

#include <Eigen/Dense>

#include "causal/dataset.hpp"

namespace causal {

/// Pearson correlations together with the sample count they came from.
struct CorrelationMatrix {
    Eigen::MatrixXd corr;
    long n = 0;

    int num_vars() const { return static_cast<int>(corr.rows()); }
};

/// Sample correlation matrix ((n-1) variance convention). Throws
/// DegeneracyError naming the column if any column is constant.
CorrelationMatrix correlation_matrix(const Dataset& data);

/// Builds a CorrelationMatrix from a covariance matrix (population use).
CorrelationMatrix correlation_from_covariance(const Eigen::MatrixXd& cov, long n);

/// Partial correlation of x and y given S, by inverting the correlation
/// submatrix over {x,y} union S. Throws DegeneracyError when the submatrix is
/// numerically singular.
double partial_correlation(const CorrelationMatrix& corr, int x, int y,
                           const std::vector<int>& s);

struct FisherZResult {
    double z = 0.0;
    double p = 1.0;
    bool independent = false;
};

/// Fisher-Z conditional independence test:
///   z = atanh(r) * sqrt(n - |S| - 3),  p two-sided normal,
///   independent iff p > alpha (ties count as dependent).
/// |r| = 1 short-circuits to dependent with p = 0. Requires n - |S| - 3 >= 1.
FisherZResult fisher_z_test(const CorrelationMatrix& corr, int x, int y,
                            const std::vector<int>& s, double alpha);

/// Standard normal CDF via erfc (absolute error below 1e-12).
double standard_normal_cdf(double z);

}  // namespace causal
