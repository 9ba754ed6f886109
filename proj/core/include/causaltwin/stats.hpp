#pragma once

#include <cstddef>
#include <vector>

namespace causaltwin {

double mean_of(const std::vector<double>& xs);
// Population variance (divide by N), matching maximum-likelihood noise fits.
double variance_of(const std::vector<double>& xs);
double stddev_of(const std::vector<double>& xs);

// Order-statistic quantile: the smallest value x such that at least
// ceil(q * N) samples are <= x. quantile(xs, 1.0) is the maximum.
double quantile_of(std::vector<double> xs, double q);

double pearson(const std::vector<double>& x, const std::vector<double>& y);

double normal_cdf(double z);

// Two-sided p-value for zero partial correlation r given n samples and s
// conditioning variables, via the Fisher z transform.
double fisher_z_pvalue(double r, std::size_t n, std::size_t s);

// Dense column-major symmetric solve helpers used by the regression fits.
struct LeastSquaresResult {
  std::vector<double> beta;
  // Columns the pivoted Cholesky had to drop as linearly dependent; their
  // coefficients are zero.
  std::vector<std::size_t> dropped;
  bool ok = false;
};

// Ordinary least squares of y on the given columns (no implicit intercept;
// include a ones column if one is wanted). Collinear columns are dropped.
LeastSquaresResult least_squares(const std::vector<const double*>& columns, const double* y,
                                 std::size_t rows);

struct LogisticResult {
  std::vector<double> beta;
  bool converged = false;
  // Separation forces the ridge fallback; the flag records it.
  bool separation = false;
  double ridge = 0.0;
};

// Logistic regression of a 0/1 outcome on the given columns via iteratively
// reweighted least squares. Stops at max|delta| < tol or max_iter sweeps.
// Divergence (perfect separation) triggers one ridge-penalized refit.
LogisticResult logistic_fit(const std::vector<const double*>& columns, const double* y,
                            std::size_t rows, double tol = 1e-8, int max_iter = 100,
                            double fallback_ridge = 1e-4);

// Area under the ROC curve of score against a 0/1 label, by rank statistic.
double auc_of(const std::vector<double>& scores, const std::vector<int>& labels);

// Wilson 95% confidence interval for a binomial proportion.
std::pair<double, double> wilson_interval(std::size_t successes, std::size_t total);

}  // namespace causaltwin
