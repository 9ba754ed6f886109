#include "causaltwin/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "causaltwin/error.hpp"

namespace causaltwin {

double mean_of(const std::vector<double>& xs) {
  require(!xs.empty(), Errc::InvalidArgument, "mean of empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double variance_of(const std::vector<double>& xs) {
  const double m = mean_of(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return acc / static_cast<double>(xs.size());
}

double stddev_of(const std::vector<double>& xs) { return std::sqrt(variance_of(xs)); }

double quantile_of(std::vector<double> xs, double q) {
  require(!xs.empty(), Errc::InvalidArgument, "quantile of empty sample");
  require(q > 0.0 && q <= 1.0, Errc::InvalidArgument, "quantile level must be in (0, 1]");
  const std::size_t n = xs.size();
  std::size_t rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
  rank = std::min(std::max<std::size_t>(rank, 1), n);
  std::nth_element(xs.begin(), xs.begin() + (rank - 1), xs.end());
  return xs[rank - 1];
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, Errc::InvalidArgument,
          "pearson needs two equal-length samples");
  const double mx = mean_of(x), my = mean_of(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double fisher_z_pvalue(double r, std::size_t n, std::size_t s) {
  if (n <= s + 3) return 1.0;
  r = std::clamp(r, -0.9999999, 0.9999999);
  const double z = 0.5 * std::log((1.0 + r) / (1.0 - r));
  const double stat = std::sqrt(static_cast<double>(n - s) - 3.0) * std::fabs(z);
  return std::erfc(stat / std::sqrt(2.0));
}

namespace {

// Cholesky with diagonal pivoting tolerance; returns false on a dependent
// pivot (the caller drops that column).
bool cholesky_in_place(std::vector<double>& a, std::size_t m, std::vector<char>& dependent,
                       double rel_tol) {
  double max_diag = 0.0;
  for (std::size_t i = 0; i < m; ++i) max_diag = std::max(max_diag, a[i * m + i]);
  const double tol = std::max(max_diag, 1.0) * rel_tol;

  bool any_dropped = false;
  for (std::size_t j = 0; j < m; ++j) {
    double d = a[j * m + j];
    for (std::size_t k = 0; k < j; ++k) {
      if (dependent[k]) continue;
      d -= a[j * m + k] * a[j * m + k];
    }
    if (d <= tol) {
      dependent[j] = 1;
      any_dropped = true;
      continue;
    }
    const double root = std::sqrt(d);
    a[j * m + j] = root;
    for (std::size_t i = j + 1; i < m; ++i) {
      double v = a[i * m + j];
      for (std::size_t k = 0; k < j; ++k) {
        if (dependent[k]) continue;
        v -= a[i * m + k] * a[j * m + k];
      }
      a[i * m + j] = v / root;
    }
  }
  (void)any_dropped;
  return true;
}

std::vector<double> cholesky_solve(const std::vector<double>& chol, std::size_t m,
                                   const std::vector<char>& dependent, std::vector<double> rhs) {
  // Forward then backward substitution, skipping dropped columns.
  for (std::size_t i = 0; i < m; ++i) {
    if (dependent[i]) {
      rhs[i] = 0.0;
      continue;
    }
    double v = rhs[i];
    for (std::size_t k = 0; k < i; ++k) {
      if (dependent[k]) continue;
      v -= chol[i * m + k] * rhs[k];
    }
    rhs[i] = v / chol[i * m + i];
  }
  for (std::size_t ii = m; ii-- > 0;) {
    if (dependent[ii]) {
      rhs[ii] = 0.0;
      continue;
    }
    double v = rhs[ii];
    for (std::size_t k = ii + 1; k < m; ++k) {
      if (dependent[k]) continue;
      v -= chol[k * m + ii] * rhs[k];
    }
    rhs[ii] = v / chol[ii * m + ii];
  }
  return rhs;
}

}  // namespace

LeastSquaresResult least_squares(const std::vector<const double*>& columns, const double* y,
                                 std::size_t rows) {
  const std::size_t m = columns.size();
  require(m > 0 && rows >= m, Errc::InvalidArgument, "least squares needs rows >= columns");

  std::vector<double> xtx(m * m, 0.0);
  std::vector<double> xty(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double acc = 0.0;
      const double* ci = columns[i];
      const double* cj = columns[j];
      for (std::size_t r = 0; r < rows; ++r) acc += ci[r] * cj[r];
      xtx[i * m + j] = acc;
      xtx[j * m + i] = acc;
    }
    double acc = 0.0;
    const double* ci = columns[i];
    for (std::size_t r = 0; r < rows; ++r) acc += ci[r] * y[r];
    xty[i] = acc;
  }

  std::vector<char> dependent(m, 0);
  cholesky_in_place(xtx, m, dependent, 1e-12);

  LeastSquaresResult result;
  result.beta = cholesky_solve(xtx, m, dependent, std::move(xty));
  for (std::size_t i = 0; i < m; ++i) {
    if (dependent[i]) result.dropped.push_back(i);
  }
  result.ok = true;
  return result;
}

LogisticResult logistic_fit(const std::vector<const double*>& columns, const double* y,
                            std::size_t rows, double tol, int max_iter, double fallback_ridge) {
  const std::size_t m = columns.size();
  require(m > 0 && rows >= m, Errc::InvalidArgument, "logistic fit needs rows >= columns");

  auto run = [&](double ridge, LogisticResult& out) {
    std::vector<double> beta(m, 0.0);
    std::vector<double> eta(rows, 0.0), w(rows), z(rows);
    out.converged = false;
    for (int iter = 0; iter < max_iter; ++iter) {
      for (std::size_t r = 0; r < rows; ++r) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) acc += beta[j] * columns[j][r];
        eta[r] = acc;
        const double p = 1.0 / (1.0 + std::exp(-acc));
        const double pw = std::max(p * (1.0 - p), 1e-10);
        w[r] = pw;
        z[r] = acc + (y[r] - p) / pw;
      }
      std::vector<double> xtwx(m * m, 0.0), xtwz(m, 0.0);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
          double acc = 0.0;
          for (std::size_t r = 0; r < rows; ++r) acc += w[r] * columns[i][r] * columns[j][r];
          xtwx[i * m + j] = acc;
          xtwx[j * m + i] = acc;
        }
        double acc = 0.0;
        for (std::size_t r = 0; r < rows; ++r) acc += w[r] * columns[i][r] * z[r];
        xtwz[i] = acc;
      }
      if (ridge > 0.0) {
        for (std::size_t i = 0; i < m; ++i) xtwx[i * m + i] += ridge * static_cast<double>(rows);
      }
      std::vector<char> dependent(m, 0);
      cholesky_in_place(xtwx, m, dependent, 1e-12);
      std::vector<double> next = cholesky_solve(xtwx, m, dependent, std::move(xtwz));

      double delta = 0.0;
      double magnitude = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        delta = std::max(delta, std::fabs(next[j] - beta[j]));
        magnitude = std::max(magnitude, std::fabs(next[j]));
        if (!std::isfinite(next[j])) return false;
      }
      beta = std::move(next);
      if (ridge == 0.0 && magnitude > 30.0) return false;  // separation: weights collapse
      if (delta < tol) {
        out.converged = true;
        break;
      }
    }
    out.beta = std::move(beta);
    return true;
  };

  LogisticResult result;
  if (run(0.0, result) && result.converged) return result;

  result = LogisticResult{};
  result.separation = true;
  result.ridge = fallback_ridge;
  const bool ok = run(fallback_ridge, result);
  require(ok, Errc::InvalidArgument, "logistic fit failed even with the ridge fallback");
  return result;
}

double auc_of(const std::vector<double>& scores, const std::vector<int>& labels) {
  require(scores.size() == labels.size(), Errc::InvalidArgument, "auc inputs differ in length");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Midrank handling for ties.
  std::vector<double> rank(scores.size(), 0.0);
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = r;
    i = j + 1;
  }

  double pos = 0.0, rank_sum = 0.0;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (labels[k] != 0) {
      pos += 1.0;
      rank_sum += rank[k];
    }
  }
  const double neg = static_cast<double>(labels.size()) - pos;
  if (pos == 0.0 || neg == 0.0) return 0.5;
  return (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

std::pair<double, double> wilson_interval(std::size_t successes, std::size_t total) {
  if (total == 0) return {0.0, 1.0};
  const double z = 1.959963984540054;
  const double n = static_cast<double>(total);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

}  // namespace causaltwin
