#include <doctest.h>

#include <cmath>

#include "causaltwin/stats.hpp"
#include "helpers.hpp"

using namespace causaltwin;

TEST_CASE("moments on a known sample") {
  std::vector<double> xs{2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0};
  CHECK(mean_of(xs) == doctest::Approx(5.0));
  CHECK(variance_of(xs) == doctest::Approx(4.0));  // population variance
  CHECK(stddev_of(xs) == doctest::Approx(2.0));
}

TEST_CASE("quantile is the smallest order statistic covering q") {
  std::vector<double> xs{5.0, 1.0, 3.0, 2.0, 4.0};
  CHECK(quantile_of(xs, 1.0) == 5.0);   // maximum
  CHECK(quantile_of(xs, 0.0) == 1.0);   // minimum
  CHECK(quantile_of(xs, 0.5) == 3.0);
  CHECK(quantile_of(xs, 0.6) == 3.0);   // ceil(0.6*5) = 3rd smallest
  CHECK(quantile_of(xs, 0.61) == 4.0);  // ceil(3.05) = 4th smallest
}

TEST_CASE("pearson on exact linear data") {
  std::vector<double> x{1, 2, 3, 4, 5};
  std::vector<double> y{2, 4, 6, 8, 10};
  std::vector<double> yneg{5, 4, 3, 2, 1};
  CHECK(pearson(x, y) == doctest::Approx(1.0));
  CHECK(pearson(x, yneg) == doctest::Approx(-1.0));
  std::vector<double> flat{3, 3, 3, 3, 3};
  CHECK(pearson(x, flat) == 0.0);  // zero-variance guard
}

TEST_CASE("normal_cdf matches reference points") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
  CHECK(normal_cdf(1.959963985) == doctest::Approx(0.975).epsilon(1e-6));
  CHECK(normal_cdf(-1.959963985) == doctest::Approx(0.025).epsilon(1e-6));
}

TEST_CASE("fisher z p-value is two-sided and monotone in |r|") {
  // r = 0 gives p = 1; stronger correlation gives smaller p.
  CHECK(fisher_z_pvalue(0.0, 1000, 0) == doctest::Approx(1.0));
  const double p_weak = fisher_z_pvalue(0.05, 1000, 0);
  const double p_strong = fisher_z_pvalue(0.2, 1000, 0);
  CHECK(p_strong < p_weak);
  CHECK(p_weak < 1.0);
  // Known point: r = 0.0620 at n = 1003, s = 0 has z ~ 1.962, p ~ 0.0497.
  CHECK(fisher_z_pvalue(0.0620, 1003, 0) == doctest::Approx(0.0497).epsilon(0.01));
  // Conditioning variables shrink the effective sample size, raising p.
  CHECK(fisher_z_pvalue(0.0620, 1003, 5) > fisher_z_pvalue(0.0620, 1003, 0));
}

TEST_CASE("least_squares recovers exact coefficients") {
  // y = 3 + 2 a - b on a small exact design.
  std::vector<double> ones(6, 1.0);
  std::vector<double> a{0, 1, 2, 3, 4, 5};
  std::vector<double> b{1, 0, 2, 1, 3, 2};
  std::vector<double> y(6);
  for (std::size_t i = 0; i < 6; ++i) y[i] = 3.0 + 2.0 * a[i] - b[i];
  auto fit = least_squares({ones.data(), a.data(), b.data()}, y.data(), 6);
  REQUIRE(fit.ok);
  CHECK(fit.dropped.empty());
  CHECK(fit.beta[0] == doctest::Approx(3.0));
  CHECK(fit.beta[1] == doctest::Approx(2.0));
  CHECK(fit.beta[2] == doctest::Approx(-1.0));
}

TEST_CASE("least_squares drops collinear columns instead of failing") {
  std::vector<double> ones(5, 1.0);
  std::vector<double> a{0, 1, 2, 3, 4};
  std::vector<double> twice{0, 2, 4, 6, 8};  // 2a
  std::vector<double> y{1, 3, 5, 7, 9};
  auto fit = least_squares({ones.data(), a.data(), twice.data()}, y.data(), 5);
  REQUIRE(fit.ok);
  CHECK(fit.dropped.size() == 1);
  // Fitted values still reproduce y.
  for (std::size_t i = 0; i < 5; ++i) {
    const double pred = fit.beta[0] + fit.beta[1] * a[i] + fit.beta[2] * twice[i];
    CHECK(pred == doctest::Approx(y[i]));
  }
}

TEST_CASE("logistic_fit recovers a known law") {
  // p = sigmoid(-1 + 2x), 20000 draws.
  Rng rng(99);
  const std::size_t n = 20000;
  std::vector<double> ones(n, 1.0), x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = rng.normal();
    const double p = 1.0 / (1.0 + std::exp(1.0 - 2.0 * x[i]));
    y[i] = rng.uniform() < p ? 1.0 : 0.0;
  }
  auto fit = logistic_fit({ones.data(), x.data()}, y.data(), n);
  REQUIRE(fit.converged);
  CHECK_FALSE(fit.separation);
  CHECK(fit.beta[0] == doctest::Approx(-1.0).epsilon(0.08));
  CHECK(fit.beta[1] == doctest::Approx(2.0).epsilon(0.08));
}

TEST_CASE("logistic_fit falls back to ridge under separation") {
  // Perfectly separated outcome: plain IRLS diverges, ridge refit reports it.
  std::vector<double> ones(8, 1.0);
  std::vector<double> x{-4, -3, -2, -1, 1, 2, 3, 4};
  std::vector<double> y{0, 0, 0, 0, 1, 1, 1, 1};
  auto fit = logistic_fit({ones.data(), x.data()}, y.data(), 8);
  CHECK(fit.separation);
  CHECK(fit.ridge > 0.0);
  CHECK(fit.beta[1] > 0.0);
}

TEST_CASE("auc_of ranks separable scores at 1 and reversed at 0") {
  std::vector<double> scores{0.1, 0.2, 0.8, 0.9};
  std::vector<int> labels{0, 0, 1, 1};
  CHECK(auc_of(scores, labels) == doctest::Approx(1.0));
  std::vector<int> reversed{1, 1, 0, 0};
  CHECK(auc_of(scores, reversed) == doctest::Approx(0.0));
  // Ties average: all-equal scores give 0.5.
  std::vector<double> flat{1, 1, 1, 1};
  CHECK(auc_of(flat, labels) == doctest::Approx(0.5));
}

TEST_CASE("wilson interval brackets the observed proportion") {
  auto [lo, hi] = wilson_interval(8, 10);
  CHECK(lo > 0.4);
  CHECK(lo < 0.8);
  CHECK(hi > 0.8);
  CHECK(hi < 1.0);
  auto [lo0, hi0] = wilson_interval(0, 10);
  CHECK(lo0 == 0.0);
  CHECK(hi0 > 0.0);
  auto [lof, hif] = wilson_interval(10, 10);
  CHECK(hif == 1.0);
  CHECK(lof < 1.0);
}
