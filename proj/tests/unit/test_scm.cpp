#include <doctest.h>

#include <cmath>

#include "causaltwin/scm.hpp"
#include "causaltwin/synth.hpp"
#include "helpers.hpp"

using namespace causaltwin;

namespace {

// Frame generated by V = 2 + 0.7 P1 + 0.3 P2(t-1) - 0.1 (P1^2 + P2^2) + noise,
// with P1, P2 standard normal, so standardized and raw coefficients agree.
TimeSeriesFrame quadratic_frame(std::size_t rows, double sigma, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> values(rows * 3);
  double prev_p2 = rng.normal();
  for (std::size_t t = 0; t < rows; ++t) {
    const double p1 = rng.normal();
    const double p2 = rng.normal();
    const double v = 2.0 + 0.7 * p1 + 0.3 * prev_p2 -
                     0.1 * (p1 * p1 + prev_p2 * prev_p2) + sigma * rng.normal();
    values[t * 3 + 0] = p1;
    values[t * 3 + 1] = p2;
    values[t * 3 + 2] = v;
    prev_p2 = p2;
  }
  return testutil::make_frame(3, std::move(values));
}

CausalGraph quadratic_graph() {
  CausalGraph graph;
  graph.variables = {testutil::sensor("V0"), testutil::sensor("V1"), testutil::sensor("V2")};
  graph.tau = 1;
  graph.edges = {{0, 0, 2, 1.0, OrientationSource::Physical},
                 {1, 1, 2, 1.0, OrientationSource::Temporal}};
  return graph;
}

}  // namespace

TEST_CASE("fit recovers known mechanism coefficients within 0.02") {
  auto frame = quadratic_frame(50000, 0.1, 101);
  Scm scm = fit(augment(frame, 1), quadratic_graph());

  const StructuralEquation& eq = scm.equations[2];
  REQUIRE(eq.parents.size() == 2);
  REQUIRE(eq.form == StructuralEquation::Form::GaussianAdditive);

  // Standardized fit times the target scale gives back raw coefficients.
  const double scale = scm.standardization[2].stddev;
  std::vector<double> raw_beta(2);
  for (std::size_t p = 0; p < 2; ++p) {
    const int var = eq.parents[p].var;
    raw_beta[p] = eq.beta[p] * scale / scm.standardization[var].stddev;
  }
  const double b_p1 = eq.parents[0].var == 0 ? raw_beta[0] : raw_beta[1];
  const double b_p2 = eq.parents[0].var == 0 ? raw_beta[1] : raw_beta[0];
  CHECK(b_p1 == doctest::Approx(0.7).epsilon(0.03));
  CHECK(b_p2 == doctest::Approx(0.3).epsilon(0.07));
  CHECK(eq.gamma * scale == doctest::Approx(-0.1).epsilon(0.1));
  CHECK(scm.sigma_raw(2) == doctest::Approx(0.1).epsilon(0.05));

  // The mechanism mean matches the generator law at chosen parent points.
  for (double p1 : {-1.0, 0.0, 1.5}) {
    for (double p2 : {-0.5, 0.8}) {
      const double truth = 2.0 + 0.7 * p1 + 0.3 * p2 - 0.1 * (p1 * p1 + p2 * p2);
      std::vector<double> parents =
          eq.parents[0].var == 0 ? std::vector<double>{p1, p2} : std::vector<double>{p2, p1};
      CHECK(scm.mechanism_mean(2, parents.data()) == doctest::Approx(truth).epsilon(0.02));
    }
  }
}

TEST_CASE("parentless mechanism is the sample mean and std") {
  auto frame = testutil::noise_frame(1, 5000, 103);
  CausalGraph graph;
  graph.variables = {testutil::sensor("V0")};
  graph.tau = 0;

  Scm scm = fit(augment(frame, 0), graph);
  const auto col = frame.column(0);
  double mean = 0.0;
  for (double v : col) mean += v;
  mean /= static_cast<double>(col.size());
  double ss = 0.0;
  for (double v : col) ss += (v - mean) * (v - mean);
  const double stddev = std::sqrt(ss / static_cast<double>(col.size()));

  CHECK(scm.mechanism_mean(0, nullptr) == doctest::Approx(mean).epsilon(1e-9));
  CHECK(scm.sigma_raw(0) == doctest::Approx(stddev).epsilon(1e-9));
}

TEST_CASE("logistic mechanism with zero coefficients predicts one half") {
  Scm scm;
  scm.variables = {testutil::actuator("P")};
  scm.standardization = {{0.0, 1.0}};
  StructuralEquation eq;
  eq.target = 0;
  eq.form = StructuralEquation::Form::Logistic;
  eq.intercept = 0.0;
  scm.equations = {eq};
  CHECK(scm.mechanism_probability(0, nullptr) == 0.5);
  Prediction p = predict(scm, 0, {});
  CHECK(p.binary);
  CHECK(p.probability == 0.5);
}

TEST_CASE("logistic fit is calibrated within 0.01 at scale") {
  // P(A=1) = sigmoid(0.8 z - 0.3) on a standard normal driver, 50000 rows.
  const std::size_t rows = 50000;
  Rng rng(107);
  std::vector<VariableMeta> meta{testutil::sensor("Z"), testutil::actuator("A")};
  std::vector<double> values(rows * 2);
  std::vector<std::int64_t> ts(rows);
  double rate = 0.0;
  for (std::size_t t = 0; t < rows; ++t) {
    ts[t] = static_cast<std::int64_t>(t);
    const double z = rng.normal();
    const double p = 1.0 / (1.0 + std::exp(0.3 - 0.8 * z));
    const double a = rng.uniform() < p ? 1.0 : 0.0;
    values[t * 2 + 0] = z;
    values[t * 2 + 1] = a;
    rate += a;
  }
  rate /= static_cast<double>(rows);
  TimeSeriesFrame frame(meta, std::move(ts), std::move(values));

  CausalGraph graph;
  graph.variables = meta;
  graph.tau = 0;
  graph.edges = {{0, 0, 1, 1.0, OrientationSource::Physical}};
  Scm scm = fit(augment(frame, 0), graph);

  // Mean predicted probability matches the empirical rate.
  double mean_p = 0.0;
  for (std::size_t t = 0; t < rows; ++t) {
    const double z = frame.at(t, 0);
    mean_p += scm.mechanism_probability(1, &z);
  }
  mean_p /= static_cast<double>(rows);
  CHECK(mean_p == doctest::Approx(rate).epsilon(0.01));
}

TEST_CASE("continuous residuals reproduce observations bit-exactly") {
  auto frame = quadratic_frame(3000, 0.5, 109);
  Scm scm = fit(augment(frame, 1), quadratic_graph());
  ResidualMatrix res = residuals(scm, frame);
  REQUIRE(res.rows == frame.rows());

  const StructuralEquation& eq = scm.equations[2];
  double mean_res = 0.0;
  std::size_t used = 0;
  for (std::size_t t = 1; t < frame.rows(); ++t) {
    REQUIRE(res.is_valid(t, 2));
    std::vector<double> parents;
    for (const ColumnKey& key : eq.parents) {
      parents.push_back(frame.at(t - static_cast<std::size_t>(key.lag),
                                 static_cast<std::size_t>(key.var)));
    }
    const double mean = scm.mechanism_mean(2, parents.data());
    CHECK(mean + res.at(t, 2) == frame.at(t, 2));  // exact reconstruction
    mean_res += res.at(t, 2);
    ++used;
  }
  // In-sample least squares keeps the residual mean at zero.
  CHECK(std::abs(mean_res / static_cast<double>(used)) < 1e-9);
  // Rows before the max lag are invalid.
  CHECK_FALSE(res.is_valid(0, 2));
}

TEST_CASE("binary residuals are the interval midpoints of the latent") {
  Scm scm;
  scm.variables = {testutil::sensor("Z"), testutil::actuator("A")};
  scm.tau = 0;
  scm.standardization = {{0.0, 1.0}, {0.0, 1.0}};
  StructuralEquation zeq;
  zeq.target = 0;
  StructuralEquation aeq;
  aeq.target = 1;
  aeq.form = StructuralEquation::Form::Logistic;
  aeq.parents = {{0, 0}};
  aeq.beta = {1.2};
  aeq.intercept = 0.4;
  scm.equations = {zeq, aeq};

  std::vector<VariableMeta> meta{testutil::sensor("Z"), testutil::actuator("A")};
  TimeSeriesFrame typed(meta, {0, 1}, {0.5, 1.0, -0.3, 0.0});

  ResidualMatrix res = residuals(scm, typed);
  const double p0 = scm.mechanism_probability(1, &typed.raw_values()[0]);
  const double p1 = scm.mechanism_probability(1, &typed.raw_values()[2]);
  // Outcome 1: w = p/2 lies in [0, p). Outcome 0: w = (1+p)/2 lies in [p, 1].
  CHECK(res.at(0, 1) == doctest::Approx(p0 / 2.0).epsilon(1e-12));
  CHECK(res.at(1, 1) == doctest::Approx((1.0 + p1) / 2.0).epsilon(1e-12));
}

TEST_CASE("noiseless generator data leaves zero residuals") {
  PlantGenerator gen("swat51", 5);
  TimeSeriesFrame frame = gen.clean(500, 0, 0.0);
  ResidualMatrix res = residuals(gen.bundle().truth_scm, frame);
  double worst = 0.0;
  for (std::size_t t = 0; t < frame.rows(); ++t) {
    for (std::size_t i = 0; i < frame.cols(); ++i) {
      if (!res.is_valid(t, i)) continue;
      if (gen.bundle().truth_scm.equations[i].form != StructuralEquation::Form::GaussianAdditive)
        continue;
      worst = std::max(worst, std::abs(res.at(t, i)));
    }
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("structure_hash tracks content not edge order") {
  CausalGraph a = quadratic_graph();
  CausalGraph b = quadratic_graph();
  std::swap(b.edges[0], b.edges[1]);
  CHECK(structure_hash(a) == structure_hash(b));

  CausalGraph c = quadratic_graph();
  c.edges[0].src_lag = 1;
  CHECK(structure_hash(a) != structure_hash(c));

  CausalGraph d = quadratic_graph();
  d.variables[0].name = "renamed";
  CHECK(structure_hash(a) != structure_hash(d));
}

TEST_CASE("fit skips underdetermined equations gracefully") {
  // 12 rows, 2 parents + intercept + quadratic: below rows_per_coefficient.
  auto frame = quadratic_frame(12, 0.1, 113);
  FitOptions options;
  options.rows_per_coefficient = 10.0;
  Scm scm = fit(augment(frame, 1), quadratic_graph(), options);
  const StructuralEquation& eq = scm.equations[2];
  // The equation degrades to fewer coefficients rather than overfitting:
  // either parents are dropped or the quadratic term is gone.
  CHECK((eq.dropped_parents.size() + (eq.quadratic_dropped ? 1 : 0)) > 0);
}
