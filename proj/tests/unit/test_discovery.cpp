#include <doctest.h>

#include <cmath>

#include "causaltwin/discovery.hpp"
#include "causaltwin/synth.hpp"
#include "helpers.hpp"

using namespace causaltwin;

namespace {

// X -> Y -> Z chain with unit-variance marginals, all at lag 0.
TimeSeriesFrame chain_frame(std::size_t rows, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> values(rows * 3);
  for (std::size_t t = 0; t < rows; ++t) {
    const double x = rng.normal();
    const double y = 0.8 * x + 0.6 * rng.normal();
    const double z = 0.8 * y + 0.6 * rng.normal();
    values[t * 3 + 0] = x;
    values[t * 3 + 1] = y;
    values[t * 3 + 2] = z;
  }
  return testutil::make_frame(3, std::move(values));
}

}  // namespace

TEST_CASE("ci_test separates a chain at its middle node") {
  AugmentedFrame aug = augment(chain_frame(10000, 5), 1);
  const ColumnKey x{0, 0}, y{1, 0}, z{2, 0};

  const CiResult marginal = ci_test(aug, x, z, {});
  CHECK_FALSE(marginal.independent);
  CHECK(marginal.partial_correlation > 0.5);

  const CiResult blocked = ci_test(aug, x, z, {y});
  CHECK(blocked.independent);
  CHECK(std::abs(blocked.partial_correlation) < 0.03);
  CHECK(blocked.p_value >= 0.05);
}

TEST_CASE("ci_test sheds collinear conditioners and reports them") {
  // Conditioning on Y twice: the duplicate column is collinear.
  AugmentedFrame aug = augment(chain_frame(5000, 6), 1);
  const CiResult r = ci_test(aug, {0, 0}, {2, 0}, {{1, 0}, {1, 0}});
  CHECK(r.dropped_conditioners == 1);
  CHECK(r.independent);
}

TEST_CASE("discover finds exactly the lagged edge of a two-node system") {
  const std::size_t rows = 8000;
  Rng rng(7);
  std::vector<double> values(rows * 2, 0.0);
  double prev_x = rng.normal();
  for (std::size_t t = 0; t < rows; ++t) {
    const double x = rng.normal();
    values[t * 2 + 0] = x;
    values[t * 2 + 1] = 0.8 * prev_x + 0.6 * rng.normal();
    prev_x = x;
  }
  auto frame = testutil::make_frame(2, std::move(values));
  AugmentedFrame aug = augment(frame, 3);

  DiscoveryOptions options;
  options.seed = 17;
  DiscoveryStats stats;
  CausalGraph graph = discover(aug, {}, options, &stats);

  REQUIRE(graph.edges.size() == 1);
  CHECK(graph.edges[0].src_var == 0);
  CHECK(graph.edges[0].src_lag == 1);
  CHECK(graph.edges[0].dst_var == 1);
  CHECK(graph.edges[0].orientation_source == OrientationSource::Temporal);
  CHECK(stats.tdmi_pairs > 0);
}

TEST_CASE("discover is deterministic for a fixed seed") {
  auto frame = chain_frame(4000, 9);
  AugmentedFrame aug = augment(frame, 2);
  DiscoveryOptions options;
  options.seed = 23;
  CausalGraph a = discover(aug, {}, options);
  CausalGraph b = discover(aug, {}, options);
  REQUIRE(a.edges.size() == b.edges.size());
  for (std::size_t e = 0; e < a.edges.size(); ++e) CHECK(a.edges[e] == b.edges[e]);
}

TEST_CASE("ci test count per target stays within the k 2^k bound") {
  PlantGenerator gen("swat51", 3);
  TimeSeriesFrame train = gen.clean(4000, 0);
  AugmentedFrame aug = augment(train, 3);
  DiscoveryOptions options;
  options.k = 6;
  options.seed = 3;
  DiscoveryStats stats;
  discover(aug, gen.bundle().catalog, options, &stats);
  const std::size_t bound =
      static_cast<std::size_t>(options.k) * (std::size_t{1} << options.k);
  CHECK(stats.max_ci_tests_per_target <= bound);
  CHECK(stats.ci_tests > 0);
}

TEST_CASE("enforced catalog keeps forbidden pairs out of the graph") {
  auto frame = chain_frame(6000, 13);
  AugmentedFrame aug = augment(frame, 1);

  ConstraintCatalog catalog;
  catalog.forbidden_pairs = {{"V1", "V2"}, {"V2", "V1"}};  // no Y-Z link at all

  DiscoveryOptions options;
  options.seed = 29;
  options.enforce_catalog = true;
  CausalGraph graph = discover(aug, catalog, options);
  for (const Edge& e : graph.edges) {
    const bool yz = (e.src_var == 1 && e.dst_var == 2) || (e.src_var == 2 && e.dst_var == 1);
    CHECK_FALSE(yz);
  }

  // Unenforced, the same catalog still orients but does not delete.
  options.enforce_catalog = false;
  CausalGraph loose = discover(aug, catalog, options);
  bool has_yz = false;
  for (const Edge& e : loose.edges) {
    if ((e.src_var == 1 && e.dst_var == 2) || (e.src_var == 2 && e.dst_var == 1)) has_yz = true;
  }
  CHECK(has_yz);
}

TEST_CASE("class precedence orients an undirected lag-0 pair") {
  // Pump drives flow instantaneously; statistics alone cannot direct it.
  const std::size_t rows = 6000;
  Rng rng(37);
  std::vector<VariableMeta> meta{testutil::actuator("P1", PhysicalClass::Pump),
                                 testutil::sensor("F1", PhysicalClass::Flow)};
  std::vector<double> values(rows * 2);
  std::vector<std::int64_t> ts(rows);
  for (std::size_t t = 0; t < rows; ++t) {
    ts[t] = static_cast<std::int64_t>(t);
    const double p = rng.uniform() < 0.5 ? 1.0 : 0.0;
    values[t * 2 + 0] = p;
    values[t * 2 + 1] = 2.0 * p + 0.3 * rng.normal();
  }
  TimeSeriesFrame frame(meta, std::move(ts), std::move(values));
  AugmentedFrame aug = augment(frame, 1);

  ConstraintCatalog catalog;
  catalog.class_precedence = {{PhysicalClass::Pump, PhysicalClass::Flow}};
  DiscoveryOptions options;
  options.seed = 41;
  CausalGraph graph = discover(aug, catalog, options);

  bool found = false;
  for (const Edge& e : graph.edges) {
    if (e.src_lag == 0 && e.src_var == 0 && e.dst_var == 1) {
      found = true;
      CHECK(e.orientation_source == OrientationSource::Physical);
    }
    if (e.src_lag == 0) CHECK_FALSE((e.src_var == 1 && e.dst_var == 0));
  }
  CHECK(found);
}

TEST_CASE("conditioning on the mode removes the spurious pair") {
  // Confounded flow/pressure: marginally dependent, independent given mode.
  SimpsonRun run = generate_simpson(false, 71, 6000);
  AugmentedFrame aug = augment(run.frame, 1);
  const int mode = run.frame.index_of("MODE");
  const int flow = run.frame.index_of("FLOW");
  const int press = run.frame.index_of("PRESS");
  REQUIRE(mode >= 0);

  const CiResult marginal = ci_test(aug, {flow, 0}, {press, 0}, {});
  CHECK_FALSE(marginal.independent);
  const CiResult given_mode = ci_test(aug, {flow, 0}, {press, 0}, {{mode, 0}});
  CHECK(given_mode.independent);

  // Discovery with the mode observed drops the direct flow-pressure edge.
  DiscoveryOptions options;
  options.seed = 43;
  CausalGraph graph = discover(aug, {}, options);
  for (const Edge& e : graph.edges) {
    const bool fp = (e.src_var == flow && e.dst_var == press) ||
                    (e.src_var == press && e.dst_var == flow);
    CHECK_FALSE(fp);
  }
}

TEST_CASE("select_candidates ranks the direct parent first") {
  auto frame = chain_frame(8000, 47);
  AugmentedFrame aug = augment(frame, 1);
  CandidateSet set = select_candidates(aug, 2, 10, {}, 16, 53);
  REQUIRE_FALSE(set.candidates.empty());
  CHECK(set.candidates[0].var == 1);  // Y explains Z best
  bool has_x = false;
  for (const auto& c : set.candidates) has_x |= (c.var == 0);
  CHECK(has_x);  // X passes through the chain

  // A pure-noise target keeps no candidates.
  auto noise = testutil::noise_frame(3, 8000, 59);
  CandidateSet empty = select_candidates(augment(noise, 1), 2, 10, {}, 16, 53);
  CHECK(empty.candidates.empty());
}

TEST_CASE("select_candidates flags constant targets") {
  std::vector<double> values(3000 * 2);
  Rng rng(61);
  for (std::size_t t = 0; t < 3000; ++t) {
    values[t * 2] = rng.normal();
    values[t * 2 + 1] = 1.0;
  }
  auto frame = testutil::make_frame(2, std::move(values));
  CandidateSet set = select_candidates(augment(frame, 1), 1, 10, {}, 16, 67);
  CHECK(set.constant_target);
  CHECK(set.candidates.empty());
}
