#pragma once

#include <cstdint>
#include <vector>

#include "causaltwin/frame.hpp"
#include "causaltwin/graph.hpp"

namespace causaltwin {

// Content hash of the structure (variables, tau, edges). Stamped into fitted
// models so downstream artifacts can detect mismatched inputs.
std::uint64_t structure_hash(const CausalGraph& graph);

// One mechanism. Coefficients act on standardized parent values
// (p - mean) / std; continuous targets are standardized the same way before
// the intercept/slopes apply. Residuals and predictions are raw-space.
struct StructuralEquation {
  enum class Form { GaussianAdditive, Logistic };

  int target = 0;
  Form form = Form::GaussianAdditive;
  std::vector<ColumnKey> parents;  // exactly the graph's parent set, sorted
  double intercept = 0.0;
  std::vector<double> beta;  // per parent; zero for dropped design columns
  // Single shared coefficient on the sum of squared standardized parents.
  double gamma = 0.0;
  double sigma = 0.0;  // residual std in standardized units (continuous only)
  // Parents whose design column was constant or collinear at fit time.
  std::vector<int> dropped_parents;
  bool quadratic_dropped = false;
  bool separation = false;  // logistic ridge fallback fired
  double ridge = 0.0;
};

struct Standardization {
  double mean = 0.0;
  double stddev = 1.0;
};

struct Scm {
  std::vector<VariableMeta> variables;
  int tau = 0;
  std::vector<StructuralEquation> equations;      // index-aligned with variables
  std::vector<Standardization> standardization;   // per variable, fit-time moments
  std::uint64_t graph_hash = 0;

  std::size_t size() const { return variables.size(); }
  int max_lag() const;

  // Raw-space mean of a continuous mechanism given raw parent values
  // (aligned with the equation's parent list).
  double mechanism_mean(int target, const double* parent_values) const;
  // Probability of 1 for a binary mechanism.
  double mechanism_probability(int target, const double* parent_values) const;
  double sigma_raw(int target) const;
};

struct Prediction {
  bool binary = false;
  double mean = 0.0;
  double sigma = 0.0;
  double probability = 0.0;
};

// Parent values must align with equations[target].parents.
Prediction predict(const Scm& scm, int target, const std::vector<double>& parent_values);

struct FitOptions {
  // Minimum training rows per estimated coefficient.
  double rows_per_coefficient = 10.0;
};

// Least-squares / IRLS estimation of every mechanism on the lagged design.
// Standardization constants are the sample moments of the training data.
Scm fit(const AugmentedFrame& aug, const CausalGraph& graph, const FitOptions& options = {});

// Raw-space residuals. Continuous: v - mechanism mean, so mechanism + residual
// reproduces the observation bit-exactly. Binary: the activation quantile w
// in [0, 1] placed at the midpoint of the interval consistent with the
// outcome under the monotone representation A = 1 iff w <= p (equivalently a
// uniform latent with threshold at 1 - p): outcome 1 -> w = p/2 in [0, p),
// outcome 0 -> w = (1 + p)/2.
struct ResidualMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
  std::vector<std::uint8_t> valid;  // rows before max lag or with gaps are 0

  double at(std::size_t t, std::size_t i) const { return values[t * cols + i]; }
  bool is_valid(std::size_t t, std::size_t i) const { return valid[t * cols + i] != 0; }
};

ResidualMatrix residuals(const Scm& scm, const TimeSeriesFrame& frame);

}  // namespace causaltwin
