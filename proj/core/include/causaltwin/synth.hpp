#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "causaltwin/defense.hpp"
#include "causaltwin/frame.hpp"
#include "causaltwin/graph.hpp"
#include "causaltwin/scm.hpp"

namespace causaltwin {

// Ground-truth description of a generated plant: the causal structure, the
// linear core of the mechanisms as a model usable by the inference layer
// (saturation guards are generation-only), the physics catalog the structure
// satisfies, and reference moments from a clean calibration run.
struct PlantBundle {
  CausalGraph truth_graph;
  Scm truth_scm;
  ConstraintCatalog catalog;
  std::vector<double> ref_mean;
  std::vector<double> ref_sigma;
};

// Staged water-treatment analogue. Each stage couples an inflow meter, a
// tank level, a level controller, a pump, an outflow meter and a pressure
// transmitter; stages chain through lagged flow coupling. Templates:
//   swat51  - 6 stages, 51 nodes, 45 true edges
//   wadi123 - 12 stages, 123 nodes, 98 true edges
//   hai78   - 9 stages, 78 nodes, 72 true edges
// Node counts are padded with isolated white-noise transmitters; all
// remaining structure is recoverable from data.
class PlantGenerator {
 public:
  PlantGenerator(const std::string& template_name, std::uint64_t seed);
  ~PlantGenerator();  // out of line: mechanisms_ holds an opaque struct
  PlantGenerator(PlantGenerator&&) noexcept;
  PlantGenerator& operator=(PlantGenerator&&) noexcept;

  static std::vector<std::string> template_names();

  const PlantBundle& bundle() const { return bundle_; }
  std::size_t size() const { return bundle_.truth_graph.size(); }
  std::uint64_t seed() const { return seed_; }
  const std::string& name() const { return name_; }

  // Clean run. Distinct run labels give independent noise streams; the same
  // (seed, run, horizon, noise_scale) is bit-reproducible. noise_scale 0
  // gives deterministic mechanisms (binary: most likely outcome).
  TimeSeriesFrame clean(std::size_t horizon, std::uint64_t run = 0,
                        double noise_scale = 1.0) const;

  // One mutilation of the causal world over [onset, onset + duration).
  //   Force: the node reads a constant.
  //   Offset: additive drift rate * sigma_ref per step, accumulating; the
  //           physical saturation guards still apply.
  //   Hold: the node repeats its last pre-onset value.
  struct AttackAction {
    enum class Op { Force, Offset, Hold };
    int var = 0;
    Op op = Op::Force;
    double value = 0.0;  // Force
    double rate = 0.0;   // Offset, in reference sigmas per step
    std::size_t onset = 0;
    std::size_t duration = 0;
  };

  // Re-simulates the run with the actions applied; rows before the first
  // onset match the clean run bit-exactly. Rows in [label_begin, label_end]
  // are labeled label_id, the rest 0.
  TimeSeriesFrame inject(std::size_t horizon, std::uint64_t run,
                         const std::vector<AttackAction>& actions, int label_id,
                         std::size_t label_begin, std::size_t label_end) const;

  struct Suite {
    TimeSeriesFrame frame;
    std::vector<AttackEpisode> episodes;
  };

  // The standard 41-episode evaluation stream: 18 single-point overrides,
  // 12 two-target episodes with a 45-step stagger, 6 stealthy ramps,
  // 3 physical process faults, 2 control-traffic freezes, separated by
  // enough normal steps for trailing-window baselines.
  Suite attack_suite(std::uint64_t run = 1) const;

  struct ExperimentRun {
    TimeSeriesFrame frame;
    std::vector<NaturalExperiment> experiments;
  };

  // Normal operation with 23 scheduled pump overrides; each override window
  // is a generator-performed do() usable for interventional validation.
  ExperimentRun natural_experiments(std::uint64_t run = 2) const;

 private:
  struct Mechanism;

  void build(const std::string& template_name);
  void simulate(std::size_t horizon, std::uint64_t run, double noise_scale,
                const std::vector<AttackAction>& actions, TimeSeriesFrame* out) const;

  std::string name_;
  std::uint64_t seed_ = 0;
  int stages_ = 0;
  int ait_count_ = 0;
  int xt_count_ = 0;
  std::vector<Mechanism> mechanisms_;
  PlantBundle bundle_;
};

// Confounded flow/pressure pair driven by a slow operating-mode variable
// whose per-mode means rise together. With the direct edge the within-mode
// flow->pressure effect is negative while the pooled correlation is
// positive; without it the variables are independent given the mode. The
// generator asserts the relevant property on its own output.
struct SimpsonRun {
  TimeSeriesFrame frame;
  CausalGraph truth;
  bool direct_edge = false;
  double pooled_corr = 0.0;
  double within_corr[3] = {0.0, 0.0, 0.0};
};

SimpsonRun generate_simpson(bool direct_edge, std::uint64_t seed, std::size_t horizon);

}  // namespace causaltwin
