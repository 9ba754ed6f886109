#include "causaltwin/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "causaltwin/error.hpp"
#include "causaltwin/rng.hpp"

namespace causaltwin {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::string stage_name(const char* prefix, int stage, const char* suffix) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%d%s", prefix, stage, suffix);
  return buf;
}

// Stage-local variable offsets within the 6-node block.
constexpr int kFIn = 0;
constexpr int kLevel = 1;
constexpr int kPlc = 2;
constexpr int kPump = 3;
constexpr int kFOut = 4;
constexpr int kPit = 5;
constexpr int kStageVars = 6;

// Shared process coefficients. The level is a leaky integrator, the
// controller a steep logistic around its setpoint, the pump follows the
// command with a small slip probability, and the flow/pressure transmitters
// read the pump and level instantaneously.
constexpr double kLevelSelf = 0.7;
constexpr double kLevelIn = 0.8;
constexpr double kLevelDrain = 1.2;
constexpr double kLevelNoise = 0.35;
constexpr double kLevelLo = 0.0;
constexpr double kLevelHi = 30.0;
// Weak proportional gain: duty responds gently to level error, so pump
// states stay close to independent coin flips and the flow chain does not
// accumulate long-range autocorrelation.
constexpr double kPlcGain = 0.55;
constexpr double kPumpGain = 7.8;  // p(follow command) = 0.98
constexpr double kFOutGain = 1.8;
constexpr double kFOutNoise = 0.12;
constexpr double kFInBase = 1.2;
constexpr double kFInCarry = 0.9;
constexpr double kFInNoise = 0.12;
constexpr double kHeadSupply = 2.0;
constexpr double kHeadNoise = 0.36;
constexpr double kPitBase = 1.0;
constexpr double kPitGain = 0.35;
constexpr double kPitNoise = 0.05;
constexpr double kAitBase = 0.5;
constexpr double kAitGain = 0.6;
constexpr double kAitNoise = 0.1;
// Controlled equilibrium: (1 - kLevelSelf) * L = kLevelIn * E[F_in] -
// kLevelDrain * duty, with E[F_in] ~ 2.0 and duty ~ 0.5 at the setpoint.
constexpr double kSetpoint = 3.4;
constexpr double kSetpointUncontrolled = 5.4;  // stages without pump drain

constexpr int kBurnIn = 400;
constexpr std::uint64_t kRefRun = 0x7ef;

}  // namespace

struct PlantGenerator::Mechanism {
  bool binary = false;
  double intercept = 0.0;
  std::vector<std::pair<ColumnKey, double>> terms;
  double noise = 0.0;
  bool clamped = false;
  double clamp_lo = 0.0;
  double clamp_hi = 0.0;
};

std::vector<std::string> PlantGenerator::template_names() {
  return {"swat51", "wadi123", "hai78"};
}

PlantGenerator::~PlantGenerator() = default;
PlantGenerator::PlantGenerator(PlantGenerator&&) noexcept = default;
PlantGenerator& PlantGenerator::operator=(PlantGenerator&&) noexcept = default;

PlantGenerator::PlantGenerator(const std::string& template_name, std::uint64_t seed)
    : name_(template_name), seed_(seed) {
  build(template_name);

  // Reference moments from a clean calibration run drive attack magnitudes
  // and safe bands.
  TimeSeriesFrame ref = clean(4000, kRefRun);
  const std::size_t n = size();
  bundle_.ref_mean.assign(n, 0.0);
  bundle_.ref_sigma.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t t = 0; t < ref.rows(); ++t) sum += ref.at(t, i);
    const double mean = sum / static_cast<double>(ref.rows());
    double ss = 0.0;
    for (std::size_t t = 0; t < ref.rows(); ++t) {
      const double d = ref.at(t, i) - mean;
      ss += d * d;
    }
    bundle_.ref_mean[i] = mean;
    bundle_.ref_sigma[i] = std::sqrt(ss / static_cast<double>(ref.rows() - 1));
  }
}

void PlantGenerator::build(const std::string& template_name) {
  // Stage counts, analyzer counts and isolated pads are chosen so that each
  // template lands on its documented node/edge budget.
  bool drop_drain_tail = false;  // last two stages gravity-fed (no pump drain)
  if (template_name == "swat51") {
    stages_ = 6;
    ait_count_ = 0;
    xt_count_ = 15;
    drop_drain_tail = true;
  } else if (template_name == "wadi123") {
    stages_ = 12;
    ait_count_ = 3;
    xt_count_ = 48;
  } else if (template_name == "hai78") {
    stages_ = 9;
    ait_count_ = 1;
    xt_count_ = 23;
  } else {
    raise(Errc::InvalidArgument, "unknown plant template: " + template_name);
  }

  std::vector<VariableMeta> vars;
  for (int s = 1; s <= stages_; ++s) {
    vars.push_back({stage_name("FIT", s, "01"), VariableKind::ContinuousSensor,
                    PhysicalClass::Flow, s, {}});
    vars.push_back({stage_name("LIT", s, "01"), VariableKind::ContinuousSensor,
                    PhysicalClass::Level, s, {}});
    vars.push_back({stage_name("PLC", s, "01"), VariableKind::BinaryActuator,
                    PhysicalClass::Controller, s, {}});
    vars.push_back({stage_name("P", s, "01"), VariableKind::BinaryActuator,
                    PhysicalClass::Pump, s, {}});
    vars.push_back({stage_name("FIT", s, "02"), VariableKind::ContinuousSensor,
                    PhysicalClass::Flow, s, {}});
    vars.push_back({stage_name("PIT", s, "01"), VariableKind::ContinuousSensor,
                    PhysicalClass::Pressure, s, {}});
  }
  for (int a = 1; a <= ait_count_; ++a) {
    vars.push_back({stage_name("AIT", a, "01"), VariableKind::ContinuousSensor,
                    PhysicalClass::ChemicalAnalyzer, a, {}});
  }
  for (int x = 1; x <= xt_count_; ++x) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "XT%03d", x);
    vars.push_back({buf, VariableKind::ContinuousSensor, PhysicalClass::Other, 0, {}});
  }

  const std::size_t n = vars.size();
  mechanisms_.assign(n, Mechanism{});
  CausalGraph graph;
  graph.variables = vars;
  graph.tau = 2;

  auto add_edge = [&graph](int src, int lag, int dst, double strength,
                           OrientationSource how) {
    graph.edges.push_back({src, lag, dst, strength, how});
  };

  for (int s = 1; s <= stages_; ++s) {
    const int base = (s - 1) * kStageVars;
    const int f_in = base + kFIn;
    const int level = base + kLevel;
    const int plc = base + kPlc;
    const int pump = base + kPump;
    const int f_out = base + kFOut;
    const int pit = base + kPit;
    const bool drained = !(drop_drain_tail && s > stages_ - 2);
    const double setpoint = drained ? kSetpoint : kSetpointUncontrolled;

    Mechanism& in = mechanisms_[f_in];
    if (s == 1) {
      in.intercept = kHeadSupply;
      in.noise = kHeadNoise;
    } else {
      const int prev_out = (s - 2) * kStageVars + kFOut;
      in.intercept = kFInBase;
      in.terms = {{{prev_out, 1}, kFInCarry}};
      in.noise = kFInNoise;
      add_edge(prev_out, 1, f_in, kFInCarry, OrientationSource::Temporal);
    }

    Mechanism& lv = mechanisms_[level];
    lv.intercept = 0.0;
    lv.terms = {{{f_in, 1}, kLevelIn}, {{level, 1}, kLevelSelf}};
    if (drained) lv.terms.push_back({{pump, 1}, -kLevelDrain});
    lv.noise = kLevelNoise;
    lv.clamped = true;
    lv.clamp_lo = kLevelLo;
    lv.clamp_hi = kLevelHi;
    add_edge(f_in, 1, level, kLevelIn, OrientationSource::Temporal);
    add_edge(level, 1, level, kLevelSelf, OrientationSource::Temporal);
    if (drained) add_edge(pump, 1, level, kLevelDrain, OrientationSource::Temporal);

    Mechanism& ctl = mechanisms_[plc];
    ctl.binary = true;
    ctl.intercept = -kPlcGain * setpoint;
    ctl.terms = {{{level, 1}, kPlcGain}};
    add_edge(level, 1, plc, kPlcGain, OrientationSource::Temporal);

    Mechanism& pm = mechanisms_[pump];
    pm.binary = true;
    pm.intercept = -0.5 * kPumpGain;
    pm.terms = {{{plc, 1}, kPumpGain}};
    add_edge(plc, 1, pump, kPumpGain, OrientationSource::Temporal);

    Mechanism& out = mechanisms_[f_out];
    out.intercept = 0.0;
    out.terms = {{{pump, 0}, kFOutGain}};
    out.noise = kFOutNoise;
    add_edge(pump, 0, f_out, kFOutGain, OrientationSource::Physical);

    Mechanism& pr = mechanisms_[pit];
    pr.intercept = kPitBase;
    pr.terms = {{{level, 0}, kPitGain}};
    pr.noise = kPitNoise;
    add_edge(level, 0, pit, kPitGain, OrientationSource::Physical);
  }

  for (int a = 0; a < ait_count_; ++a) {
    const int ait = stages_ * kStageVars + a;
    const int f_in = a * kStageVars + kFIn;
    Mechanism& an = mechanisms_[ait];
    an.intercept = kAitBase;
    an.terms = {{{f_in, 2}, kAitGain}};
    an.noise = kAitNoise;
    graph.edges.push_back({f_in, 2, ait, kAitGain, OrientationSource::Temporal});
  }

  for (int x = 0; x < xt_count_; ++x) {
    Mechanism& pad = mechanisms_[stages_ * kStageVars + ait_count_ + x];
    pad.intercept = 0.0;
    pad.noise = 1.0;
  }

  graph.check();

  // Stationarity: the continuous-coefficient transfer matrix must contract.
  // Binary nodes are bounded and cannot amplify, so they are excluded.
  {
    std::vector<int> cont;
    std::vector<int> slot(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
      if (!mechanisms_[i].binary) {
        slot[i] = static_cast<int>(cont.size());
        cont.push_back(static_cast<int>(i));
      }
    }
    const std::size_t m = cont.size();
    std::vector<double> gain(m * m, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
      for (const auto& [key, coef] : mechanisms_[cont[r]].terms) {
        if (slot[key.var] < 0) continue;
        double& cell = gain[r * m + slot[key.var]];
        cell = std::max(cell, std::abs(coef));
      }
    }
    std::vector<double> x(m, 1.0), y(m, 0.0);
    double rho = 0.0;
    for (int iter = 0; iter < 300; ++iter) {
      double norm = 0.0;
      for (std::size_t r = 0; r < m; ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < m; ++c) acc += gain[r * m + c] * x[c];
        y[r] = acc;
        norm = std::max(norm, acc);
      }
      if (norm == 0.0) break;
      rho = norm;
      for (std::size_t r = 0; r < m; ++r) x[r] = y[r] / norm;
    }
    require(rho < 0.99, Errc::UnstableTemplate,
            template_name + ": continuous gain spectral radius " + std::to_string(rho));
  }

  ConstraintCatalog catalog;
  catalog.class_precedence = {
      {PhysicalClass::Flow, PhysicalClass::Level},
      {PhysicalClass::Pump, PhysicalClass::Level},
      {PhysicalClass::Level, PhysicalClass::Pressure},
      {PhysicalClass::Pump, PhysicalClass::Flow},
      {PhysicalClass::Flow, PhysicalClass::ChemicalAnalyzer},
      {PhysicalClass::Level, PhysicalClass::Controller},
  };
  catalog.control_edges = {
      {PhysicalClass::Controller, PhysicalClass::Pump},
      {PhysicalClass::Controller, PhysicalClass::Valve},
  };
  // Drain flow leaves its tank; only the inflow meter feeds the level. The
  // class rule Flow->Level cannot express this, so it is pinned per pair.
  for (int s = 1; s <= stages_; ++s) {
    catalog.forbidden_pairs.push_back(
        {stage_name("FIT", s, "02"), stage_name("LIT", s, "01")});
  }
  catalog.check();

  // The linear core doubles as the ground-truth model for replay-based
  // validation. Standardization is the identity, so the coefficients are the
  // raw process gains; saturation guards are generation-only and land in the
  // abducted residuals.
  Scm truth;
  truth.variables = vars;
  truth.tau = graph.tau;
  truth.standardization.assign(n, Standardization{0.0, 1.0});
  truth.equations.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Mechanism& mech = mechanisms_[i];
    StructuralEquation eq;
    eq.target = static_cast<int>(i);
    eq.form = mech.binary ? StructuralEquation::Form::Logistic
                          : StructuralEquation::Form::GaussianAdditive;
    eq.intercept = mech.intercept;
    std::vector<std::pair<ColumnKey, double>> terms = mech.terms;
    std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) {
      return a.first.var != b.first.var ? a.first.var < b.first.var
                                        : a.first.lag < b.first.lag;
    });
    for (const auto& [key, coef] : terms) {
      eq.parents.push_back(key);
      eq.beta.push_back(coef);
    }
    eq.sigma = mech.noise;
    truth.equations[i] = std::move(eq);
  }
  truth.graph_hash = structure_hash(graph);

  bundle_.truth_graph = std::move(graph);
  bundle_.truth_scm = std::move(truth);
  bundle_.catalog = std::move(catalog);
}

void PlantGenerator::simulate(std::size_t horizon, std::uint64_t run, double noise_scale,
                              const std::vector<AttackAction>& actions,
                              TimeSeriesFrame* out) const {
  require(horizon > 0, Errc::InvalidArgument, "horizon must be positive");
  const std::size_t n = size();
  const std::size_t total = kBurnIn + horizon;
  std::vector<double> values(total * n, 0.0);

  // Start near the operating point so the burn-in settles quickly.
  std::vector<double> init(n, 0.0);
  for (int s = 1; s <= stages_; ++s) {
    const int base = (s - 1) * kStageVars;
    init[base + kFIn] = s == 1 ? kHeadSupply : kFInBase + kFInCarry * kFOutGain * 0.5;
    init[base + kLevel] = kSetpoint;
    init[base + kPit] = kPitBase + kPitGain * kSetpoint;
  }

  std::vector<std::vector<const AttackAction*>> by_var(n);
  for (const AttackAction& act : actions) {
    require(act.var >= 0 && static_cast<std::size_t>(act.var) < n, Errc::InvalidArgument,
            "attack action variable out of range");
    require(act.onset + act.duration <= horizon, Errc::InvalidArgument,
            "attack action window exceeds horizon");
    by_var[act.var].push_back(&act);
  }

  std::vector<double> noise(n, 0.0);
  for (std::size_t u = 0; u < total; ++u) {
    Rng row_rng(derive_seed(seed_, run, u));
    for (std::size_t i = 0; i < n; ++i) {
      noise[i] = mechanisms_[i].binary ? row_rng.uniform() : row_rng.normal();
    }

    double* row = values.data() + u * n;
    for (std::size_t i = 0; i < n; ++i) {
      const Mechanism& mech = mechanisms_[i];
      double lin = mech.intercept;
      for (const auto& [key, coef] : mech.terms) {
        const double pv = key.lag == 0 ? row[key.var]
                          : u >= static_cast<std::size_t>(key.lag)
                              ? values[(u - key.lag) * n + key.var]
                              : init[key.var];
        lin += coef * pv;
      }
      double v;
      if (mech.binary) {
        const double p = sigmoid(lin);
        v = noise_scale == 0.0 ? (p >= 0.5 ? 1.0 : 0.0) : (noise[i] < p ? 1.0 : 0.0);
      } else {
        v = lin + noise_scale * mech.noise * noise[i];
      }

      // Mutilations apply in declaration order: drifts perturb the physics
      // (and still saturate), holds and overrides replace the reading.
      const AttackAction* replace = nullptr;
      if (u >= kBurnIn) {
        const std::size_t t = u - kBurnIn;
        for (const AttackAction* act : by_var[i]) {
          if (t < act->onset || t >= act->onset + act->duration) continue;
          switch (act->op) {
            case AttackAction::Op::Offset:
              v += act->rate * bundle_.ref_sigma[i] *
                   static_cast<double>(t - act->onset + 1);
              break;
            case AttackAction::Op::Force:
            case AttackAction::Op::Hold:
              replace = act;
              break;
          }
        }
      }
      if (mech.clamped) {
        v = std::clamp(v, mech.clamp_lo, mech.clamp_hi);
      }
      if (replace != nullptr) {
        v = replace->op == AttackAction::Op::Force ? replace->value
                                                   : values[(u - 1) * n + i];
      }
      row[i] = v;
    }
  }

  std::vector<std::int64_t> timestamps(horizon);
  std::iota(timestamps.begin(), timestamps.end(), 0);
  std::vector<double> emitted(values.begin() + kBurnIn * n, values.end());
  *out = TimeSeriesFrame(bundle_.truth_graph.variables, std::move(timestamps),
                         std::move(emitted));
}

TimeSeriesFrame PlantGenerator::clean(std::size_t horizon, std::uint64_t run,
                                      double noise_scale) const {
  TimeSeriesFrame frame;
  simulate(horizon, run, noise_scale, {}, &frame);
  return frame;
}

TimeSeriesFrame PlantGenerator::inject(std::size_t horizon, std::uint64_t run,
                                       const std::vector<AttackAction>& actions,
                                       int label_id, std::size_t label_begin,
                                       std::size_t label_end) const {
  require(label_begin <= label_end && label_end < horizon, Errc::InvalidArgument,
          "label window out of range");
  TimeSeriesFrame frame;
  simulate(horizon, run, 1.0, actions, &frame);
  std::vector<std::int32_t> labels(horizon, 0);
  for (std::size_t t = label_begin; t <= label_end; ++t) labels[t] = label_id;
  frame.set_labels(std::move(labels));
  return frame;
}

PlantGenerator::Suite PlantGenerator::attack_suite(std::uint64_t run) const {
  // Fixed composition; the kind sequence is shuffled once per generator seed
  // so the kinds spread across the stream.
  enum class Kind { Single, Multi, Ramp, Fault, Freeze };
  std::vector<Kind> kinds;
  kinds.insert(kinds.end(), 18, Kind::Single);
  kinds.insert(kinds.end(), 12, Kind::Multi);
  kinds.insert(kinds.end(), 6, Kind::Ramp);
  kinds.insert(kinds.end(), 3, Kind::Fault);
  kinds.insert(kinds.end(), 2, Kind::Freeze);
  Rng layout(derive_seed(seed_, 0xa77ac5, run));
  layout.shuffle(kinds);

  auto band = [this](int var) {
    return std::pair<double, double>{bundle_.ref_mean[var] - 3.0 * bundle_.ref_sigma[var],
                                     bundle_.ref_mean[var] + 3.0 * bundle_.ref_sigma[var]};
  };

  std::vector<AttackAction> actions;
  std::vector<AttackEpisode> episodes;
  std::size_t onset = 1000;
  constexpr std::size_t kGap = 420;  // normal steps between episodes
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    const int s = 1 + static_cast<int>(k % static_cast<std::size_t>(stages_));
    const int base = (s - 1) * kStageVars;
    const double sign = k % 2 == 0 ? 1.0 : -1.0;
    const double mult = 6.0 + static_cast<double>((k * 5) % 8);

    AttackEpisode ep;
    ep.id = static_cast<int>(k + 1);
    ep.onset = onset;
    std::size_t duration = 0;

    switch (kinds[k]) {
      case Kind::Single: {
        ep.kind = "single-point";
        const int offsets[3] = {kLevel, kFIn, kPit};
        const int tgt = base + offsets[k % 3];
        duration = 80 + 20 * (k % 4);
        actions.push_back({tgt, AttackAction::Op::Force,
                           bundle_.ref_mean[tgt] + mult * bundle_.ref_sigma[tgt],
                           0.0, onset, duration});
        ep.root_var = tgt;
        ep.targets = {tgt};
        auto [lo, hi] = band(tgt);
        ep.success = {tgt, lo, hi, 40};
        break;
      }
      case Kind::Multi: {
        ep.kind = "multi-point";
        const int tgt1 = base + kLevel;
        const int tgt2 = base + kPump;
        duration = 150;
        actions.push_back({tgt1, AttackAction::Op::Force,
                           bundle_.ref_mean[tgt1] + (mult + 2.0) * bundle_.ref_sigma[tgt1],
                           0.0, onset, duration});
        actions.push_back({tgt2, AttackAction::Op::Force, 1.0, 0.0, onset + 45,
                           duration - 45});
        ep.root_var = tgt1;
        ep.targets = {tgt1, tgt2};
        auto [lo, hi] = band(tgt1);
        ep.success = {tgt1, lo, hi, 40};
        break;
      }
      case Kind::Ramp: {
        ep.kind = "stealthy-ramp";
        const int tgt = base + kPit;
        duration = 300;
        actions.push_back({tgt, AttackAction::Op::Offset, 0.0, sign * 0.02, onset,
                           duration});
        ep.root_var = tgt;
        ep.targets = {tgt};
        auto [lo, hi] = band(tgt);
        ep.success = {tgt, lo, hi, 40};
        break;
      }
      case Kind::Fault: {
        ep.kind = "physical-fault";
        const int tgt = base + kLevel;
        duration = 200;
        actions.push_back({tgt, AttackAction::Op::Offset, 0.0, -0.08, onset, duration});
        ep.root_var = tgt;
        ep.targets = {tgt};
        auto [lo, hi] = band(tgt);
        ep.success = {tgt, lo, hi, 40};
        break;
      }
      case Kind::Freeze: {
        ep.kind = "network-freeze";
        const int lvl = base + kLevel;
        const int f_in = base + kFIn;
        duration = 150;
        actions.push_back({lvl, AttackAction::Op::Hold, 0.0, 0.0, onset, duration});
        actions.push_back({f_in, AttackAction::Op::Hold, 0.0, 0.0, onset, duration});
        ep.root_var = lvl;
        ep.targets = {lvl, f_in};
        auto [lo, hi] = band(lvl);
        ep.success = {lvl, lo, hi, 40};
        break;
      }
    }

    ep.end = onset + duration - 1;
    episodes.push_back(ep);
    onset = ep.end + kGap;
  }

  const std::size_t horizon = onset + 600;
  TimeSeriesFrame frame;
  simulate(horizon, run, 1.0, actions, &frame);
  std::vector<std::int32_t> labels(horizon, 0);
  for (const AttackEpisode& ep : episodes) {
    for (std::size_t t = ep.onset; t <= ep.end; ++t) labels[t] = ep.id;
  }
  frame.set_labels(std::move(labels));
  return {std::move(frame), std::move(episodes)};
}

PlantGenerator::ExperimentRun PlantGenerator::natural_experiments(std::uint64_t run) const {
  constexpr std::size_t kCount = 23;
  constexpr std::size_t kWindow = 150;
  constexpr std::size_t kSpacing = 400;

  std::vector<AttackAction> actions;
  std::vector<NaturalExperiment> experiments;
  std::size_t onset = 600;
  for (std::size_t e = 0; e < kCount; ++e) {
    const int s = 1 + static_cast<int>(e % static_cast<std::size_t>(stages_));
    const int base = (s - 1) * kStageVars;
    const double forced = e % 2 == 0 ? 1.0 : 0.0;
    actions.push_back({base + kPump, AttackAction::Op::Force, forced, 0.0, onset, kWindow});
    experiments.push_back({base + kPump, forced, 1.0 - forced, base + kPlc, onset,
                           onset + kWindow - 1});
    onset += kSpacing;
  }

  const std::size_t horizon = onset + 400;
  TimeSeriesFrame frame;
  simulate(horizon, run, 1.0, actions, &frame);
  return {std::move(frame), std::move(experiments)};
}

SimpsonRun generate_simpson(bool direct_edge, std::uint64_t seed, std::size_t horizon) {
  require(horizon >= 200, Errc::InvalidArgument, "simpson horizon too short");

  // Three-level operating mode with strongly increasing flow and pressure
  // means. The direct flow->pressure effect, when present, is negative, so
  // the pooled correlation and the within-mode effect disagree in sign.
  constexpr double kFlowBase = 1.0, kFlowPerMode = 2.0, kFlowNoise = 0.5;
  constexpr double kPressBase = 1.0, kPressPerMode = 3.0, kPressNoise = 0.4;
  const double direct = direct_edge ? -0.8 : 0.0;
  constexpr double kStay = 0.99;

  std::vector<VariableMeta> vars = {
      {"MODE01", VariableKind::ContinuousSensor, PhysicalClass::Other, 1, {}},
      {"FIT901", VariableKind::ContinuousSensor, PhysicalClass::Flow, 1, {}},
      {"PIT901", VariableKind::ContinuousSensor, PhysicalClass::Pressure, 1, {}},
  };

  Rng rng(derive_seed(seed, 0x51b50, direct_edge ? 1 : 0));
  std::vector<double> values(horizon * 3, 0.0);
  int mode = 0;
  for (std::size_t t = 0; t < horizon; ++t) {
    if (t == 0 || rng.uniform() >= kStay) mode = static_cast<int>(rng.uniform_int(3));
    const double flow = kFlowBase + kFlowPerMode * mode + kFlowNoise * rng.normal();
    const double press = kPressBase + kPressPerMode * mode + direct * (flow - kFlowBase - kFlowPerMode * mode) +
                         kPressNoise * rng.normal();
    values[t * 3 + 0] = mode;
    values[t * 3 + 1] = flow;
    values[t * 3 + 2] = press;
  }

  std::vector<std::int64_t> timestamps(horizon);
  std::iota(timestamps.begin(), timestamps.end(), 0);

  SimpsonRun out;
  out.frame = TimeSeriesFrame(vars, std::move(timestamps), std::move(values));
  out.direct_edge = direct_edge;
  out.truth.variables = vars;
  out.truth.tau = 1;
  out.truth.edges = {
      {0, 1, 0, kStay, OrientationSource::Temporal},
      {0, 0, 1, kFlowPerMode, OrientationSource::CIStatistics},
      {0, 0, 2, kPressPerMode, OrientationSource::CIStatistics},
  };
  if (direct_edge) {
    out.truth.edges.push_back({1, 0, 2, direct, OrientationSource::Physical});
  }
  out.truth.check();

  // Self-check: the pooled flow/pressure correlation must be positive while
  // the within-mode correlations carry the direct effect's sign (or vanish).
  auto corr = [&](int want_mode) {
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    std::size_t count = 0;
    for (std::size_t t = 0; t < horizon; ++t) {
      if (want_mode >= 0 && static_cast<int>(out.frame.at(t, 0)) != want_mode) continue;
      const double x = out.frame.at(t, 1);
      const double y = out.frame.at(t, 2);
      sx += x;
      sy += y;
      sxx += x * x;
      syy += y * y;
      sxy += x * y;
      ++count;
    }
    if (count < 8) return 0.0;
    const double nk = static_cast<double>(count);
    const double cov = sxy / nk - (sx / nk) * (sy / nk);
    const double vx = sxx / nk - (sx / nk) * (sx / nk);
    const double vy = syy / nk - (sy / nk) * (sy / nk);
    return vx > 0 && vy > 0 ? cov / std::sqrt(vx * vy) : 0.0;
  };
  out.pooled_corr = corr(-1);
  for (int m = 0; m < 3; ++m) out.within_corr[m] = corr(m);

  require(out.pooled_corr > 0.2, Errc::InvalidArgument,
          "simpson generator: pooled correlation not positive");
  if (direct_edge) {
    for (int m = 0; m < 3; ++m) {
      require(out.within_corr[m] < -0.2, Errc::InvalidArgument,
              "simpson generator: within-mode correlation not negative");
    }
  } else {
    for (int m = 0; m < 3; ++m) {
      require(std::abs(out.within_corr[m]) < 0.2, Errc::InvalidArgument,
              "simpson generator: within-mode dependence without a direct edge");
    }
  }
  return out;
}

}  // namespace causaltwin
