#include "causaltwin/frame.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "causaltwin/error.hpp"

namespace causaltwin {

const char* kind_name(VariableKind kind) {
  return kind == VariableKind::ContinuousSensor ? "continuous" : "binary";
}

const char* class_name(PhysicalClass cls) {
  switch (cls) {
    case PhysicalClass::Flow: return "Flow";
    case PhysicalClass::Level: return "Level";
    case PhysicalClass::Pressure: return "Pressure";
    case PhysicalClass::ChemicalAnalyzer: return "ChemicalAnalyzer";
    case PhysicalClass::Pump: return "Pump";
    case PhysicalClass::Valve: return "Valve";
    case PhysicalClass::Controller: return "Controller";
    case PhysicalClass::Other: return "Other";
  }
  return "Other";
}

VariableKind kind_from_name(const std::string& name) {
  if (name == "continuous") return VariableKind::ContinuousSensor;
  if (name == "binary") return VariableKind::BinaryActuator;
  raise(Errc::ParseError, "unknown variable kind '" + name + "'");
}

PhysicalClass class_from_name(const std::string& name) {
  static const std::pair<const char*, PhysicalClass> table[] = {
      {"Flow", PhysicalClass::Flow},
      {"Level", PhysicalClass::Level},
      {"Pressure", PhysicalClass::Pressure},
      {"ChemicalAnalyzer", PhysicalClass::ChemicalAnalyzer},
      {"Pump", PhysicalClass::Pump},
      {"Valve", PhysicalClass::Valve},
      {"Controller", PhysicalClass::Controller},
      {"Other", PhysicalClass::Other},
  };
  for (const auto& [key, value] : table) {
    if (name == key) return value;
  }
  raise(Errc::ParseError, "unknown physical class '" + name + "'");
}

TimeSeriesFrame::TimeSeriesFrame(std::vector<VariableMeta> meta,
                                 std::vector<std::int64_t> timestamps, std::vector<double> values,
                                 std::vector<std::uint8_t> missing,
                                 std::vector<std::int32_t> labels)
    : meta_(std::move(meta)),
      timestamps_(std::move(timestamps)),
      values_(std::move(values)),
      missing_(std::move(missing)),
      labels_(std::move(labels)),
      cols_(meta_.size()) {
  require(!meta_.empty(), Errc::SchemaMismatch, "frame needs at least one variable");
  {
    std::set<std::string> names;
    for (const auto& m : meta_) {
      require(names.insert(m.name).second, Errc::SchemaMismatch,
              "duplicate variable name '" + m.name + "'");
    }
  }
  require(values_.size() == timestamps_.size() * cols_, Errc::SchemaMismatch,
          "value buffer does not match rows x cols");
  require(missing_.empty() || missing_.size() == values_.size(), Errc::SchemaMismatch,
          "missing mask does not match value buffer");
  require(labels_.empty() || labels_.size() == timestamps_.size(), Errc::SchemaMismatch,
          "label vector does not match row count");

  if (timestamps_.size() >= 2) {
    period_ = timestamps_[1] - timestamps_[0];
    require(period_ > 0, Errc::NonMonotoneTimestamps, "timestamps must strictly increase");
    for (std::size_t t = 1; t < timestamps_.size(); ++t) {
      require(timestamps_[t] - timestamps_[t - 1] == period_, Errc::NonMonotoneTimestamps,
              "timestamp step at row " + std::to_string(t) + " differs from the fixed period");
    }
  }

  for (std::size_t i = 0; i < cols_; ++i) {
    if (meta_[i].kind != VariableKind::BinaryActuator) continue;
    for (std::size_t t = 0; t < rows(); ++t) {
      if (is_missing(t, i)) continue;
      const double v = at(t, i);
      require(v == 0.0 || v == 1.0, Errc::NonBinaryActuatorValue,
              "variable '" + meta_[i].name + "' holds " + std::to_string(v) + " at row " +
                  std::to_string(t));
    }
  }
}

bool TimeSeriesFrame::has_missing() const {
  return std::any_of(missing_.begin(), missing_.end(), [](std::uint8_t m) { return m != 0; });
}

void TimeSeriesFrame::set_missing(std::size_t t, std::size_t i, bool m) {
  if (missing_.empty()) {
    if (!m) return;
    missing_.assign(values_.size(), 0);
  }
  missing_[t * cols_ + i] = m ? 1 : 0;
}

void TimeSeriesFrame::set_labels(std::vector<std::int32_t> labels) {
  require(labels.empty() || labels.size() == rows(), Errc::SchemaMismatch,
          "label vector does not match row count");
  labels_ = std::move(labels);
}

std::vector<double> TimeSeriesFrame::column(std::size_t i) const {
  std::vector<double> out(rows());
  for (std::size_t t = 0; t < rows(); ++t) out[t] = at(t, i);
  return out;
}

int TimeSeriesFrame::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < meta_.size(); ++i) {
    if (meta_[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

AugmentedFrame augment(const TimeSeriesFrame& frame, int tau) {
  require(tau >= 0, Errc::InvalidArgument, "tau must be nonnegative");
  require(frame.rows() > static_cast<std::size_t>(tau), Errc::SeriesTooShort,
          "need more than tau rows to build a lagged design");

  AugmentedFrame out;
  out.meta_ = frame.meta();
  out.tau_ = tau;
  const std::size_t n = frame.cols();
  const std::size_t lags = static_cast<std::size_t>(tau) + 1;
  out.cols_ = n * lags;
  out.rows_ = frame.rows() - static_cast<std::size_t>(tau);

  out.keys_.reserve(out.cols_);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t l = 0; l < lags; ++l) {
      out.keys_.push_back({static_cast<int>(i), static_cast<int>(l)});
    }
  }

  out.timestamps_.assign(frame.timestamps().begin() + tau, frame.timestamps().end());
  out.values_.resize(out.rows_ * out.cols_);
  const bool any_missing = frame.has_missing();
  if (any_missing) out.missing_.assign(out.rows_ * out.cols_, 0);

  for (std::size_t r = 0; r < out.rows_; ++r) {
    const std::size_t t = r + static_cast<std::size_t>(tau);
    double* row = out.values_.data() + r * out.cols_;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t l = 0; l < lags; ++l) {
        row[i * lags + l] = frame.at(t - l, i);
        if (any_missing && frame.is_missing(t - l, i)) out.missing_[r * out.cols_ + i * lags + l] = 1;
      }
    }
  }
  return out;
}

std::vector<double> AugmentedFrame::column(std::size_t col) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = at(r, col);
  return out;
}

TimeSeriesFrame slice_rows(const TimeSeriesFrame& frame, std::size_t begin, std::size_t end) {
  require(begin <= end && end <= frame.rows(), Errc::InvalidArgument, "row slice out of range");
  const std::size_t n = frame.cols();
  std::vector<std::int64_t> ts(frame.timestamps().begin() + begin, frame.timestamps().begin() + end);
  std::vector<double> values(frame.raw_values().begin() + begin * n,
                             frame.raw_values().begin() + end * n);
  std::vector<std::uint8_t> missing;
  if (frame.has_missing()) {
    missing.resize((end - begin) * n);
    for (std::size_t t = begin; t < end; ++t) {
      for (std::size_t i = 0; i < n; ++i) missing[(t - begin) * n + i] = frame.is_missing(t, i) ? 1 : 0;
    }
  }
  std::vector<std::int32_t> labels;
  if (frame.labeled()) {
    labels.assign(frame.labels().begin() + begin, frame.labels().begin() + end);
  }
  return TimeSeriesFrame(frame.meta(), std::move(ts), std::move(values), std::move(missing),
                         std::move(labels));
}

SplitResult split(const TimeSeriesFrame& frame, const SplitSpec& spec) {
  require(spec.train_begin < spec.train_end && spec.val_begin < spec.val_end &&
              spec.test_begin < spec.test_end,
          Errc::InvalidArgument, "split ranges must be nonempty");
  require(spec.train_end <= spec.val_begin && spec.val_end <= spec.test_begin,
          Errc::OverlappingRanges, "split ranges must be disjoint and ordered train < val < test");

  auto locate = [&](std::int64_t begin, std::int64_t end) {
    const auto& ts = frame.timestamps();
    auto lo = std::lower_bound(ts.begin(), ts.end(), begin);
    auto hi = std::lower_bound(ts.begin(), ts.end(), end);
    return std::pair<std::size_t, std::size_t>(lo - ts.begin(), hi - ts.begin());
  };

  auto [tb, te] = locate(spec.train_begin, spec.train_end);
  auto [vb, ve] = locate(spec.val_begin, spec.val_end);
  auto [sb, se] = locate(spec.test_begin, spec.test_end);
  require(tb < te && vb < ve && sb < se, Errc::InvalidArgument,
          "a split range selects no rows");

  return SplitResult{slice_rows(frame, tb, te), slice_rows(frame, vb, ve),
                     slice_rows(frame, sb, se)};
}

std::size_t fill_missing(TimeSeriesFrame& frame, int max_gap) {
  require(max_gap >= 0, Errc::InvalidArgument, "max_gap must be nonnegative");
  if (!frame.has_missing()) return 0;
  std::size_t filled = 0;
  for (std::size_t i = 0; i < frame.cols(); ++i) {
    std::size_t t = 0;
    while (t < frame.rows()) {
      if (!frame.is_missing(t, i)) {
        ++t;
        continue;
      }
      std::size_t run_end = t;
      while (run_end < frame.rows() && frame.is_missing(run_end, i)) ++run_end;
      const std::size_t run = run_end - t;
      if (t > 0 && run <= static_cast<std::size_t>(max_gap)) {
        const double fill = frame.at(t - 1, i);
        for (std::size_t u = t; u < run_end; ++u) {
          frame.set(u, i, fill);
          frame.set_missing(u, i, false);
          ++filled;
        }
      }
      t = run_end;
    }
  }
  return filled;
}

}  // namespace causaltwin
