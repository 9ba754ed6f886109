#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "causaltwin/types.hpp"

namespace causaltwin {

// Aligned multivariate series sampled on a fixed period. Values are stored
// row-major (time outer, variable inner); missing cells are flagged rather
// than encoded as sentinels. labels is empty when the stream is unlabeled,
// otherwise one entry per row with 0 = normal and k > 0 = attack id k.
class TimeSeriesFrame {
 public:
  TimeSeriesFrame() = default;
  TimeSeriesFrame(std::vector<VariableMeta> meta, std::vector<std::int64_t> timestamps,
                  std::vector<double> values, std::vector<std::uint8_t> missing = {},
                  std::vector<std::int32_t> labels = {});

  std::size_t rows() const { return timestamps_.size(); }
  std::size_t cols() const { return meta_.size(); }
  std::int64_t period() const { return period_; }

  const std::vector<VariableMeta>& meta() const { return meta_; }
  const std::vector<std::int64_t>& timestamps() const { return timestamps_; }
  const std::vector<std::int32_t>& labels() const { return labels_; }
  bool labeled() const { return !labels_.empty(); }

  double at(std::size_t t, std::size_t i) const { return values_[t * cols_ + i]; }
  bool is_missing(std::size_t t, std::size_t i) const {
    return !missing_.empty() && missing_[t * cols_ + i] != 0;
  }
  bool has_missing() const;
  std::int32_t label(std::size_t t) const { return labels_.empty() ? 0 : labels_[t]; }

  void set(std::size_t t, std::size_t i, double v) { values_[t * cols_ + i] = v; }
  void set_missing(std::size_t t, std::size_t i, bool m);
  void set_labels(std::vector<std::int32_t> labels);

  // Copy of one variable across all rows; missing cells keep their stored value.
  std::vector<double> column(std::size_t i) const;

  int index_of(const std::string& name) const;  // -1 when absent

  const std::vector<double>& raw_values() const { return values_; }
  std::vector<double>& raw_values() { return values_; }

 private:
  std::vector<VariableMeta> meta_;
  std::vector<std::int64_t> timestamps_;
  std::vector<double> values_;
  std::vector<std::uint8_t> missing_;
  std::vector<std::int32_t> labels_;
  std::size_t cols_ = 0;
  std::int64_t period_ = 1;
};

// Column identity inside an augmented design: variable i at lag ell holds
// V_i(t - ell) on the row aligned with time t.
struct ColumnKey {
  int var = 0;
  int lag = 0;
  bool operator==(const ColumnKey&) const = default;
};

// Lagged design built from a frame. Rows cover t in [tau, T); columns are
// ordered variable-major, lag-minor: (v0,l0), (v0,l1), ..., (v1,l0), ...
class AugmentedFrame {
 public:
  AugmentedFrame() = default;

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return keys_.size(); }
  int tau() const { return tau_; }
  std::size_t base_vars() const { return meta_.size(); }

  const std::vector<VariableMeta>& meta() const { return meta_; }
  const std::vector<ColumnKey>& keys() const { return keys_; }
  const std::vector<std::int64_t>& timestamps() const { return timestamps_; }

  std::size_t col_index(int var, int lag) const {
    return static_cast<std::size_t>(var) * (tau_ + 1) + static_cast<std::size_t>(lag);
  }
  double at(std::size_t row, std::size_t col) const { return values_[row * cols_ + col]; }
  bool is_missing(std::size_t row, std::size_t col) const {
    return !missing_.empty() && missing_[row * cols_ + col] != 0;
  }
  bool has_missing() const { return !missing_.empty(); }

  std::vector<double> column(std::size_t col) const;

  friend AugmentedFrame augment(const TimeSeriesFrame& frame, int tau);

 private:
  std::vector<VariableMeta> meta_;
  std::vector<ColumnKey> keys_;
  std::vector<std::int64_t> timestamps_;
  std::vector<double> values_;
  std::vector<std::uint8_t> missing_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  int tau_ = 0;
};

// Builds the lagged design for lags 0..tau. Requires frame.rows() > tau.
AugmentedFrame augment(const TimeSeriesFrame& frame, int tau);

// Half-open timestamp ranges. Ranges must be disjoint and ordered
// train < validation < test.
struct SplitSpec {
  std::int64_t train_begin = 0, train_end = 0;
  std::int64_t val_begin = 0, val_end = 0;
  std::int64_t test_begin = 0, test_end = 0;
};

struct SplitResult {
  TimeSeriesFrame train;
  TimeSeriesFrame validation;
  TimeSeriesFrame test;
};

SplitResult split(const TimeSeriesFrame& frame, const SplitSpec& spec);

// Forward-fills missing runs of length <= max_gap per variable. Longer runs
// and leading gaps stay flagged. Returns the number of cells filled.
std::size_t fill_missing(TimeSeriesFrame& frame, int max_gap);

// Row range [begin, end) as a standalone frame (labels preserved).
TimeSeriesFrame slice_rows(const TimeSeriesFrame& frame, std::size_t begin, std::size_t end);

}  // namespace causaltwin
