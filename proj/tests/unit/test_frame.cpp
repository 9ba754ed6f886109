#include <doctest.h>

#include "causaltwin/frame.hpp"
#include "helpers.hpp"

using namespace causaltwin;
using testutil::make_frame;

TEST_CASE("frame rejects malformed inputs") {
  std::vector<VariableMeta> meta{testutil::sensor("A"), testutil::actuator("P")};

  CHECK_RAISES(TimeSeriesFrame({}, {0, 1}, {}), Errc::SchemaMismatch);
  CHECK_RAISES(TimeSeriesFrame(meta, {0, 1}, {1.0, 0.0, 2.0}), Errc::SchemaMismatch);
  CHECK_RAISES(TimeSeriesFrame({testutil::sensor("A"), testutil::sensor("A")}, {0}, {1.0, 2.0}),
               Errc::SchemaMismatch);
  CHECK_RAISES(TimeSeriesFrame(meta, {0, 0}, {1.0, 0.0, 2.0, 1.0}), Errc::NonMonotoneTimestamps);
  CHECK_RAISES(TimeSeriesFrame(meta, {0, 1, 3}, {1.0, 0.0, 2.0, 1.0, 3.0, 0.0}),
               Errc::NonMonotoneTimestamps);
  CHECK_RAISES(TimeSeriesFrame(meta, {0, 1}, {1.0, 0.5, 2.0, 1.0}), Errc::NonBinaryActuatorValue);
  CHECK_RAISES(TimeSeriesFrame(meta, {0, 1}, {1.0, 0.0, 2.0, 1.0}, {}, {0}), Errc::SchemaMismatch);
}

TEST_CASE("frame accessors and period") {
  auto frame = make_frame(2, {1.0, 2.0, 3.0, 4.0, 5.0, 6.0}, {0, 1, 0});
  CHECK(frame.rows() == 3);
  CHECK(frame.cols() == 2);
  CHECK(frame.period() == 1);
  CHECK(frame.at(1, 0) == 3.0);
  CHECK(frame.at(2, 1) == 6.0);
  CHECK(frame.label(1) == 1);
  CHECK(frame.labeled());
  CHECK(frame.index_of("V1") == 1);
  CHECK(frame.index_of("nope") == -1);
  CHECK(frame.column(1) == std::vector<double>{2.0, 4.0, 6.0});
  CHECK_FALSE(frame.has_missing());

  frame.set_missing(0, 1, true);
  CHECK(frame.has_missing());
  CHECK(frame.is_missing(0, 1));
  CHECK_FALSE(frame.is_missing(0, 0));
}

TEST_CASE("augment layout matches shifted base series") {
  // 2 variables, 10 rows, tau 5: 12 columns, 5 rows.
  auto frame = testutil::noise_frame(2, 10, 42);
  AugmentedFrame aug = augment(frame, 5);
  CHECK(aug.rows() == 5);
  CHECK(aug.cols() == 12);
  CHECK(aug.tau() == 5);
  CHECK(aug.base_vars() == 2);

  // Every cell of column (i, l) on the row aligned with time t equals V_i(t-l).
  for (std::size_t r = 0; r < aug.rows(); ++r) {
    const std::size_t t = r + 5;
    for (int i = 0; i < 2; ++i) {
      for (int l = 0; l <= 5; ++l) {
        CHECK(aug.at(r, aug.col_index(i, l)) == frame.at(t - static_cast<std::size_t>(l),
                                                         static_cast<std::size_t>(i)));
        CHECK(aug.keys()[aug.col_index(i, l)] == ColumnKey{i, l});
      }
    }
  }
  CHECK(aug.timestamps().size() == 5);
  CHECK(aug.timestamps()[0] == 5);
}

TEST_CASE("augment requires more rows than lags") {
  auto frame = testutil::noise_frame(1, 6, 1);
  CHECK_RAISES(augment(frame, 6), Errc::SeriesTooShort);
  CHECK_RAISES(augment(frame, -1), Errc::InvalidArgument);
  CHECK(augment(frame, 5).rows() == 1);
}

TEST_CASE("augment propagates missing flags to every lagged copy") {
  auto frame = testutil::noise_frame(1, 8, 2);
  frame.set_missing(3, 0, true);
  AugmentedFrame aug = augment(frame, 2);
  // Row r covers time t = r + 2; V(3) appears at lag l on the row with t - l = 3.
  for (int l = 0; l <= 2; ++l) {
    const std::size_t r = 3 + static_cast<std::size_t>(l) - 2;
    CHECK(aug.is_missing(r, aug.col_index(0, l)));
  }
  std::size_t flagged = 0;
  for (std::size_t r = 0; r < aug.rows(); ++r) {
    for (std::size_t c = 0; c < aug.cols(); ++c) flagged += aug.is_missing(r, c) ? 1 : 0;
  }
  CHECK(flagged == 3);
}

TEST_CASE("split partitions rows by timestamp range") {
  auto frame = make_frame(1, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  SplitSpec spec;
  spec.train_begin = 0;
  spec.train_end = 5;
  spec.val_begin = 5;
  spec.val_end = 8;
  spec.test_begin = 8;
  spec.test_end = 10;
  SplitResult parts = split(frame, spec);
  CHECK(parts.train.rows() == 5);
  CHECK(parts.validation.rows() == 3);
  CHECK(parts.test.rows() == 2);
  // Every original row lands in exactly the part whose range holds its timestamp.
  CHECK(parts.train.at(4, 0) == 4.0);
  CHECK(parts.validation.at(0, 0) == 5.0);
  CHECK(parts.test.at(1, 0) == 9.0);
  CHECK(parts.train.rows() + parts.validation.rows() + parts.test.rows() == frame.rows());
}

TEST_CASE("split rejects overlapping or unordered ranges") {
  auto frame = make_frame(1, {0, 1, 2, 3, 4, 5});
  SplitSpec spec;
  spec.train_begin = 0;
  spec.train_end = 3;
  spec.val_begin = 2;  // overlaps train
  spec.val_end = 4;
  spec.test_begin = 4;
  spec.test_end = 6;
  CHECK_RAISES(split(frame, spec), Errc::OverlappingRanges);

  spec.val_begin = 4;
  spec.val_end = 3;  // empty-reversed range
  CHECK_RAISES(split(frame, spec), Errc::OverlappingRanges);
}

TEST_CASE("fill_missing forward-fills short gaps only") {
  auto frame = make_frame(1, {1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0});
  for (std::size_t t = 2; t <= 4; ++t) frame.set_missing(t, 0, true);  // gap of 3
  frame.set_missing(6, 0, true);                                      // gap of 1

  SUBCASE("gap within cap is filled with the last value") {
    CHECK(fill_missing(frame, 3) == 4);
    CHECK_FALSE(frame.has_missing());
    CHECK(frame.at(2, 0) == 2.0);
    CHECK(frame.at(4, 0) == 2.0);
    CHECK(frame.at(6, 0) == 6.0);
  }

  SUBCASE("gap over cap stays flagged") {
    CHECK(fill_missing(frame, 2) == 1);  // only the single-cell gap
    CHECK(frame.is_missing(2, 0));
    CHECK(frame.is_missing(4, 0));
    CHECK_FALSE(frame.is_missing(6, 0));
  }
}

TEST_CASE("fill_missing leaves leading gaps flagged") {
  auto frame = make_frame(1, {1.0, 2.0, 3.0});
  frame.set_missing(0, 0, true);
  CHECK(fill_missing(frame, 5) == 0);
  CHECK(frame.is_missing(0, 0));
}

TEST_CASE("slice_rows keeps values, labels and timestamps") {
  auto frame = make_frame(2, {1, 2, 3, 4, 5, 6, 7, 8}, {0, 1, 1, 0});
  TimeSeriesFrame cut = slice_rows(frame, 1, 3);
  CHECK(cut.rows() == 2);
  CHECK(cut.at(0, 0) == 3.0);
  CHECK(cut.at(1, 1) == 6.0);
  CHECK(cut.label(0) == 1);
  CHECK(cut.label(1) == 1);
  CHECK(cut.timestamps()[0] == 1);
}
