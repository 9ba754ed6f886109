#pragma once

#include <doctest.h>

#include <string>
#include <vector>

#include "causaltwin/error.hpp"
#include "causaltwin/frame.hpp"
#include "causaltwin/rng.hpp"

// Asserts that expr throws causaltwin::Error with the given code.
#define CHECK_RAISES(expr, errc)                                   \
  do {                                                             \
    bool thrown_ = false;                                          \
    try {                                                          \
      expr;                                                        \
    } catch (const causaltwin::Error& e_) {                        \
      thrown_ = true;                                              \
      CHECK(e_.code() == (errc));                                  \
    }                                                              \
    CHECK_MESSAGE(thrown_, #expr " did not throw");                \
  } while (0)

namespace testutil {

inline causaltwin::VariableMeta sensor(const std::string& name,
                                       causaltwin::PhysicalClass cls = causaltwin::PhysicalClass::Other) {
  return {name, causaltwin::VariableKind::ContinuousSensor, cls, 1, {}};
}

inline causaltwin::VariableMeta actuator(const std::string& name,
                                         causaltwin::PhysicalClass cls = causaltwin::PhysicalClass::Pump) {
  return {name, causaltwin::VariableKind::BinaryActuator, cls, 1, {}};
}

// Frame over n continuous variables from a row-major value buffer.
inline causaltwin::TimeSeriesFrame make_frame(std::size_t n, std::vector<double> values,
                                              std::vector<std::int32_t> labels = {}) {
  std::vector<causaltwin::VariableMeta> meta;
  for (std::size_t i = 0; i < n; ++i) meta.push_back(sensor("V" + std::to_string(i)));
  const std::size_t rows = values.size() / n;
  std::vector<std::int64_t> ts(rows);
  for (std::size_t t = 0; t < rows; ++t) ts[t] = static_cast<std::int64_t>(t);
  return causaltwin::TimeSeriesFrame(std::move(meta), std::move(ts), std::move(values), {},
                                     std::move(labels));
}

// White-noise frame, one column per variable.
inline causaltwin::TimeSeriesFrame noise_frame(std::size_t n, std::size_t rows,
                                               std::uint64_t seed) {
  causaltwin::Rng rng(seed);
  std::vector<double> values(rows * n);
  for (auto& v : values) v = rng.normal();
  return make_frame(n, std::move(values));
}

}  // namespace testutil
