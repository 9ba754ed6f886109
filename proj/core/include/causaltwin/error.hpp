#pragma once

#include <stdexcept>
#include <string>

namespace causaltwin {

// Failure codes thrown by library entry points. Conditions that are handled
// internally (degenerate bins, singular conditioning sets, logistic
// separation, empty strata) are reported through result flags instead.
enum class Errc {
  SchemaMismatch,
  NonMonotoneTimestamps,
  NonBinaryActuatorValue,
  SeriesTooShort,
  OverlappingRanges,
  InsufficientData,
  MissingParentValue,
  MissingEvidence,
  NoLabels,
  InsufficientNormalWindow,
  BudgetTooSmall,
  MissingGroundTruth,
  NodeUniverseMismatch,
  UnstableTemplate,
  TargetMissing,
  NoExperiments,
  ArtifactHashMismatch,
  NotIdentifiable,
  InvalidArgument,
  IoError,
  ParseError,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, Errc code, const std::string& what) {
  if (!ok) raise(code, what);
}

}  // namespace causaltwin
