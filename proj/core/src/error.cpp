#include "causaltwin/error.hpp"

namespace causaltwin {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::SchemaMismatch: return "schema mismatch";
    case Errc::NonMonotoneTimestamps: return "non-monotone timestamps";
    case Errc::NonBinaryActuatorValue: return "non-binary actuator value";
    case Errc::SeriesTooShort: return "series too short";
    case Errc::OverlappingRanges: return "overlapping ranges";
    case Errc::InsufficientData: return "insufficient data";
    case Errc::MissingParentValue: return "missing parent value";
    case Errc::MissingEvidence: return "missing evidence";
    case Errc::NoLabels: return "no labels";
    case Errc::InsufficientNormalWindow: return "insufficient normal window";
    case Errc::BudgetTooSmall: return "budget too small";
    case Errc::MissingGroundTruth: return "missing ground truth";
    case Errc::NodeUniverseMismatch: return "node universe mismatch";
    case Errc::UnstableTemplate: return "unstable template";
    case Errc::TargetMissing: return "target missing";
    case Errc::NoExperiments: return "no experiments";
    case Errc::ArtifactHashMismatch: return "artifact hash mismatch";
    case Errc::NotIdentifiable: return "not identifiable";
    case Errc::InvalidArgument: return "invalid argument";
    case Errc::IoError: return "io error";
    case Errc::ParseError: return "parse error";
  }
  return "unknown error";
}

}  // namespace causaltwin
