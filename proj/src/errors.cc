#include "walkguide/errors.h"

namespace walkguide {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "InvalidArgument";
    case ErrorCode::kEmptyPath:
      return "EmptyPath";
    case ErrorCode::kContinuity:
      return "Continuity";
    case ErrorCode::kOutOfRange:
      return "OutOfRange";
    case ErrorCode::kSingularProjection:
      return "SingularProjection";
    case ErrorCode::kAmbiguousProjection:
      return "AmbiguousProjection";
    case ErrorCode::kNonPositiveDt:
      return "NonPositiveDt";
    case ErrorCode::kProjectionLost:
      return "ProjectionLost";
    case ErrorCode::kScenarioInvalid:
      return "ScenarioInvalid";
    case ErrorCode::kEmptyTrace:
      return "EmptyTrace";
    case ErrorCode::kEmptyGrid:
      return "EmptyGrid";
    case ErrorCode::kConfig:
      return "Config";
    case ErrorCode::kIo:
      return "Io";
  }
  return "Unknown";
}

}  // namespace walkguide
