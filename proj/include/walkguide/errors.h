#ifndef WALKGUIDE_ERRORS_H_
#define WALKGUIDE_ERRORS_H_

#include <stdexcept>
#include <string>

namespace walkguide {

enum class ErrorCode {
  kInvalidArgument,
  kEmptyPath,
  kContinuity,
  kOutOfRange,
  kSingularProjection,
  kAmbiguousProjection,
  kNonPositiveDt,
  kProjectionLost,
  kScenarioInvalid,
  kEmptyTrace,
  kEmptyGrid,
  kConfig,
  kIo,
};

const char* error_code_name(ErrorCode code);

// All library failures are reported through this exception; the C API maps
// `code()` onto its status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace walkguide

#endif  // WALKGUIDE_ERRORS_H_
