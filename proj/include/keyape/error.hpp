#ifndef KEYAPE_ERROR_HPP
#define KEYAPE_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace keyape {

enum class ErrorCode {
  kParse,
  kValidation,
  kConfiguration,
  kPosition,
  kTokenMismatch,
  kPermutation,
  kNoDelta,
  kReplayDivergence,
  kMismatch,
  kLength,
  kImpossibleState,
  kUndefinedMetric,
  kPairing,
  kEmptyCurve,
  kDataCorruption,
  kNonFinite,
  kIo,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries a code so callers (the CLI in
// particular) can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// An apply failure inside a trace, tagged with the index of the failing step.
class TraceError : public Error {
 public:
  TraceError(ErrorCode code, std::size_t step, const std::string& message)
      : Error(code, "step " + std::to_string(step) + ": " + message),
        step_(step) {}

  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

}  // namespace keyape

#endif  // KEYAPE_ERROR_HPP
