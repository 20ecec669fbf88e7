#pragma once

#include <stdexcept>
#include <string>

namespace hermrand {

enum class ErrorCode {
  kDegreeOverflow,
  kNonFiniteInput,
  kOrderOverflow,
  kInvalidWindow,
  kEmptyWindow,
  kNonPositiveTime,
  kDomain,
  kLengthMismatch,
  kZeroProfile,
  kZeroVector,
  kNonPositiveEntry,
  kGridEnvelope,
  kIncompatibleExponents,
  kInsufficientSamples,
  kDegenerateAbscissa,
  kSizeOverflow,
  kConfig,
};

const char* to_string(ErrorCode code);

/// Library-wide exception. The code is what callers branch on; the message is
/// for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hermrand
