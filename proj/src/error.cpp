#include "hermrand/error.hpp"

namespace hermrand {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDegreeOverflow: return "degree-overflow";
    case ErrorCode::kNonFiniteInput: return "non-finite-input";
    case ErrorCode::kOrderOverflow: return "order-overflow";
    case ErrorCode::kInvalidWindow: return "invalid-window";
    case ErrorCode::kEmptyWindow: return "empty-window";
    case ErrorCode::kNonPositiveTime: return "nonpositive-time";
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kLengthMismatch: return "length-mismatch";
    case ErrorCode::kZeroProfile: return "all-zero-profile";
    case ErrorCode::kZeroVector: return "zero-vector";
    case ErrorCode::kNonPositiveEntry: return "nonpositive-entry";
    case ErrorCode::kGridEnvelope: return "grid-envelope";
    case ErrorCode::kIncompatibleExponents: return "incompatible-exponents";
    case ErrorCode::kInsufficientSamples: return "insufficient-samples";
    case ErrorCode::kDegenerateAbscissa: return "degenerate-abscissa";
    case ErrorCode::kSizeOverflow: return "size-overflow";
    case ErrorCode::kConfig: return "config";
  }
  return "unknown";
}

}  // namespace hermrand
