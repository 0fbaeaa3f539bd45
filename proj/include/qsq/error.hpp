#ifndef QSQ_ERROR_HPP_
#define QSQ_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace qsq {

enum class ErrorCode {
  kInvalidArgument,
  kDimensionMismatch,
  kContractViolation,
  kMeanSpinUndefined,
  kReadoutAxisDegenerate,
  kDerivativeVanished,
  kManifoldMixing,
  kRankDeficient,
  kNonFinite,
  kConfig,
  kCheckpointMismatch,
  kMissingPrerequisite,
  kIo,
};

// Stable machine-readable names; the CLI prints these verbatim.
constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::kDimensionMismatch: return "DIMENSION_MISMATCH";
    case ErrorCode::kContractViolation: return "CONTRACT_VIOLATION";
    case ErrorCode::kMeanSpinUndefined: return "MEAN_SPIN_UNDEFINED";
    case ErrorCode::kReadoutAxisDegenerate: return "READOUT_AXIS_DEGENERATE";
    case ErrorCode::kDerivativeVanished: return "DERIVATIVE_VANISHED";
    case ErrorCode::kManifoldMixing: return "MANIFOLD_MIXING";
    case ErrorCode::kRankDeficient: return "RANK_DEFICIENT";
    case ErrorCode::kNonFinite: return "NON_FINITE";
    case ErrorCode::kConfig: return "CONFIG";
    case ErrorCode::kCheckpointMismatch: return "CHECKPOINT_MISMATCH";
    case ErrorCode::kMissingPrerequisite: return "MISSING_PREREQUISITE";
    case ErrorCode::kIo: return "IO";
  }
  return "UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qsq

#endif  // QSQ_ERROR_HPP_
