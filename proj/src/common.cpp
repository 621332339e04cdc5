#include "mixseg3d/common.hpp"

namespace mixseg3d {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid argument";
    case ErrorKind::kInvalidAugmentation: return "invalid augmentation";
    case ErrorKind::kValidation: return "validation error";
    case ErrorKind::kDegenerateInput: return "degenerate input";
    case ErrorKind::kPlanMismatch: return "plan mismatch";
    case ErrorKind::kPredictorContract: return "predictor contract violation";
    case ErrorKind::kInvalidLabel: return "invalid label";
    case ErrorKind::kUndefinedMetric: return "undefined metric";
    case ErrorKind::kPairing: return "pairing error";
    case ErrorKind::kFormat: return "format error";
    case ErrorKind::kData: return "data error";
    case ErrorKind::kIo: return "I/O error";
  }
  return "error";
}

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kDegenerateInput:
      return 4;
    case ErrorKind::kFormat:
    case ErrorKind::kData:
    case ErrorKind::kIo:
    case ErrorKind::kPairing:
      return 3;
    default:
      return 2;
  }
}

}  // namespace mixseg3d
