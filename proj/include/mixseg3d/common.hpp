#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mixseg3d {

using ClassId = std::uint32_t;

/// Number of classes in the 22-class driving taxonomy.
inline constexpr int kNumClasses = 22;

/// Ground-truth sentinel; never emitted by a predictor.
inline constexpr ClassId kIgnore = 255;

enum class ErrorKind {
  kInvalidArgument,
  kInvalidAugmentation,
  kValidation,
  kDegenerateInput,
  kPlanMismatch,
  kPredictorContract,
  kInvalidLabel,
  kUndefinedMetric,
  kPairing,
  kFormat,
  kData,
  kIo,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Process exit code for an error: 2 validation, 3 I/O or format, 4 degenerate input.
int exit_code(ErrorKind kind) noexcept;

}  // namespace mixseg3d
