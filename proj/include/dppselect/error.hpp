#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dppselect {

enum class ErrorCode {
  MalformedManifest,
  DimensionMismatch,
  EmptyStream,
  ZeroVector,
  NonFiniteValue,
  BudgetExceedsFrames,
  UnsynchronizedStreams,
  NumericalPSDViolation,
  NegativeEigenvalue,
  RankDeficient,
  InvalidBudget,
  TooLarge,
  AllZeroDeterminants,
  NumericalError,
  IndexOutOfRange,
  InvalidSpec,
  InvalidConfig,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above; the CLI
// maps any Error to exit status 1.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dppselect
