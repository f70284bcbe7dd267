#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mlrpca {

enum class ErrorCode {
  MissingFile,
  ParseError,
  EmptySequence,
  DecodeError,
  ZeroSize,
  NonPositiveSigma,
  ImageTooSmall,
  DimensionMismatch,
  TooFewFrames,
  ZeroDimension,
  NegativeTau,
  SvdFailure,
  RankOutOfBounds,
  ConvergenceFailure,
  NonFiniteInput,
  ThresholdOutOfRange,
  NoGroundTruth,
  UnpairedSequence,
  FractionOutOfRange,
  EmptyResult,
  InvalidArgument,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure in the library surfaces as an Error carrying its code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mlrpca
