#include "mlrpca/error.hpp"

namespace mlrpca {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptySequence: return "EmptySequence";
    case ErrorCode::DecodeError: return "DecodeError";
    case ErrorCode::ZeroSize: return "ZeroSize";
    case ErrorCode::NonPositiveSigma: return "NonPositiveSigma";
    case ErrorCode::ImageTooSmall: return "ImageTooSmall";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::TooFewFrames: return "TooFewFrames";
    case ErrorCode::ZeroDimension: return "ZeroDimension";
    case ErrorCode::NegativeTau: return "NegativeTau";
    case ErrorCode::SvdFailure: return "SvdFailure";
    case ErrorCode::RankOutOfBounds: return "RankOutOfBounds";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::ThresholdOutOfRange: return "ThresholdOutOfRange";
    case ErrorCode::NoGroundTruth: return "NoGroundTruth";
    case ErrorCode::UnpairedSequence: return "UnpairedSequence";
    case ErrorCode::FractionOutOfRange: return "FractionOutOfRange";
    case ErrorCode::EmptyResult: return "EmptyResult";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace mlrpca
