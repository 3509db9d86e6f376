#include "rwprop/error.hpp"

namespace rwprop {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConstantVolume: return "ConstantVolume";
    case ErrorCode::TargetTooLarge: return "TargetTooLarge";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::BadLabelSet: return "BadLabelSet";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedDatatype: return "UnsupportedDatatype";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::PathCountMismatch: return "PathCountMismatch";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::EmptyRoi: return "EmptyRoi";
    case ErrorCode::NoSeeds: return "NoSeeds";
    case ErrorCode::NoSeedsInRoi: return "NoSeedsInRoi";
    case ErrorCode::SeedlessComponent: return "SeedlessComponent";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::MaximumPrincipleViolation: return "MaximumPrincipleViolation";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::OverlappingHemispheres: return "OverlappingHemispheres";
    case ErrorCode::TooFewMaps: return "TooFewMaps";
    case ErrorCode::BadSpec: return "BadSpec";
  }
  return "Unknown";
}

bool is_numerical(ErrorCode code) noexcept {
  return code == ErrorCode::SeedlessComponent || code == ErrorCode::ConvergenceFailure ||
         code == ErrorCode::MaximumPrincipleViolation;
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace rwprop
