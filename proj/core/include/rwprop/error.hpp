#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rwprop {

enum class ErrorCode {
  InvalidArgument,
  ConstantVolume,
  TargetTooLarge,
  DimMismatch,
  BadLabelSet,
  BadMagic,
  UnsupportedDatatype,
  TruncatedFile,
  IoFailure,
  PathCountMismatch,
  NonFiniteInput,
  EmptyRoi,
  NoSeeds,
  NoSeedsInRoi,
  SeedlessComponent,
  ConvergenceFailure,
  MaximumPrincipleViolation,
  TooLarge,
  OverlappingHemispheres,
  TooFewMaps,
  BadSpec,
};

std::string_view to_string(ErrorCode code) noexcept;

// Numerical failures (exit code 3 in the CLI) as opposed to input problems.
bool is_numerical(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rwprop
