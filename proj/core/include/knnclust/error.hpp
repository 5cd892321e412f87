#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace knnclust {

enum class ErrorCode
{
  OverlappingComponents,
  BadMass,
  BadBackground,
  DimensionMismatch,
  InvalidArgument,
  DegenerateGeometry,
  KOutOfRange,
  NegativeEpsilon,
  EmptySubset,
  NonpositiveBandwidth,
  MismatchedInputs,
  DomainError,
  SideMismatch,
  PreconditionFailed,
  EmptyCell,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

//! Exception carrying a machine-readable error code.
class Error : public std::runtime_error
{
public:
  Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what)
    , code_(code)
  {
  }

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) noexcept
{
  switch (code) {
    case ErrorCode::OverlappingComponents: return "OverlappingComponents";
    case ErrorCode::BadMass: return "BadMass";
    case ErrorCode::BadBackground: return "BadBackground";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::KOutOfRange: return "KOutOfRange";
    case ErrorCode::NegativeEpsilon: return "NegativeEpsilon";
    case ErrorCode::EmptySubset: return "EmptySubset";
    case ErrorCode::NonpositiveBandwidth: return "NonpositiveBandwidth";
    case ErrorCode::MismatchedInputs: return "MismatchedInputs";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::SideMismatch: return "SideMismatch";
    case ErrorCode::PreconditionFailed: return "PreconditionFailed";
    case ErrorCode::EmptyCell: return "EmptyCell";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

} // namespace knnclust
