#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace derivlab {

enum class ErrorCode {
  NotHermitian,
  NoConvergence,
  DimensionOverflow,
  ShapeMismatch,
  AmbientMismatch,
  AmbiguousClustering,
  MissingValue,
  ZeroT,
  NotDensity,
  NotFaithful,
  NotEquilibrium,
  NotDerivation,
  GridTooCoarse,
  BadMultiplicities,
  InvalidArgument,
  ConfigInvalid,
  ParseError,
  IoError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DimensionOverflow: return "DimensionOverflow";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::AmbientMismatch: return "AmbientMismatch";
    case ErrorCode::AmbiguousClustering: return "AmbiguousClustering";
    case ErrorCode::MissingValue: return "MissingValue";
    case ErrorCode::ZeroT: return "ZeroT";
    case ErrorCode::NotDensity: return "NotDensity";
    case ErrorCode::NotFaithful: return "NotFaithful";
    case ErrorCode::NotEquilibrium: return "NotEquilibrium";
    case ErrorCode::NotDerivation: return "NotDerivation";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::BadMultiplicities: return "BadMultiplicities";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace derivlab
