#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hyperdist {

enum class Errc {
  DegenerateNormal,
  DimensionMismatch,
  NotFullRank,
  NonpositiveWeight,
  OrientationMismatch,
  BadParameter,
  EmptyInput,
  DegenerateSegment,
  DegenerateTurn,
  ParallelLines,
  MismatchedK,
  TooFewPoints,
  BadK,
  DegenerateX,
  Parse,
  Io,
};

/// Broad failure class; the CLI maps these onto exit codes.
enum class ErrorCategory { Usage, Data, Numerical };

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::DegenerateNormal: return "DegenerateNormal";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NotFullRank: return "NotFullRank";
    case Errc::NonpositiveWeight: return "NonpositiveWeight";
    case Errc::OrientationMismatch: return "OrientationMismatch";
    case Errc::BadParameter: return "BadParameter";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::DegenerateSegment: return "DegenerateSegment";
    case Errc::DegenerateTurn: return "DegenerateTurn";
    case Errc::ParallelLines: return "ParallelLines";
    case Errc::MismatchedK: return "MismatchedK";
    case Errc::TooFewPoints: return "TooFewPoints";
    case Errc::BadK: return "BadK";
    case Errc::DegenerateX: return "DegenerateX";
    case Errc::Parse: return "Parse";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

constexpr ErrorCategory category_of(Errc code) noexcept {
  switch (code) {
    case Errc::BadParameter:
    case Errc::BadK:
      return ErrorCategory::Usage;
    case Errc::NotFullRank:
    case Errc::DegenerateTurn:
    case Errc::ParallelLines:
    case Errc::DegenerateX:
      return ErrorCategory::Numerical;
    default:
      return ErrorCategory::Data;
  }
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), message_(what) {}

  Errc code() const noexcept { return code_; }
  /// what() without the code prefix.
  const std::string& message() const noexcept { return message_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  Errc code_;
  std::string message_;
};

namespace detail {

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, Errc code, const char* what) {
  if (!condition) fail(code, what);
}

}  // namespace detail

}  // namespace hyperdist
