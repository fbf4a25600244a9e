#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cogstream {

// Domain error kinds. The CLI prints errc_name() on stderr, so the names are
// part of the external surface.
enum class Errc {
  EmptyOrSingleton,
  NonPositiveSample,
  DegenerateSample,
  NegativeSpeed,
  AlphaOutOfRange,
  LengthMismatch,
  DegenerateDifferences,
  IdenticalModels,
  InvalidModel,
  BadProportions,
  NonPositiveSmax,
  InfeasibleSplit,
  EmptyText,
  EmptySessionSet,
  NonPositiveBudget,
  UnknownSession,
  DuplicateSession,
  InfeasibleFloor,
  BadConfig,
  AlreadyConverged,
  TooEarly,
  MissingScores,
  Unreachable,
  DegenerateVariance,
  UnknownPassage,
  CapacityExceeded,
  NotPaused,
  SameTooEarly,
  ClientGone,
  BadInput,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }
  std::string_view name() const noexcept { return errc_name(code_); }

 private:
  Errc code_;
};

}  // namespace cogstream
