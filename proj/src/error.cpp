#include "cogstream/error.hpp"

namespace cogstream {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::EmptyOrSingleton: return "EmptyOrSingleton";
    case Errc::NonPositiveSample: return "NonPositiveSample";
    case Errc::DegenerateSample: return "DegenerateSample";
    case Errc::NegativeSpeed: return "NegativeSpeed";
    case Errc::AlphaOutOfRange: return "AlphaOutOfRange";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::DegenerateDifferences: return "DegenerateDifferences";
    case Errc::IdenticalModels: return "IdenticalModels";
    case Errc::InvalidModel: return "InvalidModel";
    case Errc::BadProportions: return "BadProportions";
    case Errc::NonPositiveSmax: return "NonPositiveSmax";
    case Errc::InfeasibleSplit: return "InfeasibleSplit";
    case Errc::EmptyText: return "EmptyText";
    case Errc::EmptySessionSet: return "EmptySessionSet";
    case Errc::NonPositiveBudget: return "NonPositiveBudget";
    case Errc::UnknownSession: return "UnknownSession";
    case Errc::DuplicateSession: return "DuplicateSession";
    case Errc::InfeasibleFloor: return "InfeasibleFloor";
    case Errc::BadConfig: return "BadConfig";
    case Errc::AlreadyConverged: return "AlreadyConverged";
    case Errc::TooEarly: return "TooEarly";
    case Errc::MissingScores: return "MissingScores";
    case Errc::Unreachable: return "Unreachable";
    case Errc::DegenerateVariance: return "DegenerateVariance";
    case Errc::UnknownPassage: return "UnknownPassage";
    case Errc::CapacityExceeded: return "CapacityExceeded";
    case Errc::NotPaused: return "NotPaused";
    case Errc::SameTooEarly: return "SameTooEarly";
    case Errc::ClientGone: return "ClientGone";
    case Errc::BadInput: return "BadInput";
  }
  return "Unknown";
}

}  // namespace cogstream
