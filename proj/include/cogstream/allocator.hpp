#pragma once

// Splits a global words-per-second budget across concurrent sessions.
//
//   w_i = alpha * s_i / sum(s) + (1 - alpha) / n,   v_i = w_i * k
//
// alpha = 0 is a uniform split, alpha = 1 is proportional to the scores.

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cogstream/cogload.hpp"

namespace cogstream::allocator {

using cogload::CogScore;

struct SessionScore {
  std::string session_id;
  CogScore score;
};

struct AllocationEntry {
  std::string session_id;
  CogScore score;
  double weight = 0.0;
  double speed_wps = 0.0;
};

struct AllocationOptions {
  // Optional per-session floor. Sessions below it are raised to it and the
  // remaining budget is re-split in proportion to the other weights.
  std::optional<double> min_wps;
};

struct AllocationPlan {
  double alpha = 0.0;
  double budget_k = 0.0;
  AllocationOptions options;
  std::vector<AllocationEntry> entries;

  const AllocationEntry* find(std::string_view session_id) const;
  double total_speed() const;
};

AllocationPlan allocate(std::span<const SessionScore> scores, double alpha,
                        double budget_k, AllocationOptions options = {});

struct Join {
  std::string session_id;
  CogScore score;
};
struct Leave {
  std::string session_id;
};
struct Rescore {
  std::string session_id;
  CogScore score;
};
using Change = std::variant<Join, Leave, Rescore>;

// Applies one membership change and re-runs allocate with the plan's alpha,
// budget and options. Leaving the last session yields an empty plan.
AllocationPlan reallocate(const AllocationPlan& plan, const Change& change);

}  // namespace cogstream::allocator
