#include "cogstream/allocator.hpp"

#include <algorithm>
#include <cmath>

#include "cogstream/error.hpp"

namespace cogstream::allocator {

namespace {

void apply_floor(AllocationPlan& plan, double floor) {
  const std::size_t n = plan.entries.size();
  if (floor * static_cast<double>(n) > plan.budget_k * (1.0 + 1e-12)) {
    throw Error(Errc::InfeasibleFloor,
                "min_wps times session count exceeds the budget");
  }
  std::vector<bool> clamped(n, false);
  for (bool changed = true; changed;) {
    changed = false;
    double free_weight = 0.0;
    std::size_t n_clamped = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (clamped[i]) {
        ++n_clamped;
      } else {
        free_weight += plan.entries[i].weight;
      }
    }
    const double remaining =
        plan.budget_k - floor * static_cast<double>(n_clamped);
    for (std::size_t i = 0; i < n; ++i) {
      AllocationEntry& e = plan.entries[i];
      if (clamped[i]) {
        e.speed_wps = floor;
        continue;
      }
      e.speed_wps = remaining * e.weight / free_weight;
      if (e.speed_wps < floor) {
        clamped[i] = true;
        changed = true;
      }
    }
  }
  for (AllocationEntry& e : plan.entries) {
    e.weight = e.speed_wps / plan.budget_k;
  }
}

}  // namespace

const AllocationEntry* AllocationPlan::find(std::string_view session_id) const {
  auto it = std::find_if(entries.begin(), entries.end(),
                         [&](const AllocationEntry& e) {
                           return e.session_id == session_id;
                         });
  return it == entries.end() ? nullptr : &*it;
}

double AllocationPlan::total_speed() const {
  double total = 0.0;
  for (const AllocationEntry& e : entries) total += e.speed_wps;
  return total;
}

AllocationPlan allocate(std::span<const SessionScore> scores, double alpha,
                        double budget_k, AllocationOptions options) {
  if (scores.empty()) {
    throw Error(Errc::EmptySessionSet, "no sessions to allocate");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(Errc::AlphaOutOfRange, "alpha must lie in [0, 1]");
  }
  if (!(budget_k > 0.0) || !std::isfinite(budget_k)) {
    throw Error(Errc::NonPositiveBudget, "budget must be positive");
  }
  if (options.min_wps && !(*options.min_wps >= 0.0)) {
    throw Error(Errc::BadConfig, "min_wps must be non-negative");
  }

  const double n = static_cast<double>(scores.size());
  double total = 0.0;
  for (const SessionScore& s : scores) total += s.score.value();

  AllocationPlan plan;
  plan.alpha = alpha;
  plan.budget_k = budget_k;
  plan.options = options;
  plan.entries.reserve(scores.size());
  for (const SessionScore& s : scores) {
    const double w = alpha * s.score.value() / total + (1.0 - alpha) / n;
    plan.entries.push_back(
        AllocationEntry{s.session_id, s.score, w, w * budget_k});
  }
  if (options.min_wps && *options.min_wps > 0.0) {
    apply_floor(plan, *options.min_wps);
  }
  return plan;
}

AllocationPlan reallocate(const AllocationPlan& plan, const Change& change) {
  std::vector<SessionScore> scores;
  scores.reserve(plan.entries.size() + 1);
  for (const AllocationEntry& e : plan.entries) {
    scores.push_back(SessionScore{e.session_id, e.score});
  }
  const auto find = [&](const std::string& id) {
    return std::find_if(scores.begin(), scores.end(),
                        [&](const SessionScore& s) { return s.session_id == id; });
  };

  if (const auto* join = std::get_if<Join>(&change)) {
    if (find(join->session_id) != scores.end()) {
      throw Error(Errc::DuplicateSession,
                  "session '" + join->session_id + "' already allocated");
    }
    scores.push_back(SessionScore{join->session_id, join->score});
  } else if (const auto* leave = std::get_if<Leave>(&change)) {
    auto it = find(leave->session_id);
    if (it == scores.end()) {
      throw Error(Errc::UnknownSession,
                  "session '" + leave->session_id + "' is not allocated");
    }
    scores.erase(it);
  } else {
    const auto& rescore = std::get<Rescore>(change);
    auto it = find(rescore.session_id);
    if (it == scores.end()) {
      throw Error(Errc::UnknownSession,
                  "session '" + rescore.session_id + "' is not allocated");
    }
    it->score = rescore.score;
  }

  if (scores.empty()) {
    AllocationPlan empty;
    empty.alpha = plan.alpha;
    empty.budget_k = plan.budget_k;
    empty.options = plan.options;
    return empty;
  }
  return allocate(scores, plan.alpha, plan.budget_k, plan.options);
}

}  // namespace cogstream::allocator
