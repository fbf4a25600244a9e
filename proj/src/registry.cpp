#include "cogstream/registry.hpp"

#include <algorithm>

#include "cogstream/error.hpp"

namespace cogstream::server {

Registry::Registry(double budget_wps, double alpha, std::size_t max_sessions)
    : max_sessions_(max_sessions) {
  if (!(budget_wps > 0.0)) throw Error(Errc::NonPositiveBudget, "budget must be positive");
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(Errc::AlphaOutOfRange, "alpha must lie in [0, 1]");
  }
  auto p = std::make_shared<AllocationPlan>();
  p->alpha = alpha;
  p->budget_k = budget_wps;
  plan_ = std::move(p);
}

void Registry::check_new(const std::string& id) const {
  if (plan_->entries.size() + own_.size() >= max_sessions_) {
    throw Error(Errc::CapacityExceeded, "session limit reached");
  }
  const bool taken =
      plan_->find(id) != nullptr ||
      std::any_of(own_.begin(), own_.end(), [&](const Own& o) { return o.id == id; });
  if (taken) throw Error(Errc::DuplicateSession, "session '" + id + "' exists");
}

void Registry::join_adaptive(const std::string& id, CogScore score) {
  std::lock_guard lock(mu_);
  check_new(id);
  plan_ = std::make_shared<const AllocationPlan>(
      allocator::reallocate(*plan_, allocator::Join{id, score}));
}

void Registry::join_own_rate(const std::string& id, Mode mode, double rate_wps) {
  std::lock_guard lock(mu_);
  check_new(id);
  own_.push_back({id, mode, rate_wps});
}

void Registry::rescore(const std::string& id, CogScore score) {
  std::lock_guard lock(mu_);
  plan_ = std::make_shared<const AllocationPlan>(
      allocator::reallocate(*plan_, allocator::Rescore{id, score}));
}

void Registry::set_own_rate(const std::string& id, double rate_wps) {
  std::lock_guard lock(mu_);
  for (Own& o : own_) {
    if (o.id == id) {
      o.rate_wps = rate_wps;
      return;
    }
  }
  throw Error(Errc::UnknownSession, "unknown session '" + id + "'");
}

void Registry::leave(const std::string& id) {
  std::lock_guard lock(mu_);
  if (plan_->find(id) != nullptr) {
    plan_ = std::make_shared<const AllocationPlan>(
        allocator::reallocate(*plan_, allocator::Leave{id}));
    return;
  }
  std::erase_if(own_, [&](const Own& o) { return o.id == id; });
}

double Registry::rate(const std::string& id) const {
  std::lock_guard lock(mu_);
  if (const auto* e = plan_->find(id)) return e->speed_wps;
  for (const Own& o : own_) {
    if (o.id == id) return o.rate_wps;
  }
  throw Error(Errc::UnknownSession, "unknown session '" + id + "'");
}

std::shared_ptr<const AllocationPlan> Registry::plan() const {
  std::lock_guard lock(mu_);
  return plan_;
}

Snapshot Registry::snapshot() const {
  std::lock_guard lock(mu_);
  Snapshot s;
  s.budget_wps = plan_->budget_k;
  s.alpha = plan_->alpha;
  for (const auto& e : plan_->entries) {
    s.sessions.push_back({e.session_id, Mode::Adaptive, e.score, e.speed_wps});
    s.adaptive_total_wps += e.speed_wps;
  }
  for (const Own& o : own_) s.sessions.push_back({o.id, o.mode, std::nullopt, o.rate_wps});
  return s;
}

std::size_t Registry::size() const {
  std::lock_guard lock(mu_);
  return plan_->entries.size() + own_.size();
}

}  // namespace cogstream::server
