#pragma once

// Live session registry. Adaptive sessions share the global budget through an
// AllocationPlan; PEST and fixed sessions carry their own rate and stay
// outside it.

#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "cogstream/allocator.hpp"
#include "cogstream/protocol.hpp"

namespace cogstream::server {

using allocator::AllocationPlan;
using cogload::CogScore;
using protocol::Mode;

struct SessionView {
  std::string id;
  Mode mode = Mode::Adaptive;
  std::optional<CogScore> score;
  double rate_wps = 0.0;
};

struct Snapshot {
  double budget_wps = 0.0;
  double alpha = 0.0;
  std::vector<SessionView> sessions;
  // Sum over adaptive sessions only.
  double adaptive_total_wps = 0.0;
};

class Registry {
 public:
  Registry(double budget_wps, double alpha, std::size_t max_sessions);

  // Both throw CapacityExceeded when full and DuplicateSession on id reuse.
  void join_adaptive(const std::string& id, CogScore score);
  void join_own_rate(const std::string& id, Mode mode, double rate_wps);

  void rescore(const std::string& id, CogScore score);
  void set_own_rate(const std::string& id, double rate_wps);
  // Unknown ids are ignored so teardown paths can call it unconditionally.
  void leave(const std::string& id);

  // Current rate of a session; UnknownSession if absent.
  double rate(const std::string& id) const;

  // Latest plan; mutators swap in a new one and never modify a published plan.
  std::shared_ptr<const AllocationPlan> plan() const;

  Snapshot snapshot() const;
  std::size_t size() const;

 private:
  struct Own {
    std::string id;
    Mode mode;
    double rate_wps;
  };

  void check_new(const std::string& id) const;

  mutable std::mutex mu_;
  std::shared_ptr<const AllocationPlan> plan_;
  std::vector<Own> own_;
  std::size_t max_sessions_;
};

}  // namespace cogstream::server
