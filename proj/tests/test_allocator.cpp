#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "cogstream/allocator.hpp"
#include "cogstream/error.hpp"

using namespace cogstream;
using namespace cogstream::allocator;

namespace {

std::vector<SessionScore> sessions(std::initializer_list<int> scores) {
  std::vector<SessionScore> out;
  int i = 0;
  for (int s : scores) {
    out.push_back({std::string(1, static_cast<char>('A' + i++)), CogScore(s)});
  }
  return out;
}

std::vector<double> speeds(const AllocationPlan& p) {
  std::vector<double> out;
  for (const auto& e : p.entries) out.push_back(e.speed_wps);
  return out;
}

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected error");
  return Errc::BadInput;
}

}  // namespace

TEST_CASE("allocate examples") {
  SUBCASE("interpolated weights") {
    const AllocationPlan p = allocate(sessions({4, 6}), 0.5, 10.0);
    CHECK(p.entries[0].weight == doctest::Approx(0.45).epsilon(1e-15));
    CHECK(p.entries[1].weight == doctest::Approx(0.55).epsilon(1e-15));
    CHECK(p.entries[0].speed_wps == doctest::Approx(4.5).epsilon(1e-15));
    CHECK(p.entries[1].speed_wps == doctest::Approx(5.5).epsilon(1e-15));
  }
  SUBCASE("alpha zero is uniform") {
    const AllocationPlan p = allocate(sessions({1, 7, 10}), 0.0, 9.0);
    for (double v : speeds(p)) CHECK(v == doctest::Approx(3.0).epsilon(1e-15));
  }
  SUBCASE("alpha one is proportional") {
    const AllocationPlan p = allocate(sessions({2, 8}), 1.0, 10.0);
    CHECK(speeds(p)[0] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(speeds(p)[1] == doctest::Approx(8.0).epsilon(1e-15));
  }
  SUBCASE("three sessions") {
    const AllocationPlan p = allocate(sessions({3, 5, 7}), 0.5, 15.0);
    CHECK(speeds(p)[0] == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(speeds(p)[1] == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(speeds(p)[2] == doctest::Approx(6.0).epsilon(1e-14));
  }
  SUBCASE("errors") {
    CHECK(code_of([] { allocate({}, 0.5, 10.0); }) == Errc::EmptySessionSet);
    CHECK(code_of([] { allocate(sessions({3}), 0.5, 0.0); }) ==
          Errc::NonPositiveBudget);
    CHECK(code_of([] { allocate(sessions({3}), 1.5, 10.0); }) ==
          Errc::AlphaOutOfRange);
    CHECK(code_of([] { allocate(sessions({3}), -0.1, 10.0); }) ==
          Errc::AlphaOutOfRange);
  }
}

TEST_CASE("allocate properties") {
  std::mt19937_64 gen(11);
  std::uniform_int_distribution<int> score(1, 10), count(1, 12);
  std::uniform_real_distribution<double> alpha(0.0, 1.0), budget(0.1, 500.0);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<SessionScore> s;
    const int n = count(gen);
    for (int i = 0; i < n; ++i) s.push_back({"s" + std::to_string(i), CogScore(score(gen))});
    const double a = alpha(gen), k = budget(gen);
    const AllocationPlan p = allocate(s, a, k);

    double wsum = 0.0;
    for (const auto& e : p.entries) {
      CHECK(e.weight > 0.0);
      wsum += e.weight;
    }
    CHECK(std::abs(wsum - 1.0) <= 1e-9);
    CHECK(std::abs(p.total_speed() - k) <= 1e-9 * k);

    // Order preserved.
    for (int i = 0; i < n; ++i) CHECK(p.entries[i].session_id == s[i].session_id);

    // Equal scores get bit-identical speeds.
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (s[i].score == s[j].score) {
          CHECK(p.entries[i].speed_wps == p.entries[j].speed_wps);
        }
      }
    }

    // Permutation equivariance.
    std::vector<SessionScore> shuffled = s;
    std::shuffle(shuffled.begin(), shuffled.end(), gen);
    const AllocationPlan q = allocate(shuffled, a, k);
    for (const auto& e : q.entries) {
      CHECK(e.speed_wps == doctest::Approx(p.find(e.session_id)->speed_wps).epsilon(1e-12));
    }

    // Affine in alpha between the endpoints.
    const AllocationPlan u = allocate(s, 0.0, k), prop = allocate(s, 1.0, k);
    for (int i = 0; i < n; ++i) {
      const double expect =
          (1 - a) * u.entries[i].speed_wps + a * prop.entries[i].speed_wps;
      CHECK(p.entries[i].speed_wps == doctest::Approx(expect).epsilon(1e-12));
    }

    // Raising one score: own speed does not fall, others do not rise.
    const int bump = std::uniform_int_distribution<int>(0, n - 1)(gen);
    if (s[bump].score.value() < 10) {
      std::vector<SessionScore> raised = s;
      raised[bump].score = CogScore(s[bump].score.value() + 1);
      const AllocationPlan r = allocate(raised, a, k);
      CHECK(r.entries[bump].speed_wps >= p.entries[bump].speed_wps - 1e-12);
      for (int i = 0; i < n; ++i) {
        if (i != bump) CHECK(r.entries[i].speed_wps <= p.entries[i].speed_wps + 1e-12);
      }
    }
  }
}

TEST_CASE("min_wps floor") {
  AllocationOptions opts;
  opts.min_wps = 2.0;
  const AllocationPlan p = allocate(sessions({1, 10, 10}), 1.0, 12.0, opts);
  CHECK(p.entries[0].speed_wps == doctest::Approx(2.0));
  CHECK(p.entries[1].speed_wps == doctest::Approx(5.0));
  CHECK(p.entries[2].speed_wps == doctest::Approx(5.0));
  CHECK(p.total_speed() == doctest::Approx(12.0).epsilon(1e-12));
  double wsum = 0.0;
  for (const auto& e : p.entries) wsum += e.weight;
  CHECK(wsum == doctest::Approx(1.0).epsilon(1e-12));

  opts.min_wps = 5.0;
  CHECK(code_of([&] { allocate(sessions({1, 2, 3}), 0.5, 12.0, opts); }) ==
        Errc::InfeasibleFloor);
}

TEST_CASE("reallocate") {
  SUBCASE("join with equal scores splits evenly") {
    const AllocationPlan p = allocate(sessions({5}), 0.7, 10.0);
    const AllocationPlan q = reallocate(p, Join{"B", CogScore(5)});
    CHECK(speeds(q) == std::vector<double>{5.0, 5.0});
  }
  SUBCASE("last remaining session takes the whole budget") {
    const AllocationPlan p = allocate(sessions({4, 6}), 0.5, 10.0);
    const AllocationPlan q = reallocate(p, Leave{"B"});
    REQUIRE(q.entries.size() == 1);
    CHECK(q.entries[0].speed_wps == 10.0);
    CHECK(reallocate(q, Leave{"A"}).entries.empty());
  }
  SUBCASE("rescore") {
    const AllocationPlan p = allocate(sessions({4, 6}), 0.5, 10.0);
    const AllocationPlan q = reallocate(p, Rescore{"A", CogScore(6)});
    CHECK(speeds(q)[0] == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(speeds(q)[1] == doctest::Approx(5.0).epsilon(1e-15));
  }
  SUBCASE("errors") {
    const AllocationPlan p = allocate(sessions({4, 6}), 0.5, 10.0);
    CHECK(code_of([&] { reallocate(p, Leave{"Z"}); }) == Errc::UnknownSession);
    CHECK(code_of([&] { reallocate(p, Rescore{"Z", CogScore(3)}); }) ==
          Errc::UnknownSession);
    CHECK(code_of([&] { reallocate(p, Join{"A", CogScore(3)}); }) ==
          Errc::DuplicateSession);
  }
  SUBCASE("equivalent to allocate on the updated set") {
    std::mt19937_64 gen(21);
    std::uniform_int_distribution<int> score(1, 10);
    std::vector<SessionScore> current;
    AllocationPlan plan;
    plan.alpha = 0.4;
    plan.budget_k = 17.0;
    int next_id = 0;
    for (int step = 0; step < 500; ++step) {
      const int kind = current.empty() ? 0 : std::uniform_int_distribution<int>(0, 2)(gen);
      if (kind == 0) {
        SessionScore s{"s" + std::to_string(next_id++), CogScore(score(gen))};
        plan = reallocate(plan, Join{s.session_id, s.score});
        current.push_back(s);
      } else {
        const std::size_t idx =
            std::uniform_int_distribution<std::size_t>(0, current.size() - 1)(gen);
        if (kind == 1) {
          plan = reallocate(plan, Leave{current[idx].session_id});
          current.erase(current.begin() + static_cast<long>(idx));
        } else {
          current[idx].score = CogScore(score(gen));
          plan = reallocate(plan, Rescore{current[idx].session_id, current[idx].score});
        }
      }
      if (current.empty()) {
        CHECK(plan.entries.empty());
        continue;
      }
      const AllocationPlan direct = allocate(current, 0.4, 17.0);
      REQUIRE(direct.entries.size() == plan.entries.size());
      for (std::size_t i = 0; i < direct.entries.size(); ++i) {
        CHECK(plan.entries[i].session_id == direct.entries[i].session_id);
        CHECK(plan.entries[i].speed_wps == direct.entries[i].speed_wps);
      }
    }
  }
}
