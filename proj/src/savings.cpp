#include "cogstream/savings.hpp"

#include <cmath>

#include "cogstream/error.hpp"

namespace cogstream::savings {

namespace {

constexpr int kGridPoints = 4096;

double implied_b_speed(const GroupSpec& a, const GroupSpec& b, double s0,
                       double s_a) {
  double s_b = (s0 - a.proportion * s_a) / b.proportion;
  if (s_b < 0.0 && s_b > -1e-12 * s0) s_b = 0.0;
  return s_b;
}

void check_pair(const GroupSpec& a, const GroupSpec& b, double s0) {
  if (a.name == b.name) {
    throw Error(Errc::BadInput, "group names must differ");
  }
  const GroupSpec pair[] = {a, b};
  check_proportions(pair);
  if (!(s0 > 0.0)) {
    throw Error(Errc::NonPositiveBudget, "s0 must be positive");
  }
}

// Net SRAR change of the split against everyone at s0, weighted by share.
double net_gain_at(const GroupSpec& a, const GroupSpec& b, double s0,
                   double s_a) {
  const double s_b = implied_b_speed(a, b, s0, s_a);
  return a.proportion * (readmodel::cdf(a.model, s_a) -
                         readmodel::cdf(a.model, s0)) +
         b.proportion * (readmodel::cdf(b.model, s_b) -
                         readmodel::cdf(b.model, s0));
}

}  // namespace

void check_proportions(std::span<const GroupSpec> groups) {
  if (groups.empty()) {
    throw Error(Errc::BadProportions, "at least one group is required");
  }
  double total = 0.0;
  for (const GroupSpec& g : groups) {
    if (!(g.proportion > 0.0 && g.proportion <= 1.0)) {
      throw Error(Errc::BadProportions,
                  "group '" + g.name + "' has proportion outside (0, 1]");
    }
    total += g.proportion;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(Errc::BadProportions, "group proportions must sum to 1");
  }
}

double saving_fraction(std::span<const double> proportions,
                       std::span<const double> speeds, double s_max) {
  if (proportions.size() != speeds.size()) {
    throw Error(Errc::LengthMismatch, "one speed per proportion expected");
  }
  if (!(s_max > 0.0)) {
    throw Error(Errc::NonPositiveSmax, "s_max must be positive");
  }
  double weighted = 0.0;
  for (std::size_t i = 0; i < speeds.size(); ++i) {
    weighted += proportions[i] * speeds[i];
  }
  return 1.0 - weighted / s_max;
}

SavingsReport savings_at(std::span<const GroupSpec> groups, double target_srar,
                         double s_max) {
  check_proportions(groups);
  if (!(s_max > 0.0)) {
    throw Error(Errc::NonPositiveSmax, "s_max must be positive");
  }
  SavingsReport report;
  report.target_srar = target_srar;
  report.s_max = s_max;
  std::vector<double> props;
  std::vector<double> speeds;
  for (const GroupSpec& g : groups) {
    const double s = readmodel::quantile(g.model, target_srar);
    report.group_speeds[g.name] = s;
    props.push_back(g.proportion);
    speeds.push_back(s);
  }
  report.saving_fraction = saving_fraction(props, speeds, s_max);
  return report;
}

RedistributionPlan redistribution_gains(const GroupSpec& a, const GroupSpec& b,
                                        double s0, double s_a) {
  check_pair(a, b, s0);
  if (s_a < 0.0) {
    throw Error(Errc::InfeasibleSplit, "s_a must be non-negative");
  }
  const double s_b = implied_b_speed(a, b, s0, s_a);
  if (s_b < 0.0) {
    throw Error(Errc::InfeasibleSplit,
                "split leaves a negative speed for group " + b.name);
  }
  RedistributionPlan plan;
  plan.s0 = s0;
  plan.speeds[a.name] = s_a;
  plan.speeds[b.name] = s_b;
  const double gain_a =
      readmodel::cdf(a.model, s_a) - readmodel::cdf(a.model, s0);
  const double gain_b =
      readmodel::cdf(b.model, s_b) - readmodel::cdf(b.model, s0);
  plan.gain_loss[a.name] = gain_a;
  plan.gain_loss[b.name] = gain_b;
  plan.net_gain = a.proportion * gain_a + b.proportion * gain_b;
  return plan;
}

RedistributionPlan optimize_split(const GroupSpec& a, const GroupSpec& b,
                                  double s0) {
  check_pair(a, b, s0);
  const double hi = s0 / a.proportion;

  // The objective along the budget line can have a second local maximum at
  // the boundary, so a coarse scan picks the bracket before golden-section.
  int best_i = 0;
  double best = -INFINITY;
  for (int i = 0; i <= kGridPoints; ++i) {
    const double s_a = hi * i / kGridPoints;
    const double g = net_gain_at(a, b, s0, s_a);
    if (g > best) {
      best = g;
      best_i = i;
    }
  }
  double lo_x = hi * std::max(best_i - 1, 0) / kGridPoints;
  double hi_x = hi * std::min(best_i + 1, kGridPoints) / kGridPoints;

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi_x - inv_phi * (hi_x - lo_x);
  double x2 = lo_x + inv_phi * (hi_x - lo_x);
  double f1 = net_gain_at(a, b, s0, x1);
  double f2 = net_gain_at(a, b, s0, x2);
  while (hi_x - lo_x > 1e-9 * std::max(1.0, hi)) {
    if (f1 < f2) {
      lo_x = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo_x + inv_phi * (hi_x - lo_x);
      f2 = net_gain_at(a, b, s0, x2);
    } else {
      hi_x = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi_x - inv_phi * (hi_x - lo_x);
      f1 = net_gain_at(a, b, s0, x1);
    }
  }
  double s_a = 0.5 * (lo_x + hi_x);
  double gain = net_gain_at(a, b, s0, s_a);
  const double grid_best_x = hi * best_i / kGridPoints;
  if (best > gain) {
    s_a = grid_best_x;
    gain = best;
  }
  if (!(gain > 0.0)) s_a = s0;
  return redistribution_gains(a, b, s0, s_a);
}

}  // namespace cogstream::savings
