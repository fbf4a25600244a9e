#pragma once

// Resource savings from streaming each reader group at its own SRAR quantile
// instead of a shared maximum speed, and the two-group trade-off when the
// shared budget is too small for that.

#include <map>
#include <span>
#include <string>
#include <vector>

#include "cogstream/readmodel.hpp"

namespace cogstream::savings {

using readmodel::LogNormalModel;

struct GroupSpec {
  std::string name;
  double proportion = 1.0;
  LogNormalModel model{0.0, 1.0};
};

struct SavingsReport {
  double target_srar = 0.0;
  std::map<std::string, double> group_speeds;
  double s_max = 0.0;
  double saving_fraction = 0.0;
};

struct RedistributionPlan {
  double s0 = 0.0;
  std::map<std::string, double> speeds;
  // Signed SRAR change of each group relative to streaming everyone at s0.
  std::map<std::string, double> gain_loss;
  double net_gain = 0.0;
};

// Throws BadProportions unless every proportion is in (0, 1] and they sum to
// one within 1e-9.
void check_proportions(std::span<const GroupSpec> groups);

// 1 - sum(p_g * quantile_g(target)) / s_max. Negative values are reported
// as-is when the quantiles exceed s_max.
SavingsReport savings_at(std::span<const GroupSpec> groups, double target_srar,
                         double s_max);

// Same arithmetic from already-known per-group speeds.
double saving_fraction(std::span<const double> proportions,
                       std::span<const double> speeds, double s_max);

// Moves group A to s_a and gives group B whatever keeps
// p_a * s_a + p_b * s_b == s0.
RedistributionPlan redistribution_gains(const GroupSpec& a, const GroupSpec& b,
                                        double s0, double s_a);

// Best split of s0 between two groups for total SRAR. Never worse than the
// uniform split; ties go to the uniform split.
RedistributionPlan optimize_split(const GroupSpec& a, const GroupSpec& b,
                                  double s0);

}  // namespace cogstream::savings
