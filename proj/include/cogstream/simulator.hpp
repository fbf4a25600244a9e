#pragma once

// Budget / SRAR trade-off across a set of concurrently streamed passages.
//
// Each passage is one session; its readers' natural speeds follow the
// passage's log-normal model. SRAR at a budget is the share-weighted fraction
// of readers no faster than the speed their passage was allocated.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cogstream/cogload.hpp"
#include "cogstream/readmodel.hpp"

namespace cogstream::simulator {

using cogload::CogScore;
using readmodel::LogNormalModel;

enum class Method { Uniform, Fog, TagOracle };

std::string_view to_string(Method m) noexcept;
Method method_from_string(std::string_view s);

struct PassageRecord {
  std::string id;
  std::string text;
  std::optional<CogScore> oracle_score;
  LogNormalModel model{0.0, 1.0};
  double population_share = 1.0;
};

struct SimPoint {
  double target_srar = 0.0;
  Method method = Method::Uniform;
  double avg_speed_wps = 0.0;
  double saving_vs_uniform = 0.0;
};

// Throws BadProportions unless shares are positive and sum to 1.
void validate(std::span<const PassageRecord> passages);

// Scores the chosen estimator assigns. Uniform returns the neutral score for
// every passage (it is run with alpha = 0 anyway).
std::vector<CogScore> scores_for(std::span<const PassageRecord> passages,
                                 Method method);

// Per-passage speeds for total budget k.
std::vector<double> speeds_at_budget(std::span<const PassageRecord> passages,
                                     Method method, double alpha,
                                     double budget_k);

double srar_at_budget(std::span<const PassageRecord> passages, Method method,
                      double alpha, double budget_k);

// Smallest budget reaching target_srar, returned as average speed k / n.
double budget_for_srar(std::span<const PassageRecord> passages, Method method,
                       double alpha, double target_srar);

// One row per (target, method). Methods default to uniform plus every
// estimator the dataset supports.
std::vector<SimPoint> savings_table(std::span<const PassageRecord> passages,
                                    std::span<const double> targets,
                                    double alpha,
                                    std::vector<Method> methods = {});

double monte_carlo_srar(std::span<const PassageRecord> passages, Method method,
                        double alpha, double budget_k,
                        std::size_t readers_per_passage, std::uint64_t seed);

// Pearson r between estimator scores and passage median speeds.
double score_speed_correlation(std::span<const PassageRecord> passages,
                               Method method);

double pearson(std::span<const double> xs, std::span<const double> ys);

struct SyntheticConfig {
  std::size_t passages = 10;
  double median_lo = 3.5;
  double median_hi = 7.5;
  double sigma = 0.4;
  // Oracle score range mapped affinely from log-median.
  int score_lo = 2;
  int score_hi = 9;
  // Std of Gaussian noise added to each passage's target fog index before
  // its text is generated.
  double fog_noise = 0.0;
  std::uint64_t seed = 7;
  std::size_t words_per_passage = 160;
};

// Builds passages whose text hits a chosen Gunning-Fog index, so the fog
// estimator reproduces the oracle score up to fog_noise.
std::vector<PassageRecord> make_synthetic(const SyntheticConfig& config);

// Text made of whole sentences of `sentence_words` words with `complex` 3+
// syllable words each, roughly `total_words` long.
std::string synthetic_text(std::size_t sentence_words, std::size_t complex,
                           std::size_t total_words);

// Sentence shape whose fog index is closest to target_fog.
std::pair<std::size_t, std::size_t> sentence_shape_for_fog(double target_fog);

}  // namespace cogstream::simulator
