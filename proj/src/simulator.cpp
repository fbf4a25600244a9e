#include "cogstream/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "cogstream/allocator.hpp"
#include "cogstream/error.hpp"

namespace cogstream::simulator {

namespace {

constexpr std::string_view kSimpleWords[] = {
    "the", "cat", "sat", "on", "a", "mat", "dog", "ran", "to", "sun",
    "big", "bird", "sang", "in", "tree", "hat", "box", "fox", "cup", "bed"};
// Three or more syllables under the heuristic, none ending -es/-ed/-ing.
constexpr std::string_view kComplexWords[] = {
    "elephant", "beautiful", "adaptive", "energy", "history",
    "policy",   "furniture", "animal",   "library", "tomato"};

std::vector<allocator::SessionScore> session_scores(
    std::span<const PassageRecord> passages, Method method) {
  const std::vector<CogScore> scores = scores_for(passages, method);
  std::vector<allocator::SessionScore> out;
  out.reserve(passages.size());
  for (std::size_t i = 0; i < passages.size(); ++i) {
    out.push_back(allocator::SessionScore{passages[i].id, scores[i]});
  }
  return out;
}

double effective_alpha(Method method, double alpha) {
  return method == Method::Uniform ? 0.0 : alpha;
}

}  // namespace

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::Uniform: return "uniform";
    case Method::Fog: return "fog";
    case Method::TagOracle: return "tag_oracle";
  }
  return "uniform";
}

Method method_from_string(std::string_view s) {
  if (s == "uniform") return Method::Uniform;
  if (s == "fog") return Method::Fog;
  if (s == "tag_oracle" || s == "tag" || s == "oracle") return Method::TagOracle;
  throw Error(Errc::BadInput, "unknown method '" + std::string(s) + "'");
}

void validate(std::span<const PassageRecord> passages) {
  if (passages.empty()) {
    throw Error(Errc::EmptySessionSet, "dataset has no passages");
  }
  double total = 0.0;
  for (const PassageRecord& p : passages) {
    if (!(p.population_share > 0.0 && p.population_share <= 1.0)) {
      throw Error(Errc::BadProportions,
                  "passage '" + p.id + "' has share outside (0, 1]");
    }
    total += p.population_share;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(Errc::BadProportions, "passage shares must sum to 1");
  }
}

std::vector<CogScore> scores_for(std::span<const PassageRecord> passages,
                                 Method method) {
  std::vector<CogScore> out;
  out.reserve(passages.size());
  for (const PassageRecord& p : passages) {
    switch (method) {
      case Method::Uniform:
        out.emplace_back(CogScore::kNeutral);
        break;
      case Method::Fog: {
        if (p.text.empty()) {
          throw Error(Errc::MissingScores,
                      "passage '" + p.id + "' has no text for the fog method");
        }
        const std::string plain = cogload::strip_tags(p.text).display;
        out.push_back(cogload::fog_to_score(cogload::gunning_fog(plain).index));
        break;
      }
      case Method::TagOracle:
        if (!p.oracle_score) {
          throw Error(Errc::MissingScores,
                      "passage '" + p.id + "' has no oracle score");
        }
        out.push_back(*p.oracle_score);
        break;
    }
  }
  return out;
}

std::vector<double> speeds_at_budget(std::span<const PassageRecord> passages,
                                     Method method, double alpha,
                                     double budget_k) {
  if (!(budget_k > 0.0)) {
    throw Error(Errc::NonPositiveBudget, "budget must be positive");
  }
  const auto scores = session_scores(passages, method);
  const allocator::AllocationPlan plan =
      allocator::allocate(scores, effective_alpha(method, alpha), budget_k);
  std::vector<double> speeds;
  speeds.reserve(plan.entries.size());
  for (const auto& e : plan.entries) speeds.push_back(e.speed_wps);
  return speeds;
}

double srar_at_budget(std::span<const PassageRecord> passages, Method method,
                      double alpha, double budget_k) {
  validate(passages);
  const std::vector<double> speeds =
      speeds_at_budget(passages, method, alpha, budget_k);
  double total = 0.0;
  for (std::size_t i = 0; i < passages.size(); ++i) {
    total += passages[i].population_share *
             readmodel::srar(passages[i].model, speeds[i]);
  }
  return total;
}

double budget_for_srar(std::span<const PassageRecord> passages, Method method,
                       double alpha, double target_srar) {
  validate(passages);
  if (target_srar >= 1.0) {
    throw Error(Errc::Unreachable, "an SRAR of 1 needs unbounded budget");
  }
  if (!(target_srar > 0.0)) {
    throw Error(Errc::AlphaOutOfRange, "target SRAR must lie in (0, 1)");
  }
  const double n = static_cast<double>(passages.size());
  double max_median = 0.0;
  for (const PassageRecord& p : passages) {
    max_median = std::max(max_median, p.model.median());
  }
  double hi = n * max_median;
  int grow = 0;
  while (srar_at_budget(passages, method, alpha, hi) < target_srar) {
    hi *= 2.0;
    if (++grow > 200 || !std::isfinite(hi)) {
      throw Error(Errc::Unreachable, "target SRAR not reachable");
    }
  }
  double lo = 0.0;
  while (hi - lo > 1e-13 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (srar_at_budget(passages, method, alpha, mid) >= target_srar) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi / n;
}

std::vector<SimPoint> savings_table(std::span<const PassageRecord> passages,
                                    std::span<const double> targets,
                                    double alpha, std::vector<Method> methods) {
  validate(passages);
  if (methods.empty()) {
    methods.push_back(Method::Uniform);
    const bool all_text = std::all_of(
        passages.begin(), passages.end(),
        [](const PassageRecord& p) { return !p.text.empty(); });
    const bool all_oracle = std::all_of(
        passages.begin(), passages.end(),
        [](const PassageRecord& p) { return p.oracle_score.has_value(); });
    if (all_text) methods.push_back(Method::Fog);
    if (all_oracle) methods.push_back(Method::TagOracle);
  }
  std::vector<SimPoint> out;
  for (double target : targets) {
    const double uniform =
        budget_for_srar(passages, Method::Uniform, alpha, target);
    for (Method m : methods) {
      const double avg =
          m == Method::Uniform ? uniform
                               : budget_for_srar(passages, m, alpha, target);
      out.push_back(SimPoint{target, m, avg, 1.0 - avg / uniform});
    }
  }
  return out;
}

double monte_carlo_srar(std::span<const PassageRecord> passages, Method method,
                        double alpha, double budget_k,
                        std::size_t readers_per_passage, std::uint64_t seed) {
  validate(passages);
  if (readers_per_passage < 1) {
    throw Error(Errc::BadInput, "need at least one reader per passage");
  }
  const std::vector<double> speeds =
      speeds_at_budget(passages, method, alpha, budget_k);
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double total = 0.0;
  for (std::size_t i = 0; i < passages.size(); ++i) {
    const LogNormalModel& m = passages[i].model;
    // r <= v  <=>  mu + sigma z <= ln v
    const double log_v = speeds[i] > 0.0 ? std::log(speeds[i]) : -INFINITY;
    std::size_t hits = 0;
    for (std::size_t r = 0; r < readers_per_passage; ++r) {
      if (m.mu() + m.sigma() * normal(gen) <= log_v) ++hits;
    }
    total += passages[i].population_share * static_cast<double>(hits) /
             static_cast<double>(readers_per_passage);
  }
  return total;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw Error(Errc::LengthMismatch, "pearson needs paired values");
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) {
    throw Error(Errc::DegenerateVariance, "a series has zero variance");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double score_speed_correlation(std::span<const PassageRecord> passages,
                               Method method) {
  if (passages.size() < 3) {
    throw Error(Errc::BadInput, "correlation needs at least three passages");
  }
  const std::vector<CogScore> scores = scores_for(passages, method);
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < passages.size(); ++i) {
    xs.push_back(scores[i].value());
    ys.push_back(passages[i].model.median());
  }
  return pearson(xs, ys);
}

std::pair<std::size_t, std::size_t> sentence_shape_for_fog(double target_fog) {
  std::pair<std::size_t, std::size_t> best{10, 0};
  double best_err = INFINITY;
  for (std::size_t len = 4; len <= 40; ++len) {
    for (std::size_t c = 0; c <= len; ++c) {
      const double fog = 0.4 * (static_cast<double>(len) +
                                100.0 * static_cast<double>(c) /
                                    static_cast<double>(len));
      const double err = std::abs(fog - target_fog);
      if (err < best_err - 1e-12) {
        best_err = err;
        best = {len, c};
      }
    }
  }
  return best;
}

std::string synthetic_text(std::size_t sentence_words, std::size_t complex,
                           std::size_t total_words) {
  if (sentence_words == 0 || complex > sentence_words) {
    throw Error(Errc::BadInput, "bad sentence shape");
  }
  const std::size_t sentences =
      std::max<std::size_t>(1, (total_words + sentence_words - 1) / sentence_words);
  std::string out;
  std::size_t simple_i = 0, complex_i = 0;
  for (std::size_t s = 0; s < sentences; ++s) {
    for (std::size_t w = 0; w < sentence_words; ++w) {
      // Spread complex words evenly through the sentence.
      const bool is_complex =
          (w + 1) * complex / sentence_words != w * complex / sentence_words;
      std::string word(is_complex
                           ? kComplexWords[complex_i++ % std::size(kComplexWords)]
                           : kSimpleWords[simple_i++ % std::size(kSimpleWords)]);
      if (w == 0) word[0] = static_cast<char>(std::toupper(word[0]));
      if (!out.empty()) out.push_back(' ');
      out += word;
    }
    out.push_back('.');
  }
  return out;
}

std::vector<PassageRecord> make_synthetic(const SyntheticConfig& config) {
  if (config.passages < 2 || !(config.median_lo > 0.0) ||
      !(config.median_hi > config.median_lo) || !(config.sigma > 0.0) ||
      config.score_lo < CogScore::kMin || config.score_hi > CogScore::kMax ||
      config.score_lo > config.score_hi || config.fog_noise < 0.0) {
    throw Error(Errc::BadConfig, "invalid synthetic dataset configuration");
  }
  std::mt19937_64 gen(config.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const std::size_t n = config.passages;
  const double log_lo = std::log(config.median_lo);
  const double log_hi = std::log(config.median_hi);
  std::vector<PassageRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double frac = static_cast<double>(i) / static_cast<double>(n - 1);
    const double log_median = log_lo + frac * (log_hi - log_lo);
    const double raw_score =
        config.score_lo + frac * (config.score_hi - config.score_lo);
    const int score = std::clamp(static_cast<int>(std::lround(raw_score)),
                                 CogScore::kMin, CogScore::kMax);
    // Inverse of fog_to_score at the unrounded score, plus noise.
    double fog = 2.0 * (11.0 - raw_score);
    if (config.fog_noise > 0.0) fog += config.fog_noise * noise(gen);
    fog = std::max(fog, 0.0);
    const auto [len, complex] = sentence_shape_for_fog(fog);

    PassageRecord p;
    p.id = "p" + std::to_string(i + 1);
    p.text = synthetic_text(len, complex, config.words_per_passage);
    p.oracle_score = CogScore(score);
    p.model = LogNormalModel(log_median, config.sigma);
    p.population_share = 1.0 / static_cast<double>(n);
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace cogstream::simulator
