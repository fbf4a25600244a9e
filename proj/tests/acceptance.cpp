// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cogstream/allocator.hpp"
#include "cogstream/cogload.hpp"
#include "cogstream/pest.hpp"
#include "cogstream/protocol.hpp"
#include "cogstream/readmodel.hpp"
#include "cogstream/savings.hpp"
#include "cogstream/server.hpp"
#include "cogstream/simulator.hpp"
#include "oracles.hpp"
#include "protocol_client.hpp"

using namespace cogstream;
using Clock = std::chrono::steady_clock;
using readmodel::LogNormalModel;
using cogload::CogScore;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(const char* name, const std::function<Outcome()>& check) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s %s: %s [%.1f ms]\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), ms);
  std::fflush(stdout);
}

template <class F>
double elapsed_ms(F&& f) {
  const auto t0 = Clock::now();
  f();
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

LogNormalModel model_with_quantile(double speed, double alpha, double sigma) {
  return LogNormalModel(std::log(speed) - oracle::bisect(
                                              [](double z) { return oracle::normal_cdf(z, 4000); },
                                              alpha, -10.0, 10.0) *
                                              sigma,
                        sigma);
}

const std::vector<double> kTargets = {0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95};

// Synthetic correlated dataset shared by the two table criteria. Fog scores
// come from generated text whose fog index carries Gaussian noise.
std::vector<simulator::PassageRecord> correlated_dataset() {
  simulator::SyntheticConfig cfg;
  cfg.passages = 10;
  cfg.fog_noise = 3.0;
  return simulator::make_synthetic(cfg);
}

Outcome two_group_saving() {
  const std::vector<savings::GroupSpec> groups = {
      {"simple", 0.5, model_with_quantile(21.20, 0.99, 0.4)},
      {"complex", 0.5, model_with_quantile(11.97, 0.99, 0.35)}};
  savings::SavingsReport r;
  const double ms = elapsed_ms([&] { r = savings::savings_at(groups, 0.99, 45.0); });
  const bool ok = std::abs(r.saving_fraction - 0.6314) <= 1e-4 && ms < 1.0;
  return {ok, fmt("saving %.6f (want 0.6314 +- 0.0001), call %.3f ms (< 1 ms)",
                  r.saving_fraction, ms)};
}

Outcome quantile_fidelity() {
  std::mt19937_64 gen(101);
  std::uniform_real_distribution<> mu(-1.0, 4.0), sd(0.05, 1.5), al(0.01, 0.99);
  double worst = 0.0;
  double ms = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const LogNormalModel m(mu(gen), sd(gen));
    const double a = al(gen);
    double q = 0.0;
    ms += elapsed_ms([&] { q = readmodel::quantile(m, a); });
    // Bisection in log-speed on the library cdf.
    double lo = m.mu() - 12 * m.sigma(), hi = m.mu() + 12 * m.sigma();
    for (int k = 0; k < 200; ++k) {
      const double mid = 0.5 * (lo + hi);
      (readmodel::cdf(m, std::exp(mid)) < a ? lo : hi) = mid;
    }
    const double ref = std::exp(0.5 * (lo + hi));
    worst = std::max(worst, std::abs(q - ref) / ref);
  }
  return {worst <= 1e-9 && ms < 1000.0,
          fmt("max relative error %.3g (<= 1e-9), quantile time %.2f ms (< 1 s)", worst, ms)};
}

Outcome intersection_solver() {
  std::mt19937_64 gen(202);
  std::uniform_real_distribution<> mu(-1.0, 4.0), sd(0.05, 1.5);
  double worst_residual = 0.0, worst_match = 0.0;
  int count_mismatch = 0, roots_seen = 0;
  for (int i = 0; i < 500; ++i) {
    const LogNormalModel a(mu(gen), sd(gen)), b(mu(gen), sd(gen));
    const auto roots = readmodel::density_intersection(a, b);
    const auto f = [&](double x) { return a.log_pdf(x) - b.log_pdf(x); };
    for (double x : roots) {
      const double scale = std::max({1.0, std::abs(a.log_pdf(x)), std::abs(b.log_pdf(x))});
      worst_residual = std::max(worst_residual, std::abs(f(x)) / scale);
    }
    // Near-equal sigmas push one root very far out, so scan nearly the whole
    // representable range.
    const double lo = std::exp(-700.0), hi = std::exp(700.0);
    const auto ref = oracle::sign_change_roots(f, lo, hi, 200000);
    if (ref.size() != roots.size()) {
      ++count_mismatch;
      continue;
    }
    for (std::size_t k = 0; k < ref.size(); ++k) {
      ++roots_seen;
      worst_match = std::max(worst_match, std::abs(roots[k] - ref[k]) / std::max(1.0, ref[k]));
    }
  }
  bool exact = true;
  for (int i = 0; i < 500; ++i) {
    const double s = sd(gen), ma = mu(gen), mb = mu(gen);
    if (ma == mb) continue;
    const auto r = readmodel::density_intersection(LogNormalModel(ma, s), LogNormalModel(mb, s));
    exact = exact && r.size() == 1 && r[0] == std::exp((ma + mb) / 2);
  }
  return {worst_residual <= 1e-9 && worst_match <= 1e-6 && count_mismatch == 0 && exact,
          fmt("%d roots; residual %.3g (<= 1e-9); oracle gap %.3g (<= 1e-6); "
              "root-count mismatches %d; equal-sigma exact %s",
              roots_seen, worst_residual, worst_match, count_mismatch, exact ? "yes" : "no")};
}

Outcome allocator_limits() {
  std::mt19937_64 gen(303);
  std::uniform_int_distribution<int> score(1, 10), count(1, 16);
  std::uniform_real_distribution<> alpha(0.0, 1.0), budget(0.1, 1000.0);
  double worst_sum = 0.0, worst_uniform = 0.0, worst_prop = 0.0;
  int monotone_violations = 0;
  const double ms = elapsed_ms([&] {
    for (int t = 0; t < 10000; ++t) {
      std::vector<allocator::SessionScore> s;
      const int n = count(gen);
      double total_score = 0.0;
      for (int i = 0; i < n; ++i) {
        s.push_back({"s" + std::to_string(i), CogScore(score(gen))});
        total_score += s.back().score.value();
      }
      const double a = alpha(gen), k = budget(gen);
      const auto p = allocator::allocate(s, a, k);
      worst_sum = std::max(worst_sum, std::abs(p.total_speed() - k) / k);
      const auto u = allocator::allocate(s, 0.0, k);
      const auto q = allocator::allocate(s, 1.0, k);
      for (int i = 0; i < n; ++i) {
        worst_uniform = std::max(worst_uniform, std::abs(u.entries[i].speed_wps - k / n) / k);
        const double prop = k * s[i].score.value() / total_score;
        worst_prop = std::max(worst_prop, std::abs(q.entries[i].speed_wps - prop) / k);
      }
      const int j = std::uniform_int_distribution<int>(0, n - 1)(gen);
      if (s[j].score.value() < 10) {
        auto raised = s;
        raised[j].score = CogScore(s[j].score.value() + 1);
        const auto r = allocator::allocate(raised, a, k);
        if (r.entries[j].speed_wps < p.entries[j].speed_wps - 1e-12 * k) ++monotone_violations;
      }
    }
  });
  return {worst_sum <= 1e-9 && worst_uniform <= 1e-12 && worst_prop <= 1e-12 &&
              monotone_violations == 0 && ms < 1000.0,
          fmt("sum error %.3g (<= 1e-9), uniform dev %.3g, proportional dev %.3g, "
              "monotonicity violations %d, %.1f ms (< 1 s)",
              worst_sum, worst_uniform, worst_prop, monotone_violations, ms)};
}

Outcome table_trend() {
  const auto ps = correlated_dataset();
  std::vector<simulator::SimPoint> table;
  const double ms = elapsed_ms([&] { table = simulator::savings_table(ps, kTargets, 0.5); });
  std::vector<double> fog, tag;
  for (const auto& p : table) {
    if (p.method == simulator::Method::Fog) fog.push_back(p.saving_vs_uniform);
    if (p.method == simulator::Method::TagOracle) tag.push_back(p.saving_vs_uniform);
  }
  bool ok = tag.size() == kTargets.size() && fog.size() == kTargets.size() && ms < 5000.0;
  std::string detail = "tag%/fog%:";
  for (std::size_t i = 0; i < tag.size() && i < fog.size(); ++i) {
    ok = ok && tag[i] > 0.0 && (i == 0 || tag[i] > tag[i - 1]) && fog[i] <= tag[i];
    detail += fmt(" %.2f/%.2f", 100 * tag[i], 100 * fog[i]);
  }
  detail += fmt("; r_tag %.3f r_fog %.3f; %.1f ms (< 5 s)",
                simulator::score_speed_correlation(ps, simulator::Method::TagOracle),
                simulator::score_speed_correlation(ps, simulator::Method::Fog), ms);
  return {ok, detail};
}

Outcome low_budget_convergence() {
  const auto ps = correlated_dataset();
  const double n = static_cast<double>(ps.size());
  double x_min = INFINITY;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    for (std::size_t j = i + 1; j < ps.size(); ++j) {
      for (double x : readmodel::density_intersection(ps[i].model, ps[j].model)) {
        x_min = std::min(x_min, x);
      }
    }
  }
  const auto gap = [&](double avg) {
    return std::abs(srar_at_budget(ps, simulator::Method::TagOracle, 0.5, avg * n) -
                    srar_at_budget(ps, simulator::Method::Uniform, 0.5, avg * n));
  };
  const double avg95 = simulator::budget_for_srar(ps, simulator::Method::Uniform, 0.5, 0.95);
  const double d95 = gap(avg95);
  // Every budget strictly below the smallest crossing, on a fine grid.
  double worst = 0.0, worst_at = 0.0;
  for (int i = 1; i < 1000; ++i) {
    const double avg = x_min * i / 1000.0;
    const double g = gap(avg);
    if (g > worst) {
      worst = g;
      worst_at = avg;
    }
  }
  return {worst < 0.2 * d95,
          fmt("smallest crossing %.3f WPS; gap at 0.95 budget (%.3f WPS) %.4f; max gap below "
              "crossing %.4f at %.3f WPS; ratio %.2f (< 0.20)",
              x_min, avg95, d95, worst, worst_at, worst / d95)};
}

Outcome monte_carlo_agreement() {
  std::mt19937_64 gen(404);
  std::uniform_real_distribution<> med(2.0, 12.0), sd(0.1, 0.8), alpha(0.0, 1.0);
  std::uniform_int_distribution<int> sc(1, 10), count(2, 10);
  double worst = 0.0;
  const double ms = elapsed_ms([&] {
    for (int c = 0; c < 20; ++c) {
      const int n = count(gen);
      std::vector<simulator::PassageRecord> ps(n);
      double med_sum = 0.0;
      for (int i = 0; i < n; ++i) {
        ps[i].id = "p" + std::to_string(i);
        ps[i].model = LogNormalModel(std::log(med(gen)), sd(gen));
        ps[i].oracle_score = CogScore(sc(gen));
        ps[i].population_share = 1.0 / n;
        med_sum += ps[i].model.median();
      }
      const double a = alpha(gen);
      const double k = med_sum * std::uniform_real_distribution<>(0.6, 1.6)(gen);
      const std::size_t per = 1000000 / n;
      const double mc = simulator::monte_carlo_srar(ps, simulator::Method::TagOracle, a, k, per,
                                                    gen());
      worst = std::max(worst,
                       std::abs(mc - simulator::srar_at_budget(ps, simulator::Method::TagOracle,
                                                               a, k)));
    }
  });
  return {worst <= 0.002 && ms < 10000.0,
          fmt("max |MC - analytic| %.5f (<= 0.002) over 20 configs, 1e6 readers each, "
              "%.0f ms (< 10 s)",
              worst, ms)};
}

Outcome pest_convergence() {
  std::mt19937_64 gen(505);
  std::uniform_real_distribution<> truth(0.5, 15.0);
  double worst = 0.0, min_dv = INFINITY;
  bool reproducible = true;
  const double ms = elapsed_ms([&] {
    for (int i = 0; i < 1000; ++i) {
      pest::PestConfig cfg;
      cfg.rng_seed = gen();
      const double r = truth(gen);
      const auto run = pest::simulate_reader(cfg, r, 30);
      worst = std::max(worst, std::abs(*run.final_state.final_speed - r));
      for (const auto& e : run.transcript) min_dv = std::min(min_dv, e.delta_v);
      const auto again = pest::simulate_reader(cfg, r, 30);
      for (std::size_t k = 0; k < run.transcript.size(); ++k) {
        reproducible = reproducible && run.transcript[k].speed == again.transcript[k].speed;
      }
    }
  });
  return {worst <= 0.4 && min_dv >= 0.2 - 1e-12 && reproducible && ms < 1000.0,
          fmt("max |estimate - truth| %.4f (<= 0.4), min delta_v %.3f (>= 0.2), "
              "reproducible %s, %.1f ms (< 1 s)",
              worst, min_dv, reproducible ? "yes" : "no", ms)};
}

Outcome fog_fixtures() {
  struct Fixture {
    const char* text;
    std::size_t words, sentences, complex;
    double index;
  };
  const Fixture fixtures[] = {
      {"The cat sat on the mat. It was happy.", 9, 2, 0, 1.8},
      {"Go.", 1, 1, 0, 0.4},
      {"Adaptive streaming necessitates sophisticated allocation.", 5, 1, 4, 34.0}};
  bool ok = true;
  for (const auto& f : fixtures) {
    const auto b = cogload::gunning_fog(f.text);
    ok = ok && b.words == f.words && b.sentences == f.sentences &&
         b.complex_words == f.complex && std::abs(b.index - f.index) <= 1e-12;
  }
  const std::string low = simulator::synthetic_text(15, 0, 1000);
  const std::string high = simulator::synthetic_text(15, 6, 1000);
  const auto fl = cogload::gunning_fog(low), fh = cogload::gunning_fog(high);
  const double rl = double(fl.complex_words) / fl.words, rh = double(fh.complex_words) / fh.words;
  ok = ok && rl == 0.0 && std::abs(rh - 0.4) <= 1e-12 && fl.index < fh.index;
  return {ok, fmt("fixtures %s; low %zu words ratio %.2f fog %.2f < high %zu words ratio %.2f "
                  "fog %.2f",
                  ok ? "match" : "checked", fl.words, rl, fl.index, fh.words, rh, fh.index)};
}

Outcome tag_chunking() {
  std::mt19937_64 gen(606);
  const std::vector<std::string> pieces = {"<1>", "<2>", "<5>", "<9>", "<10>", "<11>", "<0>",
                                           "<",   ">",   "1",   "0",   " ",    "word", "<1",
                                           "0>",  "<<",  "é",   "\n",  "<3",   ">x"};
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
  int partitions = 0, mismatches = 0;
  for (int t = 0; t < 1000; ++t) {
    std::string text;
    const int len = std::uniform_int_distribution<>(0, 60)(gen);
    for (int i = 0; i < len; ++i) text += pieces[pick(gen)];
    const auto whole = cogload::strip_tags(text);
    for (int split = 0; split < 10; ++split) {
      cogload::TagScanState state;
      std::string display;
      std::vector<CogScore> scores;
      std::size_t pos = 0;
      const std::size_t max_chunk = split == 0 ? 1 : 1 + split * 2;
      while (pos < text.size()) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(
            split == 0 ? 1 : 0, std::min(max_chunk, text.size() - pos))(gen);
        auto r = cogload::scan_chunk(std::move(state), std::string_view(text).substr(pos, n));
        display += r.display;
        scores.insert(scores.end(), r.scores.begin(), r.scores.end());
        state = std::move(r.state);
        pos += n;
      }
      display += cogload::finish_scan(state);
      ++partitions;
      if (display != whole.display || scores != whole.scores) ++mismatches;
    }
  }
  return {mismatches == 0,
          fmt("%d partitions of 1000 texts, %d mismatches", partitions, mismatches)};
}

Outcome server_end_to_end() {
  using testclient::Client;
  namespace proto = protocol;
  const double tolerance_s = 0.020;
  std::string detail;
  bool ok = true;
  double worst_gap = 0.0;
  int gaps = 0;

  // A word's successor is due 1/rate later, rate being the one in force
  // when the earlier word went out.
  struct GapTracker {
    double rate = 0.0, rate_at_last = 0.0;
    std::optional<Clock::time_point> last;
    void rate_event(double r) { rate = r; }
    void word(Clock::time_point at, double& worst, int& count) {
      if (last) {
        const double gap = std::chrono::duration<double>(at - *last).count();
        worst = std::max(worst, std::abs(gap - 1.0 / rate_at_last));
        ++count;
      }
      last = at;
      rate_at_last = rate;
    }
  };

  // (a) adaptive pair with tag rescoring.
  {
    server::ServerConfig cfg;
    cfg.budget_wps = 20.0;
    cfg.alpha = 0.5;
    cfg.estimator = server::Estimator::Tag;
    const std::string a_text =
        "<3> Streaming text at a measured pace lets a reader keep up with what the model "
        "writes. <7> Short plain sentences can go faster. <2> Dense technical prose with "
        "specialised terminology should slow down considerably for comprehension.";
    const std::string b_text =
        "<8> The dog ran to the park. It saw a ball and a kid. <4> Then it sat down under a "
        "tree and had a long rest in the shade until the sun went down.";
    simulator::PassageRecord a, b;
    a.id = "a";
    a.text = a_text;
    b.id = "b";
    b.text = b_text;
    server::Server srv(cfg, {a, b});
    srv.start();

    std::atomic<bool> done{false};
    int snapshots = 0;
    double worst_cons = 0.0;
    std::thread watcher([&] {
      while (!done) {
        const auto s = srv.snapshot();
        bool any = false;
        for (const auto& v : s.sessions) any = any || v.mode == proto::Mode::Adaptive;
        if (any) {
          ++snapshots;
          worst_cons = std::max(worst_cons, std::abs(s.adaptive_total_wps - cfg.budget_wps) /
                                                cfg.budget_wps);
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(2));
      }
    });

    auto drive = [&](const std::string& id, const std::string& text, bool& good) {
      Client c(srv.port());
      proto::Start st;
      st.mode = proto::Mode::Adaptive;
      st.passage_id = id;
      c.send(st);
      std::vector<std::string> words;
      long long seq = 0;
      GapTracker gt;
      bool gapless = true;
      for (;;) {
        auto r = c.next();
        if (!r) {
          good = false;
          return;
        }
        if (auto* h = std::get_if<proto::Hello>(&r->event)) gt.rate_event(h->speed);
        if (auto* rate = std::get_if<proto::Rate>(&r->event)) gt.rate_event(rate->wps);
        if (auto* w = std::get_if<proto::Word>(&r->event)) {
          gapless = gapless && w->seq == seq++;
          words.push_back(w->text);
          gt.word(r->at, worst_gap, gaps);
        }
        if (std::holds_alternative<proto::Done>(r->event)) break;
        if (std::holds_alternative<proto::ErrorEvent>(r->event)) {
          good = false;
          return;
        }
      }
      good = gapless && words == proto::display_words(text);
    };
    bool good_a = false, good_b = false;
    std::thread ta([&] { drive("a", a_text, good_a); });
    std::this_thread::sleep_for(std::chrono::milliseconds(150));
    std::thread tb([&] { drive("b", b_text, good_b); });
    ta.join();
    tb.join();
    done = true;
    watcher.join();
    srv.stop();
    const bool pair_ok = good_a && good_b && snapshots > 0 && worst_cons <= 1e-6;
    ok = ok && pair_ok;
    detail += fmt("adaptive pair words/seq %s, %d snapshots conservation err %.2g; ",
                  good_a && good_b ? "exact" : "WRONG", snapshots, worst_cons);
  }

  // (b) full PEST session under the deterministic reader policy.
  {
    server::ServerConfig cfg;
    cfg.seed = 77;
    cfg.pause_interval_words = 3;
    simulator::PassageRecord p;
    p.id = "calib";
    p.text = "Please read this short passage at a pace that feels natural to you.";
    server::Server srv(cfg, {p});
    srv.start();
    const double truth = 9.3;
    const int adjustments = 30;

    pest::PestConfig expect_cfg = cfg.pest;
    expect_cfg.rng_seed = 77;  // first session of a server seeded with 77
    const auto expected = pest::simulate_reader(expect_cfg, truth, adjustments);

    Client c(srv.port());
    proto::Start st;
    st.mode = proto::Mode::Pest;
    st.passage_id = "calib";
    c.send(st);
    GapTracker gt;
    std::optional<double> final_wps;
    double current = 0.0;
    int made = 0;
    bool protocol_ok = true;
    while (!final_wps) {
      auto r = c.next();
      if (!r) {
        protocol_ok = false;
        break;
      }
      if (auto* h = std::get_if<proto::Hello>(&r->event)) {
        current = h->speed;
        gt.rate_event(h->speed);
        protocol_ok = protocol_ok && h->speed == expected.initial_speed;
      } else if (auto* rate = std::get_if<proto::Rate>(&r->event)) {
        current = rate->wps;
        gt.rate_event(rate->wps);
      } else if (std::holds_alternative<proto::Word>(r->event)) {
        gt.word(r->at, worst_gap, gaps);
      } else if (auto* pause = std::get_if<proto::Pause>(&r->event)) {
        gt.last.reset();
        const bool offered =
            std::find(pause->options.begin(), pause->options.end(), "same") != pause->options.end();
        protocol_ok = protocol_ok && offered == (made >= 7);
        if (made >= adjustments) {
          c.send(proto::Feedback{"same"});
        } else {
          c.send(proto::Feedback{current < truth ? "faster" : "slower"});
          ++made;
        }
      } else if (auto* d = std::get_if<proto::Done>(&r->event)) {
        final_wps = d->final_wps;
        if (!final_wps) protocol_ok = false;
        break;
      } else {
        protocol_ok = false;
        break;
      }
    }
    srv.stop();
    const bool pest_ok = protocol_ok && final_wps &&
                         *final_wps == *expected.final_state.final_speed &&
                         std::abs(*final_wps - truth) <= 0.4;
    ok = ok && pest_ok;
    detail += fmt("pest final %.4f expected %.4f (truth %.1f) %s; ", final_wps.value_or(-1.0),
                  *expected.final_state.final_speed, truth, pest_ok ? "ok" : "WRONG");
  }

  ok = ok && gaps > 0 && worst_gap <= tolerance_s;
  detail += fmt("%d inter-word gaps, max deviation %.2f ms (<= 20 ms)", gaps, worst_gap * 1e3);
  return {ok, detail};
}

}  // namespace

int main() {
  report("two-group-saving", two_group_saving);
  report("quantile-fidelity", quantile_fidelity);
  report("intersection-solver", intersection_solver);
  report("allocator-conservation-and-limits", allocator_limits);
  report("savings-table-trend", table_trend);
  report("low-budget-convergence", low_budget_convergence);
  report("monte-carlo-vs-analytic", monte_carlo_agreement);
  report("pest-convergence", pest_convergence);
  report("gunning-fog-fixtures", fog_fixtures);
  report("tag-scanner-chunking-invariance", tag_chunking);
  report("server-end-to-end", server_end_to_end);
  std::printf("%d criteria failed\n", failures);
  return failures;
}
