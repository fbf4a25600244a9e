#include "cogstream/cli.hpp"

#include <csignal>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "cogstream/allocator.hpp"
#include "cogstream/cogload.hpp"
#include "cogstream/error.hpp"
#include "cogstream/json_io.hpp"
#include "cogstream/pest.hpp"
#include "cogstream/readmodel.hpp"
#include "cogstream/savings.hpp"
#include "cogstream/server.hpp"
#include "cogstream/simulator.hpp"

namespace cogstream::cli {

namespace {

using json_io::json;

json parse_json_file(const std::string& path) {
  json j = json::parse(json_io::read_file(path), nullptr, false);
  if (j.is_discarded()) throw Error(Errc::BadInput, "'" + path + "' is not valid JSON");
  return j;
}

std::string read_text(const std::string& path, std::istream& in) {
  if (!path.empty() && path != "-") return json_io::read_file(path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

std::vector<simulator::PassageRecord> load_passages(const std::string& path,
                                                    const std::string& samples_path) {
  std::vector<readmodel::SpeedSample> samples;
  if (!samples_path.empty()) {
    samples = readmodel::parse_samples_csv(json_io::read_file(samples_path));
  }
  return json_io::parse_passages(parse_json_file(path), samples);
}

struct Options {
  bool json = false;
  std::string file;

  double mu = 0, sigma = 1, alpha = 0.5;
  double mu_b = 0, sigma_b = 1;

  std::string groups, passages, samples, passage_id, save_passages;
  double srar = 0.99, smax = 45.0;

  std::vector<int> scores;
  double budget = 12.0;
  double min_wps = 0.0;

  std::vector<double> targets = {0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95};
  std::vector<std::string> methods;
  bool csv = false;
  bool synthetic = false;
  simulator::SyntheticConfig synth;

  double true_speed = 6.0;
  int steps = 30;
  bool jsonl = false;
  std::uint64_t seed = 0;
  bool seeded = false;

  server::ServerConfig serve;
  std::string estimator = "fog";
  std::string transcripts;
};

void emit(std::ostream& out, const json& j) { out << j.dump() << '\n'; }

int serve_until_signal(const Options& o, std::ostream& out) {
  server::ServerConfig cfg = o.serve;
  cfg.estimator = server::estimator_from_string(o.estimator);
  if (o.seeded) cfg.seed = o.seed;
  if (!o.transcripts.empty()) cfg.transcript_dir = o.transcripts;
  std::vector<simulator::PassageRecord> passages;
  if (!o.passages.empty()) passages = load_passages(o.passages, o.samples);

  server::Server srv(cfg, std::move(passages));
  // Block before any server thread exists so the signals reach sigwait.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
  srv.start();
  out << "listening on " << cfg.host << ':' << srv.port() << std::endl;
  int sig = 0;
  sigwait(&set, &sig);
  srv.stop();
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        std::istream& in) {
  CLI::App app{"Cognitive-load-aware text streaming toolkit", "cogstream"};
  app.require_subcommand(1);
  Options o;

  auto json_flag = [&](CLI::App* sub) { sub->add_flag("--json", o.json, "Print JSON"); };

  auto* fog = app.add_subcommand("fog", "Gunning-Fog index of a text");
  fog->add_option("file", o.file, "Text file (stdin when absent or -)");
  json_flag(fog);

  auto* fk = app.add_subcommand("fk", "Flesch-Kincaid grade of a text");
  fk->add_option("file", o.file, "Text file (stdin when absent or -)");
  json_flag(fk);

  auto* fit = app.add_subcommand("fit", "Fit log-normal speed models from a samples CSV");
  fit->add_option("--samples", o.samples, "passage_id,user_id,speed_wps CSV")->required();
  fit->add_option("--passage", o.passage_id, "Fit only this passage");
  json_flag(fit);

  auto* quant = app.add_subcommand("quantile", "Speed quantile of a log-normal model");
  quant->add_option("--mu", o.mu)->required();
  quant->add_option("--sigma", o.sigma)->required();
  quant->add_option("--alpha", o.alpha)->required();
  json_flag(quant);

  auto* sav = app.add_subcommand("savings", "Compute saving at a target SRAR");
  sav->add_option("--groups", o.groups, "Group file")->required();
  sav->add_option("--srar", o.srar, "Target SRAR")->required();
  sav->add_option("--smax", o.smax, "Baseline streaming speed")->required();
  json_flag(sav);

  auto* inter = app.add_subcommand("intersect", "Speeds where two model densities cross");
  inter->add_option("--mu-a", o.mu)->required();
  inter->add_option("--sigma-a", o.sigma)->required();
  inter->add_option("--mu-b", o.mu_b)->required();
  inter->add_option("--sigma-b", o.sigma_b)->required();
  json_flag(inter);

  auto* alloc = app.add_subcommand("alloc", "Split a budget across sessions by score");
  alloc->add_option("--scores", o.scores, "Comma-separated scores")->required()->delimiter(',');
  alloc->add_option("--budget", o.budget, "Total WPS")->required();
  alloc->add_option("--alpha", o.alpha, "Interpolation weight")->required();
  alloc->add_option("--min-wps", o.min_wps, "Per-session floor");
  json_flag(alloc);

  auto* sim = app.add_subcommand("simulate", "Budget needed per target SRAR and method");
  auto* sim_src = sim->add_option("--passages", o.passages, "passages.json");
  sim->add_option("--samples", o.samples, "Speed samples for passages without mu/sigma");
  auto* sim_syn = sim->add_flag("--synthetic", o.synthetic, "Use a generated dataset");
  sim_src->excludes(sim_syn);
  sim->add_option("--targets", o.targets, "Comma-separated target SRARs")->delimiter(',');
  sim->add_option("--alpha", o.alpha, "Interpolation weight");
  sim->add_option("--methods", o.methods, "uniform,fog,tag_oracle")->delimiter(',');
  sim->add_option("--passage-count", o.synth.passages);
  sim->add_option("--median-lo", o.synth.median_lo);
  sim->add_option("--median-hi", o.synth.median_hi);
  sim->add_option("--sigma", o.synth.sigma);
  sim->add_option("--fog-noise", o.synth.fog_noise);
  sim->add_option("--seed", o.seed, "Synthetic dataset seed");
  sim->add_option("--save-passages", o.save_passages, "Write the dataset used");
  sim->add_flag("--csv", o.csv, "Print CSV");
  json_flag(sim);

  auto* ps = app.add_subcommand("pest-sim", "Run the staircase against a deterministic reader");
  ps->add_option("--true-speed", o.true_speed)->required();
  ps->add_option("--steps", o.steps, "Adjustments before accepting");
  ps->add_option("--seed", o.seed, "Initial speed seed");
  ps->add_flag("--jsonl", o.jsonl, "Print the transcript as JSON lines");
  json_flag(ps);

  auto* srv = app.add_subcommand("serve", "Run the pacing server");
  srv->add_option("--port", o.serve.port);
  srv->add_option("--host", o.serve.host);
  srv->add_option("--budget", o.serve.budget_wps);
  srv->add_option("--alpha", o.serve.alpha);
  srv->add_option("--estimator", o.estimator, "fog, tag or oracle");
  srv->add_option("--pause-interval", o.serve.pause_interval_words);
  srv->add_option("--seed", o.seed);
  srv->add_option("--passages", o.passages);
  srv->add_option("--samples", o.samples);
  srv->add_option("--max-sessions", o.serve.max_sessions);
  srv->add_option("--fixed-wps", o.serve.fixed_wps);
  srv->add_option("--transcripts", o.transcripts, "Directory for session transcripts");
  srv->add_flag("--debug", o.serve.debug, "Emit score events");

  std::vector<std::string> argv_store = {"cogstream"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands()[0]->help());
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return 2;
  }
  if (const CLI::Option* seed = app.get_subcommands()[0]->get_option_no_throw("--seed")) {
    o.seeded = seed->count() > 0;
  }

  try {
    if (fog->parsed()) {
      const auto f = cogload::gunning_fog(read_text(o.file, in));
      if (o.json) {
        emit(out, json_io::to_json(f));
      } else {
        out << "fog " << f.index << " (words " << f.words << ", sentences " << f.sentences
            << ", complex " << f.complex_words << ") score "
            << cogload::fog_to_score(f.index).value() << '\n';
      }
    } else if (fk->parsed()) {
      const double g = cogload::flesch_kincaid_grade(read_text(o.file, in));
      if (o.json) {
        emit(out, json(g));
      } else {
        out << "grade " << g << '\n';
      }
    } else if (fit->parsed()) {
      const auto rows = readmodel::parse_samples_csv(json_io::read_file(o.samples));
      std::map<std::string, std::vector<double>> by_passage;
      for (const auto& r : rows) {
        if (o.passage_id.empty() || r.passage_id == o.passage_id) {
          by_passage[r.passage_id].push_back(r.speed_wps);
        }
      }
      if (!o.passage_id.empty() && by_passage.empty()) {
        throw Error(Errc::UnknownPassage, "no samples for '" + o.passage_id + "'");
      }
      json result = json::object();
      for (const auto& [id, speeds] : by_passage) {
        result[id] = json_io::to_json(readmodel::fit_report(speeds));
      }
      if (!o.passage_id.empty()) result = result[o.passage_id];
      if (o.json) {
        emit(out, result);
      } else {
        out << result.dump(2) << '\n';
      }
    } else if (quant->parsed()) {
      const double q = readmodel::quantile(readmodel::LogNormalModel(o.mu, o.sigma), o.alpha);
      if (o.json) {
        emit(out, json(q));
      } else {
        out << q << '\n';
      }
    } else if (sav->parsed()) {
      const auto groups = json_io::parse_groups(parse_json_file(o.groups));
      const auto r = savings::savings_at(groups, o.srar, o.smax);
      if (o.json) {
        emit(out, json_io::to_json(r));
      } else {
        for (const auto& [name, speed] : r.group_speeds) {
          out << name << ' ' << speed << " WPS\n";
        }
        out << "saving " << r.saving_fraction << '\n';
      }
    } else if (inter->parsed()) {
      const auto roots = readmodel::density_intersection(
          readmodel::LogNormalModel(o.mu, o.sigma), readmodel::LogNormalModel(o.mu_b, o.sigma_b));
      if (o.json) {
        emit(out, json(roots));
      } else {
        for (double x : roots) out << x << '\n';
      }
    } else if (alloc->parsed()) {
      std::vector<allocator::SessionScore> s;
      for (std::size_t i = 0; i < o.scores.size(); ++i) {
        s.push_back({"s" + std::to_string(i + 1), cogload::CogScore(o.scores[i])});
      }
      allocator::AllocationOptions opts;
      if (alloc->count("--min-wps") > 0) opts.min_wps = o.min_wps;
      const auto plan = allocator::allocate(s, o.alpha, o.budget, opts);
      if (o.json) {
        emit(out, json_io::to_json(plan));
      } else {
        for (const auto& e : plan.entries) {
          out << e.session_id << " score " << e.score.value() << " weight " << e.weight
              << " speed " << e.speed_wps << '\n';
        }
      }
    } else if (sim->parsed()) {
      std::vector<simulator::PassageRecord> passages;
      if (o.synthetic) {
        if (o.seeded) o.synth.seed = o.seed;
        passages = simulator::make_synthetic(o.synth);
      } else if (!o.passages.empty()) {
        passages = load_passages(o.passages, o.samples);
      } else {
        err << "simulate needs --passages or --synthetic\n";
        return 2;
      }
      if (!o.save_passages.empty()) {
        std::ofstream f(o.save_passages);
        if (!f) throw Error(Errc::BadInput, "cannot write '" + o.save_passages + "'");
        f << json_io::passages_to_json(passages).dump(2) << '\n';
      }
      std::vector<simulator::Method> methods;
      for (const auto& m : o.methods) methods.push_back(simulator::method_from_string(m));
      const auto table = simulator::savings_table(passages, o.targets, o.alpha, methods);
      if (o.json) {
        emit(out, json_io::to_json(table));
      } else if (o.csv) {
        out << json_io::table_csv(table);
      } else {
        for (const auto& p : table) {
          out << p.target_srar << ' ' << simulator::to_string(p.method) << ' '
              << p.avg_speed_wps << " WPS saving " << 100.0 * p.saving_vs_uniform << "%\n";
        }
      }
    } else if (ps->parsed()) {
      if (!(o.true_speed > 0.0)) throw Error(Errc::NegativeSpeed, "true speed must be positive");
      pest::PestConfig cfg;
      if (o.seeded) cfg.rng_seed = o.seed;
      const auto run = pest::simulate_reader(cfg, o.true_speed, o.steps);
      if (o.json) {
        emit(out, json_io::to_json(run));
      } else if (o.jsonl) {
        for (const auto& e : run.transcript) emit(out, json_io::to_json(e));
      } else {
        out << "start " << run.initial_speed << '\n';
        for (const auto& e : run.transcript) {
          out << e.step << ' ' << pest::to_string(e.choice) << " -> " << e.speed
              << " (dv " << e.delta_v << ")\n";
        }
        out << "final " << *run.final_state.final_speed << '\n';
      }
    } else if (srv->parsed()) {
      return serve_until_signal(o, out);
    }
  } catch (const Error& e) {
    err << e.name() << ": " << e.what() << '\n';
    return 1;
  } catch (const json::exception& e) {
    err << errc_name(Errc::BadInput) << ": " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace cogstream::cli
