#include "cogstream/json_io.hpp"

#include <fstream>
#include <sstream>

#include "cogstream/error.hpp"

namespace cogstream::json_io {

namespace {

double number_field(const json& obj, const char* key) {
  if (!obj.contains(key) || !obj.at(key).is_number()) {
    throw Error(Errc::BadInput, std::string("missing numeric field '") + key + "'");
  }
  return obj.at(key).get<double>();
}

std::string string_field(const json& obj, const char* key) {
  if (!obj.contains(key) || !obj.at(key).is_string()) {
    throw Error(Errc::BadInput, std::string("missing string field '") + key + "'");
  }
  return obj.at(key).get<std::string>();
}

}  // namespace

json to_json(const readmodel::LogNormalModel& m) {
  return {{"mu", m.mu()}, {"sigma", m.sigma()}};
}

json to_json(const readmodel::FitReport& r) {
  return {{"mu", r.model.mu()},
          {"sigma", r.model.sigma()},
          {"n", r.n},
          {"ks_statistic", r.ks_statistic},
          {"ks_p_value", r.ks_p_value}};
}

json to_json(const readmodel::KsResult& r) {
  return {{"statistic", r.statistic}, {"p_value", r.p_value}};
}

json to_json(const readmodel::TTestResult& r) {
  return {{"t", r.t}, {"df", r.df}, {"p_value", r.p_value}};
}

json to_json(const cogload::FogBreakdown& f) {
  return {{"words", f.words},
          {"sentences", f.sentences},
          {"complex_words", f.complex_words},
          {"index", f.index}};
}

json to_json(const savings::SavingsReport& r) {
  return {{"target_srar", r.target_srar},
          {"group_speeds", r.group_speeds},
          {"s_max", r.s_max},
          {"saving_fraction", r.saving_fraction}};
}

json to_json(const savings::RedistributionPlan& p) {
  return {{"s0", p.s0},
          {"speeds", p.speeds},
          {"gain_loss", p.gain_loss},
          {"net_gain", p.net_gain}};
}

json to_json(const allocator::AllocationPlan& p) {
  json entries = json::array();
  for (const auto& e : p.entries) {
    entries.push_back({{"session_id", e.session_id},
                       {"score", e.score.value()},
                       {"weight", e.weight},
                       {"speed_wps", e.speed_wps}});
  }
  json out = {{"alpha", p.alpha}, {"budget_k", p.budget_k}, {"entries", entries}};
  if (p.options.min_wps) out["min_wps"] = *p.options.min_wps;
  return out;
}

json to_json(const simulator::SimPoint& p) {
  return {{"target_srar", p.target_srar},
          {"method", simulator::to_string(p.method)},
          {"avg_wps", p.avg_speed_wps},
          {"saving_pct", 100.0 * p.saving_vs_uniform}};
}

json to_json(std::span<const simulator::SimPoint> table) {
  json out = json::array();
  for (const auto& p : table) out.push_back(to_json(p));
  return out;
}

json to_json(const pest::TranscriptEntry& e) {
  return {{"step", e.step},
          {"speed", e.speed},
          {"delta_v", e.delta_v},
          {"choice", pest::to_string(e.choice)}};
}

json to_json(const pest::ReaderRun& run) {
  json steps = json::array();
  for (const auto& e : run.transcript) steps.push_back(to_json(e));
  return {{"initial_speed", run.initial_speed},
          {"steps", steps},
          {"final_wps", run.final_state.final_speed.value_or(
                            run.final_state.current_speed)}};
}

std::string table_csv(std::span<const simulator::SimPoint> table) {
  std::ostringstream out;
  out.precision(17);
  out << "target_srar,method,avg_wps,saving_pct\n";
  for (const auto& p : table) {
    out << p.target_srar << ',' << simulator::to_string(p.method) << ','
        << p.avg_speed_wps << ',' << 100.0 * p.saving_vs_uniform << '\n';
  }
  return out.str();
}

std::vector<savings::GroupSpec> parse_groups(const json& j) {
  if (!j.is_array()) throw Error(Errc::BadInput, "group file must be an array");
  std::vector<savings::GroupSpec> out;
  for (const json& g : j) {
    out.push_back(savings::GroupSpec{
        string_field(g, "name"), number_field(g, "proportion"),
        readmodel::LogNormalModel(number_field(g, "mu"),
                                  number_field(g, "sigma"))});
  }
  return out;
}

std::vector<simulator::PassageRecord> parse_passages(
    const json& j, std::span<const readmodel::SpeedSample> samples) {
  if (!j.is_array()) {
    throw Error(Errc::BadInput, "passages file must be an array");
  }
  std::vector<simulator::PassageRecord> out;
  bool any_share = false;
  for (const json& p : j) {
    simulator::PassageRecord rec;
    rec.id = string_field(p, "id");
    if (p.contains("text") && p.at("text").is_string()) {
      rec.text = p.at("text").get<std::string>();
    }
    if (p.contains("oracle_score") && !p.at("oracle_score").is_null()) {
      rec.oracle_score = cogload::CogScore(p.at("oracle_score").get<int>());
    }
    if (p.contains("mu") && p.contains("sigma")) {
      rec.model = readmodel::LogNormalModel(number_field(p, "mu"),
                                            number_field(p, "sigma"));
    } else {
      std::vector<double> speeds;
      for (const auto& s : samples) {
        if (s.passage_id == rec.id) speeds.push_back(s.speed_wps);
      }
      if (speeds.empty()) {
        throw Error(Errc::BadInput,
                    "passage '" + rec.id + "' has no mu/sigma and no samples");
      }
      rec.model = readmodel::fit(speeds);
    }
    if (p.contains("share")) {
      rec.population_share = number_field(p, "share");
      any_share = true;
    }
    out.push_back(std::move(rec));
  }
  if (!any_share) {
    for (auto& rec : out) {
      rec.population_share = 1.0 / static_cast<double>(out.size());
    }
  }
  return out;
}

json passages_to_json(std::span<const simulator::PassageRecord> passages) {
  json out = json::array();
  for (const auto& p : passages) {
    json obj = {{"id", p.id},
                {"text", p.text},
                {"mu", p.model.mu()},
                {"sigma", p.model.sigma()},
                {"share", p.population_share}};
    obj["oracle_score"] =
        p.oracle_score ? json(p.oracle_score->value()) : json(nullptr);
    out.push_back(std::move(obj));
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::BadInput, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace cogstream::json_io
