#include "cogstream/protocol.hpp"

#include <cctype>

#include "cogstream/cogload.hpp"
#include "cogstream/error.hpp"

namespace cogstream::protocol {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(Errc::BadInput, what); }

json parse_object(std::string_view line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) bad("message is not a JSON object");
  if (!j.contains("type") || !j["type"].is_string()) bad("message has no type");
  return j;
}

std::string string_field(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) {
    bad(std::string("missing string field '") + key + "'");
  }
  return j[key].get<std::string>();
}

double number_field(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) {
    bad(std::string("missing numeric field '") + key + "'");
  }
  return j[key].get<double>();
}

template <class... F>
struct overloaded : F... {
  using F::operator()...;
};

}  // namespace

std::string_view to_string(Mode m) noexcept {
  switch (m) {
    case Mode::Adaptive: return "adaptive";
    case Mode::Pest: return "pest";
    case Mode::Fixed: return "fixed";
  }
  return "adaptive";
}

Mode mode_from_string(std::string_view s) {
  if (s == "adaptive") return Mode::Adaptive;
  if (s == "pest") return Mode::Pest;
  if (s == "fixed") return Mode::Fixed;
  bad("unknown mode '" + std::string(s) + "'");
}

ClientMessage parse_client(std::string_view line) {
  const json j = parse_object(line);
  const std::string type = j["type"];
  if (type == "start") {
    Start s;
    s.mode = mode_from_string(string_field(j, "mode"));
    if (j.contains("passage_id") && !j["passage_id"].is_null()) {
      s.passage_id = string_field(j, "passage_id");
    }
    if (j.contains("text") && !j["text"].is_null()) s.text = string_field(j, "text");
    if (j.contains("wps") && !j["wps"].is_null()) s.wps = number_field(j, "wps");
    if (!s.passage_id && !s.text) bad("start needs passage_id or text");
    return s;
  }
  if (type == "feedback") {
    Feedback f{string_field(j, "choice")};
    if (f.choice != "faster" && f.choice != "slower" && f.choice != "same") {
      bad("unknown choice '" + f.choice + "'");
    }
    return f;
  }
  if (type == "stop") return Stop{};
  bad("unknown message type '" + type + "'");
}

json to_json(const ClientMessage& m) {
  return std::visit(
      overloaded{
          [](const Start& s) {
            json j{{"type", "start"}, {"mode", to_string(s.mode)}};
            if (s.passage_id) j["passage_id"] = *s.passage_id;
            if (s.text) j["text"] = *s.text;
            if (s.wps) j["wps"] = *s.wps;
            return j;
          },
          [](const Feedback& f) { return json{{"type", "feedback"}, {"choice", f.choice}}; },
          [](const Stop&) { return json{{"type", "stop"}}; },
      },
      m);
}

json to_json(const Event& e) {
  return std::visit(
      overloaded{
          [](const Hello& h) {
            return json{{"type", "hello"},
                        {"session", h.session},
                        {"mode", to_string(h.mode)},
                        {"speed", h.speed}};
          },
          [](const Word& w) { return json{{"type", "word"}, {"text", w.text}, {"seq", w.seq}}; },
          [](const Rate& r) { return json{{"type", "rate"}, {"wps", r.wps}}; },
          [](const Pause& p) { return json{{"type", "pause"}, {"options", p.options}}; },
          [](const Score& s) { return json{{"type", "score"}, {"value", s.value}}; },
          [](const Done& d) {
            json j{{"type", "done"}};
            if (d.final_wps) j["final_wps"] = *d.final_wps;
            return j;
          },
          [](const ErrorEvent& e) { return json{{"type", "error"}, {"message", e.message}}; },
      },
      e);
}

Event parse_event(std::string_view line) {
  const json j = parse_object(line);
  const std::string type = j["type"];
  if (type == "hello") {
    return Hello{string_field(j, "session"), mode_from_string(string_field(j, "mode")),
                 number_field(j, "speed")};
  }
  if (type == "word") {
    if (!j.contains("seq") || !j["seq"].is_number_integer()) bad("word needs seq");
    return Word{string_field(j, "text"), j["seq"].get<long long>()};
  }
  if (type == "rate") return Rate{number_field(j, "wps")};
  if (type == "pause") {
    if (!j.contains("options") || !j["options"].is_array()) bad("pause needs options");
    Pause p;
    for (const auto& o : j["options"]) {
      if (!o.is_string()) bad("pause options must be strings");
      p.options.push_back(o.get<std::string>());
    }
    return p;
  }
  if (type == "score") {
    if (!j.contains("value") || !j["value"].is_number_integer()) bad("score needs value");
    return Score{j["value"].get<int>()};
  }
  if (type == "done") {
    Done d;
    if (j.contains("final_wps") && !j["final_wps"].is_null()) {
      d.final_wps = number_field(j, "final_wps");
    }
    return d;
  }
  if (type == "error") return ErrorEvent{string_field(j, "message")};
  bad("unknown event type '" + type + "'");
}

std::string encode(const Event& e) { return to_json(e).dump() + "\n"; }

std::string encode(const ClientMessage& m) { return to_json(m).dump() + "\n"; }

std::vector<std::string> display_words(std::string_view text) {
  const std::string shown = cogload::strip_tags(text).display;
  std::vector<std::string> words;
  std::string cur;
  for (char c : shown) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) words.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

}  // namespace cogstream::protocol
