#pragma once

// Newline-delimited JSON messages exchanged with streaming clients.

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace cogstream::protocol {

enum class Mode { Adaptive, Pest, Fixed };

std::string_view to_string(Mode m) noexcept;
Mode mode_from_string(std::string_view s);

// Client -> server.
struct Start {
  Mode mode = Mode::Adaptive;
  std::optional<std::string> passage_id;
  std::optional<std::string> text;
  // Fixed mode only; the server default applies when absent.
  std::optional<double> wps;
};
struct Feedback {
  std::string choice;  // faster | slower | same
};
struct Stop {};

using ClientMessage = std::variant<Start, Feedback, Stop>;

// Throws Error{BadInput} on malformed JSON, unknown types or missing fields.
ClientMessage parse_client(std::string_view line);
nlohmann::json to_json(const ClientMessage& m);

// Server -> client.
struct Hello {
  std::string session;
  Mode mode = Mode::Adaptive;
  double speed = 0.0;
};
struct Word {
  std::string text;
  long long seq = 0;
};
struct Rate {
  double wps = 0.0;
};
struct Pause {
  std::vector<std::string> options;
};
struct Score {
  int value = 0;
};
struct Done {
  std::optional<double> final_wps;
};
struct ErrorEvent {
  std::string message;
};

using Event = std::variant<Hello, Word, Rate, Pause, Score, Done, ErrorEvent>;

nlohmann::json to_json(const Event& e);
// Throws Error{BadInput}.
Event parse_event(std::string_view line);

// Compact JSON plus the trailing newline.
std::string encode(const Event& e);
std::string encode(const ClientMessage& m);

// Words a passage streams as: the tag-stripped text split on whitespace.
std::vector<std::string> display_words(std::string_view text);

}  // namespace cogstream::protocol
