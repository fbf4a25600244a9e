#pragma once

// TCP pacing server: one connection per session, newline-delimited JSON in
// both directions (see protocol.hpp).

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cogstream/pest.hpp"
#include "cogstream/registry.hpp"
#include "cogstream/simulator.hpp"

namespace cogstream::server {

// Source of an adaptive session's score. Tag starts at the neutral score and
// follows `<n>` tags as they stream past.
enum class Estimator { Fog, Tag, Oracle };

std::string_view to_string(Estimator e) noexcept;
Estimator estimator_from_string(std::string_view s);

struct ServerConfig {
  double budget_wps = 12.0;
  double alpha = 0.5;
  Estimator estimator = Estimator::Fog;
  std::size_t pause_interval_words = 30;
  std::string host = "127.0.0.1";
  // 0 binds an ephemeral port; Server::port() reports it.
  std::uint16_t port = 0;
  // Session n of a seeded server draws its PEST start speed with seed + n.
  std::optional<std::uint64_t> seed;
  // Emit score events.
  bool debug = false;
  std::size_t max_sessions = 64;
  // Fixed-mode rate when the start message carries no wps.
  double fixed_wps = 5.0;
  // One JSON-lines file per session when set.
  std::optional<std::string> transcript_dir;
  pest::PestConfig pest;
};

// Throws BadConfig / NonPositiveBudget / AlphaOutOfRange.
void validate(const ServerConfig& config);

class Server {
 public:
  Server(ServerConfig config, std::vector<simulator::PassageRecord> passages);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds, listens and starts accepting. Throws BadConfig if the socket
  // cannot be set up.
  void start();
  // Closes every session and joins all threads. Idempotent.
  void stop();

  std::uint16_t port() const;
  Snapshot snapshot() const;
  const ServerConfig& config() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace cogstream::server
