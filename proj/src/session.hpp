#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cogstream/server.hpp"

namespace cogstream::server::detail {

// Display words of a tagged text, pulled through the incremental tag scanner
// one whitespace-delimited chunk at a time.
class WordSource {
 public:
  WordSource(std::string raw, bool wrap);

  // Next word, or nullopt at the end of a non-wrapping text. Scores from tags
  // scanned on the way are appended to `scores`.
  std::optional<std::string> next(std::vector<CogScore>& scores);

 private:
  std::string raw_;
  std::size_t pos_ = 0;
  cogload::TagScanState state_;
  std::string buffer_;
  bool flushed_ = false;
  bool wrap_;
  bool produced_ = false;
};

struct SessionContext {
  const ServerConfig& config;
  Registry& registry;
  const std::map<std::string, simulator::PassageRecord>& passages;
  const std::atomic<bool>& stopping;
};

// Serves one connection until done, error, disconnect or shutdown. Closes fd.
void run_session(const SessionContext& ctx, int fd, const std::string& id,
                 std::uint64_t ordinal);

}  // namespace cogstream::server::detail
