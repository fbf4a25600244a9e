#include "session.hpp"

#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cctype>
#include <cerrno>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <thread>

#include "cogstream/error.hpp"
#include "cogstream/protocol.hpp"

namespace cogstream::server::detail {

namespace {

using Clock = std::chrono::steady_clock;
using protocol::Event;

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

struct ShuttingDown {};
struct Gone {};

constexpr auto kSlice = std::chrono::milliseconds(100);
constexpr std::size_t kMaxLine = 1 << 20;

class Connection {
 public:
  Connection(int fd, const std::atomic<bool>& stopping) : fd_(fd), stopping_(stopping) {}
  ~Connection() { ::close(fd_); }

  // A complete line, or nullopt once `deadline` passes. Without a deadline it
  // waits indefinitely. Throws Gone on EOF and ShuttingDown on server stop.
  std::optional<std::string> read_line(std::optional<Clock::time_point> deadline) {
    for (;;) {
      if (auto line = take_line()) return line;
      if (stopping_) throw ShuttingDown{};
      auto wait = kSlice;
      if (deadline) {
        const auto left = *deadline - Clock::now();
        if (left <= Clock::duration::zero()) return std::nullopt;
        // poll() has millisecond resolution; finish short waits by sleeping.
        if (left < std::chrono::milliseconds(2)) {
          std::this_thread::sleep_until(*deadline);
          return std::nullopt;
        }
        wait = std::min(wait, std::chrono::duration_cast<std::chrono::milliseconds>(left));
      }
      pollfd p{fd_, POLLIN, 0};
      const int rc = ::poll(&p, 1, static_cast<int>(wait.count()));
      if (rc < 0 && errno != EINTR) throw Gone{};
      if (rc > 0) fill();
    }
  }

  void write(const std::string& data) {
    std::size_t off = 0;
    while (off < data.size()) {
      const ssize_t n = ::send(fd_, data.data() + off, data.size() - off, MSG_NOSIGNAL);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) throw Gone{};
      off += static_cast<std::size_t>(n);
    }
  }

 private:
  std::optional<std::string> take_line() {
    const auto nl = buffer_.find('\n');
    if (nl == std::string::npos) return std::nullopt;
    std::string line = buffer_.substr(0, nl);
    buffer_.erase(0, nl + 1);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  }

  void fill() {
    char chunk[4096];
    const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
    if (n < 0 && errno == EINTR) return;
    if (n <= 0) throw Gone{};
    buffer_.append(chunk, static_cast<std::size_t>(n));
    if (buffer_.size() > kMaxLine && buffer_.find('\n') == std::string::npos) {
      throw Error(Errc::BadInput, "line too long");
    }
  }

  int fd_;
  const std::atomic<bool>& stopping_;
  std::string buffer_;
};

class Transcript {
 public:
  Transcript(const std::optional<std::string>& dir, const std::string& id)
      : t0_(Clock::now()) {
    if (!dir) return;
    std::filesystem::create_directories(*dir);
    out_.open(std::filesystem::path(*dir) / (id + ".jsonl"));
  }

  void log(const char* dir, const nlohmann::json& msg) {
    if (!out_.is_open()) return;
    const double ms =
        std::chrono::duration<double, std::milli>(Clock::now() - t0_).count();
    out_ << nlohmann::json{{"t_ms", ms}, {"dir", dir}, {"msg", msg}}.dump() << '\n';
    out_.flush();
  }

 private:
  Clock::time_point t0_;
  std::ofstream out_;
};

class Session {
 public:
  Session(const SessionContext& ctx, int fd, std::string id, std::uint64_t ordinal)
      : ctx_(ctx),
        conn_(fd, ctx.stopping),
        id_(std::move(id)),
        ordinal_(ordinal),
        transcript_(ctx.config.transcript_dir, id_) {}

  void run() {
    try {
      try {
        serve();
      } catch (const Error& e) {
        send(protocol::ErrorEvent{std::string(e.name()) + ": " + e.what()});
      } catch (const ShuttingDown&) {
        send(protocol::ErrorEvent{"server shutting down"});
      }
    } catch (const Gone&) {
      transcript_.log("note", "client gone");
    } catch (const ShuttingDown&) {
    }
    if (joined_) ctx_.registry.leave(id_);
  }

 private:
  void send(const Event& e) {
    transcript_.log("out", protocol::to_json(e));
    conn_.write(protocol::encode(e));
  }

  void serve() {
    std::optional<std::string> first = conn_.read_line(std::nullopt);
    const protocol::ClientMessage msg = protocol::parse_client(*first);
    transcript_.log("in", protocol::to_json(msg));
    const auto* start = std::get_if<protocol::Start>(&msg);
    if (start == nullptr) throw Error(Errc::BadInput, "expected a start message");
    open(*start);
    stream();
  }

  void open(const protocol::Start& start) {
    const simulator::PassageRecord* passage = nullptr;
    if (start.passage_id) {
      auto it = ctx_.passages.find(*start.passage_id);
      if (it != ctx_.passages.end()) {
        passage = &it->second;
      } else if (!start.text) {
        throw Error(Errc::UnknownPassage, "unknown passage '" + *start.passage_id + "'");
      }
    }
    const std::string text = start.text ? *start.text : passage->text;
    if (protocol::display_words(text).empty()) {
      throw Error(Errc::EmptyText, "passage has no words");
    }
    mode_ = start.mode;
    words_.emplace(text, mode_ == Mode::Pest);

    double speed = 0.0;
    switch (mode_) {
      case Mode::Adaptive: {
        const CogScore score = initial_score(text, passage);
        ctx_.registry.join_adaptive(id_, score);
        joined_ = true;
        speed = ctx_.registry.rate(id_);
        if (ctx_.config.debug) pending_scores_.push_back(score);
        break;
      }
      case Mode::Pest: {
        pest::PestConfig cfg = ctx_.config.pest;
        if (ctx_.config.seed) cfg.rng_seed = *ctx_.config.seed + ordinal_;
        pest_ = pest::start(cfg);
        speed = pest_->current_speed;
        ctx_.registry.join_own_rate(id_, mode_, speed);
        joined_ = true;
        break;
      }
      case Mode::Fixed: {
        speed = start.wps.value_or(ctx_.config.fixed_wps);
        if (!(speed > 0.0)) throw Error(Errc::NegativeSpeed, "fixed rate must be positive");
        ctx_.registry.join_own_rate(id_, mode_, speed);
        joined_ = true;
        break;
      }
    }
    send(protocol::Hello{id_, mode_, speed});
    for (CogScore s : pending_scores_) send(protocol::Score{s.value()});
    pending_scores_.clear();
    send(protocol::Rate{speed});
    sent_rate_ = speed;
  }

  CogScore initial_score(const std::string& text,
                         const simulator::PassageRecord* passage) const {
    switch (ctx_.config.estimator) {
      case Estimator::Fog:
        return cogload::fog_to_score(
            cogload::gunning_fog(cogload::strip_tags(text).display).index);
      case Estimator::Tag:
        return CogScore(CogScore::kNeutral);
      case Estimator::Oracle:
        if (passage == nullptr || !passage->oracle_score) {
          throw Error(Errc::MissingScores, "passage has no oracle score");
        }
        return *passage->oracle_score;
    }
    return CogScore(CogScore::kNeutral);
  }

  double current_rate() const {
    return pest_ ? pest_->current_speed : ctx_.registry.rate(id_);
  }

  // Returns false once the session has ended.
  bool handle(const std::string& line) {
    const protocol::ClientMessage msg = protocol::parse_client(line);
    transcript_.log("in", protocol::to_json(msg));
    if (std::holds_alternative<protocol::Stop>(msg)) {
      send(protocol::Done{});
      return false;
    }
    if (const auto* f = std::get_if<protocol::Feedback>(&msg)) {
      if (!pest_ || !paused_) throw Error(Errc::NotPaused, "feedback outside a pause");
      if (f->choice == "same") {
        if (!pest_->same_allowed()) {
          throw Error(Errc::SameTooEarly, "same is not offered yet");
        }
        pest_ = pest::accept_same(*pest_);
        send(protocol::Done{pest_->final_speed});
        return false;
      }
      pest_ = pest::step(*pest_, pest::choice_from_string(f->choice));
      ctx_.registry.set_own_rate(id_, pest_->current_speed);
      send(protocol::Rate{pest_->current_speed});
      sent_rate_ = pest_->current_speed;
      paused_ = false;
      next_deadline_ = Clock::now();
      return true;
    }
    throw Error(Errc::BadInput, "unexpected start message");
  }

  void stream() {
    next_deadline_ = Clock::now();
    long long seq = 0;
    std::size_t since_pause = 0;
    std::vector<CogScore> scores;
    for (;;) {
      if (paused_) {
        if (!handle(*conn_.read_line(std::nullopt))) return;
        continue;
      }
      if (auto line = conn_.read_line(next_deadline_)) {
        if (!handle(*line)) return;
        continue;
      }

      scores.clear();
      const std::optional<std::string> word = words_->next(scores);
      for (CogScore s : scores) {
        if (mode_ == Mode::Adaptive && ctx_.config.estimator == Estimator::Tag) {
          ctx_.registry.rescore(id_, s);
        }
        if (ctx_.config.debug) send(protocol::Score{s.value()});
      }
      if (!word) {
        send(protocol::Done{});
        return;
      }
      const double rate = current_rate();
      if (rate != sent_rate_) {
        send(protocol::Rate{rate});
        sent_rate_ = rate;
      }
      send(protocol::Word{*word, seq++});
      next_deadline_ += std::chrono::duration_cast<Clock::duration>(
          std::chrono::duration<double>(1.0 / rate));

      if (pest_ && ++since_pause == ctx_.config.pause_interval_words) {
        since_pause = 0;
        std::vector<std::string> options = {"faster", "slower"};
        if (pest_->same_allowed()) options.emplace_back("same");
        send(protocol::Pause{options});
        paused_ = true;
      }
    }
  }

  const SessionContext& ctx_;
  Connection conn_;
  std::string id_;
  std::uint64_t ordinal_;
  Transcript transcript_;
  Mode mode_ = Mode::Adaptive;
  std::optional<WordSource> words_;
  std::optional<pest::PestState> pest_;
  std::vector<CogScore> pending_scores_;
  bool joined_ = false;
  bool paused_ = false;
  double sent_rate_ = 0.0;
  Clock::time_point next_deadline_;
};

}  // namespace

WordSource::WordSource(std::string raw, bool wrap) : raw_(std::move(raw)), wrap_(wrap) {}

std::optional<std::string> WordSource::next(std::vector<CogScore>& scores) {
  for (;;) {
    std::size_t b = 0;
    while (b < buffer_.size() && is_space(buffer_[b])) ++b;
    buffer_.erase(0, b);
    std::size_t e = 0;
    while (e < buffer_.size() && !is_space(buffer_[e])) ++e;
    if (e > 0 && (e < buffer_.size() || flushed_)) {
      std::string word = buffer_.substr(0, e);
      buffer_.erase(0, e);
      produced_ = true;
      return word;
    }
    if (pos_ < raw_.size()) {
      std::size_t end = pos_;
      while (end < raw_.size() && !is_space(raw_[end])) ++end;
      while (end < raw_.size() && is_space(raw_[end])) ++end;
      cogload::ScanResult r = cogload::scan_chunk(std::move(state_),
                                                  std::string_view(raw_).substr(pos_, end - pos_));
      pos_ = end;
      buffer_ += r.display;
      scores.insert(scores.end(), r.scores.begin(), r.scores.end());
      state_ = std::move(r.state);
      continue;
    }
    if (!flushed_) {
      buffer_ += cogload::finish_scan(state_);
      flushed_ = true;
      continue;
    }
    if (wrap_ && produced_) {
      pos_ = 0;
      state_ = {};
      buffer_.clear();
      flushed_ = false;
      continue;
    }
    return std::nullopt;
  }
}

void run_session(const SessionContext& ctx, int fd, const std::string& id,
                 std::uint64_t ordinal) {
  Session(ctx, fd, id, ordinal).run();
}

}  // namespace cogstream::server::detail
