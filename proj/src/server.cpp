#include "cogstream/server.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <list>
#include <map>
#include <mutex>
#include <thread>

#include "cogstream/error.hpp"
#include "session.hpp"

namespace cogstream::server {

std::string_view to_string(Estimator e) noexcept {
  switch (e) {
    case Estimator::Fog: return "fog";
    case Estimator::Tag: return "tag";
    case Estimator::Oracle: return "oracle";
  }
  return "fog";
}

Estimator estimator_from_string(std::string_view s) {
  if (s == "fog") return Estimator::Fog;
  if (s == "tag") return Estimator::Tag;
  if (s == "oracle") return Estimator::Oracle;
  throw Error(Errc::BadConfig, "unknown estimator '" + std::string(s) + "'");
}

void validate(const ServerConfig& config) {
  if (!(config.budget_wps > 0.0)) {
    throw Error(Errc::NonPositiveBudget, "budget must be positive");
  }
  if (!(config.alpha >= 0.0 && config.alpha <= 1.0)) {
    throw Error(Errc::AlphaOutOfRange, "alpha must lie in [0, 1]");
  }
  if (config.pause_interval_words == 0) {
    throw Error(Errc::BadConfig, "pause interval must be at least one word");
  }
  if (config.max_sessions == 0) throw Error(Errc::BadConfig, "max sessions must be positive");
  if (!(config.fixed_wps > 0.0)) throw Error(Errc::BadConfig, "fixed rate must be positive");
  pest::validate(config.pest);
}

struct Server::Impl {
  struct Conn {
    std::thread thread;
    std::atomic<bool> finished{false};
  };

  Impl(ServerConfig c, std::vector<simulator::PassageRecord> ps)
      : config(std::move(c)),
        registry(config.budget_wps, config.alpha, config.max_sessions) {
    for (auto& p : ps) {
      const std::string id = p.id;
      if (!passages.emplace(id, std::move(p)).second) {
        throw Error(Errc::BadInput, "duplicate passage id '" + id + "'");
      }
    }
  }

  void accept_loop() {
    while (!stopping) {
      pollfd p{listen_fd, POLLIN, 0};
      if (::poll(&p, 1, 50) <= 0) continue;
      const int fd = ::accept(listen_fd, nullptr, nullptr);
      if (fd < 0) continue;
      // Word events are tiny; Nagle would hold them back.
      const int one = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      std::lock_guard lock(conns_mu);
      conns.remove_if([](Conn& c) {
        if (!c.finished) return false;
        c.thread.join();
        return true;
      });
      Conn& c = conns.emplace_back();
      const std::string id = "s" + std::to_string(++counter);
      const std::uint64_t ordinal = counter - 1;
      c.thread = std::thread([this, &c, fd, id, ordinal] {
        detail::run_session(ctx, fd, id, ordinal);
        c.finished = true;
      });
    }
  }

  ServerConfig config;
  Registry registry;
  std::map<std::string, simulator::PassageRecord> passages;
  std::atomic<bool> stopping{false};
  detail::SessionContext ctx{config, registry, passages, stopping};
  int listen_fd = -1;
  std::uint16_t bound_port = 0;
  std::uint64_t counter = 0;
  std::thread acceptor;
  std::mutex conns_mu;
  std::list<Conn> conns;
};

Server::Server(ServerConfig config, std::vector<simulator::PassageRecord> passages) {
  validate(config);
  impl_ = std::make_unique<Impl>(std::move(config), std::move(passages));
}

Server::~Server() { stop(); }

void Server::start() {
  Impl& s = *impl_;
  if (s.listen_fd >= 0) return;
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw Error(Errc::BadConfig, "cannot create socket");
  const int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(s.config.port);
  if (::inet_pton(AF_INET, s.config.host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd);
    throw Error(Errc::BadConfig, "bad host address '" + s.config.host + "'");
  }
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
      ::listen(fd, 64) != 0) {
    ::close(fd);
    throw Error(Errc::BadConfig, "cannot listen on port " + std::to_string(s.config.port));
  }
  socklen_t len = sizeof addr;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  s.bound_port = ntohs(addr.sin_port);
  s.listen_fd = fd;
  s.acceptor = std::thread([&s] { s.accept_loop(); });
}

void Server::stop() {
  if (!impl_) return;
  Impl& s = *impl_;
  if (s.listen_fd < 0) return;
  s.stopping = true;
  if (s.acceptor.joinable()) s.acceptor.join();
  ::close(s.listen_fd);
  s.listen_fd = -1;
  std::lock_guard lock(s.conns_mu);
  for (auto& c : s.conns) c.thread.join();
  s.conns.clear();
}

std::uint16_t Server::port() const { return impl_->bound_port; }

Snapshot Server::snapshot() const { return impl_->registry.snapshot(); }

const ServerConfig& Server::config() const { return impl_->config; }

}  // namespace cogstream::server
