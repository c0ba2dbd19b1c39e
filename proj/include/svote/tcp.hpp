#pragma once

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <functional>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include "svote/transport.hpp"

namespace svote {

namespace tcp {

using Clock = std::chrono::steady_clock;

class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  Socket(Socket&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Socket& operator=(Socket&& o) noexcept {
    if (this != &o) {
      reset();
      fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
  }
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket() { reset(); }

  int fd() const { return fd_; }
  bool valid() const { return fd_ >= 0; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

inline int remaining_ms(Clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
  return left < 0 ? 0 : static_cast<int>(left);
}

inline void set_nonblocking(int fd) { ::fcntl(fd, F_SETFL, ::fcntl(fd, F_GETFL, 0) | O_NONBLOCK); }

inline void set_nodelay(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

// Listens on 127.0.0.1 at an ephemeral port.
inline Socket listen_local(std::uint16_t& port) {
  Socket s(::socket(AF_INET, SOCK_STREAM, 0));
  if (!s.valid()) throw ChannelError(std::string("socket: ") + std::strerror(errno));
  int one = 1;
  ::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  if (::bind(s.fd(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(s.fd(), 64) != 0) {
    throw ChannelError(std::string("bind/listen: ") + std::strerror(errno));
  }
  socklen_t len = sizeof addr;
  ::getsockname(s.fd(), reinterpret_cast<sockaddr*>(&addr), &len);
  port = ntohs(addr.sin_port);
  return s;
}

inline Socket connect_local(std::uint16_t port, Clock::time_point deadline) {
  for (;;) {
    Socket s(::socket(AF_INET, SOCK_STREAM, 0));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(port);
    if (::connect(s.fd(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0) {
      set_nodelay(s.fd());
      return s;
    }
    if (Clock::now() >= deadline) throw AbortError("cannot connect to port " + std::to_string(port));
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
}

inline Socket accept_one(int listener, Clock::time_point deadline) {
  pollfd p{listener, POLLIN, 0};
  if (::poll(&p, 1, remaining_ms(deadline)) <= 0) throw AbortError("timed out waiting for a peer to connect");
  Socket s(::accept(listener, nullptr, nullptr));
  if (!s.valid()) throw ChannelError(std::string("accept: ") + std::strerror(errno));
  set_nodelay(s.fd());
  return s;
}

// Blocking helpers for the request/response path (fd in blocking mode).
inline bool wait_io(int fd, short events, Clock::time_point deadline) {
  pollfd p{fd, events, 0};
  return ::poll(&p, 1, remaining_ms(deadline)) > 0;
}

inline void send_all(int fd, std::span<const std::uint8_t> data, Clock::time_point deadline) {
  std::size_t off = 0;
  while (off < data.size()) {
    if (!wait_io(fd, POLLOUT, deadline)) throw AbortError("send timed out");
    const ssize_t n = ::send(fd, data.data() + off, data.size() - off, MSG_NOSIGNAL);
    if (n <= 0) throw AbortError("connection lost while sending");
    off += static_cast<std::size_t>(n);
  }
}

inline void recv_exact(int fd, std::uint8_t* out, std::size_t len, Clock::time_point deadline) {
  std::size_t off = 0;
  while (off < len) {
    if (!wait_io(fd, POLLIN, deadline)) throw AbortError("receive timed out");
    const ssize_t n = ::recv(fd, out + off, len - off, 0);
    if (n <= 0) throw AbortError("connection closed by peer");
    off += static_cast<std::size_t>(n);
  }
}

// Reads one length-prefixed frame, returning it with its prefix.
inline Bytes recv_frame(int fd, Clock::time_point deadline) {
  Bytes frame(kLengthBytes);
  recv_exact(fd, frame.data(), kLengthBytes, deadline);
  const std::size_t body = wire::get_be(frame, 0, 4);
  if (body > kMaxFrameBytes) throw ChannelError("oversized frame");
  frame.resize(kLengthBytes + body);
  recv_exact(fd, frame.data() + kLengthBytes, body, deadline);
  return frame;
}

}  // namespace tcp

// Full mesh of TCP links between the talliers. Party i dials every j < i and
// accepts every j > i; each link starts with a 2-byte hello naming the dialer.
class TcpMesh final : public Transport {
 public:
  TcpMesh(std::size_t self, const std::vector<std::uint16_t>& ports, tcp::Socket listener,
          std::chrono::milliseconds timeout)
      : self_(self), timeout_(timeout), links_(ports.size()) {
    const auto deadline = tcp::Clock::now() + timeout_;
    for (std::size_t j = 0; j < self; ++j) {
      links_[j] = tcp::connect_local(ports[j], deadline);
      Bytes hello;
      wire::put_u16(hello, static_cast<std::uint16_t>(self));
      tcp::send_all(links_[j].fd(), hello, deadline);
    }
    for (std::size_t k = self + 1; k < ports.size(); ++k) {
      tcp::Socket s = tcp::accept_one(listener.fd(), deadline);
      std::uint8_t hello[2];
      tcp::recv_exact(s.fd(), hello, 2, deadline);
      const std::size_t peer = (std::size_t{hello[0]} << 8) | hello[1];
      if (peer <= self || peer >= ports.size() || links_[peer].valid()) throw ChannelError("bad mesh hello");
      links_[peer] = std::move(s);
    }
    for (std::size_t j = 0; j < links_.size(); ++j) {
      if (j != self_) tcp::set_nonblocking(links_[j].fd());
    }
  }

  std::size_t self() const override { return self_; }
  std::size_t parties() const override { return links_.size(); }

  std::vector<Bytes> exchange(std::vector<Bytes> outgoing) override {
    const std::size_t n = links_.size();
    struct Progress {
      std::size_t sent = 0;
      Bytes in;
      std::size_t got = 0;
      bool header_done = false;
      bool done = false;
    };
    std::vector<Progress> st(n);
    for (std::size_t j = 0; j < n; ++j) {
      st[j].in.resize(kLengthBytes);
      if (j == self_) st[j].done = true;
    }
    const auto deadline = tcp::Clock::now() + timeout_;
    for (;;) {
      std::vector<pollfd> fds;
      std::vector<std::size_t> who;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == self_) continue;
        short ev = 0;
        if (st[j].sent < outgoing[j].size()) ev |= POLLOUT;
        if (!st[j].done) ev |= POLLIN;
        if (ev) {
          fds.push_back({links_[j].fd(), ev, 0});
          who.push_back(j);
        }
      }
      if (fds.empty()) break;
      const int ready = ::poll(fds.data(), fds.size(), tcp::remaining_ms(deadline));
      if (ready <= 0) {
        for (std::size_t j = 0; j < n; ++j) {
          if (!st[j].done) throw AbortError("tallier " + std::to_string(j + 1) + " did not respond");
        }
        throw AbortError("round send timed out");
      }
      for (std::size_t k = 0; k < fds.size(); ++k) {
        const std::size_t j = who[k];
        Progress& p = st[j];
        if (fds[k].revents & POLLOUT) {
          const ssize_t w = ::send(fds[k].fd, outgoing[j].data() + p.sent, outgoing[j].size() - p.sent, MSG_NOSIGNAL);
          if (w < 0 && errno != EAGAIN && errno != EWOULDBLOCK) {
            throw AbortError("link to tallier " + std::to_string(j + 1) + " failed");
          }
          if (w > 0) p.sent += static_cast<std::size_t>(w);
        }
        if (fds[k].revents & (POLLIN | POLLHUP | POLLERR)) {
          if (p.done) continue;
          const ssize_t r = ::recv(fds[k].fd, p.in.data() + p.got, p.in.size() - p.got, 0);
          if (r == 0) throw AbortError("tallier " + std::to_string(j + 1) + " disconnected");
          if (r < 0) {
            if (errno == EAGAIN || errno == EWOULDBLOCK) continue;
            throw AbortError("link to tallier " + std::to_string(j + 1) + " failed");
          }
          p.got += static_cast<std::size_t>(r);
          if (p.got == p.in.size()) {
            if (!p.header_done) {
              const std::size_t body = wire::get_be(p.in, 0, 4);
              if (body > kMaxFrameBytes) throw ChannelError("oversized frame");
              p.header_done = true;
              p.in.resize(kLengthBytes + body);
              if (body == 0) p.done = true;
            } else {
              p.done = true;
            }
          }
        }
      }
    }
    std::vector<Bytes> incoming(n);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != self_) incoming[j] = std::move(st[j].in);
    }
    return incoming;
  }

 private:
  std::size_t self_;
  std::chrono::milliseconds timeout_;
  std::vector<tcp::Socket> links_;
};

// Accepts one request frame per connection and answers with the handler's
// reply (or closes without reply). Used by talliers to receive ballot shares.
class TcpRequestServer {
 public:
  using Handler = std::function<std::optional<Bytes>(const Bytes&)>;

  explicit TcpRequestServer(Handler handler) : handler_(std::move(handler)) {
    listener_ = tcp::listen_local(port_);
    thread_ = std::thread([this] { serve(); });
  }
  ~TcpRequestServer() {
    stop_ = true;
    if (thread_.joinable()) thread_.join();
  }
  TcpRequestServer(const TcpRequestServer&) = delete;
  TcpRequestServer& operator=(const TcpRequestServer&) = delete;

  std::uint16_t port() const { return port_; }

 private:
  void serve() {
    while (!stop_) {
      pollfd p{listener_.fd(), POLLIN, 0};
      if (::poll(&p, 1, 20) <= 0) continue;
      tcp::Socket conn(::accept(listener_.fd(), nullptr, nullptr));
      if (!conn.valid()) continue;
      try {
        const auto deadline = tcp::Clock::now() + std::chrono::seconds(5);
        Bytes request = tcp::recv_frame(conn.fd(), deadline);
        if (auto reply = handler_(request)) tcp::send_all(conn.fd(), *reply, deadline);
      } catch (const Error&) {
        // malformed or slow client: drop the connection
      }
    }
  }

  Handler handler_;
  std::uint16_t port_ = 0;
  tcp::Socket listener_;
  std::atomic<bool> stop_{false};
  std::thread thread_;
};

inline std::optional<Bytes> tcp_request(std::uint16_t port, const Bytes& frame, std::chrono::milliseconds timeout) {
  try {
    const auto deadline = tcp::Clock::now() + timeout;
    tcp::Socket s = tcp::connect_local(port, deadline);
    tcp::send_all(s.fd(), frame, deadline);
    return tcp::recv_frame(s.fd(), deadline);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace svote
