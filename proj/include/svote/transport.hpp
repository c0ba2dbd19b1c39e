#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "svote/errors.hpp"
#include "svote/wire.hpp"

namespace svote {

// Round-based byte transport between the D talliers. exchange() sends
// outgoing[j] to every peer j and blocks until one message from every peer
// has arrived (the round barrier). Messages on a link are FIFO.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual std::size_t self() const = 0;
  virtual std::size_t parties() const = 0;
  virtual std::vector<Bytes> exchange(std::vector<Bytes> outgoing) = 0;
};

// In-process transport for simulate mode. Supports fault injection: frame
// tampering and silencing a crashed tallier.
class LocalHub {
 public:
  using Tamper = std::function<void(std::size_t from, std::size_t to, Bytes& frame)>;

  explicit LocalHub(std::size_t parties, std::chrono::milliseconds timeout = std::chrono::seconds(60))
      : state_(std::make_shared<State>(parties, timeout)) {}

  std::unique_ptr<Transport> endpoint(std::size_t party) {
    if (party >= state_->parties) throw ConfigError("hub endpoint out of range");
    return std::make_unique<Endpoint>(state_, party);
  }

  void abort() {
    std::lock_guard lock(state_->mu);
    state_->aborted = true;
    state_->cv.notify_all();
  }

  void set_tamper(Tamper tamper) {
    std::lock_guard lock(state_->mu);
    state_->tamper = std::move(tamper);
  }

  void silence(std::size_t party) {
    std::lock_guard lock(state_->mu);
    state_->silenced.at(party) = true;
  }

 private:
  struct State {
    State(std::size_t n, std::chrono::milliseconds t)
        : parties(n), timeout(t), mailboxes(n, std::vector<std::deque<Bytes>>(n)), silenced(n, false) {}
    std::size_t parties;
    std::chrono::milliseconds timeout;
    std::mutex mu;
    std::condition_variable cv;
    std::vector<std::vector<std::deque<Bytes>>> mailboxes;  // [to][from]
    std::vector<bool> silenced;
    bool aborted = false;
    Tamper tamper;
  };

  class Endpoint final : public Transport {
   public:
    Endpoint(std::shared_ptr<State> s, std::size_t self) : s_(std::move(s)), self_(self) {}
    std::size_t self() const override { return self_; }
    std::size_t parties() const override { return s_->parties; }

    std::vector<Bytes> exchange(std::vector<Bytes> outgoing) override {
      State& s = *s_;
      std::unique_lock lock(s.mu);
      if (s.aborted) throw AbortError("session aborted");
      if (!s.silenced[self_]) {
        for (std::size_t j = 0; j < s.parties; ++j) {
          if (j == self_) continue;
          if (s.tamper) s.tamper(self_, j, outgoing[j]);
          s.mailboxes[j][self_].push_back(std::move(outgoing[j]));
        }
        s.cv.notify_all();
      }
      const auto deadline = std::chrono::steady_clock::now() + s.timeout;
      auto ready = [&] {
        if (s.aborted) return true;
        for (std::size_t j = 0; j < s.parties; ++j) {
          if (j != self_ && s.mailboxes[self_][j].empty()) return false;
        }
        return true;
      };
      if (!s.cv.wait_until(lock, deadline, ready)) {
        for (std::size_t j = 0; j < s.parties; ++j) {
          if (j != self_ && s.mailboxes[self_][j].empty()) {
            throw AbortError("tallier " + std::to_string(j + 1) + " did not respond");
          }
        }
      }
      if (s.aborted) throw AbortError("session aborted");
      std::vector<Bytes> incoming(s.parties);
      for (std::size_t j = 0; j < s.parties; ++j) {
        if (j == self_) continue;
        incoming[j] = std::move(s.mailboxes[self_][j].front());
        s.mailboxes[self_][j].pop_front();
      }
      return incoming;
    }

   private:
    std::shared_ptr<State> s_;
    std::size_t self_;
  };

  std::shared_ptr<State> state_;
};

// Authenticated framing on top of a Transport: every round frame carries the
// session id, sender and round number and a per-link MAC. Counts bytes sent.
class SecureChannel {
 public:
  SecureChannel(Transport& transport, const KeyRing& keys, const SessionId& session)
      : transport_(transport), session_(session) {
    const std::size_t n = transport.parties();
    send_keys_.resize(n);
    recv_keys_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == transport.self()) continue;
      send_keys_[j] = keys.tallier_link(transport.self(), j);
      recv_keys_[j] = keys.tallier_link(j, transport.self());
    }
  }

  std::size_t self() const { return transport_.self(); }
  std::size_t parties() const { return transport_.parties(); }
  std::uint64_t bytes_sent() const { return bytes_sent_; }
  std::uint32_t round() const { return round_; }

  std::vector<Bytes> exchange(FrameKind kind, const std::vector<Bytes>& payloads) {
    const std::size_t n = parties();
    ++round_;
    FrameHeader h;
    h.kind = kind;
    h.session = session_;
    h.sender = static_cast<std::uint16_t>(self());
    h.round = round_;
    std::vector<Bytes> frames(n);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == self()) continue;
      frames[j] = encode_frame(h, payloads[j], send_keys_[j]);
      bytes_sent_ += frames[j].size();
    }
    std::vector<Bytes> incoming = transport_.exchange(std::move(frames));
    std::vector<Bytes> out(n);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == self()) continue;
      Frame f = decode_frame(incoming[j], recv_keys_[j]);
      if (f.header.kind != kind || f.header.session != session_ || f.header.sender != j ||
          f.header.round != round_) {
        throw ChannelError("unexpected frame from tallier " + std::to_string(j + 1) + " in round " +
                           std::to_string(round_));
      }
      out[j] = std::move(f.payload);
    }
    return out;
  }

 private:
  Transport& transport_;
  SessionId session_;
  std::vector<Key32> send_keys_;
  std::vector<Key32> recv_keys_;
  std::uint64_t bytes_sent_ = 0;
  std::uint32_t round_ = 0;
};

}  // namespace svote
