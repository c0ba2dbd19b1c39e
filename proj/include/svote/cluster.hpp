#pragma once

#include <chrono>
#include <exception>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>
#include <type_traits>
#include <vector>

#include "svote/engine.hpp"
#include "svote/tcp.hpp"
#include "svote/transcript.hpp"
#include "svote/transport.hpp"

namespace svote {

enum class Mode { Simulate, Network };

inline const char* mode_name(Mode m) { return m == Mode::Simulate ? "simulate" : "network"; }

inline Mode parse_mode(const std::string& s) {
  if (s == "simulate") return Mode::Simulate;
  if (s == "network") return Mode::Network;
  throw ConfigError("unknown mode '" + s + "' (expected simulate or network)");
}

struct ClusterOptions {
  Mode mode = Mode::Simulate;
  std::size_t parties = 3;
  PrimeModulus modulus = mersenne31();
  std::size_t threshold = 1;
  std::uint64_t seed = 0;
  std::chrono::milliseconds timeout = std::chrono::seconds(60);
  std::uint64_t triple_capacity = std::numeric_limits<std::uint64_t>::max();
  // Simulate mode only: called once the hub exists, before any party starts.
  std::function<void(LocalHub&)> on_hub;
};

// Everything one tallier thread works with.
struct PartyContext {
  std::size_t party;
  SecureChannel& channel;
  MpcEngine& engine;
  Transcript& transcript;
};

template <class T>
struct PartyResult {
  T value;
  Transcript transcript;
  CircuitStats stats;
};

// Runs fn(PartyContext&) once per tallier, each on its own thread, over an
// in-process hub or a localhost TCP mesh. If any party throws, the session is
// torn down and the first error raised is rethrown.
template <class Fn>
auto run_cluster(const ClusterOptions& opt, Fn fn) {
  using T = std::invoke_result_t<Fn&, PartyContext&>;
  static_assert(!std::is_void_v<T>, "party function must return a value");
  const std::size_t n = opt.parties;
  if (n < 2) throw ConfigError("a cluster needs at least 2 parties");

  const KeyRing keys = KeyRing::from_seed(opt.seed);
  const SessionId session = session_from_seed(opt.seed);
  const TripleDealer dealer(opt.modulus, n, opt.threshold, opt.seed, opt.triple_capacity);

  std::unique_ptr<LocalHub> hub;
  std::vector<std::uint16_t> ports;
  std::vector<tcp::Socket> listeners;
  if (opt.mode == Mode::Simulate) {
    hub = std::make_unique<LocalHub>(n, opt.timeout);
    if (opt.on_hub) opt.on_hub(*hub);
  } else {
    ports.resize(n);
    for (std::size_t i = 0; i < n; ++i) listeners.push_back(tcp::listen_local(ports[i]));
  }

  std::vector<std::optional<PartyResult<T>>> results(n);
  std::mutex mu;
  std::exception_ptr first_error;

  auto body = [&](std::size_t i) {
    try {
      std::unique_ptr<Transport> transport;
      if (hub) transport = hub->endpoint(i);
      else transport = std::make_unique<TcpMesh>(i, ports, std::move(listeners[i]), opt.timeout);
      SecureChannel channel(*transport, keys, session);
      Transcript transcript(i);
      MpcEngine engine(channel, opt.modulus, opt.threshold, dealer,
                       RandomSource::from_seed(opt.seed, "svote/tallier/" + std::to_string(i)), &transcript);
      PartyContext ctx{i, channel, engine, transcript};
      T value = fn(ctx);
      const CircuitStats stats = engine.stats();
      results[i].emplace(PartyResult<T>{std::move(value), std::move(transcript), stats});
    } catch (...) {
      {
        std::lock_guard lock(mu);
        if (!first_error) first_error = std::current_exception();
      }
      if (hub) hub->abort();
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(n);
  for (std::size_t i = 0; i < n; ++i) threads.emplace_back(body, i);
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);

  std::vector<PartyResult<T>> out;
  out.reserve(n);
  for (auto& r : results) out.push_back(std::move(*r));
  return out;
}

}  // namespace svote
