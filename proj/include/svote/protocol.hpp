#pragma once

#include <algorithm>
#include <chrono>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "svote/cluster.hpp"
#include "svote/comparison.hpp"
#include "svote/rules.hpp"
#include "svote/sharing.hpp"
#include "svote/validation.hpp"
#include "svote/wire.hpp"

namespace svote {

// --- voter messages ---------------------------------------------------------
//
// VoterShare payload:    u16 tag_len | tag | u64 nonce | M field elements
// Confirmation payload:  u16 tag_len | tag | u64 nonce | u8 status
// Voter frames carry sender 0xffff and round 0; confirmations carry the
// tallier index as sender. Both are MACed with the voter's link key.

enum class ConfirmStatus : std::uint8_t { Accepted = 0, Duplicate = 1 };

struct VoterMessage {
  std::string voter_tag;
  std::size_t tallier = 0;  // 0-based
  std::uint64_t nonce = 0;
  std::vector<u64> entries;
};

namespace proto_detail {

inline void put_tag(Bytes& out, const std::string& tag) {
  if (tag.size() > 0xffff) throw ConfigError("voter tag too long");
  wire::put_u16(out, static_cast<std::uint16_t>(tag.size()));
  out.insert(out.end(), tag.begin(), tag.end());
}

inline std::string get_tag(std::span<const std::uint8_t> in, std::size_t& at) {
  if (in.size() < at + 2) throw ChannelError("truncated voter tag");
  const std::size_t len = wire::get_be(in, at, 2);
  at += 2;
  if (in.size() < at + len) throw ChannelError("truncated voter tag");
  std::string tag(in.begin() + at, in.begin() + at + len);
  at += len;
  return tag;
}

inline std::uint64_t get_u64(std::span<const std::uint8_t> in, std::size_t& at) {
  if (in.size() < at + 8) throw ChannelError("truncated nonce");
  const std::uint64_t v = wire::get_be(in, at, 8);
  at += 8;
  return v;
}

inline FrameHeader voter_header(FrameKind kind, const SessionId& session, std::uint16_t sender) {
  FrameHeader h;
  h.kind = kind;
  h.session = session;
  h.sender = sender;
  h.round = 0;
  return h;
}

}  // namespace proto_detail

inline Bytes encode_voter_share(const VoterMessage& msg, const PrimeModulus& m, const SessionId& session,
                                const KeyRing& keys) {
  Bytes payload;
  proto_detail::put_tag(payload, msg.voter_tag);
  wire::put_u64(payload, msg.nonce);
  wire::put_elements(payload, msg.entries, m.byte_width());
  return encode_frame(proto_detail::voter_header(FrameKind::VoterShare, session, kVoterSender), payload,
                      keys.voter_link(msg.voter_tag, msg.tallier));
}

// Tallier-side inbox for one tallier: verifies voter frames, keeps the first
// accepted share per voter and answers with a MACed confirmation.
class BallotBox {
 public:
  BallotBox(std::size_t tallier, const ElectionConfig& cfg, const KeyRing& keys, const SessionId& session)
      : tallier_(tallier), modulus_(cfg.modulus), width_(cfg.candidate_count()), keys_(keys), session_(session) {}

  std::size_t tallier() const { return tallier_; }

  // Returns the confirmation frame, or nothing when the frame is rejected.
  std::optional<Bytes> handle(std::span<const std::uint8_t> frame) {
    std::lock_guard lock(mu_);
    try {
      const Frame f = decode_frame_unverified(frame);
      if (f.header.kind != FrameKind::VoterShare || f.header.session != session_ || f.header.sender != kVoterSender) {
        ++rejected_frames_;
        return std::nullopt;
      }
      std::size_t at = 0;
      const std::string tag = proto_detail::get_tag(f.payload, at);
      if (!verify_frame_mac(frame, keys_.voter_link(tag, tallier_))) {
        ++rejected_frames_;
        return std::nullopt;
      }
      const std::uint64_t nonce = proto_detail::get_u64(f.payload, at);
      std::vector<u64> entries = wire::get_elements(std::span(f.payload).subspan(at), modulus_);
      if (entries.size() != width_) {
        ++rejected_frames_;
        return std::nullopt;
      }
      ConfirmStatus status = ConfirmStatus::Accepted;
      auto it = accepted_.find(tag);
      if (it == accepted_.end()) {
        accepted_.emplace(tag, Stored{nonce, std::move(entries)});
      } else if (it->second.nonce != nonce) {
        // Only the first ballot counts; a later one is acknowledged and dropped.
        status = ConfirmStatus::Duplicate;
        ++duplicates_;
      }
      return confirmation(tag, nonce, status);
    } catch (const ChannelError&) {
      ++rejected_frames_;
      return std::nullopt;
    }
  }

  std::vector<std::string> tags() const {
    std::lock_guard lock(mu_);
    std::vector<std::string> out;
    for (const auto& [tag, _] : accepted_) out.push_back(tag);
    return out;
  }

  // This tallier's additive share w_{n,d} of the voter's ballot.
  std::vector<u64> share_of(const std::string& tag) const {
    std::lock_guard lock(mu_);
    return accepted_.at(tag).entries;
  }

  std::size_t duplicates() const {
    std::lock_guard lock(mu_);
    return duplicates_;
  }
  std::size_t rejected_frames() const {
    std::lock_guard lock(mu_);
    return rejected_frames_;
  }

 private:
  struct Stored {
    std::uint64_t nonce;
    std::vector<u64> entries;
  };

  Bytes confirmation(const std::string& tag, std::uint64_t nonce, ConfirmStatus status) const {
    Bytes payload;
    proto_detail::put_tag(payload, tag);
    wire::put_u64(payload, nonce);
    payload.push_back(static_cast<std::uint8_t>(status));
    return encode_frame(
        proto_detail::voter_header(FrameKind::Confirmation, session_, static_cast<std::uint16_t>(tallier_)), payload,
        keys_.voter_link(tag, tallier_));
  }

  std::size_t tallier_;
  PrimeModulus modulus_;
  std::size_t width_;
  KeyRing keys_;
  SessionId session_;
  mutable std::mutex mu_;
  std::map<std::string, Stored> accepted_;
  std::size_t duplicates_ = 0;
  std::size_t rejected_frames_ = 0;
};

// How a voter reaches the talliers. deliver() returns the reply frame, or
// nothing if no reply arrived.
class VoterChannel {
 public:
  virtual ~VoterChannel() = default;
  virtual std::optional<Bytes> deliver(std::size_t tallier, const Bytes& frame) = 0;
};

// Direct calls into the ballot boxes, with an optional fault hook that may
// alter a frame in flight or drop it (return false).
class SimulatedVoterChannel final : public VoterChannel {
 public:
  using Fault = std::function<bool(std::size_t tallier, Bytes& frame)>;

  explicit SimulatedVoterChannel(std::vector<BallotBox*> boxes, Fault fault = {})
      : boxes_(std::move(boxes)), fault_(std::move(fault)) {}

  std::optional<Bytes> deliver(std::size_t tallier, const Bytes& frame) override {
    Bytes copy = frame;
    if (fault_ && !fault_(tallier, copy)) return std::nullopt;
    return boxes_.at(tallier)->handle(copy);
  }

 private:
  std::vector<BallotBox*> boxes_;
  Fault fault_;
};

class TcpVoterChannel final : public VoterChannel {
 public:
  TcpVoterChannel(std::vector<std::uint16_t> ports, std::chrono::milliseconds timeout)
      : ports_(std::move(ports)), timeout_(timeout) {}

  std::optional<Bytes> deliver(std::size_t tallier, const Bytes& frame) override {
    return tcp_request(ports_.at(tallier), frame, timeout_);
  }

 private:
  std::vector<std::uint16_t> ports_;
  std::chrono::milliseconds timeout_;
};

struct SubmitReceipt {
  std::size_t confirmations = 0;
  std::size_t resends = 0;
  std::size_t duplicates = 0;  // talliers that already held an earlier ballot
};

// Shares the ballot additively and sends one share to each tallier, resending
// until that tallier confirms. Honest clients check is_legal first; this
// function sends whatever it is given.
inline SubmitReceipt voter_submit(const ElectionConfig& cfg, const Ballot& ballot, RandomSource& rng,
                                  VoterChannel& channel, const KeyRing& keys, const SessionId& session,
                                  std::size_t max_attempts = 4) {
  const auto field = ballot_to_field(ballot, cfg.modulus);
  const auto shares = additive_share(field, cfg.talliers, rng, ballot.voter_tag);
  const std::uint64_t nonce = rng.next_u64();
  SubmitReceipt receipt;
  for (std::size_t d = 0; d < cfg.talliers; ++d) {
    VoterMessage msg{ballot.voter_tag, d, nonce, {}};
    for (const FieldElement& x : shares[d].entries) msg.entries.push_back(x.value());
    const Bytes frame = encode_voter_share(msg, cfg.modulus, session, keys);
    const Key32 key = keys.voter_link(ballot.voter_tag, d);
    bool confirmed = false;
    for (std::size_t attempt = 0; attempt < max_attempts && !confirmed; ++attempt) {
      if (attempt > 0) ++receipt.resends;
      const auto reply = channel.deliver(d, frame);
      if (!reply) continue;
      Frame f;
      try {
        f = decode_frame_unverified(*reply);
      } catch (const ChannelError&) {
        continue;
      }
      if (!verify_frame_mac(*reply, key)) {
        throw ChannelError("confirmation from tallier " + std::to_string(d + 1) + " failed verification");
      }
      std::size_t at = 0;
      if (f.header.kind != FrameKind::Confirmation || f.header.sender != d || f.header.session != session ||
          proto_detail::get_tag(f.payload, at) != ballot.voter_tag || proto_detail::get_u64(f.payload, at) != nonce ||
          f.payload.size() != at + 1) {
        throw ChannelError("confirmation from tallier " + std::to_string(d + 1) + " does not match the submission");
      }
      if (f.payload[at] == static_cast<std::uint8_t>(ConfirmStatus::Duplicate)) ++receipt.duplicates;
      confirmed = true;
    }
    if (!confirmed) {
      throw SubmitTimeout("tallier " + std::to_string(d + 1) + " did not confirm voter '" + ballot.voter_tag +
                          "' after " + std::to_string(max_attempts) + " attempts");
    }
    ++receipt.confirmations;
  }
  return receipt;
}

// --- tallier side -------------------------------------------------------------

template <class Fn>
auto in_phase(const char* phase, Fn&& fn) {
  try {
    return fn();
  } catch (Error& e) {
    e.set_phase(phase);
    throw;
  }
}

namespace proto_detail {

inline Bytes encode_tag_set(const std::vector<std::string>& tags) {
  Bytes out;
  wire::put_u32(out, static_cast<std::uint32_t>(tags.size()));
  for (const auto& t : tags) put_tag(out, t);
  return out;
}

inline std::vector<std::string> decode_tag_set(std::span<const std::uint8_t> in) {
  if (in.size() < 4) throw ChannelError("truncated voter set");
  const std::size_t count = wire::get_be(in, 0, 4);
  std::size_t at = 4;
  std::vector<std::string> tags;
  for (std::size_t i = 0; i < count; ++i) tags.push_back(get_tag(in, at));
  if (at != in.size()) throw ChannelError("trailing bytes in voter set");
  if (!std::is_sorted(tags.begin(), tags.end())) throw ChannelError("voter set not sorted");
  return tags;
}

}  // namespace proto_detail

// Talliers exchange the tags they accepted and keep the intersection, then
// confirm they all hold the same set.
inline std::vector<std::string> reconcile_voters(SecureChannel& channel, std::vector<std::string> mine) {
  std::sort(mine.begin(), mine.end());
  const std::size_t n = channel.parties();
  const Bytes encoded = proto_detail::encode_tag_set(mine);
  auto incoming = channel.exchange(FrameKind::VoterSet, std::vector<Bytes>(n, encoded));
  std::vector<std::string> common = mine;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == channel.self()) continue;
    const auto theirs = proto_detail::decode_tag_set(incoming[j]);
    std::vector<std::string> next;
    std::set_intersection(common.begin(), common.end(), theirs.begin(), theirs.end(), std::back_inserter(next));
    common = std::move(next);
  }
  const Bytes agreed = proto_detail::encode_tag_set(common);
  Bytes digest(32);
  crypto_generichash(digest.data(), digest.size(), agreed.data(), agreed.size(), nullptr, 0);
  auto digests = channel.exchange(FrameKind::VoterSet, std::vector<Bytes>(n, digest));
  for (std::size_t j = 0; j < n; ++j) {
    if (j != channel.self() && digests[j] != digest) {
      throw AbortError("voter sets diverge after reconciliation (tallier " + std::to_string(j + 1) + ")");
    }
  }
  return common;
}

// Entrywise sum of this tallier's shares over the given voters.
inline std::vector<u64> aggregate_shares(const BallotBox& box, std::span<const std::string> voters,
                                         const PrimeModulus& m, std::size_t width) {
  std::vector<u64> acc(width, 0);
  for (const auto& tag : voters) {
    const auto share = box.share_of(tag);
    for (std::size_t i = 0; i < width; ++i) acc[i] = m.add(acc[i], share[i]);
  }
  return acc;
}

// Each tallier Shamir-shares its additive aggregate; summing what arrives gives
// degree-t shares of the total. One round, nothing opened.
inline std::vector<SharedValue> reshare_to_threshold(MpcEngine& e, std::span<const u64> additive) {
  return e.reshare_sum(additive);
}

inline std::size_t selection_comparisons(std::size_t m, std::size_t k) { return k * (2 * m - k - 1) / 2; }

// K passes of secure argmax. Each comparison bit is opened; a strict
// comparison keeps the incumbent, so ties go to the lower index.
inline std::vector<std::size_t> select_top_k(MpcEngine& e, std::span<const SharedValue> w, std::size_t k) {
  const std::size_t m = w.size();
  if (k > m) throw ConfigError("cannot select more winners than candidates");
  const auto kits = prepare_comparison_kits(e, selection_comparisons(m, k));
  std::size_t next_kit = 0;
  std::vector<std::size_t> remaining(m);
  for (std::size_t i = 0; i < m; ++i) remaining[i] = i;
  std::vector<std::size_t> winners;
  for (std::size_t pass = 0; pass < k; ++pass) {
    std::size_t best_pos = 0;
    for (std::size_t pos = 1; pos < remaining.size(); ++pos) {
      const std::size_t best = remaining[best_pos];
      const std::size_t cand = remaining[pos];
      const auto bit = less_than_with(e, std::span(kits).subspan(next_kit++, 1), std::span(&w[best], 1),
                                      std::span(&w[cand], 1));
      const std::string label = "w" + std::to_string(best) + "<w" + std::to_string(cand);
      if (e.open(bit.front(), Disclosure::ComparisonBit, label) == 1) best_pos = pos;
    }
    winners.push_back(remaining[best_pos]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best_pos));
  }
  return winners;
}

struct VoterReport {
  std::string voter_tag;
  bool accepted = true;
  std::string reason;
  std::vector<u64> evidence;  // the recovered ballot, rejected voters only
};

struct TallierOutcome {
  std::vector<std::size_t> winners;
  std::vector<VoterReport> voters;
};

// One tallier's part of the election once the submission window has closed.
inline TallierOutcome run_tallier(PartyContext& ctx, const ElectionConfig& cfg, const BallotBox& box) {
  MpcEngine& e = ctx.engine;
  const PrimeModulus& m = cfg.modulus;
  const std::size_t width = cfg.candidate_count();
  TallierOutcome out;

  ctx.transcript.note("phase reconcile");
  const auto voters = in_phase("reconcile", [&] { return reconcile_voters(ctx.channel, box.tags()); });
  ctx.transcript.note("voters " + std::to_string(voters.size()));
  if (voters.empty()) {
    EmptyElection err("no ballots were received by every tallier");
    err.set_phase("reconcile");
    throw err;
  }

  ctx.transcript.note("phase validate");
  const auto verdicts = in_phase("validate", [&] {
    std::vector<u64> flat;
    flat.reserve(voters.size() * width);
    for (const auto& tag : voters) {
      const auto share = box.share_of(tag);
      flat.insert(flat.end(), share.begin(), share.end());
    }
    const auto shared = e.reshare_sum(flat);
    std::vector<std::vector<SharedValue>> ballots(voters.size());
    for (std::size_t v = 0; v < voters.size(); ++v) {
      ballots[v].assign(shared.begin() + v * width, shared.begin() + (v + 1) * width);
    }
    return validate_ballots(e, cfg, ballots, voters);
  });

  std::vector<std::string> accepted;
  std::vector<std::size_t> rejected;
  for (std::size_t v = 0; v < voters.size(); ++v) {
    out.voters.push_back({voters[v], verdicts[v].accepted, verdicts[v].reason, {}});
    if (verdicts[v].accepted) accepted.push_back(voters[v]);
    else rejected.push_back(v);
  }

  if (!rejected.empty()) {
    ctx.transcript.note("phase evidence");
    in_phase("evidence", [&] {
      // Pooling every tallier's additive share recovers the ballot; all
      // talliers must take part.
      Layer layer(e);
      std::vector<Layer::Ref> refs;
      for (std::size_t v : rejected) refs.push_back(layer.sum(box.share_of(voters[v]), Disclosure::Evidence, voters[v]));
      layer.run();
      for (std::size_t i = 0; i < rejected.size(); ++i) {
        auto s = layer.sums(refs[i]);
        out.voters[rejected[i]].evidence.assign(s.begin(), s.end());
      }
      return 0;
    });
  }

  if (accepted.empty()) {
    EmptyElection err("every ballot was rejected");
    err.set_phase("aggregate");
    throw err;
  }

  ctx.transcript.note("phase aggregate");
  const auto w = in_phase("aggregate", [&] {
    const auto local = aggregate_shares(box, accepted, m, width);
    return reshare_to_threshold(e, local);
  });

  ctx.transcript.note("phase select");
  out.winners = in_phase("select", [&] { return select_top_k(e, w, cfg.winners); });
  if (Transcript* tr = e.transcript()) {
    for (std::size_t idx : out.winners) tr->disclose(ctx.channel.round(), Disclosure::Output, "winner", idx);
  }
  return out;
}

// --- whole elections ----------------------------------------------------------

struct RunOptions {
  Mode mode = Mode::Simulate;
  std::optional<std::uint64_t> seed;  // defaults to the config's seed
  std::chrono::milliseconds timeout = std::chrono::seconds(60);
  std::size_t max_attempts = 4;
  SimulatedVoterChannel::Fault voter_fault;      // simulate mode only
  std::function<void(LocalHub&)> on_hub;         // simulate mode only
  std::uint64_t triple_capacity = std::numeric_limits<std::uint64_t>::max();
};

struct ElectionResult {
  std::vector<std::size_t> winners;
  std::vector<std::string> winner_names;
  std::vector<VoterReport> voters;  // reconciled voters, sorted by tag
  std::size_t ballots_submitted = 0;
  std::size_t confirmations = 0;
  std::size_t resends = 0;
  std::size_t duplicates = 0;
  std::vector<std::string> submit_failures;
  std::vector<CircuitStats> stats;        // per tallier
  std::vector<std::string> transcripts;   // per tallier
  std::vector<std::vector<DisclosureEvent>> disclosures;
  AuditReport audit;                      // over every tallier's disclosures

  std::size_t rejected_count() const {
    return static_cast<std::size_t>(std::count_if(voters.begin(), voters.end(), [](const auto& v) { return !v.accepted; }));
  }
  std::vector<std::string> accepted_tags() const {
    std::vector<std::string> out;
    for (const auto& v : voters) {
      if (v.accepted) out.push_back(v.voter_tag);
    }
    return out;
  }
};

inline ElectionResult run_election(const ElectionConfig& cfg, std::span<const Ballot> ballots,
                                   const RunOptions& opt = {}) {
  cfg.validate();
  if (ballots.size() > cfg.voters) {
    throw ConfigError("received " + std::to_string(ballots.size()) + " ballots but N = " + std::to_string(cfg.voters));
  }
  for (const Ballot& b : ballots) {
    if (b.scores.size() != cfg.candidate_count()) {
      throw ConfigError("ballot from '" + b.voter_tag + "' has the wrong number of scores");
    }
  }
  const std::uint64_t seed = opt.seed.value_or(cfg.seed);
  const KeyRing keys = KeyRing::from_seed(seed);
  const SessionId session = session_from_seed(seed);
  const std::size_t d = cfg.talliers;

  std::vector<std::unique_ptr<BallotBox>> boxes;
  for (std::size_t i = 0; i < d; ++i) boxes.push_back(std::make_unique<BallotBox>(i, cfg, keys, session));
  std::vector<BallotBox*> box_ptrs;
  for (auto& b : boxes) box_ptrs.push_back(b.get());

  ElectionResult result;
  {
    std::vector<std::unique_ptr<TcpRequestServer>> servers;
    std::unique_ptr<VoterChannel> channel;
    if (opt.mode == Mode::Simulate) {
      channel = std::make_unique<SimulatedVoterChannel>(box_ptrs, opt.voter_fault);
    } else {
      std::vector<std::uint16_t> ports;
      for (BallotBox* b : box_ptrs) {
        servers.push_back(std::make_unique<TcpRequestServer>([b](const Bytes& f) { return b->handle(f); }));
        ports.push_back(servers.back()->port());
      }
      channel = std::make_unique<TcpVoterChannel>(ports, std::chrono::milliseconds(2000));
    }
    in_phase("submit", [&] {
      for (std::size_t i = 0; i < ballots.size(); ++i) {
        RandomSource rng = RandomSource::from_seed(seed, "svote/voter/" + std::to_string(i) + "/" + ballots[i].voter_tag);
        try {
          const SubmitReceipt r = voter_submit(cfg, ballots[i], rng, *channel, keys, session, opt.max_attempts);
          result.confirmations += r.confirmations;
          result.resends += r.resends;
          result.duplicates += r.duplicates;
        } catch (const Error& err) {
          // The voter learns of the failure; talliers that did store a share
          // drop it at reconciliation.
          result.submit_failures.push_back(ballots[i].voter_tag + ": " + err.what());
        }
      }
      return 0;
    });
    result.ballots_submitted = ballots.size();
  }

  ClusterOptions copt;
  copt.mode = opt.mode;
  copt.parties = d;
  copt.modulus = cfg.modulus;
  copt.threshold = cfg.threshold;
  copt.seed = seed;
  copt.timeout = opt.timeout;
  copt.triple_capacity = opt.triple_capacity;
  copt.on_hub = opt.on_hub;
  auto parties = run_cluster(copt, [&](PartyContext& ctx) { return run_tallier(ctx, cfg, *box_ptrs[ctx.party]); });

  // Every tallier reaches the same public outcome; report tallier 1's.
  const TallierOutcome& first = parties.front().value;
  for (const auto& p : parties) {
    if (p.value.winners != first.winners) throw AbortError("talliers disagree on the winners");
  }
  result.winners = first.winners;
  for (std::size_t idx : result.winners) result.winner_names.push_back(cfg.candidates[idx]);
  result.voters = first.voters;
  std::set<std::string> rejected;
  for (const auto& v : result.voters) {
    if (!v.accepted) rejected.insert(v.voter_tag);
  }
  std::vector<DisclosureEvent> all;
  for (auto& p : parties) {
    result.stats.push_back(p.stats);
    result.transcripts.push_back(p.transcript.text());
    result.disclosures.push_back(p.transcript.disclosures());
    all.insert(all.end(), p.transcript.disclosures().begin(), p.transcript.disclosures().end());
  }
  result.audit = audit_disclosures(all, rejected);
  return result;
}

// Human-readable summary; contains no timings, so it is reproducible.
inline std::string format_result(const ElectionConfig& cfg, const ElectionResult& r) {
  std::ostringstream out;
  out << "rule: " << rule_name(cfg.rule) << "\n";
  out << "talliers: " << cfg.talliers << " (threshold " << cfg.threshold << ")\n";
  out << "ballots: " << r.ballots_submitted << " submitted, " << r.voters.size() << " reconciled, "
      << r.rejected_count() << " rejected\n";
  for (const auto& f : r.submit_failures) out << "unconfirmed " << f << "\n";
  out << "winners:";
  for (std::size_t i = 0; i < r.winners.size(); ++i) out << ' ' << r.winner_names[i] << " (index " << r.winners[i] << ')';
  out << "\n";
  for (const auto& v : r.voters) {
    if (v.accepted) continue;
    out << "rejected " << v.voter_tag << ": " << v.reason << "; recovered ballot ";
    for (std::size_t i = 0; i < v.evidence.size(); ++i) out << (i ? "," : "") << v.evidence[i];
    out << "\n";
  }
  if (!r.stats.empty()) {
    const CircuitStats& s = r.stats.front();
    out << "cost: rounds=" << s.rounds << " mult_rounds=" << s.mult_rounds << " mult_gates=" << s.mult_gates
        << " bytes_per_tallier=" << s.bytes_sent << "\n";
  }
  out << "audit: " << (r.audit.ok ? "ok" : "VIOLATION") << " (comparison_bits=" << r.audit.comparison_bits
      << " verdicts=" << r.audit.verdicts << " evidence=" << r.audit.evidence << " outputs=" << r.audit.outputs
      << ")\n";
  for (const auto& v : r.audit.violations) out << "  " << v << "\n";
  return out.str();
}

}  // namespace svote
