#pragma once

#include <atomic>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "svote/errors.hpp"
#include "svote/field.hpp"
#include "svote/random.hpp"
#include "svote/sharing.hpp"
#include "svote/transcript.hpp"
#include "svote/transport.hpp"

namespace svote {

struct CircuitStats {
  std::uint64_t mult_gates = 0;
  std::uint64_t rounds = 0;       // communication rounds of any kind
  std::uint64_t mult_rounds = 0;  // rounds that evaluated at least one multiplication gate
  std::uint64_t bytes_sent = 0;   // by this tallier, framing included

  friend CircuitStats operator-(const CircuitStats& a, const CircuitStats& b) {
    return {a.mult_gates - b.mult_gates, a.rounds - b.rounds, a.mult_rounds - b.mult_rounds,
            a.bytes_sent - b.bytes_sent};
  }
  friend bool operator==(const CircuitStats&, const CircuitStats&) = default;
};

// This tallier's Shamir share of a secret value, bound to one engine session.
class SharedValue {
 public:
  SharedValue() = default;
  u64 share() const noexcept { return share_; }
  std::uint32_t session() const noexcept { return session_; }

 private:
  friend class MpcEngine;
  SharedValue(u64 share, std::uint32_t session) : share_(share), session_(session) {}
  u64 share_ = 0;
  std::uint32_t session_ = 0;
};

struct TripleShare {
  u64 a, b, c;
};

// Trusted dealer of Beaver triples for simulation. Triple i is a pure function
// of (seed, i), so each tallier can fetch its own shares independently.
class TripleDealer {
 public:
  static constexpr std::uint64_t kBlock = 1024;

  TripleDealer(const PrimeModulus& m, std::size_t parties, std::size_t degree, std::uint64_t seed,
               std::uint64_t capacity = std::numeric_limits<std::uint64_t>::max())
      : modulus_(m), parties_(parties), degree_(degree), key_(derive_key(seed, "svote/triples")),
        capacity_(capacity) {}

  std::uint64_t capacity() const { return capacity_; }
  std::size_t parties() const { return parties_; }
  std::size_t degree() const { return degree_; }
  const PrimeModulus& modulus() const { return modulus_; }

  std::vector<TripleShare> block(std::size_t party, std::uint64_t index) const {
    const PrimeModulus& m = modulus_;
    RandomSource rng(derive_key(key_, "block/" + std::to_string(index)));
    const u64 x = party + 1;
    std::vector<TripleShare> out(kBlock);
    std::vector<u64> coeffs(degree_ + 1);
    auto share_of = [&](u64 secret) {
      coeffs[0] = secret;
      for (std::size_t i = 1; i <= degree_; ++i) coeffs[i] = rng.uniform(m);
      return eval_poly(coeffs, x, m);
    };
    for (auto& t : out) {
      const u64 a = rng.uniform(m);
      const u64 b = rng.uniform(m);
      t.a = share_of(a);
      t.b = share_of(b);
      t.c = share_of(m.mul(a, b));
    }
    return out;
  }

 private:
  PrimeModulus modulus_;
  std::size_t parties_;
  std::size_t degree_;
  Key32 key_;
  std::uint64_t capacity_;
};

class Layer;

// One tallier's side of the honest-majority computation over degree-t Shamir
// shares at points 1..D. Linear operations are local; multiplication uses a
// Beaver triple and one round. All parties must issue the same sequence of
// operations.
class MpcEngine {
 public:
  MpcEngine(SecureChannel& channel, const PrimeModulus& modulus, std::size_t threshold, const TripleDealer& dealer,
            RandomSource rng, Transcript* transcript = nullptr)
      : channel_(channel), modulus_(modulus), threshold_(threshold), dealer_(dealer), rng_(std::move(rng)),
        transcript_(transcript), session_(next_session()) {
    if (threshold_ >= channel.parties()) throw ConfigError("threshold must be below the tallier count");
    if (!(dealer.modulus() == modulus) || dealer.degree() != threshold || dealer.parties() != channel.parties()) {
      throw ConfigError("triple dealer does not match the engine parameters");
    }
    std::vector<u64> points(channel.parties());
    for (std::size_t i = 0; i < points.size(); ++i) points[i] = i + 1;
    lagrange_ = lagrange_at_zero(points, modulus_);
  }

  MpcEngine(const MpcEngine&) = delete;
  MpcEngine& operator=(const MpcEngine&) = delete;

  std::size_t party() const { return channel_.self(); }
  std::size_t parties() const { return channel_.parties(); }
  std::size_t threshold() const { return threshold_; }
  const PrimeModulus& modulus() const { return modulus_; }
  std::uint32_t session() const { return session_; }
  RandomSource& rng() { return rng_; }
  Transcript* transcript() { return transcript_; }

  CircuitStats stats() const {
    CircuitStats s = stats_;
    s.bytes_sent = channel_.bytes_sent();
    return s;
  }

  // --- local operations ---------------------------------------------------

  SharedValue constant(u64 v) const { return wrap(v % modulus_.value()); }
  SharedValue add(SharedValue x, SharedValue y) const { return wrap(modulus_.add(own(x), own(y))); }
  SharedValue sub(SharedValue x, SharedValue y) const { return wrap(modulus_.sub(own(x), own(y))); }
  SharedValue neg(SharedValue x) const { return wrap(modulus_.neg(own(x))); }
  SharedValue scale(SharedValue x, u64 c) const { return wrap(modulus_.mul(own(x), c % modulus_.value())); }
  SharedValue add_public(SharedValue x, u64 c) const { return wrap(modulus_.add(own(x), c % modulus_.value())); }

  SharedValue sum(std::span<const SharedValue> xs) const {
    u64 acc = 0;
    for (const SharedValue& x : xs) acc = modulus_.add(acc, own(x));
    return wrap(acc);
  }

  // --- interactive operations (each is one round unless stated) ------------

  inline SharedValue mul(SharedValue x, SharedValue y);
  inline std::vector<SharedValue> batch_mul(std::span<const SharedValue> xs, std::span<const SharedValue> ys);
  inline u64 open(SharedValue x, Disclosure purpose, const std::string& label = {});
  inline std::vector<u64> open_batch(std::span<const SharedValue> xs, Disclosure purpose,
                                     const std::string& label = {});
  // Party `owner` secret-shares `values`; other parties pass an empty span.
  inline std::vector<SharedValue> input(std::size_t owner, std::span<const u64> values, std::size_t count);
  // Every party deals its additive contributions; the result shares their sum.
  inline std::vector<SharedValue> reshare_sum(std::span<const u64> contributions);
  // Jointly sampled public coins (sum of every party's contribution).
  inline std::vector<u64> coins(std::size_t count);
  // Publishes the sum of every party's additive shares.
  inline std::vector<u64> reveal_additive(std::span<const u64> mine, Disclosure purpose,
                                          const std::string& label = {});

  inline SharedValue rand_shared();
  inline std::vector<SharedValue> rand_shared_batch(std::size_t count);

  // Internal sub-protocol values: Lagrange combination of all parties' shares.
  u64 reconstruct(std::span<const u64> shares_by_party) const {
    u64 acc = 0;
    for (std::size_t j = 0; j < shares_by_party.size(); ++j) acc = modulus_.add(acc, modulus_.mul(lagrange_[j], shares_by_party[j]));
    return acc;
  }

  SharedValue wrap(u64 share) const { return SharedValue(share, session_); }

  u64 own(const SharedValue& x) const {
    if (x.session_ != session_) throw SessionError("shared value belongs to another session");
    return x.share_;
  }

 private:
  friend class Layer;

  static std::uint32_t next_session() {
    static std::atomic<std::uint32_t> counter{1};
    return counter++;
  }

  std::vector<TripleShare> take_triples(std::size_t n) {
    if (n > dealer_.capacity() || triples_used_ > dealer_.capacity() - n) {
      throw PreprocessingError("Beaver triple supply exhausted after " + std::to_string(triples_used_) +
                               " multiplications");
    }
    std::vector<TripleShare> out;
    out.reserve(n);
    while (out.size() < n) {
      const std::uint64_t block = triples_used_ / TripleDealer::kBlock;
      if (cached_block_ != block || cache_.empty()) {
        cache_ = dealer_.block(party(), block);
        cached_block_ = block;
      }
      const std::size_t at = triples_used_ % TripleDealer::kBlock;
      const std::size_t take = std::min<std::size_t>(n - out.size(), TripleDealer::kBlock - at);
      out.insert(out.end(), cache_.begin() + at, cache_.begin() + at + take);
      triples_used_ += take;
    }
    return out;
  }

  SecureChannel& channel_;
  PrimeModulus modulus_;
  std::size_t threshold_;
  const TripleDealer& dealer_;
  RandomSource rng_;
  Transcript* transcript_;
  std::uint32_t session_;
  std::vector<u64> lagrange_;
  CircuitStats stats_;
  std::uint64_t triples_used_ = 0;
  std::uint64_t cached_block_ = std::numeric_limits<std::uint64_t>::max();
  std::vector<TripleShare> cache_;
};

// A single communication round assembled from several independent pieces:
// openings, Beaver multiplications, dealings and public sums. Register pieces,
// call run() once, then read results through the returned references.
class Layer {
 public:
  struct Ref {
    std::size_t offset = 0;
    std::size_t count = 0;
  };

  explicit Layer(MpcEngine& engine) : e_(engine), m_(engine.modulus()) {}

  // Opens values. With a purpose the opening is a logged disclosure; without
  // one the values must be uniformly masked sub-protocol values.
  Ref open(std::span<const SharedValue> xs, std::optional<Disclosure> purpose = std::nullopt,
           const std::string& label = {}) {
    Ref r{open_shares_.size(), xs.size()};
    for (const SharedValue& x : xs) open_shares_.push_back(e_.own(x));
    if (purpose) disclosures_.push_back({r, *purpose, label});
    else masked_ += xs.size();
    return r;
  }

  Ref mul(std::span<const SharedValue> xs, std::span<const SharedValue> ys) {
    if (xs.size() != ys.size()) throw ConfigError("multiplication operand lists differ in length");
    Ref r{triples_.size(), xs.size()};
    auto triples = e_.take_triples(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      de_.push_back(m_.sub(e_.own(xs[i]), triples[i].a));
      de_.push_back(m_.sub(e_.own(ys[i]), triples[i].b));
    }
    triples_.insert(triples_.end(), triples.begin(), triples.end());
    return r;
  }

  Ref deal(std::span<const u64> secrets) {
    Ref r{dealt_count_, secrets.size()};
    sections_.push_back({kEveryone, dealt_count_, secrets.size()});
    deal_secrets_.insert(deal_secrets_.end(), secrets.begin(), secrets.end());
    dealt_count_ += secrets.size();
    return r;
  }

  // Random contributions from every party, summed: shares of a uniform value.
  Ref deal_random(std::size_t count) {
    std::vector<u64> secrets(count);
    for (auto& s : secrets) s = e_.rng().uniform(m_);
    return deal(secrets);
  }

  Ref deal_from(std::size_t owner, std::span<const u64> secrets, std::size_t count) {
    if (owner >= e_.parties()) throw ConfigError("input owner out of range");
    if (owner == e_.party() && secrets.size() != count) throw ConfigError("owner must supply every input value");
    Ref r{dealt_count_, count};
    sections_.push_back({owner, dealt_count_, count});
    if (owner == e_.party()) deal_secrets_.insert(deal_secrets_.end(), secrets.begin(), secrets.end());
    dealt_count_ += count;
    return r;
  }

  Ref sum(std::span<const u64> values, std::optional<Disclosure> purpose = std::nullopt,
          const std::string& label = {}) {
    Ref r{sum_values_.size(), values.size()};
    sum_values_.insert(sum_values_.end(), values.begin(), values.end());
    if (purpose) sum_disclosures_.push_back({r, *purpose, label});
    return r;
  }

  bool empty() const { return open_shares_.empty() && triples_.empty() && dealt_count_ == 0 && sum_values_.empty(); }

  void run() {
    if (ran_) throw ConfigError("layer already executed");
    ran_ = true;
    const std::size_t n = e_.parties();
    const std::size_t me = e_.party();
    const unsigned width = m_.byte_width();

    // Shares this party deals, indexed [secret][receiver].
    std::vector<std::vector<u64>> dealt_out;
    {
      std::vector<u64> coeffs(e_.threshold() + 1);
      std::size_t next_secret = 0;
      for (const Section& s : sections_) {
        if (s.owner != kEveryone && s.owner != me) continue;
        for (std::size_t k = 0; k < s.count; ++k) {
          coeffs[0] = deal_secrets_[next_secret++];
          for (std::size_t c = 1; c < coeffs.size(); ++c) coeffs[c] = e_.rng().uniform(m_);
          std::vector<u64> per(n);
          for (std::size_t j = 0; j < n; ++j) per[j] = eval_poly(coeffs, j + 1, m_);
          dealt_out.push_back(std::move(per));
        }
      }
    }

    std::vector<Bytes> payloads(n);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == me) continue;
      Bytes& out = payloads[j];
      out.reserve((open_shares_.size() + de_.size() + dealt_out.size() + sum_values_.size()) * width);
      wire::put_elements(out, open_shares_, width);
      wire::put_elements(out, de_, width);
      std::vector<u64> to_j(dealt_out.size());
      for (std::size_t k = 0; k < dealt_out.size(); ++k) to_j[k] = dealt_out[k][j];
      wire::put_elements(out, to_j, width);
      wire::put_elements(out, sum_values_, width);
    }

    const std::uint64_t bytes_before = e_.channel_.bytes_sent();
    std::vector<Bytes> incoming = e_.channel_.exchange(FrameKind::MpcRound, payloads);

    // Per-party element vectors in a common layout.
    auto expected_from = [&](std::size_t j) {
      std::size_t dealt = 0;
      for (const Section& s : sections_) {
        if (s.owner == kEveryone || s.owner == j) dealt += s.count;
      }
      return open_shares_.size() + de_.size() + dealt + sum_values_.size();
    };
    std::vector<std::vector<u64>> from(n);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == me) continue;
      from[j] = wire::get_elements(incoming[j], m_);
      if (from[j].size() != expected_from(j)) {
        throw ChannelError("round payload from tallier " + std::to_string(j + 1) + " has unexpected length");
      }
    }

    std::vector<u64> column(n);
    // Openings.
    opened_.resize(open_shares_.size());
    for (std::size_t k = 0; k < open_shares_.size(); ++k) {
      for (std::size_t j = 0; j < n; ++j) column[j] = j == me ? open_shares_[k] : from[j][k];
      opened_[k] = e_.reconstruct(column);
    }
    // Beaver multiplications: z = c + d*b + e*a + d*e.
    const std::size_t de_base = open_shares_.size();
    products_.resize(triples_.size());
    for (std::size_t g = 0; g < triples_.size(); ++g) {
      for (std::size_t j = 0; j < n; ++j) column[j] = j == me ? de_[2 * g] : from[j][de_base + 2 * g];
      const u64 d = e_.reconstruct(column);
      for (std::size_t j = 0; j < n; ++j) column[j] = j == me ? de_[2 * g + 1] : from[j][de_base + 2 * g + 1];
      const u64 ee = e_.reconstruct(column);
      const TripleShare& t = triples_[g];
      u64 z = m_.add(t.c, m_.add(m_.mul(d, t.b), m_.mul(ee, t.a)));
      z = m_.add(z, m_.mul(d, ee));
      products_[g] = e_.wrap(z);
    }
    // Dealings: sum (or take) what each dealer sent us.
    const std::size_t deal_base = de_base + de_.size();
    dealt_.assign(dealt_count_, e_.wrap(0));
    {
      std::vector<std::size_t> cursor(n, deal_base);
      std::size_t mine = 0;
      for (const Section& s : sections_) {
        for (std::size_t k = 0; k < s.count; ++k) {
          u64 acc = 0;
          for (std::size_t j = 0; j < n; ++j) {
            if (s.owner != kEveryone && s.owner != j) continue;
            acc = m_.add(acc, j == me ? dealt_out[mine][me] : from[j][cursor[j]++]);
          }
          if (s.owner == kEveryone || s.owner == me) ++mine;
          dealt_[s.offset + k] = e_.wrap(acc);
        }
      }
    }
    // Public sums.
    sums_.resize(sum_values_.size());
    for (std::size_t k = 0; k < sum_values_.size(); ++k) {
      u64 acc = sum_values_[k];
      for (std::size_t j = 0; j < n; ++j) {
        if (j != me) acc = m_.add(acc, from[j][from[j].size() - sum_values_.size() + k]);
      }
      sums_[k] = acc;
    }

    CircuitStats& st = e_.stats_;
    ++st.rounds;
    st.mult_gates += triples_.size();
    if (!triples_.empty()) ++st.mult_rounds;
    const std::uint32_t round = e_.channel_.round();
    if (Transcript* tr = e_.transcript_) {
      tr->round(round, open_shares_.size() - masked_, masked_, triples_.size(), dealt_count_, sum_values_.size(),
                e_.channel_.bytes_sent() - bytes_before);
      for (const auto& d : disclosures_) {
        for (std::size_t k = 0; k < d.ref.count; ++k) tr->disclose(round, d.purpose, d.label, opened_[d.ref.offset + k]);
      }
      for (const auto& d : sum_disclosures_) {
        for (std::size_t k = 0; k < d.ref.count; ++k) tr->disclose(round, d.purpose, d.label, sums_[d.ref.offset + k]);
      }
    }
  }

  std::span<const u64> opened(Ref r) const { return std::span(opened_).subspan(r.offset, r.count); }
  std::span<const SharedValue> products(Ref r) const { return std::span(products_).subspan(r.offset, r.count); }
  std::span<const SharedValue> dealt(Ref r) const { return std::span(dealt_).subspan(r.offset, r.count); }
  std::span<const u64> sums(Ref r) const { return std::span(sums_).subspan(r.offset, r.count); }

 private:
  static constexpr std::size_t kEveryone = std::numeric_limits<std::size_t>::max();
  struct Section {
    std::size_t owner;
    std::size_t offset;
    std::size_t count;
  };
  struct Logged {
    Ref ref;
    Disclosure purpose;
    std::string label;
  };

  MpcEngine& e_;
  const PrimeModulus& m_;
  bool ran_ = false;
  std::vector<u64> open_shares_;
  std::size_t masked_ = 0;
  std::vector<Logged> disclosures_;
  std::vector<u64> de_;
  std::vector<TripleShare> triples_;
  std::vector<Section> sections_;
  std::vector<u64> deal_secrets_;
  std::size_t dealt_count_ = 0;
  std::vector<u64> sum_values_;
  std::vector<Logged> sum_disclosures_;

  std::vector<u64> opened_;
  std::vector<SharedValue> products_;
  std::vector<SharedValue> dealt_;
  std::vector<u64> sums_;
};

inline SharedValue MpcEngine::mul(SharedValue x, SharedValue y) {
  return batch_mul(std::span(&x, 1), std::span(&y, 1)).front();
}

inline std::vector<SharedValue> MpcEngine::batch_mul(std::span<const SharedValue> xs,
                                                     std::span<const SharedValue> ys) {
  if (xs.empty() && ys.empty()) return {};
  Layer layer(*this);
  auto r = layer.mul(xs, ys);
  layer.run();
  auto p = layer.products(r);
  return {p.begin(), p.end()};
}

inline u64 MpcEngine::open(SharedValue x, Disclosure purpose, const std::string& label) {
  return open_batch(std::span(&x, 1), purpose, label).front();
}

inline std::vector<u64> MpcEngine::open_batch(std::span<const SharedValue> xs, Disclosure purpose,
                                              const std::string& label) {
  if (xs.empty()) return {};
  Layer layer(*this);
  auto r = layer.open(xs, purpose, label);
  layer.run();
  auto v = layer.opened(r);
  return {v.begin(), v.end()};
}

inline std::vector<SharedValue> MpcEngine::input(std::size_t owner, std::span<const u64> values, std::size_t count) {
  if (count == 0) return {};
  std::vector<u64> reduced;
  for (u64 v : values) reduced.push_back(v % modulus_.value());
  Layer layer(*this);
  auto r = layer.deal_from(owner, reduced, count);
  layer.run();
  auto v = layer.dealt(r);
  return {v.begin(), v.end()};
}

inline std::vector<SharedValue> MpcEngine::reshare_sum(std::span<const u64> contributions) {
  if (contributions.empty()) return {};
  Layer layer(*this);
  auto r = layer.deal(contributions);
  layer.run();
  auto v = layer.dealt(r);
  return {v.begin(), v.end()};
}

inline std::vector<u64> MpcEngine::coins(std::size_t count) {
  if (count == 0) return {};
  std::vector<u64> mine(count);
  for (auto& c : mine) c = rng_.uniform(modulus_);
  Layer layer(*this);
  auto r = layer.sum(mine);
  layer.run();
  auto v = layer.sums(r);
  return {v.begin(), v.end()};
}

inline std::vector<u64> MpcEngine::reveal_additive(std::span<const u64> mine, Disclosure purpose,
                                                   const std::string& label) {
  if (mine.empty()) return {};
  Layer layer(*this);
  auto r = layer.sum(mine, purpose, label);
  layer.run();
  auto v = layer.sums(r);
  return {v.begin(), v.end()};
}

inline SharedValue MpcEngine::rand_shared() { return rand_shared_batch(1).front(); }

inline std::vector<SharedValue> MpcEngine::rand_shared_batch(std::size_t count) {
  if (count == 0) return {};
  Layer layer(*this);
  auto r = layer.deal_random(count);
  layer.run();
  auto v = layer.dealt(r);
  return {v.begin(), v.end()};
}

}  // namespace svote
