#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "svote/engine.hpp"

// Shared randomness and the constant-round comparison.
//
// less_than(x, y) for x, y in [0, B], 2B < p:
//   a = 2(x - y) mod p is even iff x >= y, so [x < y] = lsb(a).
//   With r < p bitwise shared and c = a + r mod p opened,
//   lsb(a) = c_0 xor r_0 xor [c < r].
//   [c < r] for public c: e_i = c_i xor r_i, E_i = OR_{j>=i} e_j, and the
//   first differing bit from the top decides, so [c < r] = sum over c_i = 0
//   of (E_i - E_{i+1}).
//   E_i = 1 - L(1 + sum_{j>=i} e_j), where L is the interpolating polynomial
//   that is 1 at 1 and 0 at 2..k+1. Powers of the shared argument come from
//   an unbounded fan-in chain, so every E_i costs two rounds regardless of k.
//
// Everything that does not depend on x, y lives in a ComparisonKit and is
// prepared in a batch ahead of time.

namespace svote {

// Shares that turn a later-known nonzero z into z, z^2, ..., z^k in two
// rounds: m_j = a_j * z is opened, then z^j = b_j * m_1 * ... * m_j.
struct PowerChain {
  std::vector<SharedValue> a;
  std::vector<SharedValue> b;
};

struct ComparisonKit {
  std::vector<SharedValue> bits;  // bit i has weight 2^i
  SharedValue r;
  std::vector<PowerChain> chains;  // position i uses chains[i], empty for the top bit
};

namespace detail {

// Coefficients (low to high) of the degree-k polynomial with value 1 at z = 1
// and 0 at z = 2..k+1.
inline std::vector<u64> indicator_at_one(std::size_t k, const PrimeModulus& m) {
  std::vector<u64> poly{1};
  u64 denom = 1;
  for (u64 v = 2; v <= k + 1; ++v) {
    std::vector<u64> next(poly.size() + 1, 0);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i + 1] = m.add(next[i + 1], poly[i]);
      next[i] = m.add(next[i], m.mul(poly[i], m.neg(v)));
    }
    poly = std::move(next);
    denom = m.mul(denom, m.sub(1, v));
  }
  const u64 inv = m.inv(denom);
  for (u64& c : poly) c = m.mul(c, inv);
  return poly;
}

inline std::size_t chain_length(std::size_t bits, std::size_t position) {
  const std::size_t k = bits - position;
  return k >= 2 ? k : 0;
}

inline std::size_t chain_total(std::size_t bits) {
  std::size_t total = 0;
  for (std::size_t i = 0; i < bits; ++i) total += chain_length(bits, i);
  return total;
}

// How many candidates to draw so that at least `need` of them succeed except
// with probability about 2^-40, when each fails independently with probability q.
inline std::size_t pool_size(std::size_t need, double q) {
  if (need == 0) return 0;
  q = std::clamp(q, 0.0, 0.99);
  const double target = -40.0 * std::log(2.0);
  if (need * q < 20.0) {
    // Exact binomial tail P[failures > s] for n = need + s.
    for (std::size_t s = 0;; ++s) {
      const double n = static_cast<double>(need + s);
      if (q == 0.0) return need;
      double tail = 0.0;
      for (std::size_t f = s + 1; f <= need + s && f <= s + 400; ++f) {
        const double lp = std::lgamma(n + 1) - std::lgamma(f + 1.0) - std::lgamma(n - f + 1) + f * std::log(q) +
                          (n - f) * std::log1p(-q);
        tail += std::exp(lp);
      }
      if (tail <= 0.0 || std::log(tail) <= target) return need + s;
    }
  }
  // Bernstein bound on the failure count.
  const double a = -target;
  double n = static_cast<double>(need) / (1.0 - q);
  for (int it = 0; it < 64; ++it) {
    const double mu = n * q;
    const double next = need + std::ceil(mu + a / 3 + std::sqrt(a * a / 9 + 2 * a * mu));
    if (next <= n) break;
    n = next;
  }
  return static_cast<std::size_t>(n);
}

// Opened-product bookkeeping for chains prepared in one batch.
struct ChainDraft {
  std::size_t first;  // index into the flat rho/s arrays
  std::size_t length;
};

// Public c, shared bits: the multiplications a_{i,j} * z_i, appended to lhs/rhs.
inline void lt_public_operands(MpcEngine& e, u64 c, std::span<const SharedValue> bits,
                               std::span<const PowerChain> chains, std::vector<SharedValue>& lhs,
                               std::vector<SharedValue>& rhs) {
  const std::size_t l = bits.size();
  SharedValue suffix = e.constant(1);  // 1 + sum_{j >= i} e_j
  std::vector<SharedValue> z(l);
  for (std::size_t i = l; i-- > 0;) {
    const SharedValue ei = ((c >> i) & 1) ? e.add_public(e.neg(bits[i]), 1) : bits[i];
    suffix = e.add(suffix, ei);
    z[i] = suffix;
  }
  for (std::size_t i = 0; i < l; ++i) {
    for (const SharedValue& a : chains[i].a) {
      lhs.push_back(a);
      rhs.push_back(z[i]);
    }
  }
}

// Finishes [c < r] once the chain products have been opened (same order as
// lt_public_operands produced them).
inline SharedValue lt_public_finish(MpcEngine& e, u64 c, std::span<const SharedValue> bits,
                                    std::span<const PowerChain> chains, std::span<const u64> opened,
                                    const std::vector<std::vector<u64>>& polys) {
  const PrimeModulus& m = e.modulus();
  const std::size_t l = bits.size();
  std::vector<SharedValue> E(l + 1, e.constant(0));
  std::size_t at = 0;
  for (std::size_t i = 0; i < l; ++i) {
    const PowerChain& ch = chains[i];
    if (ch.a.empty()) {
      // Top bit: E = e.
      E[i] = ((c >> i) & 1) ? e.add_public(e.neg(bits[i]), 1) : bits[i];
      continue;
    }
    const std::vector<u64>& poly = polys[ch.a.size()];
    SharedValue acc = e.constant(poly[0]);
    u64 prefix = 1;
    for (std::size_t j = 0; j < ch.a.size(); ++j) {
      prefix = m.mul(prefix, opened[at++]);
      acc = e.add(acc, e.scale(ch.b[j], m.mul(prefix, poly[j + 1])));
    }
    E[i] = e.add_public(e.neg(acc), 1);
  }
  SharedValue wrap = e.constant(0);
  for (std::size_t i = 0; i < l; ++i) {
    if (((c >> i) & 1) == 0) wrap = e.add(wrap, e.sub(E[i], E[i + 1]));
  }
  return wrap;
}

inline std::vector<std::vector<u64>> indicator_table(std::size_t bits, const PrimeModulus& m) {
  std::vector<std::vector<u64>> polys(bits + 1);
  for (std::size_t k = 2; k <= bits; ++k) polys[k] = indicator_at_one(k, m);
  return polys;
}

}  // namespace detail

// --- shared randomness ------------------------------------------------------

// Uniform shared bits: square a random value, open the square, and divide by
// the canonical root. Three rounds.
inline std::vector<SharedValue> rand_bits(MpcEngine& e, std::size_t count) {
  const PrimeModulus& m = e.modulus();
  const u64 half = m.inv(2);
  std::vector<SharedValue> out;
  while (out.size() < count) {
    const std::size_t want = detail::pool_size(count - out.size(), 1.0 / static_cast<double>(m.value()));
    Layer deal(e);
    auto r_ref = deal.deal_random(want);
    deal.run();
    std::vector<SharedValue> r(deal.dealt(r_ref).begin(), deal.dealt(r_ref).end());
    Layer sq(e);
    auto sq_ref = sq.mul(r, r);
    sq.run();
    Layer op(e);
    auto op_ref = op.open(sq.products(sq_ref));
    op.run();
    auto squares = op.opened(op_ref);
    for (std::size_t i = 0; i < want && out.size() < count; ++i) {
      if (squares[i] == 0) continue;
      const u64 root_inv = m.inv(*m.sqrt(squares[i]));
      out.push_back(e.scale(e.add_public(e.scale(r[i], root_inv), 1), half));
    }
  }
  return out;
}

inline SharedValue rand_shared_bit(MpcEngine& e) { return rand_bits(e, 1).front(); }

struct NonzeroShare {
  SharedValue value;
  SharedValue inverse;
};

// Uniform nonzero shared values together with shares of their inverses.
inline std::vector<NonzeroShare> rand_nonzero_with_inverse(MpcEngine& e, std::size_t count) {
  const PrimeModulus& m = e.modulus();
  std::vector<NonzeroShare> out;
  while (out.size() < count) {
    const std::size_t want = detail::pool_size(count - out.size(), 2.0 / static_cast<double>(m.value()));
    Layer deal(e);
    auto rho_ref = deal.deal_random(want);
    auto s_ref = deal.deal_random(want);
    deal.run();
    std::vector<SharedValue> rho(deal.dealt(rho_ref).begin(), deal.dealt(rho_ref).end());
    std::vector<SharedValue> s(deal.dealt(s_ref).begin(), deal.dealt(s_ref).end());
    Layer mul(e);
    auto prod_ref = mul.mul(rho, s);
    mul.run();
    Layer op(e);
    auto op_ref = op.open(mul.products(prod_ref));
    op.run();
    auto masked = op.opened(op_ref);
    for (std::size_t i = 0; i < want && out.size() < count; ++i) {
      if (masked[i] == 0) continue;
      out.push_back({rho[i], e.scale(s[i], m.inv(masked[i]))});
    }
  }
  return out;
}

inline std::vector<SharedValue> rand_nonzero(MpcEngine& e, std::size_t count) {
  std::vector<SharedValue> out;
  for (const NonzeroShare& v : rand_nonzero_with_inverse(e, count)) out.push_back(v.value);
  return out;
}

inline SharedValue rand_shared_nonzero(MpcEngine& e) { return rand_nonzero(e, 1).front(); }

// --- comparison -------------------------------------------------------------

// Prepares `count` comparison kits. Five rounds for a Mersenne modulus, six
// otherwise, plus rare extra batches when a pool runs short.
inline std::vector<ComparisonKit> prepare_comparison_kits(MpcEngine& e, std::size_t count) {
  const PrimeModulus& m = e.modulus();
  const std::size_t l = m.bits();
  const bool mersenne = m.is_mersenne();
  const std::size_t per_chain_set = detail::chain_total(l);
  // General moduli need a second chain set to check r <= p - 1.
  const std::size_t chain_sets = mersenne ? 1 : 2;
  const std::size_t chain_vals = per_chain_set * chain_sets;
  const auto polys = detail::indicator_table(l, m);

  double q = static_cast<double>(l + 2 * chain_vals + 1) / static_cast<double>(m.value());
  q += mersenne ? std::ldexp(1.0, -static_cast<int>(l)) : 1.0 - std::ldexp(static_cast<double>(m.value()), -static_cast<int>(l));

  std::vector<ComparisonKit> kits;
  kits.reserve(count);
  while (kits.size() < count) {
    const std::size_t cand = detail::pool_size(count - kits.size(), q);

    // Round 1: every random input.
    Layer l1(e);
    auto raw_ref = l1.deal_random(cand * l);
    auto rho_ref = l1.deal_random(cand * chain_vals);
    auto s_ref = l1.deal_random(cand * chain_vals);
    auto mask_ref = l1.deal_random(mersenne ? cand : 0);
    l1.run();
    auto raw = l1.dealt(raw_ref);
    auto rho = l1.dealt(rho_ref);
    auto s = l1.dealt(s_ref);
    auto mask = l1.dealt(mask_ref);

    // Round 2: squares for the bits, rho_j s_j and rho_{j-1} s_j for the chains.
    std::vector<SharedValue> link_l, link_r;
    std::vector<detail::ChainDraft> drafts;  // [cand][set][position]
    for (std::size_t c = 0; c < cand; ++c) {
      std::size_t at = c * chain_vals;
      for (std::size_t set = 0; set < chain_sets; ++set) {
        for (std::size_t i = 0; i < l; ++i) {
          const std::size_t k = detail::chain_length(l, i);
          drafts.push_back({at, k});
          for (std::size_t j = 1; j < k; ++j) {
            link_l.push_back(rho[at + j - 1]);
            link_r.push_back(s[at + j]);
          }
          at += k;
        }
      }
    }
    Layer l2(e);
    auto sq_ref = l2.mul(raw, raw);
    auto rs_ref = l2.mul(rho, s);
    auto link_ref = l2.mul(link_l, link_r);
    l2.run();

    // Round 3: open the masked squares and products.
    Layer l3(e);
    auto sq_open = l3.open(l2.products(sq_ref));
    auto rs_open = l3.open(l2.products(rs_ref));
    l3.run();
    auto squares = l3.opened(sq_open);
    auto rs = l3.opened(rs_open);
    auto links = l2.products(link_ref);

    std::vector<ComparisonKit> drafted(cand);
    std::vector<std::vector<PowerChain>> check_chains(cand);
    std::vector<bool> ok(cand, true);
    const u64 half = m.inv(2);
    std::size_t link_at = 0;
    std::size_t draft_at = 0;
    for (std::size_t c = 0; c < cand; ++c) {
      ComparisonKit& kit = drafted[c];
      kit.bits.reserve(l);
      SharedValue r = e.constant(0);
      for (std::size_t i = 0; i < l; ++i) {
        const u64 sq = squares[c * l + i];
        if (sq == 0) {
          ok[c] = false;
          kit.bits.push_back(e.constant(0));
          continue;
        }
        const SharedValue bit = e.scale(e.add_public(e.scale(raw[c * l + i], m.inv(*m.sqrt(sq))), 1), half);
        kit.bits.push_back(bit);
        r = e.add(r, e.scale(bit, u64{1} << i));
      }
      kit.r = r;
      for (std::size_t set = 0; set < chain_sets; ++set) {
        auto& target = set == 0 ? kit.chains : check_chains[c];
        for (std::size_t i = 0; i < l; ++i) {
          const detail::ChainDraft d = drafts[draft_at++];
          PowerChain ch;
          for (std::size_t j = 0; j < d.length; ++j) {
            const u64 v = rs[d.first + j];
            if (v == 0) {
              // Keep the shape so every candidate costs the same; discarded below.
              ok[c] = false;
              if (j >= 1) ++link_at;
              ch.a.push_back(e.constant(0));
              ch.b.push_back(e.constant(0));
              continue;
            }
            const u64 vinv = m.inv(v);
            // a_1 = rho_1^-1, a_j = rho_{j-1} rho_j^-1, b_j = rho_j.
            ch.a.push_back(j == 0 ? e.scale(s[d.first], vinv) : e.scale(links[link_at++], vinv));
            ch.b.push_back(rho[d.first + j]);
          }
          target.push_back(std::move(ch));
        }
      }
    }

    // Failed candidates go through the validity check too, so the gate count
    // depends only on `count`.
    std::vector<bool> valid(cand, false);
    if (mersenne) {
      // r = p exactly when every bit is one; open mask * (sum of bits - l).
      std::vector<SharedValue> lhs, rhs;
      for (std::size_t c = 0; c < cand; ++c) {
        lhs.push_back(mask[c]);
        SharedValue total = e.sum(drafted[c].bits);
        rhs.push_back(e.add_public(total, m.neg(l % m.value())));
      }
      Layer l4(e);
      auto v_ref = l4.mul(lhs, rhs);
      l4.run();
      Layer l5(e);
      auto v_open = l5.open(l4.products(v_ref));
      l5.run();
      auto v = l5.opened(v_open);
      for (std::size_t c = 0; c < cand; ++c) valid[c] = ok[c] && v[c] != 0;
    } else {
      // r is valid iff not [p - 1 < r].
      const u64 bound = m.value() - 1;
      std::vector<SharedValue> lhs, rhs;
      for (std::size_t c = 0; c < cand; ++c) {
        detail::lt_public_operands(e, bound, drafted[c].bits, check_chains[c], lhs, rhs);
      }
      Layer l4(e);
      auto m_ref = l4.mul(lhs, rhs);
      l4.run();
      Layer l5(e);
      auto m_open = l5.open(l4.products(m_ref));
      l5.run();
      auto opened = l5.opened(m_open);
      std::vector<SharedValue> too_big;
      std::size_t at = 0;
      for (std::size_t c = 0; c < cand; ++c) {
        const std::size_t used = per_chain_set;
        too_big.push_back(detail::lt_public_finish(e, bound, drafted[c].bits, check_chains[c],
                                                   opened.subspan(at, used), polys));
        at += used;
      }
      Layer l6(e);
      auto big_open = l6.open(too_big);
      l6.run();
      auto big = l6.opened(big_open);
      for (std::size_t c = 0; c < cand; ++c) valid[c] = ok[c] && big[c] == 0;
    }

    for (std::size_t c = 0; c < cand && kits.size() < count; ++c) {
      if (valid[c]) kits.push_back(std::move(drafted[c]));
    }
  }
  return kits;
}

// [x_i < y_i] for each pair, consuming one kit per pair. Four rounds.
inline std::vector<SharedValue> less_than_with(MpcEngine& e, std::span<const ComparisonKit> kits,
                                               std::span<const SharedValue> xs, std::span<const SharedValue> ys) {
  const std::size_t n = xs.size();
  if (ys.size() != n) throw ConfigError("comparison operand lists differ in length");
  if (kits.size() < n) throw PreprocessingError("not enough comparison kits");
  if (n == 0) return {};
  const PrimeModulus& m = e.modulus();
  const auto polys = detail::indicator_table(m.bits(), m);

  std::vector<SharedValue> masked(n);
  for (std::size_t i = 0; i < n; ++i) masked[i] = e.add(e.scale(e.sub(xs[i], ys[i]), 2), kits[i].r);
  Layer open_c(e);
  auto c_ref = open_c.open(masked);
  open_c.run();
  auto cs = open_c.opened(c_ref);

  std::vector<SharedValue> lhs, rhs;
  std::vector<std::size_t> offsets(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    detail::lt_public_operands(e, cs[i], kits[i].bits, kits[i].chains, lhs, rhs);
    offsets[i + 1] = lhs.size();
  }
  Layer chain_mul(e);
  auto m_ref = chain_mul.mul(lhs, rhs);
  chain_mul.run();
  Layer chain_open(e);
  auto m_open = chain_open.open(chain_mul.products(m_ref));
  chain_open.run();
  auto opened = chain_open.opened(m_open);

  std::vector<SharedValue> us(n), wraps(n);
  for (std::size_t i = 0; i < n; ++i) {
    wraps[i] = detail::lt_public_finish(e, cs[i], kits[i].bits, kits[i].chains,
                                        opened.subspan(offsets[i], offsets[i + 1] - offsets[i]), polys);
    const SharedValue& r0 = kits[i].bits[0];
    us[i] = (cs[i] & 1) ? e.add_public(e.neg(r0), 1) : r0;
  }
  Layer xor_mul(e);
  auto x_ref = xor_mul.mul(us, wraps);
  xor_mul.run();
  auto prods = xor_mul.products(x_ref);
  std::vector<SharedValue> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = e.sub(e.add(us[i], wraps[i]), e.scale(prods[i], 2));
  return out;
}

inline std::vector<SharedValue> less_than(MpcEngine& e, std::span<const SharedValue> xs,
                                          std::span<const SharedValue> ys) {
  if (xs.empty()) return {};
  const auto kits = prepare_comparison_kits(e, xs.size());
  return less_than_with(e, kits, xs, ys);
}

inline SharedValue less_than(MpcEngine& e, SharedValue x, SharedValue y) {
  return less_than(e, std::span(&x, 1), std::span(&y, 1)).front();
}

// The gate-count formula quoted for the cited comparison construction.
inline std::uint64_t reference_comparison_gates(const PrimeModulus& m) { return 279 * m.bits() + 5; }

}  // namespace svote
