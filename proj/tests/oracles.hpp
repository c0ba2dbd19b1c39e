#pragma once

// Reference implementations the library is checked against. None of them
// shares code with include/svote.

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

namespace oracle {

using u64 = std::uint64_t;
using i128 = __int128;

// a^-1 mod p by the extended Euclidean algorithm.
inline u64 inverse(u64 a, u64 p) {
  i128 r0 = p, r1 = a % p, s0 = 0, s1 = 1;
  while (r1 != 0) {
    const i128 q = r0 / r1;
    i128 t = r0 - q * r1;
    r0 = r1;
    r1 = t;
    t = s0 - q * s1;
    s0 = s1;
    s1 = t;
  }
  if (r0 != 1) return 0;
  i128 v = s0 % static_cast<i128>(p);
  if (v < 0) v += p;
  return static_cast<u64>(v);
}

// Schoolbook product reduced by division on 128-bit integers.
inline u64 mulmod(u64 a, u64 b, u64 p) {
  return static_cast<u64>((static_cast<unsigned __int128>(a) * b) % p);
}

inline bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

// Upper-tail p-value of Pearson's statistic for `counts` against a uniform
// distribution over the buckets.
inline double chi_square_uniform_pvalue(const std::vector<std::size_t>& counts) {
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  const double expect = total / counts.size();
  double stat = 0;
  for (std::size_t c : counts) stat += (c - expect) * (c - expect) / expect;
  boost::math::chi_squared dist(static_cast<double>(counts.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

// Two-sample chi-square homogeneity test on bucket counts.
inline double chi_square_two_sample_pvalue(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  const double na = std::accumulate(a.begin(), a.end(), 0.0);
  const double nb = std::accumulate(b.begin(), b.end(), 0.0);
  double stat = 0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double col = static_cast<double>(a[i] + b[i]);
    if (col == 0) continue;
    ++used;
    const double ea = col * na / (na + nb), eb = col * nb / (na + nb);
    stat += (a[i] - ea) * (a[i] - ea) / ea + (b[i] - eb) * (b[i] - eb) / eb;
  }
  boost::math::chi_squared dist(static_cast<double>(used - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

// Winners by brute force: repeatedly take the first maximum.
inline std::vector<std::size_t> winners(std::vector<u64> w, std::size_t k) {
  std::vector<std::size_t> out;
  std::vector<bool> taken(w.size(), false);
  for (std::size_t pass = 0; pass < k; ++pass) {
    std::size_t best = w.size();
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (taken[i]) continue;
      if (best == w.size() || w[i] > w[best]) best = i;
    }
    taken[best] = true;
    out.push_back(best);
  }
  return out;
}

enum class Kind { Plurality, Range, Approval, Veto, Borda };

// Template legality written from the rule definitions.
inline bool legal(Kind kind, const std::vector<u64>& s, u64 range_max, std::size_t k) {
  const std::size_t m = s.size();
  std::size_t ones = 0;
  bool binary = true;
  for (u64 v : s) {
    if (v > 1) binary = false;
    ones += v == 1;
  }
  switch (kind) {
    case Kind::Plurality: return binary && ones == 1;
    case Kind::Range: return std::all_of(s.begin(), s.end(), [&](u64 v) { return v <= range_max; });
    case Kind::Approval: return binary && ones <= k;
    case Kind::Veto: return binary && ones + 1 == m;
    case Kind::Borda: {
      std::vector<u64> sorted = s;
      std::sort(sorted.begin(), sorted.end());
      for (std::size_t i = 0; i < m; ++i) {
        if (sorted[i] != i) return false;
      }
      return true;
    }
  }
  return false;
}

}  // namespace oracle
