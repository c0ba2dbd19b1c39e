#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "svote/errors.hpp"
#include "svote/field.hpp"
#include "svote/random.hpp"

namespace svote {

// One tallier's additive share of a voter's score vector. Tallier indices
// are 1-based.
struct ShareVector {
  std::size_t tallier = 0;
  std::vector<FieldElement> entries;
  std::string voter_tag;
};

// D-out-of-D sharing, entry by entry: shares 1..D-1 are uniform, share D is
// the residual.
inline std::vector<ShareVector> additive_share(std::span<const FieldElement> ballot, std::size_t talliers,
                                               RandomSource& rng, const std::string& voter_tag = {}) {
  if (talliers < 2) throw ConfigError("additive sharing needs at least 2 talliers");
  if (ballot.empty()) throw ConfigError("cannot share an empty ballot");
  const PrimeModulus& m = ballot.front().modulus();
  std::vector<ShareVector> shares(talliers);
  for (std::size_t d = 0; d < talliers; ++d) {
    shares[d].tallier = d + 1;
    shares[d].voter_tag = voter_tag;
    shares[d].entries.reserve(ballot.size());
  }
  for (const FieldElement& entry : ballot) {
    FieldElement residual = entry;
    for (std::size_t d = 0; d + 1 < talliers; ++d) {
      FieldElement r = sample_uniform(rng, m);
      residual -= r;
      shares[d].entries.push_back(r);
    }
    shares[talliers - 1].entries.push_back(residual);
  }
  return shares;
}

inline std::vector<FieldElement> additive_reconstruct(std::span<const ShareVector> shares) {
  if (shares.empty()) throw ShareSetError("no shares to reconstruct");
  std::vector<bool> seen(shares.size() + 1, false);
  const std::size_t width = shares.front().entries.size();
  for (const ShareVector& s : shares) {
    if (s.tallier == 0 || s.tallier > shares.size()) {
      throw ShareSetError("tallier index " + std::to_string(s.tallier) + " outside 1.." +
                          std::to_string(shares.size()) + " (missing share)");
    }
    if (seen[s.tallier]) throw ShareSetError("duplicate share from tallier " + std::to_string(s.tallier));
    seen[s.tallier] = true;
    if (s.voter_tag != shares.front().voter_tag) throw ShareSetError("shares belong to different voters");
    if (s.entries.size() != width) throw ShareSetError("share vectors differ in length");
  }
  std::vector<FieldElement> out = shares.front().entries;
  for (std::size_t i = 1; i < shares.size(); ++i) {
    for (std::size_t k = 0; k < width; ++k) out[k] += shares[i].entries[k];
  }
  return out;
}

struct ShamirShare {
  FieldElement point;
  FieldElement value;
  std::size_t degree = 0;
};

inline std::size_t honest_majority_threshold(std::size_t talliers) {
  return talliers == 0 ? 0 : (talliers - 1) / 2;
}

// Public evaluation points 1..D.
inline std::vector<FieldElement> default_points(std::size_t talliers, const PrimeModulus& m) {
  if (talliers >= m.value()) throw ConfigError("more talliers than nonzero field elements");
  std::vector<FieldElement> pts;
  pts.reserve(talliers);
  for (std::size_t i = 1; i <= talliers; ++i) pts.emplace_back(i, m);
  return pts;
}

// Horner evaluation of coeffs[0] + coeffs[1] x + ...
inline u64 eval_poly(std::span<const u64> coeffs, u64 x, const PrimeModulus& m) {
  u64 acc = 0;
  for (std::size_t i = coeffs.size(); i-- > 0;) acc = m.add(m.mul(acc, x), coeffs[i]);
  return acc;
}

// Lagrange basis values at zero for the given distinct points.
inline std::vector<u64> lagrange_at_zero(std::span<const u64> points, const PrimeModulus& m) {
  std::vector<u64> coeffs(points.size());
  for (std::size_t j = 0; j < points.size(); ++j) {
    u64 num = 1, den = 1;
    for (std::size_t k = 0; k < points.size(); ++k) {
      if (k == j) continue;
      num = m.mul(num, points[k]);
      den = m.mul(den, m.sub(points[k], points[j]));
    }
    coeffs[j] = m.mul(num, m.inv(den));
  }
  return coeffs;
}

inline std::vector<ShamirShare> shamir_share(const FieldElement& secret, std::size_t degree,
                                             std::span<const FieldElement> points, RandomSource& rng) {
  const PrimeModulus& m = secret.modulus();
  if (degree + 1 > points.size()) throw ConfigError("degree t requires at least t+1 evaluation points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].is_zero()) throw ConfigError("evaluation point 0 would reveal the secret");
    for (std::size_t j = 0; j < i; ++j) {
      if (points[i] == points[j]) throw ConfigError("repeated evaluation point");
    }
  }
  std::vector<u64> coeffs(degree + 1);
  coeffs[0] = secret.value();
  for (std::size_t i = 1; i <= degree; ++i) coeffs[i] = rng.uniform(m);
  std::vector<ShamirShare> out;
  out.reserve(points.size());
  for (const FieldElement& x : points) {
    out.push_back({x, FieldElement(eval_poly(coeffs, x.value(), m), m), degree});
  }
  return out;
}

// Interpolates at zero from the first t+1 shares and checks the rest lie on
// the same polynomial.
inline FieldElement shamir_reconstruct(std::span<const ShamirShare> shares) {
  if (shares.empty()) throw InsufficientShares("no shares given");
  const std::size_t degree = shares.front().degree;
  if (shares.size() < degree + 1) {
    throw InsufficientShares("degree " + std::to_string(degree) + " needs " + std::to_string(degree + 1) +
                             " shares, got " + std::to_string(shares.size()));
  }
  const PrimeModulus& m = shares.front().value.modulus();
  std::vector<u64> xs, ys;
  for (const ShamirShare& s : shares) {
    if (s.degree != degree) throw ShareSetError("shares carry inconsistent degrees");
    if (!(s.point.modulus() == m) || !(s.value.modulus() == m)) throw ModulusMismatch("shares over different fields");
    if (s.point.is_zero()) throw ShareSetError("share at evaluation point 0");
    if (std::find(xs.begin(), xs.end(), s.point.value()) != xs.end()) {
      throw ShareSetError("two shares at the same evaluation point");
    }
    xs.push_back(s.point.value());
    ys.push_back(s.value.value());
  }
  std::span<const u64> base_x(xs.data(), degree + 1);
  std::span<const u64> base_y(ys.data(), degree + 1);
  const std::vector<u64> lambda = lagrange_at_zero(base_x, m);
  u64 secret = 0;
  for (std::size_t j = 0; j <= degree; ++j) secret = m.add(secret, m.mul(lambda[j], base_y[j]));

  // Remaining shares must agree with the interpolating polynomial.
  for (std::size_t extra = degree + 1; extra < xs.size(); ++extra) {
    u64 value = 0;
    for (std::size_t j = 0; j <= degree; ++j) {
      u64 num = 1, den = 1;
      for (std::size_t k = 0; k <= degree; ++k) {
        if (k == j) continue;
        num = m.mul(num, m.sub(xs[extra], base_x[k]));
        den = m.mul(den, m.sub(base_x[j], base_x[k]));
      }
      value = m.add(value, m.mul(base_y[j], m.mul(num, m.inv(den))));
    }
    if (value != ys[extra]) throw ShareSetError("shares are not consistent with a degree-t polynomial");
  }
  return FieldElement(secret, m);
}

}  // namespace svote
