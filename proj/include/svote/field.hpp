#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "svote/errors.hpp"

namespace svote {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

namespace detail {

inline u64 mulmod(u64 a, u64 b, u64 m) {
  return static_cast<u64>(static_cast<u128>(a) * b % m);
}

inline u64 powmod(u64 base, u64 exp, u64 m) {
  u64 result = 1 % m;
  base %= m;
  while (exp) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

// Deterministic Miller-Rabin; this base set is exact for all n < 2^64.
inline bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 small : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % small == 0) return n == small;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

}  // namespace detail

// A prime p < 2^64 together with the constants needed for fast reduction.
// Mersenne primes 2^k - 1 reduce products with shifts and adds only.
class PrimeModulus {
 public:
  explicit PrimeModulus(u64 p) : p_(p) {
    if (!detail::is_prime(p)) {
      throw ConfigError("modulus " + std::to_string(p) + " is not prime");
    }
    bits_ = static_cast<unsigned>(std::bit_width(p));
    if (std::has_single_bit(p + 1)) mersenne_exponent_ = bits_;
  }

  static PrimeModulus mersenne(unsigned exponent) {
    if (exponent == 0 || exponent >= 64) throw ConfigError("Mersenne exponent out of range");
    return PrimeModulus((u64{1} << exponent) - 1);
  }

  u64 value() const noexcept { return p_; }
  // Bit length of p, i.e. ceil(log2 p) for every p that is not a power of two.
  unsigned bits() const noexcept { return bits_; }
  unsigned byte_width() const noexcept { return (bits_ + 7) / 8; }
  bool is_mersenne() const noexcept { return mersenne_exponent_ != 0; }

  u64 reduce(u128 x) const noexcept {
    if (mersenne_exponent_ != 0) {
      const unsigned k = mersenne_exponent_;
      x = (x & p_) + (x >> k);
      x = (x & p_) + (x >> k);
      u64 r = static_cast<u64>(x);
      return r >= p_ ? r - p_ : r;
    }
    return static_cast<u64>(x % p_);
  }

  // Reference reduction by division, used to cross-check the Mersenne path.
  u64 reduce_by_division(u128 x) const noexcept { return static_cast<u64>(x % p_); }

  u64 add(u64 a, u64 b) const noexcept {
    u64 s = a + b;  // no overflow: a, b < p < 2^64 but p may exceed 2^63
    if (s < a) return s - p_;
    return s - (p_ & (0 - static_cast<u64>(s >= p_)));
  }
  u64 sub(u64 a, u64 b) const noexcept {
    u64 d = a - b;
    return d + (p_ & (0 - static_cast<u64>(a < b)));
  }
  u64 neg(u64 a) const noexcept { return sub(0, a); }
  u64 mul(u64 a, u64 b) const noexcept { return reduce(static_cast<u128>(a) * b); }

  u64 pow(u64 base, u64 exp) const noexcept {
    u64 result = 1;
    while (exp) {
      if (exp & 1) result = mul(result, base);
      base = mul(base, base);
      exp >>= 1;
    }
    return result;
  }

  u64 inv(u64 a) const {
    if (a % p_ == 0) throw InversionOfZero("inverse of zero requested");
    return pow(a, p_ - 2);
  }

  u64 from_signed(std::int64_t v) const noexcept {
    if (v >= 0) return static_cast<u64>(v) % p_;
    const u64 magnitude = static_cast<u64>(-(v + 1)) + 1;
    return neg(magnitude % p_);
  }

  bool is_square(u64 a) const noexcept { return a == 0 || pow(a, (p_ - 1) / 2) == 1; }

  // Square root by Tonelli-Shanks; returns the root r <= (p-1)/2.
  std::optional<u64> sqrt(u64 a) const noexcept {
    a %= p_;
    if (a == 0) return u64{0};
    if (p_ == 2) return a;
    if (!is_square(a)) return std::nullopt;
    u64 root;
    if ((p_ & 3) == 3) {
      root = pow(a, (p_ + 1) / 4);
    } else {
      u64 q = p_ - 1;
      unsigned s = 0;
      while ((q & 1) == 0) {
        q >>= 1;
        ++s;
      }
      u64 z = 2;
      while (is_square(z)) ++z;
      unsigned m = s;
      u64 c = pow(z, q);
      u64 t = pow(a, q);
      root = pow(a, (q + 1) / 2);
      while (t != 1) {
        unsigned i = 0;
        u64 tt = t;
        while (tt != 1) {
          tt = mul(tt, tt);
          ++i;
        }
        u64 b = c;
        for (unsigned j = 0; j + i + 1 < m; ++j) b = mul(b, b);
        m = i;
        c = mul(b, b);
        t = mul(t, c);
        root = mul(root, b);
      }
    }
    return root <= (p_ - 1) / 2 ? root : p_ - root;
  }

  friend bool operator==(const PrimeModulus& a, const PrimeModulus& b) noexcept { return a.p_ == b.p_; }

 private:
  u64 p_ = 0;
  unsigned bits_ = 0;
  unsigned mersenne_exponent_ = 0;
};

inline PrimeModulus mersenne13() { return PrimeModulus::mersenne(13); }
inline PrimeModulus mersenne31() { return PrimeModulus::mersenne(31); }

// An element of Z_p. Always holds the canonical representative in [0, p).
class FieldElement {
 public:
  FieldElement(u64 value, const PrimeModulus& modulus)
      : modulus_(modulus), value_(value % modulus.value()) {}

  static FieldElement zero(const PrimeModulus& m) { return FieldElement(0, m); }
  static FieldElement one(const PrimeModulus& m) { return FieldElement(1, m); }

  u64 value() const noexcept { return value_; }
  const PrimeModulus& modulus() const noexcept { return modulus_; }
  bool is_zero() const noexcept { return value_ == 0; }

  FieldElement operator+(const FieldElement& o) const { return raw(modulus_.add(value_, check(o))); }
  FieldElement operator-(const FieldElement& o) const { return raw(modulus_.sub(value_, check(o))); }
  FieldElement operator*(const FieldElement& o) const { return raw(modulus_.mul(value_, check(o))); }
  FieldElement operator-() const { return raw(modulus_.neg(value_)); }
  FieldElement& operator+=(const FieldElement& o) { return *this = *this + o; }
  FieldElement& operator-=(const FieldElement& o) { return *this = *this - o; }
  FieldElement& operator*=(const FieldElement& o) { return *this = *this * o; }

  FieldElement inverse() const { return raw(modulus_.inv(value_)); }
  FieldElement pow(u64 exp) const { return raw(modulus_.pow(value_, exp)); }

  friend bool operator==(const FieldElement& a, const FieldElement& b) {
    return a.modulus_ == b.modulus_ && a.value_ == b.value_;
  }

  friend std::ostream& operator<<(std::ostream& os, const FieldElement& e) {
    return os << e.value_ << " (mod " << e.modulus_.value() << ")";
  }

 private:
  FieldElement raw(u64 v) const {
    FieldElement e(*this);
    e.value_ = v;
    return e;
  }

  u64 check(const FieldElement& o) const {
    if (!(o.modulus_ == modulus_)) {
      throw ModulusMismatch("field elements over Z_" + std::to_string(modulus_.value()) + " and Z_" +
                            std::to_string(o.modulus_.value()) + " cannot be combined");
    }
    return o.value_;
  }

  PrimeModulus modulus_;
  u64 value_;
};

}  // namespace svote
