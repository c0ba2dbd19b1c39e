#pragma once

#include <sodium.h>

#include <array>
#include <cstdint>
#include <cstring>
#include <span>
#include <string_view>

#include "svote/errors.hpp"
#include "svote/field.hpp"

namespace svote {

inline void ensure_sodium() {
  static const bool ready = [] { return sodium_init() >= 0; }();
  if (!ready) throw Error("libsodium failed to initialise");
}

using Key32 = std::array<std::uint8_t, 32>;

// BLAKE2b-256 of (seed, label): the key-derivation step for every seeded stream.
inline Key32 derive_key(std::span<const std::uint8_t> seed, std::string_view label) {
  ensure_sodium();
  Key32 out{};
  crypto_generichash_state st;
  crypto_generichash_init(&st, nullptr, 0, out.size());
  crypto_generichash_update(&st, seed.data(), seed.size());
  const std::uint8_t sep = 0x1f;
  crypto_generichash_update(&st, &sep, 1);
  crypto_generichash_update(&st, reinterpret_cast<const unsigned char*>(label.data()), label.size());
  crypto_generichash_final(&st, out.data(), out.size());
  return out;
}

inline Key32 derive_key(std::uint64_t seed, std::string_view label) {
  std::array<std::uint8_t, 8> bytes{};
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<std::uint8_t>(seed >> (8 * i));
  return derive_key(bytes, label);
}

// ChaCha20 keystream generator. Seeded instances are reproducible; the
// entropy constructor keys from the OS generator. Single owner, not
// thread-safe.
class RandomSource {
 public:
  explicit RandomSource(const Key32& key) : key_(key) { ensure_sodium(); }

  static RandomSource from_seed(std::uint64_t seed, std::string_view label = "svote") {
    return RandomSource(derive_key(seed, label));
  }

  static RandomSource from_entropy() {
    ensure_sodium();
    Key32 key{};
    randombytes_buf(key.data(), key.size());
    return RandomSource(key);
  }

  // Independent child stream; the parent stream is not advanced.
  RandomSource derive(std::string_view label) const { return RandomSource(derive_key(key_, label)); }

  void fill(std::span<std::uint8_t> out) {
    for (auto& b : out) {
      if (pos_ == buffer_.size()) refill();
      b = buffer_[pos_++];
    }
  }

  std::uint64_t next_u64() {
    if (buffer_.size() - pos_ < 8) refill();
    std::uint64_t v;
    std::memcpy(&v, buffer_.data() + pos_, 8);
    pos_ += 8;
    return v;
  }

  // Uniform on [0, bound) by masked rejection sampling.
  std::uint64_t uniform_below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    const unsigned width = static_cast<unsigned>(std::bit_width(bound - 1));
    const std::uint64_t mask = width == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << width) - 1);
    for (;;) {
      std::uint64_t v = next_u64() & mask;
      if (v < bound) return v;
    }
  }

  std::uint64_t uniform(const PrimeModulus& m) { return uniform_below(m.value()); }
  std::uint64_t uniform_nonzero(const PrimeModulus& m) { return 1 + uniform_below(m.value() - 1); }

  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return next_u64(); }

 private:
  void refill() {
    buffer_.fill(0);
    std::array<std::uint8_t, crypto_stream_chacha20_NONCEBYTES> nonce{};
    crypto_stream_chacha20_xor_ic(buffer_.data(), buffer_.data(), buffer_.size(), nonce.data(), block_,
                                  key_.data());
    block_ += buffer_.size() / 64;
    pos_ = 0;
  }

  Key32 key_;
  std::array<std::uint8_t, 1024> buffer_{};
  std::size_t pos_ = buffer_.size();
  std::uint64_t block_ = 0;
};

// fe_sample_uniform
inline FieldElement sample_uniform(RandomSource& rng, const PrimeModulus& m) {
  return FieldElement(rng.uniform(m), m);
}

}  // namespace svote
