#pragma once

#include <sodium.h>

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "svote/errors.hpp"
#include "svote/field.hpp"
#include "svote/random.hpp"

// Frame layout (all integers big-endian):
//
//   u32 length                     bytes that follow
//   u8  version                    currently 1
//   u8  kind                       FrameKind
//   u8  session[16]
//   u16 sender                     0-based tallier index; 0xffff for voters
//   u32 round
//   payload
//   u8  mac[32]                    HMAC-SHA256 over version..payload
//
// MPC payloads are field elements, each in byte_width() big-endian bytes.

namespace svote {

using Bytes = std::vector<std::uint8_t>;
using SessionId = std::array<std::uint8_t, 16>;

enum class FrameKind : std::uint8_t {
  MpcRound = 1,
  VoterShare = 2,
  Confirmation = 3,
  VoterSet = 4,
};

inline constexpr std::uint8_t kProtocolVersion = 1;
inline constexpr std::size_t kLengthBytes = 4;
inline constexpr std::size_t kHeaderBytes = 24;
inline constexpr std::size_t kMacBytes = crypto_auth_hmacsha256_BYTES;
inline constexpr std::uint16_t kVoterSender = 0xffff;
inline constexpr std::size_t kMaxFrameBytes = std::size_t{1} << 30;

struct FrameHeader {
  std::uint8_t version = kProtocolVersion;
  FrameKind kind = FrameKind::MpcRound;
  SessionId session{};
  std::uint16_t sender = 0;
  std::uint32_t round = 0;
};

struct Frame {
  FrameHeader header;
  Bytes payload;
};

namespace wire {

inline void put_u16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}
inline void put_u32(Bytes& out, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}
inline void put_u64(Bytes& out, std::uint64_t v) {
  for (int s = 56; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}
inline std::uint64_t get_be(std::span<const std::uint8_t> in, std::size_t offset, std::size_t width) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < width; ++i) v = (v << 8) | in[offset + i];
  return v;
}

inline void put_elements(Bytes& out, std::span<const u64> values, unsigned width) {
  const std::size_t base = out.size();
  out.resize(base + values.size() * width);
  std::uint8_t* dst = out.data() + base;
  for (u64 v : values) {
    for (unsigned i = width; i-- > 0;) {
      *dst++ = static_cast<std::uint8_t>(v >> (8 * i));
    }
  }
}

inline std::vector<u64> get_elements(std::span<const std::uint8_t> in, const PrimeModulus& m) {
  const unsigned width = m.byte_width();
  if (in.size() % width != 0) throw ChannelError("payload is not a whole number of field elements");
  std::vector<u64> out(in.size() / width);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = get_be(in, i * width, width);
    if (out[i] >= m.value()) throw ChannelError("payload element outside [0, p)");
  }
  return out;
}

inline std::array<std::uint8_t, kMacBytes> mac(std::span<const std::uint8_t> data, const Key32& key) {
  std::array<std::uint8_t, kMacBytes> tag{};
  crypto_auth_hmacsha256(tag.data(), data.data(), data.size(), key.data());
  return tag;
}

}  // namespace wire

inline Bytes encode_frame(const FrameHeader& h, std::span<const std::uint8_t> payload, const Key32& key) {
  ensure_sodium();
  const std::size_t body = kHeaderBytes + payload.size() + kMacBytes;
  if (body > kMaxFrameBytes) throw ChannelError("frame too large");
  Bytes out;
  out.reserve(kLengthBytes + body);
  wire::put_u32(out, static_cast<std::uint32_t>(body));
  out.push_back(h.version);
  out.push_back(static_cast<std::uint8_t>(h.kind));
  out.insert(out.end(), h.session.begin(), h.session.end());
  wire::put_u16(out, h.sender);
  wire::put_u32(out, h.round);
  out.insert(out.end(), payload.begin(), payload.end());
  const auto tag = wire::mac(std::span(out).subspan(kLengthBytes), key);
  out.insert(out.end(), tag.begin(), tag.end());
  return out;
}

// Parses the frame structure without checking the MAC.
inline Frame decode_frame_unverified(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kLengthBytes + kHeaderBytes + kMacBytes) throw ChannelError("truncated frame");
  const std::size_t body = wire::get_be(bytes, 0, 4);
  if (body != bytes.size() - kLengthBytes) throw ChannelError("frame length prefix mismatch");
  Frame f;
  std::size_t at = kLengthBytes;
  f.header.version = bytes[at++];
  if (f.header.version != kProtocolVersion) throw ChannelError("unsupported protocol version");
  f.header.kind = static_cast<FrameKind>(bytes[at++]);
  std::copy_n(bytes.begin() + at, 16, f.header.session.begin());
  at += 16;
  f.header.sender = static_cast<std::uint16_t>(wire::get_be(bytes, at, 2));
  at += 2;
  f.header.round = static_cast<std::uint32_t>(wire::get_be(bytes, at, 4));
  at += 4;
  f.payload.assign(bytes.begin() + at, bytes.end() - kMacBytes);
  return f;
}

inline bool verify_frame_mac(std::span<const std::uint8_t> bytes, const Key32& key) {
  ensure_sodium();
  if (bytes.size() < kLengthBytes + kHeaderBytes + kMacBytes) return false;
  const auto body = bytes.subspan(kLengthBytes, bytes.size() - kLengthBytes - kMacBytes);
  return crypto_auth_hmacsha256_verify(bytes.data() + bytes.size() - kMacBytes, body.data(), body.size(),
                                       key.data()) == 0;
}

inline Frame decode_frame(std::span<const std::uint8_t> bytes, const Key32& key) {
  Frame f = decode_frame_unverified(bytes);
  if (!verify_frame_mac(bytes, key)) throw ChannelError("frame MAC verification failed");
  return f;
}

// Symmetric link keys derived from one master secret that is provisioned
// out of band. Stands in for certified public keys and signatures.
class KeyRing {
 public:
  explicit KeyRing(const Key32& master) : master_(master) {}
  static KeyRing from_seed(std::uint64_t seed) { return KeyRing(derive_key(seed, "svote/keyring")); }

  Key32 tallier_link(std::size_t from, std::size_t to) const {
    return derive_key(master_, "tallier-link/" + std::to_string(from) + "/" + std::to_string(to));
  }
  Key32 voter_link(const std::string& voter_tag, std::size_t tallier) const {
    return derive_key(master_, "voter-link/" + std::to_string(tallier) + "/" + voter_tag);
  }

 private:
  Key32 master_;
};

inline SessionId session_from_seed(std::uint64_t seed) {
  const Key32 k = derive_key(seed, "svote/session");
  SessionId id{};
  std::copy_n(k.begin(), id.size(), id.begin());
  return id;
}

}  // namespace svote
