#include "cqc/tape_rng.hpp"

#include <bit>
#include <cstdio>

#include "cqc/errors.hpp"

namespace cqc {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                          std::uint64_t index) noexcept {
  return splitmix64_mix(splitmix64_mix(master + stream * kGolden) +
                        (index + 1) * kGolden);
}

TapeRng TapeRng::record(std::uint64_t seed) {
  TapeRng rng;
  rng.mode_ = Mode::kRecord;
  rng.seed_ = seed;
  rng.state_ = seed;
  return rng;
}

TapeRng TapeRng::replay(BitTape tape) {
  TapeRng rng;
  rng.mode_ = Mode::kReplay;
  rng.tape_ = std::move(tape);
  return rng;
}

bool TapeRng::bit() {
  if (mode_ == Mode::kReplay) {
    if (position_ >= tape_.size())
      throw TapeUnderrun("tape underrun after " + std::to_string(position_) +
                         " bits");
    return tape_[position_++];
  }
  if (word_bits_ == 0) {
    state_ += kGolden;
    word_ = splitmix64_mix(state_);
    word_bits_ = 64;
  }
  --word_bits_;
  bool b = (word_ >> word_bits_) & 1U;
  tape_.push_back(b);
  ++position_;
  return b;
}

std::uint64_t TapeRng::bits(int width) {
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) v = (v << 1) | static_cast<std::uint64_t>(bit());
  return v;
}

std::uint64_t TapeRng::uniform(std::uint64_t k) {
  if (k == 0) throw Error("uniform choice over zero options");
  if (k == 1) return 0;
  const int width = std::bit_width(k - 1);
  for (;;) {
    std::uint64_t v = bits(width);
    if (v < k) return v;
  }
}

BitTape generator_bits(std::uint64_t seed, std::size_t count) {
  TapeRng rng = TapeRng::record(seed);
  for (std::size_t i = 0; i < count; ++i) rng.bit();
  return rng.tape();
}

namespace {

const char* kHex = "0123456789abcdef";

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

std::uint64_t read_hex(std::string_view hex, std::size_t& pos, int digits) {
  if (pos + digits > hex.size())
    throw DataError("certificate truncated at digit " + std::to_string(pos));
  std::uint64_t v = 0;
  for (int i = 0; i < digits; ++i) {
    int d = hex_value(hex[pos]);
    if (d < 0)
      throw DataError("certificate has non-hex digit at " + std::to_string(pos));
    v = (v << 4) | static_cast<std::uint64_t>(d);
    ++pos;
  }
  return v;
}

}  // namespace

std::string encode_segment(const TapeSegment& seg) {
  char head[25];
  std::snprintf(head, sizeof head, "%016llx%08llx",
                static_cast<unsigned long long>(seg.seed),
                static_cast<unsigned long long>(seg.bits.size()));
  std::string out(head);
  const std::size_t n = seg.bits.size();
  for (std::size_t i = 0; i < n; i += 4) {
    int nibble = 0;
    for (std::size_t k = 0; k < 4; ++k)
      nibble = (nibble << 1) | (i + k < n && seg.bits[i + k] ? 1 : 0);
    out += kHex[nibble];
  }
  return out;
}

TapeSegment decode_segment(std::string_view hex, std::size_t& pos) {
  TapeSegment seg;
  seg.seed = read_hex(hex, pos, 16);
  const std::uint64_t n = read_hex(hex, pos, 8);
  const std::uint64_t digits = (n + 3) / 4;
  if (pos + digits > hex.size())
    throw DataError("certificate declares " + std::to_string(n) +
                    " bits but is shorter");
  seg.bits.reserve(n);
  for (std::uint64_t d = 0; d < digits; ++d) {
    std::uint64_t nibble = read_hex(hex, pos, 1);
    for (int k = 3; k >= 0; --k) {
      bool b = (nibble >> k) & 1U;
      if (seg.bits.size() < n)
        seg.bits.push_back(b);
      else if (b)
        throw DataError("certificate has nonzero padding bits");
    }
  }
  return seg;
}

}  // namespace cqc
