#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cqc {

/// splitmix64 output function applied to a state word.
std::uint64_t splitmix64_mix(std::uint64_t z) noexcept;

/// Seed of an independent stream. Streams are identified by a small tag so
/// that seed sampling and augmentation of the same record never share bits.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                          std::uint64_t index) noexcept;

enum class Stream : std::uint64_t {
  kSeedSampling = 1,
  kAugmentation = 2,
  kPhaseEstimate = 3,
  kSubsample = 4,
};

using BitTape = std::vector<bool>;

/// Random-bit source that either records every bit it hands out or replays a
/// previously recorded tape.
///
/// Bits come from a splitmix64 generator: each 64-bit output word is consumed
/// most significant bit first. Multi-bit draws assemble bits in the order they
/// are consumed, first bit most significant. A uniform choice among k options
/// draws ceil(log2 k) bits and rejects values >= k; k == 1 consumes nothing.
class TapeRng {
 public:
  enum class Mode { kRecord, kReplay };

  static TapeRng record(std::uint64_t seed);
  static TapeRng replay(BitTape tape);

  bool bit();
  std::uint64_t bits(int width);
  std::uint64_t uniform(std::uint64_t k);

  Mode mode() const noexcept { return mode_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const BitTape& tape() const noexcept { return tape_; }
  /// Number of bits consumed so far.
  std::size_t position() const noexcept { return position_; }
  bool exhausted() const noexcept { return position_ >= tape_.size(); }

 private:
  TapeRng() = default;

  Mode mode_ = Mode::kRecord;
  std::uint64_t seed_ = 0;
  std::uint64_t state_ = 0;
  std::uint64_t word_ = 0;
  int word_bits_ = 0;
  BitTape tape_;
  std::size_t position_ = 0;
};

/// The first `count` bits a recording TapeRng seeded with `seed` would emit.
BitTape generator_bits(std::uint64_t seed, std::size_t count);

/// One recorded stream: the generator seed and the exact bits consumed.
struct TapeSegment {
  std::uint64_t seed = 0;
  BitTape bits;

  friend bool operator==(const TapeSegment&, const TapeSegment&) = default;
};

/// Hex form of a segment: 16 hex digits of seed, 8 hex digits of bit count,
/// then the bits packed four per hex digit, first bit in the high position,
/// the last digit zero-padded. Lowercase throughout.
std::string encode_segment(const TapeSegment& seg);

/// Decodes one segment starting at `pos` and advances `pos`. Throws DataError
/// on malformed input, including nonzero padding bits.
TapeSegment decode_segment(std::string_view hex, std::size_t& pos);

}  // namespace cqc
