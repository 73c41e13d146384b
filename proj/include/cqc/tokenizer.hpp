#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "cqc/query.hpp"

namespace cqc {

/// Token dictionary and fixed sequence length of the one-hot input encoding.
///
/// Ids are 1-based; 0 is reserved for padding. Queries are laid out as
/// `Q : A1 ∧ A2 ∧ ... ∧ Am` with every atom written `REL ( t t t )`, so a
/// query with m atoms takes 2 + 6m + (m - 1) tokens.
struct EncodingSpec {
  static constexpr int kDictionarySize = 42;
  static constexpr int kSequenceLength = 95;
  static constexpr int kPad = 0;

  static constexpr int kAnd = 1;
  static constexpr int kOpen = 2;
  static constexpr int kClose = 3;
  static constexpr int kR1 = 4;
  static constexpr int kR0 = 5;
  static constexpr int kHead = 12;
  static constexpr int kColon = 13;
  static constexpr int kZero = 41;
  static constexpr int kOne = 42;

  /// x0..x5 -> 6..11, x6..x32 -> 14..40.
  static constexpr int variable_id(int index) {
    return index < 6 ? 6 + index : 8 + index;
  }
  static int term_id(Term t);
  static int relation_id(Relation r) { return r == Relation::R0 ? kR0 : kR1; }

  static constexpr int token_count(int atoms) { return 2 + 6 * atoms + (atoms - 1); }
};

using TokenIds = std::vector<std::uint8_t>;

/// Throws TokenOverflow if the layout exceeds EncodingSpec::kSequenceLength.
TokenIds tokenize(const Query& q);

/// tokenize() followed by zero padding to the full sequence length.
std::array<std::uint8_t, EncodingSpec::kSequenceLength> tokenize_padded(
    const Query& q);

/// Inverse of tokenize; trailing padding is ignored. Throws DataError on a
/// sequence that is not a valid layout.
Query detokenize(std::span<const std::uint8_t> ids);

}  // namespace cqc
