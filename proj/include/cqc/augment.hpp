#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "cqc/query.hpp"
#include "cqc/tape_rng.hpp"

namespace cqc {

/// A solved instance: label 1 iff p ⊆ q.
struct LabeledPair {
  Query p;
  Query q;
  int label = 0;

  friend bool operator==(const LabeledPair&, const LabeledPair&) = default;
};

enum class RewriteKind { kMergeVar, kSplitVar, kAddConj, kDelConj, kShuffle };
enum class Side { kP, kQ };

struct Rewrite {
  RewriteKind kind;
  Side side;

  friend bool operator==(const Rewrite&, const Rewrite&) = default;
};

std::string_view name(RewriteKind kind);
std::string name(Rewrite rw);

/// Label-preserving rewrites for each class.
///
/// label 1: MergeVar(p), SplitVar(q), AddConj(p), DelConj(q), Shuffle(p), Shuffle(q)
/// label 0: MergeVar(q), SplitVar(p), AddConj(q), Shuffle(p), Shuffle(q)
std::span<const Rewrite> permitted_rewrites(int label);

struct AugmentOptions {
  int max_atoms_p = 10;
  int max_atoms_q = 8;
  int max_retries = 16;
};

bool applicable(const LabeledPair& pair, Rewrite rw,
                const AugmentOptions& opts = {});

/// Applies one rewrite. Parameters are drawn from rng:
///  - MergeVar: x uniform over vars, then y uniform over the others; y := x.
///  - SplitVar: w is the smallest unused index, x uniform over vars, and each
///    occurrence of x becomes w on a fair coin.
///  - AddConj: relation, then three terms uniform over the side's variables
///    plus {0, 1}; the atom is appended.
///  - DelConj: uniform atom index removed.
///  - Shuffle: Fisher-Yates from the last position down.
/// Throws InapplicableRewrite if rw is not in the label's permitted set or
/// cannot be applied to the pair.
LabeledPair apply_rewrite(const LabeledPair& pair, Rewrite rw, TapeRng& rng,
                          const AugmentOptions& opts = {});

/// k ~ U{1, 2, 3} rewrites, each drawn uniformly from the permitted set and
/// redrawn on inapplicability up to max_retries times.
LabeledPair augment_pair(const LabeledPair& pair, TapeRng& rng,
                         const AugmentOptions& opts = {});

/// `count` successive augment_pair outputs, each starting from the previous
/// one. Element i is chain step i + 1.
std::vector<LabeledPair> augment_chain(const LabeledPair& seed, int count,
                                       TapeRng& rng,
                                       const AugmentOptions& opts = {});

}  // namespace cqc
