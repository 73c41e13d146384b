#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "cqc/query.hpp"

namespace cqc {

/// Containment mapping from the variables of q into the terms of p.
/// Constants are implicitly fixed; only variables of q carry an image.
class Homomorphism {
 public:
  void bind(int variable, Term image) { image_[variable] = image; }
  std::optional<Term> image(int variable) const { return image_[variable]; }
  Term apply(Term t) const;
  Atom apply(const Atom& a) const;

 private:
  std::array<std::optional<Term>, kVariableCount> image_{};
};

/// True iff h maps every atom of q onto some atom of p.
bool is_homomorphism(const Homomorphism& h, const Query& p, const Query& q);

struct DeciderOptions {
  std::uint64_t node_budget = 100'000'000;
};

/// Backtracking search for a mapping q -> p. Atoms of q are matched most
/// constrained first (fewest consistent candidates in p under the partial
/// assignment), with forward checking of every pending atom after each
/// binding. Throws BudgetExceeded when the node budget runs out.
std::optional<Homomorphism> find_homomorphism(const Query& p, const Query& q,
                                              const DeciderOptions& opts = {});

/// p ⊆ q under boolean semantics, i.e. a homomorphism from q into p exists.
bool contains(const Query& p, const Query& q, const DeciderOptions& opts = {});

inline constexpr std::uint64_t kBruteForceGuard = 10'000'000;

/// Enumerates every total map vars(q) -> terms(p) ∪ {0, 1}. Throws
/// BudgetExceeded when the mapping space exceeds `guard`.
bool contains_bruteforce(const Query& p, const Query& q,
                         std::uint64_t guard = kBruteForceGuard);

/// First-order (TPTP fof) problem whose conjecture holds iff p ⊆ q.
std::string export_tptp(const QueryPair& pair);

}  // namespace cqc
