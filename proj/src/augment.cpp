#include "cqc/augment.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "cqc/errors.hpp"

namespace cqc {

std::string_view name(RewriteKind kind) {
  switch (kind) {
    case RewriteKind::kMergeVar: return "MergeVar";
    case RewriteKind::kSplitVar: return "SplitVar";
    case RewriteKind::kAddConj: return "AddConj";
    case RewriteKind::kDelConj: return "DelConj";
    case RewriteKind::kShuffle: return "Shuffle";
  }
  return "?";
}

std::string name(Rewrite rw) {
  return std::string(name(rw.kind)) + (rw.side == Side::kP ? "(p)" : "(q)");
}

namespace {

constexpr std::array<Rewrite, 6> kPositiveRewrites{{
    {RewriteKind::kMergeVar, Side::kP},
    {RewriteKind::kSplitVar, Side::kQ},
    {RewriteKind::kAddConj, Side::kP},
    {RewriteKind::kDelConj, Side::kQ},
    {RewriteKind::kShuffle, Side::kP},
    {RewriteKind::kShuffle, Side::kQ},
}};

constexpr std::array<Rewrite, 5> kNegativeRewrites{{
    {RewriteKind::kMergeVar, Side::kQ},
    {RewriteKind::kSplitVar, Side::kP},
    {RewriteKind::kAddConj, Side::kQ},
    {RewriteKind::kShuffle, Side::kP},
    {RewriteKind::kShuffle, Side::kQ},
}};

const Query& side_of(const LabeledPair& pair, Side s) {
  return s == Side::kP ? pair.p : pair.q;
}

Query merge_var(const Query& q, TapeRng& rng) {
  const std::vector<int> vars = q.variables();
  const int x = vars[rng.uniform(vars.size())];
  std::vector<int> others;
  for (int v : vars)
    if (v != x) others.push_back(v);
  const int y = others[rng.uniform(others.size())];
  std::vector<Atom> atoms(q.atoms().begin(), q.atoms().end());
  for (Atom& a : atoms)
    for (Term& t : a.terms)
      if (t.is_variable() && t.index() == y) t = Term::variable(x);
  return Query(std::move(atoms));
}

int fresh_variable(const Query& q) {
  for (int i = 0; i <= kMaxVariableIndex; ++i)
    if (!q.has_variable(i)) return i;
  return -1;
}

Query split_var(const Query& q, TapeRng& rng) {
  const int w = fresh_variable(q);
  const std::vector<int> vars = q.variables();
  const int x = vars[rng.uniform(vars.size())];
  std::vector<Atom> atoms(q.atoms().begin(), q.atoms().end());
  for (Atom& a : atoms)
    for (Term& t : a.terms)
      if (t.is_variable() && t.index() == x && rng.bit()) t = Term::variable(w);
  return Query(std::move(atoms));
}

Query add_conj(const Query& q, TapeRng& rng) {
  const std::vector<int> vars = q.variables();
  const std::uint64_t pool = vars.size() + 2;
  Atom a;
  a.relation = rng.uniform(2) == 0 ? Relation::R0 : Relation::R1;
  for (Term& t : a.terms) {
    const std::uint64_t k = rng.uniform(pool);
    t = k < vars.size() ? Term::variable(vars[k])
                        : Term::constant(static_cast<int>(k - vars.size()));
  }
  std::vector<Atom> atoms(q.atoms().begin(), q.atoms().end());
  atoms.push_back(a);
  return Query(std::move(atoms));
}

Query del_conj(const Query& q, TapeRng& rng) {
  std::vector<Atom> atoms(q.atoms().begin(), q.atoms().end());
  atoms.erase(atoms.begin() + static_cast<std::ptrdiff_t>(rng.uniform(atoms.size())));
  return Query(std::move(atoms));
}

Query shuffle(const Query& q, TapeRng& rng) {
  std::vector<Atom> atoms(q.atoms().begin(), q.atoms().end());
  for (std::size_t i = atoms.size(); i-- > 1;)
    std::swap(atoms[i], atoms[rng.uniform(i + 1)]);
  return Query(std::move(atoms));
}

}  // namespace

std::span<const Rewrite> permitted_rewrites(int label) {
  if (label == 1) return kPositiveRewrites;
  if (label == 0) return kNegativeRewrites;
  throw Error("label must be 0 or 1");
}

bool applicable(const LabeledPair& pair, Rewrite rw, const AugmentOptions& opts) {
  auto permitted = permitted_rewrites(pair.label);
  if (std::find(permitted.begin(), permitted.end(), rw) == permitted.end())
    return false;
  const Query& q = side_of(pair, rw.side);
  switch (rw.kind) {
    case RewriteKind::kMergeVar:
      return q.variables().size() >= 2;
    case RewriteKind::kSplitVar:
      return !q.variables().empty() && fresh_variable(q) >= 0;
    case RewriteKind::kAddConj: {
      const int cap = rw.side == Side::kP ? opts.max_atoms_p : opts.max_atoms_q;
      return static_cast<int>(q.size()) < cap;
    }
    case RewriteKind::kDelConj:
      return q.size() >= 2;
    case RewriteKind::kShuffle:
      return true;
  }
  return false;
}

LabeledPair apply_rewrite(const LabeledPair& pair, Rewrite rw, TapeRng& rng,
                          const AugmentOptions& opts) {
  if (!applicable(pair, rw, opts))
    throw InapplicableRewrite(name(rw) + " is not applicable to a label-" +
                              std::to_string(pair.label) + " pair");
  const Query& in = side_of(pair, rw.side);
  Query out = [&] {
    switch (rw.kind) {
      case RewriteKind::kMergeVar: return merge_var(in, rng);
      case RewriteKind::kSplitVar: return split_var(in, rng);
      case RewriteKind::kAddConj: return add_conj(in, rng);
      case RewriteKind::kDelConj: return del_conj(in, rng);
      case RewriteKind::kShuffle: return shuffle(in, rng);
    }
    throw Error("unknown rewrite kind");
  }();
  LabeledPair result = pair;
  (rw.side == Side::kP ? result.p : result.q) = std::move(out);
  return result;
}

LabeledPair augment_pair(const LabeledPair& pair, TapeRng& rng,
                         const AugmentOptions& opts) {
  const auto permitted = permitted_rewrites(pair.label);
  const int steps = 1 + static_cast<int>(rng.uniform(3));
  LabeledPair cur = pair;
  for (int s = 0; s < steps; ++s) {
    bool done = false;
    for (int attempt = 0; attempt <= opts.max_retries && !done; ++attempt) {
      const Rewrite rw = permitted[rng.uniform(permitted.size())];
      if (!applicable(cur, rw, opts)) continue;
      cur = apply_rewrite(cur, rw, rng, opts);
      done = true;
    }
    if (!done)
      throw ExhaustedRetries("no applicable rewrite after " +
                             std::to_string(opts.max_retries) + " retries");
  }
  return cur;
}

std::vector<LabeledPair> augment_chain(const LabeledPair& seed, int count,
                                       TapeRng& rng, const AugmentOptions& opts) {
  if (count < 1) throw Error("augment_chain needs count >= 1");
  std::vector<LabeledPair> chain;
  chain.reserve(count);
  const LabeledPair* prev = &seed;
  for (int i = 0; i < count; ++i) {
    chain.push_back(augment_pair(*prev, rng, opts));
    prev = &chain.back();
  }
  return chain;
}

}  // namespace cqc
