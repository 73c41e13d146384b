#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cqc/augment.hpp"
#include "cqc/query.hpp"

namespace cqc::testing {

struct QueryGen {
  int min_atoms = 1;
  int max_atoms = 4;
  int variables = 6;
  bool constants = true;
};

inline Term random_term(std::mt19937_64& g, int variables, bool constants) {
  const int pool = variables + (constants ? 2 : 0);
  const int k = static_cast<int>(g() % static_cast<std::uint64_t>(pool));
  return k < variables ? Term::variable(k) : Term::constant(k - variables);
}

inline Query random_query(std::mt19937_64& g, const QueryGen& cfg = {}) {
  const int span = cfg.max_atoms - cfg.min_atoms + 1;
  const int m = cfg.min_atoms + static_cast<int>(g() % static_cast<std::uint64_t>(span));
  std::vector<Atom> atoms(m);
  for (Atom& a : atoms) {
    a.relation = (g() & 1) ? Relation::R1 : Relation::R0;
    for (Term& t : a.terms) t = random_term(g, cfg.variables, cfg.constants);
  }
  return Query(std::move(atoms));
}

/// Variables spread over the whole x0..x32 range, not just a prefix.
inline Query random_sparse_query(std::mt19937_64& g, int max_atoms) {
  const int m = 1 + static_cast<int>(g() % static_cast<std::uint64_t>(max_atoms));
  std::vector<Atom> atoms(m);
  for (Atom& a : atoms) {
    a.relation = (g() & 1) ? Relation::R1 : Relation::R0;
    for (Term& t : a.terms) {
      const int k = static_cast<int>(g() % 35);
      t = k < 33 ? Term::variable(k) : Term::constant(k - 33);
    }
  }
  return Query(std::move(atoms));
}

/// A pair (p, q) with p contained in q: q keeps a random nonempty subset of
/// p's atoms, and each variable occurrence may be generalised to a fresh
/// variable.
inline std::pair<Query, Query> contained_pair(std::mt19937_64& g, const QueryGen& cfg = {}) {
  const Query p = random_query(g, cfg);
  std::vector<Atom> kept;
  for (const Atom& a : p.atoms())
    if (g() & 1) kept.push_back(a);
  if (kept.empty()) kept.push_back(p[g() % p.size()]);
  int fresh = cfg.variables;
  for (Atom& a : kept)
    for (Term& t : a.terms)
      if (fresh <= kMaxVariableIndex && g() % 4 == 0) t = Term::variable(fresh++);
  return {p, Query(std::move(kept))};
}

/// Test-side containment oracle: tries every map from vars(q) into the terms
/// of p, one atom image lookup at a time. Kept deliberately naive.
inline bool naive_contains(const Query& p, const Query& q) {
  std::vector<Term> domain{Term::constant(0), Term::constant(1)};
  for (const Atom& a : p.atoms())
    for (Term t : a.terms) domain.push_back(t);
  std::vector<int> vars;
  for (const Atom& a : q.atoms())
    for (Term t : a.terms)
      if (t.is_variable() &&
          std::find(vars.begin(), vars.end(), t.index()) == vars.end())
        vars.push_back(t.index());

  std::vector<std::size_t> pick(vars.size(), 0);
  while (true) {
    bool all = true;
    for (const Atom& a : q.atoms()) {
      Atom img = a;
      for (Term& t : img.terms)
        if (t.is_variable()) {
          const auto pos = std::find(vars.begin(), vars.end(), t.index()) - vars.begin();
          t = domain[pick[pos]];
        }
      bool found = false;
      for (const Atom& b : p.atoms()) found = found || (b == img);
      if (!found) {
        all = false;
        break;
      }
    }
    if (all) return true;
    std::size_t i = 0;
    for (; i < pick.size(); ++i) {
      if (++pick[i] < domain.size()) break;
      pick[i] = 0;
    }
    if (i == pick.size()) return false;
  }
}

/// Every atom list over the full pool, canonicalised and deduplicated.
inline std::vector<Query> naive_queries(int atoms, int variables, bool constants) {
  std::vector<Term> pool;
  for (int v = 0; v < variables; ++v) pool.push_back(Term::variable(v));
  if (constants) {
    pool.push_back(Term::constant(0));
    pool.push_back(Term::constant(1));
  }
  const std::size_t per_atom = 2 * pool.size() * pool.size() * pool.size();
  std::size_t total = 1;
  for (int i = 0; i < atoms; ++i) total *= per_atom;

  std::set<std::string> seen;
  std::vector<Query> out;
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    std::vector<Atom> list(atoms);
    for (Atom& a : list) {
      a.relation = (c % 2) ? Relation::R1 : Relation::R0;
      c /= 2;
      for (Term& t : a.terms) {
        t = pool[c % pool.size()];
        c /= pool.size();
      }
    }
    const Query q = canonicalize(Query(list));
    if (seen.insert(render(q)).second) out.push_back(q);
  }
  return out;
}

}  // namespace cqc::testing
