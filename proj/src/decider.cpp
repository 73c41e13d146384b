#include "cqc/decider.hpp"

#include <algorithm>
#include <set>
#include <vector>

#include "cqc/errors.hpp"

namespace cqc {

Term Homomorphism::apply(Term t) const {
  if (t.is_constant()) return t;
  auto img = image_[t.index()];
  if (!img) throw Error("homomorphism has no image for " + render(t));
  return *img;
}

Atom Homomorphism::apply(const Atom& a) const {
  Atom out = a;
  for (Term& t : out.terms) t = apply(t);
  return out;
}

bool is_homomorphism(const Homomorphism& h, const Query& p, const Query& q) {
  for (int v : q.variables())
    if (!h.image(v)) return false;
  for (const Atom& a : q.atoms()) {
    Atom img = h.apply(a);
    if (std::find(p.atoms().begin(), p.atoms().end(), img) == p.atoms().end())
      return false;
  }
  return true;
}

namespace {

class Search {
 public:
  Search(const Query& p, const Query& q, std::uint64_t budget)
      : p_(p), budget_(budget) {
    std::vector<Atom> qa(q.atoms().begin(), q.atoms().end());
    std::sort(qa.begin(), qa.end());
    qa.erase(std::unique(qa.begin(), qa.end()), qa.end());
    q_atoms_ = std::move(qa);
    assign_.fill(-1);
    candidates_.resize(q_atoms_.size());
    for (std::size_t i = 0; i < q_atoms_.size(); ++i)
      for (std::size_t j = 0; j < p.size(); ++j)
        if (compatible(q_atoms_[i], p[j])) candidates_[i].push_back(j);
    pending_.assign(q_atoms_.size(), true);
  }

  bool run() {
    for (const auto& c : candidates_)
      if (c.empty()) return false;
    return extend(q_atoms_.size());
  }

  Homomorphism witness() const {
    Homomorphism h;
    for (int v = 0; v < kVariableCount; ++v)
      if (assign_[v] >= 0)
        h.bind(v, Term::from_code(static_cast<std::uint8_t>(assign_[v])));
    return h;
  }

 private:
  // Static filter: same relation, constants fixed, repeated variables of the
  // q atom land on equal terms of the p atom.
  static bool compatible(const Atom& qa, const Atom& pa) {
    if (qa.relation != pa.relation) return false;
    for (int k = 0; k < 3; ++k) {
      Term t = qa.terms[k];
      if (t.is_constant()) {
        if (t != pa.terms[k]) return false;
        continue;
      }
      for (int l = 0; l < k; ++l)
        if (qa.terms[l] == t && pa.terms[l] != pa.terms[k]) return false;
    }
    return true;
  }

  bool consistent(const Atom& qa, const Atom& pa) const {
    for (int k = 0; k < 3; ++k) {
      Term t = qa.terms[k];
      if (t.is_variable()) {
        int bound = assign_[t.index()];
        if (bound >= 0 && bound != pa.terms[k].code()) return false;
      }
    }
    return true;
  }

  bool extend(std::size_t remaining) {
    if (remaining == 0) return true;
    if (++nodes_ > budget_)
      throw BudgetExceeded("decider node budget of " +
                           std::to_string(budget_) + " exceeded");

    std::size_t best = q_atoms_.size();
    std::size_t best_count = SIZE_MAX;
    for (std::size_t i = 0; i < q_atoms_.size(); ++i) {
      if (!pending_[i]) continue;
      std::size_t count = 0;
      for (std::size_t j : candidates_[i]) {
        if (consistent(q_atoms_[i], p_[j]) && ++count >= best_count) break;
      }
      if (count == 0) return false;
      if (count < best_count) {
        best_count = count;
        best = i;
      }
    }

    const Atom& qa = q_atoms_[best];
    pending_[best] = false;
    for (std::size_t j : candidates_[best]) {
      const Atom& pa = p_[j];
      if (!consistent(qa, pa)) continue;
      std::array<int, 3> bound{};
      int nbound = 0;
      for (int k = 0; k < 3; ++k) {
        Term t = qa.terms[k];
        if (t.is_variable() && assign_[t.index()] < 0) {
          assign_[t.index()] = pa.terms[k].code();
          bound[nbound++] = t.index();
        }
      }
      if (extend(remaining - 1)) return true;
      for (int k = 0; k < nbound; ++k) assign_[bound[k]] = -1;
    }
    pending_[best] = true;
    return false;
  }

  const Query& p_;
  std::vector<Atom> q_atoms_;
  std::vector<std::vector<std::size_t>> candidates_;
  std::vector<bool> pending_;
  std::array<int, kVariableCount> assign_;
  std::uint64_t budget_;
  std::uint64_t nodes_ = 0;
};

}  // namespace

std::optional<Homomorphism> find_homomorphism(const Query& p, const Query& q,
                                              const DeciderOptions& opts) {
  Search search(p, q, opts.node_budget);
  if (!search.run()) return std::nullopt;
  return search.witness();
}

bool contains(const Query& p, const Query& q, const DeciderOptions& opts) {
  return find_homomorphism(p, q, opts).has_value();
}

bool contains_bruteforce(const Query& p, const Query& q, std::uint64_t guard) {
  const std::vector<int> vars = q.variables();

  std::set<Term> domain_set{Term::constant(0), Term::constant(1)};
  for (const Atom& a : p.atoms())
    for (Term t : a.terms) domain_set.insert(t);
  const std::vector<Term> domain(domain_set.begin(), domain_set.end());

  std::uint64_t space = 1;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    space *= domain.size();
    if (space > guard)
      throw BudgetExceeded("brute-force mapping space exceeds " +
                           std::to_string(guard));
  }

  const std::set<Atom> target(p.atoms().begin(), p.atoms().end());
  std::vector<std::size_t> digit(vars.size(), 0);
  std::vector<Term> image(kVariableCount, Term::constant(0));
  for (std::uint64_t n = 0; n < space; ++n) {
    for (std::size_t i = 0; i < vars.size(); ++i)
      image[vars[i]] = domain[digit[i]];

    bool ok = true;
    for (const Atom& a : q.atoms()) {
      Atom mapped = a;
      for (Term& t : mapped.terms)
        if (t.is_variable()) t = image[t.index()];
      if (!target.contains(mapped)) {
        ok = false;
        break;
      }
    }
    if (ok) return true;

    for (std::size_t i = 0; i < digit.size(); ++i) {
      if (++digit[i] < domain.size()) break;
      digit[i] = 0;
    }
  }
  return false;
}

namespace {

std::string tptp_term(Term t) {
  if (t.is_constant()) return t.value() == 0 ? "c0" : "c1";
  return "X" + std::to_string(t.index());
}

std::string tptp_formula(const Query& q) {
  std::string body;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (i > 0) body += " & ";
    body += q[i].relation == Relation::R0 ? "r0(" : "r1(";
    for (int k = 0; k < 3; ++k) {
      if (k > 0) body += ",";
      body += tptp_term(q[i].terms[k]);
    }
    body += ")";
  }
  const std::vector<int> vars = q.variables();
  if (vars.empty()) return "( " + body + " )";
  std::string out = "? [";
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (i > 0) out += ",";
    out += "X" + std::to_string(vars[i]);
  }
  return out + "] : ( " + body + " )";
}

}  // namespace

std::string export_tptp(const QueryPair& pair) {
  std::string out;
  out += "% p: " + render(pair.p) + "\n";
  out += "% q: " + render(pair.q) + "\n";
  out += "% Theorem iff p is contained in q (boolean conjunctive queries).\n";
  out += "fof(query_p, axiom, " + tptp_formula(pair.p) + ").\n";
  out += "fof(query_q, conjecture, " + tptp_formula(pair.q) + ").\n";
  return out;
}

}  // namespace cqc
