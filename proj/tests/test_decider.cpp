#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cqc/decider.hpp"
#include "cqc/errors.hpp"
#include "support.hpp"

using namespace cqc;

namespace {

std::vector<Query> single_atom_space() {
  std::vector<Query> out;
  const Term pool[] = {Term::variable(0), Term::variable(1), Term::constant(0),
                       Term::constant(1)};
  for (Relation r : {Relation::R0, Relation::R1})
    for (Term a : pool)
      for (Term b : pool)
        for (Term c : pool) out.push_back(Query({Atom{r, {a, b, c}}}));
  return out;
}

Query with_atom(const Query& q, const Atom& a) {
  std::vector<Atom> atoms(q.atoms().begin(), q.atoms().end());
  atoms.push_back(a);
  return Query(std::move(atoms));
}

}  // namespace

TEST_CASE("examples") {
  CHECK(contains(parse("R0(x0,x1,x2) & R1(x1,x1,x0)"), parse("R0(x0,x1,x2)")));
  const Query a = parse("R0(x1,x2,x3)");
  const Query b = parse("R0(x1,x1,x2)");
  CHECK(contains(b, a));
  CHECK_FALSE(contains(a, b));
  CHECK(contains_bruteforce(b, a));
  CHECK_FALSE(contains_bruteforce(a, b));
}

TEST_CASE("constants are fixed") {
  CHECK(contains(parse("R0(0,1,0)"), parse("R0(x0,1,x0)")));
  CHECK_FALSE(contains(parse("R0(0,1,0)"), parse("R0(x0,0,x0)")));
  CHECK_FALSE(contains(parse("R0(x0,x1,x2)"), parse("R0(0,x1,x2)")));
  CHECK(contains(parse("R0(0,x1,x2)"), parse("R0(x5,x1,x2)")));
}

TEST_CASE("variable-free q reduces to atom subset") {
  const Query p = parse("R0(0,1,1) & R1(x0,0,0)");
  CHECK(contains(p, parse("R0(0,1,1)")));
  CHECK_FALSE(contains(p, parse("R1(0,0,0)")));
  CHECK(contains_bruteforce(p, parse("R0(0,1,1)")));
  CHECK_FALSE(contains_bruteforce(p, parse("R1(0,0,0)")));
}

TEST_CASE("witness is a homomorphism") {
  std::mt19937_64 g(11);
  int found = 0;
  for (int i = 0; i < 5000; ++i) {
    const Query p = testing::random_query(g, {1, 5, 4, true});
    const Query q = testing::random_query(g, {1, 3, 4, true});
    auto h = find_homomorphism(p, q);
    if (!h) continue;
    ++found;
    REQUIRE(is_homomorphism(*h, p, q));
  }
  CHECK(found > 100);
}

TEST_CASE("exhaustive single-atom space agrees with both oracles") {
  const auto space = single_atom_space();
  REQUIRE(space.size() == 128);
  std::size_t pairs = 0;
  std::size_t positives = 0;
  for (const Query& p : space)
    for (const Query& q : space) {
      const bool d = contains(p, q);
      REQUIRE(d == contains_bruteforce(p, q));
      REQUIRE(d == testing::naive_contains(p, q));
      positives += d;
      ++pairs;
    }
  CHECK(pairs == 16384);
  CHECK(positives > 0);
}

TEST_CASE("random differential agreement") {
  std::mt19937_64 g(12);
  for (int i = 0; i < 20000; ++i) {
    const Query p = testing::random_query(g, {1, 4, 5, true});
    const Query q = testing::random_query(g, {1, 4, 5, true});
    REQUIRE(contains(p, q) == testing::naive_contains(p, q));
  }
}

TEST_CASE("reflexivity") {
  std::mt19937_64 g(13);
  for (int i = 0; i < 5000; ++i) {
    const Query p = testing::random_sparse_query(g, 10);
    REQUIRE(contains(p, p));
  }
}

TEST_CASE("transitivity") {
  std::mt19937_64 g(14);
  int chains = 0;
  for (int i = 0; i < 40000; ++i) {
    const Query p = testing::random_query(g, {1, 4, 3, false});
    const Query q = testing::random_query(g, {1, 3, 3, false});
    if (!contains(p, q)) continue;
    const Query r = testing::random_query(g, {1, 2, 3, false});
    if (!contains(q, r)) continue;
    ++chains;
    REQUIRE(contains(p, r));
  }
  CHECK(chains > 200);
}

TEST_CASE("monotonicity under added atoms") {
  std::mt19937_64 g(15);
  for (int i = 0; i < 10000; ++i) {
    const Query p = testing::random_query(g, {1, 4, 4, true});
    const Query q = testing::random_query(g, {1, 4, 4, true});
    const Query extra = testing::random_query(g, {1, 1, 6, true});
    const bool before = contains(p, q);
    if (before) REQUIRE(contains(with_atom(p, extra[0]), q));
    if (!before) REQUIRE_FALSE(contains(p, with_atom(q, extra[0])));
  }
}

TEST_CASE("canonicalize preserves labels in both directions") {
  std::mt19937_64 g(16);
  for (int i = 0; i < 10000; ++i) {
    const Query p = testing::random_sparse_query(g, 4);
    const Query q = testing::random_sparse_query(g, 4);
    const bool pq = contains(p, q);
    const bool qp = contains(q, p);
    REQUIRE(contains(canonicalize(p), canonicalize(q)) == pq);
    REQUIRE(contains(canonicalize(q), canonicalize(p)) == qp);
  }
}

TEST_CASE("budgets") {
  const Query p = parse("R0(x0,x1,x2) & R0(x1,x2,x0) & R0(x2,x0,x1)");
  const Query q = parse("R0(x0,x1,x2) & R0(x3,x4,x5) & R0(x5,x3,x4) & R0(x6,x7,x8)");
  CHECK(contains(p, q));
  CHECK_THROWS_AS(contains(p, q, DeciderOptions{1}), BudgetExceeded);

  std::string big = "R0(x0,x1,x2)";
  for (int v = 3; v < 30; v += 3)
    big += " & R0(x" + std::to_string(v) + ",x" + std::to_string(v + 1) + ",x" +
           std::to_string(v + 2) + ")";
  const Query wide = parse(big);
  CHECK_THROWS_AS(contains_bruteforce(wide, wide), BudgetExceeded);
  CHECK(contains(wide, wide));
}

TEST_CASE("tptp export") {
  const std::string text = export_tptp({parse("R0(x0,1,x1)"), parse("R1(0,0,0)")});
  CHECK(text.find("fof(query_p, axiom, ? [X0,X1] : ( r0(X0,c1,X1) )).") != std::string::npos);
  CHECK(text.find("fof(query_q, conjecture, ( r1(c0,c0,c0) )).") != std::string::npos);

  auto count = [](const std::string& s, const std::string& needle) {
    int n = 0;
    for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
    return n;
  };
  CHECK(count(text, ", axiom,") == 1);
  CHECK(count(text, ", conjecture,") == 1);

  const Query p = parse("R0(x4,x3,x1) & R1(x1,0,x4)");
  const std::string self = export_tptp({p, p});
  const auto ax = self.find("axiom, ");
  const auto cj = self.find("conjecture, ");
  REQUIRE(ax != std::string::npos);
  REQUIRE(cj != std::string::npos);
  CHECK(self.substr(ax + 7, self.find('\n', ax) - ax - 7) ==
        self.substr(cj + 12, self.find('\n', cj) - cj - 12));
}
