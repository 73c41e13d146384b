#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "cqc/errors.hpp"
#include "cqc/query.hpp"
#include "cqc/tokenizer.hpp"
#include "support.hpp"

using namespace cqc;

namespace {

const char* kThreeAtoms = "R0(x4,x3,x1) & R0(x1,x2,x1) & R1(x5,x1,x2)";

int parse_error_offset(std::string_view text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return static_cast<int>(e.offset());
  }
  return -1;
}

}  // namespace

TEST_CASE("parse single atom") {
  const Query q = parse("R0(x0,x1,x2)");
  REQUIRE(q.size() == 1);
  CHECK(q[0].relation == Relation::R0);
  CHECK(q[0].terms[0] == Term::variable(0));
  CHECK(q[0].terms[1] == Term::variable(1));
  CHECK(q[0].terms[2] == Term::variable(2));
}

TEST_CASE("parse three-atom query") {
  const Query q = parse(kThreeAtoms);
  REQUIRE(q.size() == 3);
  CHECK(q[0] == Atom{Relation::R0, {Term::variable(4), Term::variable(3), Term::variable(1)}});
  CHECK(q[1] == Atom{Relation::R0, {Term::variable(1), Term::variable(2), Term::variable(1)}});
  CHECK(q[2] == Atom{Relation::R1, {Term::variable(5), Term::variable(1), Term::variable(2)}});
  CHECK(q.variables() == std::vector<int>{1, 2, 3, 4, 5});
}

TEST_CASE("render reproduces input modulo whitespace") {
  CHECK(render(parse(kThreeAtoms)) == kThreeAtoms);
  CHECK(render(parse("  R0( x4 ,x3, x1)&R0(x1,x2,x1)   &  R1(x5,x1,x2) ")) == kThreeAtoms);
  CHECK(render(parse("R1(0,1,x0)")) == "R1(0,1,x0)");
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse("R0(x0,x1)"), ParseError);
  CHECK(parse_error_offset("R0(x0,x1)") == 2);
  CHECK_THROWS_AS(parse("R0(x0,x1,x2,x3)"), ParseError);
  CHECK_THROWS_AS(parse("R0(x33,x1,x2)"), ParseError);
  CHECK_THROWS_AS(parse("R0(x100,x1,x2)"), ParseError);
  CHECK_THROWS_AS(parse("R2(x0,x1,x2)"), ParseError);
  CHECK_THROWS_AS(parse("R0(x0,x1,2)"), ParseError);
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse("R0(x0,x1,x2) &"), ParseError);
  CHECK_THROWS_AS(parse("R0(x0,x1,x2) R0(x0,x1,x2)"), ParseError);
  CHECK(parse_error_offset("R0(x0,x1,x2) & R0(y,x1,x2)") == 18);
  CHECK(parse("R0(x32,x1,x2)")[0].terms[0] == Term::variable(32));
}

TEST_CASE("parse enforces atom bound") {
  std::string text = "R0(x0,x0,x0)";
  for (int i = 1; i < 11; ++i) text += " & R0(x0,x0,x0)";
  CHECK_THROWS_AS(parse(text), ParseError);
  CHECK(parse(text, 11).size() == 11);
}

TEST_CASE("parse and render round trip on random queries") {
  std::mt19937_64 g(101);
  for (int i = 0; i < 10000; ++i) {
    const Query q = testing::random_sparse_query(g, 10);
    const std::string text = render(q);
    REQUIRE(parse(text) == q);
    REQUIRE(render(parse(text)) == text);
  }
}

TEST_CASE("canonicalize") {
  CHECK(render(canonicalize(parse("R0(x7,x7,x9)"))) == "R0(x0,x0,x1)");
  CHECK(render(canonicalize(parse("R1(0,x5,1)"))) == "R1(0,x0,1)");
  CHECK(render(canonicalize(parse("R0(x3,1,x9) & R1(x9,x2,x3)"))) ==
        "R0(x0,1,x1) & R1(x1,x2,x0)");

  std::mt19937_64 g(202);
  for (int i = 0; i < 10000; ++i) {
    const Query c = canonicalize(testing::random_sparse_query(g, 10));
    REQUIRE(canonicalize(c) == c);
  }
}

TEST_CASE("token table") {
  using E = EncodingSpec;
  std::map<int, int> seen;
  for (int v = 0; v <= kMaxVariableIndex; ++v) ++seen[E::variable_id(v)];
  for (int id : {E::kAnd, E::kOpen, E::kClose, E::kR1, E::kR0, E::kHead,
                 E::kColon, E::kZero, E::kOne})
    ++seen[id];
  // Every id 1..42 used exactly once: 33 variables + 3 punctuation + 2
  // relations + 2 head tokens + 2 constants.
  CHECK(seen.size() == 42);
  CHECK(seen.begin()->first == 1);
  CHECK(seen.rbegin()->first == E::kDictionarySize);
  for (auto [id, n] : seen) CHECK(n == 1);

  CHECK(E::variable_id(0) == 6);
  CHECK(E::variable_id(5) == 11);
  CHECK(E::variable_id(6) == 14);
  CHECK(E::variable_id(32) == 40);
}

TEST_CASE("tokenize examples") {
  CHECK(tokenize(parse("R0(x0,x1,x2)")) == TokenIds{12, 13, 5, 2, 6, 7, 8, 3});
  CHECK(tokenize(parse(kThreeAtoms)) ==
        TokenIds{12, 13, 5, 2, 10, 9, 7, 3, 1, 5, 2, 7, 8, 7, 3, 1, 4, 2, 11, 7, 8, 3});
  CHECK(tokenize(parse("R1(0,1,x6)")) == TokenIds{12, 13, 4, 2, 41, 42, 14, 3});
}

TEST_CASE("token length is 2 + 7m - 1") {
  std::mt19937_64 g(303);
  for (int m = 1; m <= 10; ++m) {
    const Query q = testing::random_query(g, {m, m, 33, true});
    CHECK(tokenize(q).size() == static_cast<std::size_t>(2 + 6 * m + (m - 1)));
  }
  CHECK(EncodingSpec::token_count(10) == 71);
  CHECK(EncodingSpec::token_count(13) == 92);
  CHECK(EncodingSpec::token_count(14) == 99);
}

TEST_CASE("tokenize overflow") {
  std::string text = "R0(x0,x0,x0)";
  for (int i = 1; i < 14; ++i) text += " & R1(x1,0,x0)";
  CHECK_THROWS_AS(tokenize(parse(text, 14)), TokenOverflow);
  const Query thirteen = parse(text.substr(0, text.rfind(" & ")), 13);
  CHECK(tokenize(thirteen).size() == 92);
}

TEST_CASE("tokenize is injective and invertible") {
  std::mt19937_64 g(404);
  std::map<TokenIds, std::string> seen;
  for (int i = 0; i < 10000; ++i) {
    const Query q = testing::random_sparse_query(g, 10);
    const TokenIds ids = tokenize(q);
    for (auto id : ids) REQUIRE((id >= 1 && id <= 42));
    auto [it, fresh] = seen.emplace(ids, render(q));
    if (!fresh) REQUIRE(it->second == render(q));
    REQUIRE(detokenize(ids) == q);
    const auto padded = tokenize_padded(q);
    REQUIRE(detokenize(padded) == q);
    for (std::size_t k = ids.size(); k < padded.size(); ++k) REQUIRE(padded[k] == 0);
  }
}

TEST_CASE("detokenize rejects malformed sequences") {
  CHECK_THROWS_AS(detokenize(TokenIds{}), DataError);
  CHECK_THROWS_AS(detokenize(TokenIds{12, 13, 5, 2, 6, 7, 3}), DataError);
  CHECK_THROWS_AS(detokenize(TokenIds{12, 13, 5, 2, 6, 7, 8, 3, 1}), DataError);
  CHECK_THROWS_AS(detokenize(TokenIds{12, 13, 5, 2, 6, 7, 8, 3, 0, 4}), DataError);
  CHECK_THROWS_AS(detokenize(TokenIds{13, 12, 5, 2, 6, 7, 8, 3}), DataError);
}
