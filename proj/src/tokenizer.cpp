#include "cqc/tokenizer.hpp"

#include <algorithm>

#include "cqc/errors.hpp"

namespace cqc {

int EncodingSpec::term_id(Term t) {
  if (t.is_constant()) return t.value() == 0 ? kZero : kOne;
  return variable_id(t.index());
}

TokenIds tokenize(const Query& q) {
  const int length = EncodingSpec::token_count(static_cast<int>(q.size()));
  if (length > EncodingSpec::kSequenceLength)
    throw TokenOverflow("query with " + std::to_string(q.size()) +
                        " atoms needs " + std::to_string(length) +
                        " tokens, limit is " +
                        std::to_string(EncodingSpec::kSequenceLength));
  TokenIds ids;
  ids.reserve(length);
  ids.push_back(EncodingSpec::kHead);
  ids.push_back(EncodingSpec::kColon);
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (i > 0) ids.push_back(EncodingSpec::kAnd);
    ids.push_back(EncodingSpec::relation_id(q[i].relation));
    ids.push_back(EncodingSpec::kOpen);
    for (Term t : q[i].terms) ids.push_back(EncodingSpec::term_id(t));
    ids.push_back(EncodingSpec::kClose);
  }
  return ids;
}

std::array<std::uint8_t, EncodingSpec::kSequenceLength> tokenize_padded(
    const Query& q) {
  std::array<std::uint8_t, EncodingSpec::kSequenceLength> out{};
  TokenIds ids = tokenize(q);
  std::copy(ids.begin(), ids.end(), out.begin());
  return out;
}

namespace {

Term term_from_id(int id) {
  if (id >= 6 && id <= 11) return Term::variable(id - 6);
  if (id >= 14 && id <= 40) return Term::variable(id - 8);
  if (id == EncodingSpec::kZero) return Term::constant(0);
  if (id == EncodingSpec::kOne) return Term::constant(1);
  throw DataError("token " + std::to_string(id) + " is not a term");
}

}  // namespace

Query detokenize(std::span<const std::uint8_t> ids) {
  std::size_t end = ids.size();
  while (end > 0 && ids[end - 1] == EncodingSpec::kPad) --end;
  ids = ids.first(end);
  auto bad = [](const std::string& what) {
    return DataError("invalid token sequence: " + what);
  };
  if (ids.size() < 2 || ids[0] != EncodingSpec::kHead ||
      ids[1] != EncodingSpec::kColon)
    throw bad("missing 'Q :' head");
  std::vector<Atom> atoms;
  std::size_t i = 2;
  while (i < ids.size()) {
    if (!atoms.empty()) {
      if (ids[i] != EncodingSpec::kAnd) throw bad("expected conjunction");
      ++i;
    }
    if (i + 6 > ids.size()) throw bad("truncated atom");
    Atom a;
    if (ids[i] == EncodingSpec::kR0)
      a.relation = Relation::R0;
    else if (ids[i] == EncodingSpec::kR1)
      a.relation = Relation::R1;
    else
      throw bad("expected relation");
    if (ids[i + 1] != EncodingSpec::kOpen || ids[i + 5] != EncodingSpec::kClose)
      throw bad("expected parentheses");
    for (int k = 0; k < 3; ++k) a.terms[k] = term_from_id(ids[i + 2 + k]);
    atoms.push_back(a);
    i += 6;
  }
  if (atoms.empty()) throw bad("no atoms");
  return Query(std::move(atoms));
}

}  // namespace cqc
