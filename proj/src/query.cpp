#include "cqc/query.hpp"

#include <algorithm>
#include <cctype>

#include "cqc/errors.hpp"

namespace cqc {

Term Term::variable(int index) {
  if (index < 0 || index > kMaxVariableIndex)
    throw Error("variable index out of range: " + std::to_string(index));
  return Term(static_cast<std::uint8_t>(index));
}

Term Term::constant(int value) {
  if (value != 0 && value != 1)
    throw Error("constant must be 0 or 1, got " + std::to_string(value));
  return Term(static_cast<std::uint8_t>(kVariableCount + value));
}

Term Term::from_code(std::uint8_t code) {
  if (code >= kTermCodeCount)
    throw Error("term code out of range: " + std::to_string(code));
  return Term(code);
}

Query::Query(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw Error("a query needs at least one atom");
}

std::vector<int> Query::variables() const {
  std::array<bool, kVariableCount> seen{};
  for (const Atom& a : atoms_)
    for (Term t : a.terms)
      if (t.is_variable()) seen[t.index()] = true;
  std::vector<int> out;
  for (int i = 0; i < kVariableCount; ++i)
    if (seen[i]) out.push_back(i);
  return out;
}

bool Query::has_variable(int index) const {
  return std::any_of(atoms_.begin(), atoms_.end(), [&](const Atom& a) {
    return std::any_of(a.terms.begin(), a.terms.end(), [&](Term t) {
      return t.is_variable() && t.index() == index;
    });
  });
}

namespace {

class Parser {
 public:
  Parser(std::string_view text, int max_atoms)
      : text_(text), max_atoms_(max_atoms) {}

  Query run() {
    std::vector<Atom> atoms;
    atoms.push_back(atom());
    skip_space();
    while (pos_ < text_.size()) {
      expect('&');
      if (static_cast<int>(atoms.size()) >= max_atoms_)
        throw ParseError("more than " + std::to_string(max_atoms_) + " atoms",
                         pos_);
      atoms.push_back(atom());
      skip_space();
    }
    return Query(std::move(atoms));
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) {
    if (pos_ >= text_.size()) throw ParseError(what + ", got end of input", pos_);
    throw ParseError(what + ", got '" + text_[pos_] + "'", pos_);
  }

  Atom atom() {
    Atom a;
    if (peek() != 'R') fail("expected relation R0 or R1");
    ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '0')
      a.relation = Relation::R0;
    else if (pos_ < text_.size() && text_[pos_] == '1')
      a.relation = Relation::R1;
    else
      fail("unknown relation");
    ++pos_;
    expect('(');
    std::size_t open = pos_ - 1;
    for (int i = 0; i < 3; ++i) {
      if (i > 0) {
        if (peek() == ')')
          throw ParseError("atom has arity " + std::to_string(i) +
                               ", expected 3",
                           open);
        expect(',');
      }
      a.terms[i] = term();
    }
    if (peek() == ',') throw ParseError("atom has arity above 3", pos_);
    expect(')');
    return a;
  }

  Term term() {
    char c = peek();
    if (c == '0' || c == '1') {
      ++pos_;
      return Term::constant(c - '0');
    }
    if (c != 'x') fail("expected a variable or constant");
    std::size_t start = pos_++;
    int digits = 0, index = 0;
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_])) && digits < 2) {
      index = index * 10 + (text_[pos_] - '0');
      ++pos_;
      ++digits;
    }
    if (digits == 0) fail("expected variable index");
    if (pos_ < text_.size() &&
        std::isdigit(static_cast<unsigned char>(text_[pos_])))
      throw ParseError("variable index has more than two digits", start);
    if (index > kMaxVariableIndex)
      throw ParseError("variable index " + std::to_string(index) +
                           " exceeds " + std::to_string(kMaxVariableIndex),
                       start);
    return Term::variable(index);
  }

  std::string_view text_;
  int max_atoms_;
  std::size_t pos_ = 0;
};

}  // namespace

Query parse(std::string_view text, int max_atoms) {
  return Parser(text, max_atoms).run();
}

std::string render(Term t) {
  if (t.is_constant()) return t.value() == 0 ? "0" : "1";
  return "x" + std::to_string(t.index());
}

std::string render(const Atom& a) {
  std::string out = a.relation == Relation::R0 ? "R0(" : "R1(";
  for (int i = 0; i < 3; ++i) {
    if (i > 0) out += ',';
    out += render(a.terms[i]);
  }
  out += ')';
  return out;
}

std::string render(const Query& q) {
  std::string out;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (i > 0) out += " & ";
    out += render(q[i]);
  }
  return out;
}

Query canonicalize(const Query& q) {
  std::array<int, kVariableCount> rename;
  rename.fill(-1);
  int next = 0;
  std::vector<Atom> atoms(q.atoms().begin(), q.atoms().end());
  for (Atom& a : atoms) {
    for (Term& t : a.terms) {
      if (!t.is_variable()) continue;
      int& slot = rename[t.index()];
      if (slot < 0) slot = next++;
      t = Term::variable(slot);
    }
  }
  return Query(std::move(atoms));
}

}  // namespace cqc
