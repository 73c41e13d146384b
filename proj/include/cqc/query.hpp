#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cqc {

/// Largest variable index; variables are x0..x32.
inline constexpr int kMaxVariableIndex = 32;
inline constexpr int kVariableCount = kMaxVariableIndex + 1;
/// Default bound on atoms per query.
inline constexpr int kDefaultMaxAtoms = 10;

/// A variable x0..x32 or one of the constants 0 and 1.
///
/// Stored as a single code: 0..32 for variables, 33 and 34 for the constants.
/// Ordering follows the code, so all variables sort before the constants.
class Term {
 public:
  static Term variable(int index);
  static Term constant(int value);
  static Term from_code(std::uint8_t code);

  bool is_variable() const noexcept { return code_ < kVariableCount; }
  bool is_constant() const noexcept { return !is_variable(); }
  int index() const noexcept { return code_; }
  int value() const noexcept { return code_ - kVariableCount; }
  std::uint8_t code() const noexcept { return code_; }

  friend auto operator<=>(const Term&, const Term&) = default;

 private:
  explicit constexpr Term(std::uint8_t code) : code_(code) {}
  std::uint8_t code_;
};

inline constexpr int kTermCodeCount = kVariableCount + 2;

enum class Relation : std::uint8_t { R0 = 0, R1 = 1 };

struct Atom {
  Relation relation = Relation::R0;
  std::array<Term, 3> terms{Term::variable(0), Term::variable(0),
                            Term::variable(0)};

  friend auto operator<=>(const Atom&, const Atom&) = default;
};

/// Boolean conjunctive query: an ordered, nonempty list of atoms. All
/// variables are existentially quantified.
class Query {
 public:
  explicit Query(std::vector<Atom> atoms);

  std::span<const Atom> atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  const Atom& operator[](std::size_t i) const { return atoms_[i]; }

  /// Distinct variable indices, ascending.
  std::vector<int> variables() const;
  bool has_variable(int index) const;

  friend bool operator==(const Query&, const Query&) = default;
  friend auto operator<=>(const Query&, const Query&) = default;

 private:
  std::vector<Atom> atoms_;
};

struct QueryPair {
  Query p;
  Query q;

  friend bool operator==(const QueryPair&, const QueryPair&) = default;
};

/// Parses `R0(x0,x1,x2) & R1(0,x1,1)`. Whitespace between tokens is ignored.
/// Throws ParseError on syntax errors, variable indices above 32, arity other
/// than three or more than `max_atoms` atoms.
Query parse(std::string_view text, int max_atoms = kDefaultMaxAtoms);

std::string render(const Query& q);
std::string render(const Atom& a);
std::string render(Term t);

/// Renames variables to x0, x1, ... in order of first occurrence. Constants
/// and atom order are left untouched.
Query canonicalize(const Query& q);

}  // namespace cqc
