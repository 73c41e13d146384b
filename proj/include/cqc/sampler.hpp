#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cqc/query.hpp"
#include "cqc/tape_rng.hpp"

namespace cqc {

/// Exact nonnegative rational with positive denominator, kept reduced.
struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Ratio() = default;
  Ratio(std::int64_t n, std::int64_t d);

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;
  /// Accepts "2/15", "0.05" or "3".
  static Ratio parse(std::string_view text);

  friend bool operator==(const Ratio&, const Ratio&) = default;
  friend bool operator<(const Ratio& a, const Ratio& b) {
    return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
  }
};

/// Balance constant for m1 >= m2.
inline const Ratio kDefaultBalanceRatio{2, 15};

/// Parameters of the query distribution G(X, m) with X = {x0, ..., x(n-1)}.
/// Constants enlarge the term pool but do not count towards n.
struct GParams {
  int variables = 1;
  int conjunctions = 1;
  bool constants = false;

  /// Atoms per variable, m / n.
  Ratio constraintness() const { return Ratio(conjunctions, variables); }
  void validate(int max_atoms = kDefaultMaxAtoms) const;
};

/// m relations uniform over {R0, R1}, then three terms per atom uniform with
/// repetition over the pool, relation drawn before the atom's terms.
Query sample_g(const GParams& params, TapeRng& rng);

/// Pool sizes (n1, n2) in [1, 33]^2 minimising |m2*n1 / (m1*n2) - c|, ties
/// broken towards the larger n1 + n2, then the larger n2.
std::pair<int, int> choose_mu_sizes(int m1, int m2, Ratio c);

/// Realised constraintness ratio alpha2/alpha1 = (m2*n1) / (m1*n2).
Ratio realized_ratio(int m1, int m2, int n1, int n2);

struct MuParams {
  int m1 = 1;
  int m2 = 1;
  int n1 = 1;
  int n2 = 1;
  bool constants = false;
  Ratio target = kDefaultBalanceRatio;

  /// Sizes from choose_mu_sizes for the given target.
  static MuParams balanced(int m1, int m2, Ratio c = kDefaultBalanceRatio,
                           bool constants = false);
  Ratio ratio() const { return realized_ratio(m1, m2, n1, n2); }
  /// Throws if the realised ratio is further than `tolerance` (relative) from
  /// the target.
  void validate(double tolerance = 0.25) const;
};

/// p ~ G(n1, m1) then q ~ G(n2, m2), from the same tape.
QueryPair sample_mu(const MuParams& params, TapeRng& rng);

struct PhasePoint {
  Ratio requested;
  Ratio ratio;  // realised
  int n1 = 0;
  int n2 = 0;
  std::uint64_t positives = 0;
  std::uint64_t samples = 0;

  double frequency() const {
    return samples == 0 ? 0.0 : static_cast<double>(positives) / static_cast<double>(samples);
  }
};

/// Empirical containment probability along a grid of constraintness ratios.
struct PhaseCurve {
  int m1 = 0;
  int m2 = 0;
  std::vector<PhasePoint> points;
  /// Ratio at which the frequency first crosses 0.5, linearly interpolated
  /// between the two bracketing points.
  std::optional<double> crossing;
};

struct PhaseOptions {
  /// Relative distance allowed between requested and realised ratio.
  double tolerance = 0.1;
  bool constants = false;
  unsigned threads = 1;
};

/// Grid points from a "start:stop:step" string, stop inclusive.
std::vector<Ratio> parse_grid(std::string_view spec);

/// Labels `samples` pairs at each grid ratio with the decider. The rng supplies
/// one 64-bit base seed; every sample uses its own derived stream so results
/// do not depend on the thread count. Grid points whose nearest feasible sizes
/// repeat the previous point's realised ratio are skipped. Throws Error on an
/// infeasible ratio or a non-increasing grid.
PhaseCurve estimate_c(int m1, int m2, std::span<const Ratio> grid, int samples,
                      TapeRng& rng, const PhaseOptions& opts = {});

/// Linear interpolation of the first 0.5 crossing.
std::optional<double> crossing_ratio(std::span<const PhasePoint> points);

/// CSV with header `ratio,n1,n2,positives,samples,frequency`.
void write_phase_csv(std::ostream& os, const PhaseCurve& curve);

}  // namespace cqc
