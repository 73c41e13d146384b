#include "cqc/sampler.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>

#include "cqc/decider.hpp"
#include "cqc/errors.hpp"
#include "cqc/parallel.hpp"

namespace cqc {

Ratio::Ratio(std::int64_t n, std::int64_t d) {
  if (d == 0) throw Error("ratio with zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  std::int64_t g = std::gcd(n, d);
  num = g ? n / g : n;
  den = g ? d / g : d;
}

std::string Ratio::str() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

Ratio Ratio::parse(std::string_view text) {
  auto bad = [&] { return Error("invalid ratio '" + std::string(text) + "'"); };
  auto integer = [&](std::string_view s) {
    if (s.empty() || s.size() > 15) throw bad();
    std::int64_t v = 0;
    for (char c : s) {
      if (c < '0' || c > '9') throw bad();
      v = v * 10 + (c - '0');
    }
    return v;
  };
  if (auto slash = text.find('/'); slash != std::string_view::npos)
    return Ratio(integer(text.substr(0, slash)), integer(text.substr(slash + 1)));
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view whole = text.substr(0, dot), frac = text.substr(dot + 1);
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    std::int64_t w = whole.empty() ? 0 : integer(whole);
    std::int64_t f = frac.empty() ? 0 : integer(frac);
    return Ratio(w * den + f, den);
  }
  return Ratio(integer(text), 1);
}

void GParams::validate(int max_atoms) const {
  if (variables < 1 || variables > kVariableCount)
    throw Error("variable pool size must be in [1, 33], got " +
                std::to_string(variables));
  if (conjunctions < 1 || conjunctions > max_atoms)
    throw Error("conjunction count must be in [1, " +
                std::to_string(max_atoms) + "], got " +
                std::to_string(conjunctions));
}

Query sample_g(const GParams& params, TapeRng& rng) {
  params.validate();
  const std::uint64_t pool = params.variables + (params.constants ? 2 : 0);
  std::vector<Atom> atoms(params.conjunctions);
  for (Atom& a : atoms) {
    a.relation = rng.uniform(2) == 0 ? Relation::R0 : Relation::R1;
    for (Term& t : a.terms) {
      auto k = static_cast<int>(rng.uniform(pool));
      t = k < params.variables ? Term::variable(k)
                               : Term::constant(k - params.variables);
    }
  }
  return Query(std::move(atoms));
}

Ratio realized_ratio(int m1, int m2, int n1, int n2) {
  return Ratio(static_cast<std::int64_t>(m2) * n1,
               static_cast<std::int64_t>(m1) * n2);
}

std::pair<int, int> choose_mu_sizes(int m1, int m2, Ratio c) {
  if (m2 < 1 || m1 < m2)
    throw Error("choose_mu_sizes needs 1 <= m2 <= m1");
  // |m2*n1/(m1*n2) - a/b| = |m2*n1*b - a*m1*n2| / (m1*n2*b); compare the
  // fractions exactly by cross-multiplication.
  struct Best {
    __int128 dist_num = -1;
    __int128 dist_den = 1;
    int n1 = 0, n2 = 0;
  } best;
  for (int n1 = 1; n1 <= kVariableCount; ++n1) {
    for (int n2 = 1; n2 <= kVariableCount; ++n2) {
      __int128 num = static_cast<__int128>(m2) * n1 * c.den -
                     static_cast<__int128>(c.num) * m1 * n2;
      if (num < 0) num = -num;
      __int128 den = static_cast<__int128>(m1) * n2 * c.den;
      bool better;
      if (best.dist_num < 0) {
        better = true;
      } else {
        __int128 lhs = num * best.dist_den, rhs = best.dist_num * den;
        if (lhs != rhs)
          better = lhs < rhs;
        else if (n1 + n2 != best.n1 + best.n2)
          better = n1 + n2 > best.n1 + best.n2;
        else
          better = n2 > best.n2;
      }
      if (better) best = {num, den, n1, n2};
    }
  }
  return {best.n1, best.n2};
}

MuParams MuParams::balanced(int m1, int m2, Ratio c, bool constants) {
  auto [n1, n2] = choose_mu_sizes(m1, m2, c);
  return MuParams{m1, m2, n1, n2, constants, c};
}

void MuParams::validate(double tolerance) const {
  if (m2 > m1) throw Error("mu requires m1 >= m2");
  GParams{n1, m1, constants}.validate();
  GParams{n2, m2, constants}.validate();
  const double want = target.value();
  const double got = ratio().value();
  if (want > 0 && std::abs(got - want) / want > tolerance)
    throw Error("realised ratio " + ratio().str() + " is not within " +
                std::to_string(tolerance) + " of " + target.str());
}

QueryPair sample_mu(const MuParams& params, TapeRng& rng) {
  Query p = sample_g(GParams{params.n1, params.m1, params.constants}, rng);
  Query q = sample_g(GParams{params.n2, params.m2, params.constants}, rng);
  return QueryPair{std::move(p), std::move(q)};
}

std::vector<Ratio> parse_grid(std::string_view spec) {
  auto first = spec.find(':');
  auto second = spec.find(':', first == std::string_view::npos ? first : first + 1);
  if (first == std::string_view::npos || second == std::string_view::npos)
    throw Error("grid must be start:stop:step, got '" + std::string(spec) + "'");
  Ratio start = Ratio::parse(spec.substr(0, first));
  Ratio stop = Ratio::parse(spec.substr(first + 1, second - first - 1));
  Ratio step = Ratio::parse(spec.substr(second + 1));
  if (step.num <= 0) throw Error("grid step must be positive");
  std::vector<Ratio> grid;
  for (std::int64_t i = 0;; ++i) {
    // start + i*step as a single fraction.
    Ratio r(start.num * step.den + i * step.num * start.den, start.den * step.den);
    if (stop < r) break;
    grid.push_back(r);
    if (grid.size() > 100000) throw Error("grid too large");
  }
  if (grid.empty()) throw Error("empty grid '" + std::string(spec) + "'");
  return grid;
}

std::optional<double> crossing_ratio(std::span<const PhasePoint> points) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double f = points[i].frequency() - 0.5;
    if (f == 0.0) return points[i].ratio.value();
    if (i == 0) continue;
    const double g = points[i - 1].frequency() - 0.5;
    if ((g < 0) != (f < 0)) {
      const double x0 = points[i - 1].ratio.value(), x1 = points[i].ratio.value();
      return x0 + (x1 - x0) * (0.0 - g) / (f - g);
    }
  }
  return std::nullopt;
}

PhaseCurve estimate_c(int m1, int m2, std::span<const Ratio> grid, int samples,
                      TapeRng& rng, const PhaseOptions& opts) {
  if (grid.empty()) throw Error("estimate_c needs a nonempty grid");
  if (samples < 1) throw Error("estimate_c needs at least one sample per point");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i - 1] < grid[i])) throw Error("grid must be strictly increasing");

  PhaseCurve curve;
  curve.m1 = m1;
  curve.m2 = m2;
  std::vector<MuParams> params;
  for (const Ratio& r : grid) {
    MuParams mu = MuParams::balanced(m1, m2, r, opts.constants);
    mu.validate(opts.tolerance);
    if (!curve.points.empty() && !(curve.points.back().ratio < mu.ratio()))
      continue;
    PhasePoint pt;
    pt.requested = r;
    pt.ratio = mu.ratio();
    pt.n1 = mu.n1;
    pt.n2 = mu.n2;
    pt.samples = static_cast<std::uint64_t>(samples);
    curve.points.push_back(pt);
    params.push_back(mu);
  }

  const std::uint64_t base = rng.bits(64);
  const std::size_t total = params.size() * static_cast<std::size_t>(samples);
  std::vector<std::uint8_t> label(total);
  parallel_for(total, opts.threads, [&](std::size_t i) {
    const std::size_t point = i / samples;
    TapeRng local = TapeRng::record(
        derive_seed(base, static_cast<std::uint64_t>(Stream::kPhaseEstimate), i));
    QueryPair pair = sample_mu(params[point], local);
    label[i] = contains(pair.p, pair.q) ? 1 : 0;
  });
  for (std::size_t i = 0; i < total; ++i)
    curve.points[i / samples].positives += label[i];

  curve.crossing = crossing_ratio(curve.points);
  return curve;
}

void write_phase_csv(std::ostream& os, const PhaseCurve& curve) {
  os << "ratio,n1,n2,positives,samples,frequency\n";
  char buf[64];
  for (const PhasePoint& pt : curve.points) {
    std::snprintf(buf, sizeof buf, "%.10g", pt.ratio.value());
    os << buf << ',' << pt.n1 << ',' << pt.n2 << ',' << pt.positives << ','
       << pt.samples << ',';
    std::snprintf(buf, sizeof buf, "%.10g", pt.frequency());
    os << buf << '\n';
  }
}

}  // namespace cqc
