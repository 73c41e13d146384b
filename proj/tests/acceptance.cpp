// Acceptance suite. Each criterion runs at its stated tolerance and prints a
// single PASS/FAIL line; `acceptance all` runs every criterion in turn.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "cqc/audit.hpp"
#include "cqc/augment.hpp"
#include "cqc/dataset.hpp"
#include "cqc/decider.hpp"
#include "cqc/parallel.hpp"
#include "cqc/sampler.hpp"
#include "support.hpp"

using namespace cqc;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

char flip_hex(char c, int bit) {
  const int v = (c <= '9' ? c - '0' : c - 'a' + 10) ^ (1 << bit);
  return static_cast<char>(v < 10 ? '0' + v : 'a' + v - 10);
}

const std::vector<std::pair<int, int>> kSizePairs{{4, 4}, {8, 4}, {10, 8}};

Outcome decider() {
  const auto t0 = Clock::now();
  std::vector<Query> space;
  const Term pool[] = {Term::variable(0), Term::variable(1), Term::constant(0),
                       Term::constant(1)};
  for (Relation r : {Relation::R0, Relation::R1})
    for (Term a : pool)
      for (Term b : pool)
        for (Term c : pool) space.push_back(Query({Atom{r, {a, b, c}}}));
  std::uint64_t exhaustive = 0, disagree = 0;
  for (const Query& p : space)
    for (const Query& q : space) {
      disagree += contains(p, q) != contains_bruteforce(p, q);
      ++exhaustive;
    }

  std::mt19937_64 g(20240601);
  std::uint64_t random = 0, positives = 0;
  for (; random < 100000; ++random) {
    const int vars = 1 + static_cast<int>(g() % 6);
    const Query p = testing::random_query(g, {1, 4, vars, true});
    const Query q = testing::random_query(g, {1, 4, vars, true});
    const bool d = contains(p, q);
    positives += d;
    disagree += d != contains_bruteforce(p, q);
  }
  const double secs = seconds_since(t0);
  return {disagree == 0 && secs < 120.0,
          std::to_string(exhaustive) + " exhaustive single-atom pairs + " +
              std::to_string(random) + " random pairs (" + std::to_string(positives) +
              " contained), " + std::to_string(disagree) + " disagreements, " +
              fmt("%.1fs", secs) + " (limit 120s)"};
}

Outcome rewrite() {
  const auto t0 = Clock::now();
  std::mt19937_64 g(777);
  TapeRng rng = TapeRng::record(777);
  const Rewrite all[] = {
      {RewriteKind::kMergeVar, Side::kP}, {RewriteKind::kMergeVar, Side::kQ},
      {RewriteKind::kSplitVar, Side::kP}, {RewriteKind::kSplitVar, Side::kQ},
      {RewriteKind::kAddConj, Side::kP},  {RewriteKind::kAddConj, Side::kQ},
      {RewriteKind::kDelConj, Side::kP},  {RewriteKind::kDelConj, Side::kQ},
      {RewriteKind::kShuffle, Side::kP},  {RewriteKind::kShuffle, Side::kQ},
  };
  int applied = 0, preserved = 0, positives = 0;
  while (applied < 10000) {
    const auto [p, q] = (g() & 1) ? testing::contained_pair(g, {1, 4, 5, true})
                                   : std::pair{testing::random_query(g, {1, 4, 5, true}),
                                               testing::random_query(g, {1, 4, 5, true})};
    const LabeledPair in{p, q, contains(p, q) ? 1 : 0};
    const Rewrite rw = all[g() % std::size(all)];
    if (!applicable(in, rw)) continue;
    const LabeledPair out = apply_rewrite(in, rw, rng);
    preserved += (contains(out.p, out.q) ? 1 : 0) == in.label && out.label == in.label;
    positives += in.label;
    ++applied;
  }
  const double secs = seconds_since(t0);
  return {preserved == applied && secs < 120.0,
          std::to_string(preserved) + "/" + std::to_string(applied) +
              " rewrites keep the decider label (" + std::to_string(positives) +
              " on positive pairs), " + fmt("%.1fs", secs) + " (limit 120s)"};
}

Outcome phase() {
  const auto t0 = Clock::now();
  const auto grid = parse_grid("0.05:0.30:0.01");
  PhaseOptions opts;
  opts.threads = default_threads();
  bool ok = true;
  std::string detail;
  for (auto [m1, m2] : kSizePairs) {
    TapeRng rng = TapeRng::record(2024 + m1 * 100 + m2);
    const PhaseCurve curve = estimate_c(m1, m2, grid, 2000, rng, opts);
    const bool in_range = curve.crossing && *curve.crossing >= 0.08 && *curve.crossing <= 0.20;
    ok = ok && in_range;
    detail += "(" + std::to_string(m1) + "," + std::to_string(m2) + ") crossing " +
              (curve.crossing ? fmt("%.4f", *curve.crossing) : std::string("none")) + "; ";
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 600.0;
  return {ok, detail + "band [0.08, 0.20], " + fmt("%.1fs", secs) + " (limit 600s)"};
}

Outcome balance() {
  bool ok = true;
  std::string detail;
  for (auto [m1, m2] : kSizePairs) {
    const MuParams mu = MuParams::balanced(m1, m2);
    std::vector<int> label(10000);
    parallel_for(label.size(), default_threads(), [&](std::size_t i) {
      TapeRng rng = TapeRng::record(
          derive_seed(99, static_cast<std::uint64_t>(Stream::kSeedSampling), i));
      const QueryPair x = sample_mu(mu, rng);
      label[i] = contains(x.p, x.q) ? 1 : 0;
    });
    int pos = 0;
    for (int l : label) pos += l;
    const double rate = pos / 10000.0;
    ok = ok && std::abs(rate - 0.5) <= 0.05;
    detail += "(" + std::to_string(m1) + "," + std::to_string(m2) + ") n1=" +
              std::to_string(mu.n1) + " n2=" + std::to_string(mu.n2) + " rate " +
              fmt("%.4f", rate) + "; ";
  }
  return {ok, detail + "band 0.5 +/- 0.05 at n=10000"};
}

Outcome replay() {
  const auto t0 = Clock::now();
  const unsigned threads = default_threads();
  const auto records = collect_expand(collect_seed(100, {}, 4242, threads), 100, threads);
  const VerifySummary s = verify_all(records, threads);

  // One random single-bit flip per record, plus every flip for a subset.
  std::vector<std::uint8_t> caught(records.size(), 0);
  parallel_for(records.size(), threads, [&](std::size_t i) {
    std::mt19937_64 g(i + 1);
    DatasetRecord m = records[i];
    const std::size_t pos = g() % m.cert.size();
    m.cert[pos] = flip_hex(m.cert[pos], static_cast<int>(g() % 4));
    caught[i] = !replay_verify(m).ok;
  });
  std::uint64_t flips = records.size(), missed = 0;
  for (auto c : caught) missed += !c;

  std::vector<std::uint64_t> sub_missed(200, 0), sub_flips(200, 0);
  parallel_for(200, threads, [&](std::size_t k) {
    const DatasetRecord& r = records[k * (records.size() / 200) + k % (records.size() / 200)];
    for (std::size_t i = 0; i < r.cert.size(); ++i)
      for (int b = 0; b < 4; ++b) {
        DatasetRecord m = r;
        m.cert[i] = flip_hex(m.cert[i], b);
        sub_missed[k] += replay_verify(m).ok;
        ++sub_flips[k];
      }
  });
  for (std::size_t k = 0; k < 200; ++k) {
    flips += sub_flips[k];
    missed += sub_missed[k];
  }
  const double secs = seconds_since(t0);
  return {s.verified == s.total && s.total == 10000 && missed == 0 && secs < 120.0,
          std::to_string(s.verified) + "/" + std::to_string(s.total) + " verified; " +
              std::to_string(flips - missed) + "/" + std::to_string(flips) +
              " single-bit mutations rejected; " + fmt("%.1fs", secs) + " (limit 120s)"};
}

std::string file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "cqc_acceptance_determinism";
  fs::create_directories(dir);
  auto produce = [&](unsigned threads, const std::string& tag) {
    const std::string path = (dir / (tag + ".jsonl")).string();
    auto records = collect_expand(collect_seed(200, {}, 31337, threads), 50, threads);
    gen_mu_test(10, 8, 500, 31337,
                [&](const DatasetRecord& r) { records.push_back(r); }, threads);
    enumerate_sample(EnumConfig{}, 500, 31337,
                     [&](const DatasetRecord& r) { records.push_back(r); }, threads);
    write_records_file(path, records);
    return file_bytes(path);
  };
  const std::string a1 = produce(1, "t1a");
  const std::string b1 = produce(1, "t1b");
  const std::string a8 = produce(8, "t8a");
  const std::string b8 = produce(8, "t8b");
  fs::remove_all(dir);
  const bool ok = !a1.empty() && a1 == b1 && a1 == a8 && a1 == b8;
  return {ok, std::to_string(a1.size()) + " bytes; runs x2, threads {1, 8}: " +
                  (ok ? "byte-identical" : "files differ")};
}

Outcome enumeration() {
  bool ok = true;
  std::string detail;
  for (auto [ap, aq, n, consts] : {std::tuple{1, 1, 1, false}, std::tuple{2, 1, 2, true},
                                   std::tuple{2, 2, 2, false}}) {
    const auto np = testing::naive_queries(ap, n, consts);
    const auto nq = testing::naive_queries(aq, n, consts);
    std::set<std::pair<std::string, std::string>> naive;
    std::map<std::pair<std::string, std::string>, int> naive_label;
    for (const Query& p : np)
      for (const Query& q : nq)
        naive_label[{render(p), render(q)}] = testing::naive_contains(p, q) ? 1 : 0;
    std::uint64_t emitted = 0, mismatched = 0;
    std::set<std::pair<std::string, std::string>> seen;
    enumerate_all(EnumConfig{ap, aq, n, consts}, [&](const DatasetRecord& r) {
      ++emitted;
      auto it = naive_label.find({r.p, r.q});
      mismatched += it == naive_label.end() || it->second != r.label || !seen.insert({r.p, r.q}).second;
    });
    const bool same = emitted == naive_label.size() && mismatched == 0;
    ok = ok && same;
    detail += std::to_string(emitted) + "/" + std::to_string(naive_label.size()) + (same ? " match; " : " MISMATCH; ");
  }

  const auto t0 = Clock::now();
  const EnumSummary s = enumerate_sample(EnumConfig{}, 100000, 2718, {}, default_threads());
  const double secs = seconds_since(t0);
  const double frac = static_cast<double>(s.positives) / static_cast<double>(s.pairs);
  ok = ok && s.pairs == 100000 && frac < 0.15 && secs < 600.0;
  detail += "space " + std::to_string(s.queries_p) + "x" + std::to_string(s.queries_q) +
            ", 100000-pair subsample positive fraction " + fmt("%.4f", frac) +
            " (limit 0.15), " + fmt("%.1fs", secs) + " (limit 600s)";
  return {ok, detail};
}

std::vector<DatasetRecord> random_labels(std::size_t n, std::uint64_t seed) {
  auto records = collect_seed(n, {}, seed, default_threads());
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = i < n / 2 ? 1 : 0;
  std::mt19937_64 g(seed);
  std::shuffle(labels.begin(), labels.end(), g);
  for (std::size_t i = 0; i < n; ++i) records[i].label = labels[i];
  return records;
}

Outcome leakage() {
  const LeakageReport null = leakage_probe(random_labels(10000, 61), random_labels(10000, 62));
  bool ok = true;
  double worst = 0.0;
  for (const auto& p : null.probes) {
    worst = std::max(worst, std::abs(p.test_accuracy - 0.5));
    ok = ok && std::abs(p.test_accuracy - 0.5) <= 0.03;
  }

  std::mt19937_64 g(63);
  std::vector<DatasetRecord> train, test;
  for (int i = 0; i < 10000; ++i) {
    const Query a = testing::random_query(g, {1, 4, 8, true});
    const Query b = testing::random_query(g, {5, 8, 8, true});
    const bool shorter = g() & 1;
    DatasetRecord r;
    r.p = render(shorter ? a : b);
    r.q = render(shorter ? b : a);
    r.label = shorter ? 1 : 0;
    (i < 8000 ? train : test).push_back(r);
  }
  double length_acc = 0.0;
  for (const auto& p : leakage_probe(train, test).probes)
    if (p.name == "tokens_diff") length_acc = p.test_accuracy;
  ok = ok && length_acc == 1.0;
  return {ok, std::to_string(null.probes.size()) +
                  " probes on random labels, max |acc - 0.5| = " + fmt("%.4f", worst) +
                  " (limit 0.03); length stump on constructed leak " + fmt("%.4f", length_acc)};
}

const std::vector<std::pair<std::string, std::function<Outcome()>>> kCriteria{
    {"decider", decider},         {"rewrite", rewrite},   {"phase", phase},
    {"balance", balance},         {"replay", replay},     {"determinism", determinism},
    {"enumeration", enumeration}, {"leakage", leakage},
};

}  // namespace

int main(int argc, char** argv) {
  const std::string which = argc > 1 ? argv[1] : "all";
  int failures = 0, ran = 0;
  for (const auto& [name, run] : kCriteria) {
    if (which != "all" && which != name) continue;
    ++ran;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  }
  if (ran == 0) {
    std::fprintf(stderr, "unknown criterion '%s'\n", which.c_str());
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
