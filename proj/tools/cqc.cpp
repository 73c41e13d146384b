// Batch front-end for generating, labelling, auditing and plotting solved
// conjunctive query containment instances.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 budget exceeded.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "cqc/audit.hpp"
#include "cqc/dataset.hpp"
#include "cqc/decider.hpp"
#include "cqc/errors.hpp"
#include "cqc/parallel.hpp"
#include "cqc/plot.hpp"
#include "cqc/sampler.hpp"

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kDefaultSeed = 1;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t default_seed() {
  if (const char* env = std::getenv("CQC_SEED")) {
    try {
      std::size_t used = 0;
      std::uint64_t v = std::stoull(env, &used, 0);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw UsageError(std::string("CQC_SEED is not an integer: ") + env);
  }
  return kDefaultSeed;
}

void require_input(const std::string& path) {
  if (!fs::is_regular_file(path)) throw UsageError("input file not found: " + path);
}

std::ofstream open_output(const std::string& path) {
  fs::path parent = fs::path(path).parent_path();
  if (!parent.empty() && !fs::is_directory(parent))
    throw UsageError("output directory does not exist: " + parent.string());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot write " + path);
  return out;
}

std::vector<cqc::DatasetRecord> load(const std::string& path) {
  cqc::ReadResult r = cqc::read_records_file(path);
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  return std::move(r.records);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

cqc::Ratio parse_ratio_flag(const std::string& text) {
  try {
    return cqc::Ratio::parse(text);
  } catch (const cqc::Error& e) {
    throw UsageError(e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conjunctive query containment dataset laboratory"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");

  std::uint64_t seed = 0;
  bool seed_given = false;
  unsigned threads = cqc::default_threads();
  auto add_common = [&](CLI::App* sub, bool random) {
    if (random)
      sub->add_option_function<std::uint64_t>(
          "--seed",
          [&](const std::uint64_t& v) {
            seed = v;
            seed_given = true;
          },
          "Master seed (default: $CQC_SEED, else 1)");
    sub->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  };

  // seed-gen
  auto* seed_gen = app.add_subcommand("seed-gen", "Sample and label seed pairs from mu");
  std::uint64_t count = 1000;
  std::string out_path, in_path;
  cqc::SeedGenConfig seed_cfg;
  std::string c_text = "2/15";
  int expand_factor = 1;
  seed_gen->add_option("--count", count, "Number of seed pairs")->required();
  seed_gen->add_option("--out", out_path, "Records file")->required();
  seed_gen->add_option("--m1-min", seed_cfg.m1_min, "Smallest m1");
  seed_gen->add_option("--m1-max", seed_cfg.m1_max, "Largest m1");
  seed_gen->add_option("--m2-max", seed_cfg.m2_max, "Cap on m2 (m2 ~ U(1, min(m1, cap)))");
  seed_gen->add_option("--c", c_text, "Balance ratio alpha2/alpha1");
  seed_gen->add_flag("--constants", seed_cfg.constants, "Include constants 0 and 1 in the term pool");
  seed_gen->add_option("--expand", expand_factor, "Also expand every seed to this many records")
      ->check(CLI::PositiveNumber);
  add_common(seed_gen, true);

  // augment
  auto* augment = app.add_subcommand("augment", "Expand seed records with augmentation chains");
  int factor = 100;
  cqc::AugmentOptions aug_opts;
  augment->add_option("--in", in_path, "Seed records")->required();
  augment->add_option("--out", out_path, "Records file")->required();
  augment->add_option("--factor", factor, "Records per seed, seed included")->check(CLI::PositiveNumber);
  augment->add_option("--cap-p", aug_opts.max_atoms_p, "Atom cap for p");
  augment->add_option("--cap-q", aug_opts.max_atoms_q, "Atom cap for q");
  add_common(augment, false);

  // enumerate
  auto* enumerate = app.add_subcommand("enumerate", "Label every pair of a small query space");
  cqc::EnumConfig enum_cfg;
  bool no_constants = false, count_only = false;
  std::uint64_t sample = 0;
  enumerate->add_option("--atoms-p", enum_cfg.atoms_p, "Atoms in p");
  enumerate->add_option("--atoms-q", enum_cfg.atoms_q, "Atoms in q");
  enumerate->add_option("--vars", enum_cfg.variables, "Variable pool size");
  enumerate->add_flag("--no-constants", no_constants, "Exclude constants 0 and 1");
  enumerate->add_option("--max-pairs", enum_cfg.max_pairs, "Budget on the size of the space");
  enumerate->add_option("--sample", sample, "Uniform sample of this many pairs instead of the full space");
  enumerate->add_flag("--count-only", count_only, "Label the full space without writing records");
  enumerate->add_option("--out", out_path, "Records file");
  add_common(enumerate, true);

  // mu-test
  auto* mu_test = app.add_subcommand("mu-test", "Decider-labelled samples from mu(m1, m2)");
  int m1 = 10, m2 = 8;
  bool constants = false;
  mu_test->add_option("--m1", m1, "Atoms in p");
  mu_test->add_option("--m2", m2, "Atoms in q");
  mu_test->add_option("--count", count, "Number of pairs");
  mu_test->add_option("--c", c_text, "Balance ratio");
  mu_test->add_flag("--constants", constants, "Include constants in the term pool");
  mu_test->add_option("--out", out_path, "Records file")->required();
  add_common(mu_test, true);

  // estimate-c
  auto* estimate = app.add_subcommand("estimate-c", "Empirical phase curve and 0.5 crossing");
  std::string grid_text = "0.05:0.30:0.01";
  int samples = 2000;
  cqc::PhaseOptions phase_opts;
  estimate->add_option("--m1", m1, "Atoms in p")->required();
  estimate->add_option("--m2", m2, "Atoms in q")->required();
  estimate->add_option("--grid", grid_text, "start:stop:step");
  estimate->add_option("--samples", samples, "Pairs per grid point")->check(CLI::PositiveNumber);
  estimate->add_option("--tolerance", phase_opts.tolerance, "Relative ratio tolerance");
  estimate->add_flag("--constants", phase_opts.constants, "Include constants in the term pool");
  estimate->add_option("--out", out_path, "Phase CSV")->required();
  add_common(estimate, true);

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "Dataset statistics");
  stats_cmd->add_option("--in", in_path, "Records file")->required();
  stats_cmd->add_option("--out", out_path, "CSV output (default stdout)");

  // audit
  auto* audit = app.add_subcommand("audit", "Leakage, divergence and duplicate reports");
  audit->require_subcommand(1);
  std::string train_path, test_path, a_path, b_path;
  auto* leakage = audit->add_subcommand("leakage", "Superficial-feature probes");
  leakage->add_option("--train", train_path, "Training records")->required();
  leakage->add_option("--test", test_path, "Held-out records")->required();
  leakage->add_option("--out", out_path, "CSV output (default stdout)");
  auto* diverge = audit->add_subcommand("divergence", "Per-feature total variation distance");
  diverge->add_option("--a", a_path, "First records file")->required();
  diverge->add_option("--b", b_path, "Second records file")->required();
  diverge->add_option("--out", out_path, "CSV output (default stdout)");
  auto* dedup_cmd = audit->add_subcommand("dedup", "Canonical duplicate groups");
  dedup_cmd->add_option("--in", in_path, "Records file")->required();
  dedup_cmd->add_option("--out", out_path, "CSV output (default stdout)");

  // verify
  auto* verify = app.add_subcommand("verify", "Replay every record's certificate");
  verify->add_option("--in", in_path, "Records file")->required();
  add_common(verify, false);

  // export-tokens
  auto* tokens = app.add_subcommand("export-tokens", "Padded token-id file");
  tokens->add_option("--in", in_path, "Records file")->required();
  tokens->add_option("--out", out_path, "Token file")->required();

  // export-tptp
  auto* tptp = app.add_subcommand("export-tptp", "First-order problem files");
  std::string p_text, q_text, out_dir;
  std::uint64_t limit = 0;
  tptp->add_option("--p", p_text, "Query p");
  tptp->add_option("--q", q_text, "Query q");
  tptp->add_option("--in", in_path, "Records file (one problem per record)");
  tptp->add_option("--limit", limit, "Export at most this many records");
  tptp->add_option("--out", out_path, "Problem file, or directory with --in")->required();

  // plot
  auto* plot = app.add_subcommand("plot", "Render a CSV as SVG");
  std::string kind_text;
  plot->add_option("--kind", kind_text, "phase | accuracy-bars | training-curve")->required();
  plot->add_option("--in", in_path, "CSV input")->required();
  plot->add_option("--out", out_path, "SVG output")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (!seed_given) seed = default_seed();
    auto write_sink = [](std::ofstream& out) {
      return [&out](const cqc::DatasetRecord& r) { cqc::write_record(out, r); };
    };

    if (*seed_gen) {
      seed_cfg.c = parse_ratio_flag(c_text);
      auto out = open_output(out_path);
      if (expand_factor == 1) {
        cqc::gen_seed(count, seed_cfg, seed, write_sink(out), threads);
      } else {
        auto seeds = cqc::collect_seed(count, seed_cfg, seed, threads);
        cqc::expand(seeds, expand_factor, write_sink(out), threads);
      }
      if (!out) throw cqc::DataError("write failed for " + out_path);
    } else if (*augment) {
      require_input(in_path);
      auto out = open_output(out_path);
      auto seeds = load(in_path);
      cqc::expand(seeds, factor, write_sink(out), threads, aug_opts);
    } else if (*enumerate) {
      enum_cfg.constants = !no_constants;
      if (!count_only && out_path.empty())
        throw UsageError("enumerate needs --out unless --count-only is given");
      std::ofstream out;
      if (!out_path.empty()) out = open_output(out_path);
      cqc::RecordSink sink;
      if (!count_only) sink = write_sink(out);
      cqc::EnumSummary s =
          sample > 0 ? cqc::enumerate_sample(enum_cfg, sample, seed, sink, threads)
                     : cqc::enumerate_all(enum_cfg, sink, threads);
      std::cout << "queries_p," << s.queries_p << "\nqueries_q," << s.queries_q
                << "\npairs," << s.pairs << "\npositives," << s.positives
                << "\npositive_fraction,"
                << (s.pairs ? static_cast<double>(s.positives) / static_cast<double>(s.pairs) : 0.0)
                << '\n';
    } else if (*mu_test) {
      auto out = open_output(out_path);
      cqc::gen_mu_test(m1, m2, count, seed, write_sink(out), threads,
                       parse_ratio_flag(c_text), constants);
    } else if (*estimate) {
      std::vector<cqc::Ratio> grid;
      try {
        grid = cqc::parse_grid(grid_text);
      } catch (const cqc::Error& e) {
        throw UsageError(e.what());
      }
      auto out = open_output(out_path);
      phase_opts.threads = threads;
      cqc::TapeRng rng = cqc::TapeRng::record(seed);
      cqc::PhaseCurve curve = cqc::estimate_c(m1, m2, grid, samples, rng, phase_opts);
      cqc::write_phase_csv(out, curve);
      if (curve.crossing)
        std::cout << "crossing," << *curve.crossing << '\n';
      else
        std::cout << "crossing,none\n";
    } else if (*stats_cmd) {
      require_input(in_path);
      auto s = cqc::stats(load(in_path));
      if (out_path.empty()) {
        cqc::write_stats(std::cout, s);
      } else {
        auto out = open_output(out_path);
        cqc::write_stats(out, s);
      }
    } else if (*audit) {
      std::ostringstream report;
      if (*leakage) {
        require_input(train_path);
        require_input(test_path);
        cqc::write_leakage_csv(report, cqc::leakage_probe(load(train_path), load(test_path)));
      } else if (*diverge) {
        require_input(a_path);
        require_input(b_path);
        cqc::write_divergence_csv(report, cqc::divergence(load(a_path), load(b_path)));
      } else {
        require_input(in_path);
        auto d = cqc::dedup(load(in_path));
        cqc::write_dedup_csv(report, d);
        std::cerr << "duplicates " << d.duplicates << " of " << d.records
                  << ", within-chain fraction " << d.within_chain_fraction() << '\n';
      }
      if (out_path.empty()) {
        std::cout << report.str();
      } else {
        auto out = open_output(out_path);
        out << report.str();
      }
    } else if (*verify) {
      require_input(in_path);
      auto records = load(in_path);
      auto s = cqc::verify_all(records, threads);
      for (const auto& [id, why] : s.failures)
        std::cerr << "record " << id << ": " << why << '\n';
      const double pct = s.total ? 100.0 * static_cast<double>(s.verified) / static_cast<double>(s.total) : 100.0;
      std::cout << s.verified << '/' << s.total << " records, " << pct << "% verified\n";
      return s.verified == s.total ? 0 : 2;
    } else if (*tokens) {
      require_input(in_path);
      auto records = load(in_path);
      auto out = open_output(out_path);
      cqc::export_tokens(records, out);
    } else if (*tptp) {
      if (!in_path.empty()) {
        require_input(in_path);
        if (!fs::is_directory(out_path))
          throw UsageError("output directory does not exist: " + out_path);
        auto records = load(in_path);
        std::uint64_t n = 0;
        for (const auto& r : records) {
          if (limit && n >= limit) break;
          auto out = open_output((fs::path(out_path) / ("cqc_" + std::to_string(r.id) + ".p")).string());
          out << "% label " << r.label << '\n'
              << cqc::export_tptp({cqc::parse(r.p, 64), cqc::parse(r.q, 64)});
          ++n;
        }
      } else {
        if (p_text.empty() || q_text.empty())
          throw UsageError("export-tptp needs --in or both --p and --q");
        cqc::QueryPair pair{cqc::parse(p_text, 64), cqc::parse(q_text, 64)};
        auto out = open_output(out_path);
        out << cqc::export_tptp(pair);
      }
    } else if (*plot) {
      require_input(in_path);
      cqc::PlotKind kind;
      try {
        kind = cqc::parse_plot_kind(kind_text);
      } catch (const cqc::Error& e) {
        throw UsageError(e.what());
      }
      std::string svg = cqc::render_svg(kind, cqc::parse_csv(slurp(in_path)));
      auto out = open_output(out_path);
      out << svg;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const cqc::BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return 3;
  } catch (const cqc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
