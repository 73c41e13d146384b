#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cqc/augment.hpp"
#include "cqc/decider.hpp"
#include "cqc/query.hpp"
#include "cqc/sampler.hpp"

namespace cqc {

enum class Origin { kSeed, kAug };

std::string_view to_string(Origin o);

/// One solved instance plus provenance. Field order here is the on-disk order.
struct DatasetRecord {
  std::uint64_t id = 0;
  std::string p;
  std::string q;
  int label = 0;
  Origin origin = Origin::kSeed;
  std::uint64_t seed_id = 0;
  int chain_step = 0;
  std::string cert;
  std::string gen;

  friend bool operator==(const DatasetRecord&, const DatasetRecord&) = default;
};

using RecordSink = std::function<void(const DatasetRecord&)>;

/// Parsed form of a record's `gen` field. Everything needed to re-run the
/// generator that produced a record is stored in it.
///
///   cqc-seed/1 m1=1:8 m2max=8 c=2/15 consts=0
///   cqc-mu/1 m1=10 m2=8 c=2/15 consts=0
///   cqc-enum/1 ap=2 aq=2 n=33 consts=1
///
/// Augmented records append ` aug/1 capp=10 capq=8 retries=16`.
struct GeneratorSpec {
  enum class Kind { kSeed, kMu, kEnumerate };
  static constexpr int kVersion = 1;

  Kind kind = Kind::kSeed;
  int version = kVersion;
  // kSeed: m1 ~ U(m1_min, m1_max), m2 ~ U(1, min(m1, m2_max)).
  int m1_min = 1;
  int m1_max = 8;
  int m2_max = 8;
  // kMu: fixed sizes.
  int m1 = 10;
  int m2 = 8;
  Ratio c = kDefaultBalanceRatio;
  bool constants = false;
  // kEnumerate
  int atoms_p = 2;
  int atoms_q = 2;
  int variables = kVariableCount;

  std::optional<AugmentOptions> augment;

  std::string str() const;
  /// Throws VersionMismatch for an unknown generator name or version and
  /// DataError for malformed parameters.
  static GeneratorSpec parse(std::string_view text);
};

/// Draws (m1, m2) where the generator calls for it, then (p, q) ~ mu.
QueryPair sample_seed_pair(const GeneratorSpec& spec, TapeRng& rng);

struct SeedGenConfig {
  int m1_min = 1;
  int m1_max = 8;
  int m2_max = 8;
  Ratio c = kDefaultBalanceRatio;
  bool constants = false;
  DeciderOptions decider;
};

/// `count` decider-labelled seeds. Record i samples from its own tape seeded
/// by derive_seed(master, kSeedSampling, i); output is independent of
/// `threads`.
void gen_seed(std::uint64_t count, const SeedGenConfig& config,
              std::uint64_t master, const RecordSink& sink, unsigned threads = 1);

/// mu(m1, m2) samples labelled by the decider, origin "seed".
void gen_mu_test(int m1, int m2, std::uint64_t count, std::uint64_t master,
                 const RecordSink& sink, unsigned threads = 1,
                 Ratio c = kDefaultBalanceRatio, bool constants = false,
                 const DeciderOptions& decider = {});

std::vector<DatasetRecord> collect_seed(std::uint64_t count,
                                        const SeedGenConfig& config,
                                        std::uint64_t master, unsigned threads = 1);

/// Seed of a chain's augmentation stream. It depends only on the seed
/// record's certificate, so replay can recompute and check it.
std::uint64_t augmentation_seed(std::string_view seed_cert);

/// Emits each seed followed by factor - 1 augmented records. Output ids are
/// positional (seed i gets id i*factor, its chain i*factor + step) and
/// seed_id points at the seed's output id. Each chain draws from
/// augmentation_seed(seed.cert).
void expand(std::span<const DatasetRecord> seeds, int factor,
            const RecordSink& sink, unsigned threads = 1,
            const AugmentOptions& opts = {});

std::vector<DatasetRecord> collect_expand(std::span<const DatasetRecord> seeds,
                                          int factor, unsigned threads = 1,
                                          const AugmentOptions& opts = {});

/// Every query with `atoms` atoms over x0..x(variables-1) (plus 0 and 1 when
/// enabled) in canonical variable naming, i.e. ordered atom lists with
/// variables numbered by first occurrence. Order: relation sequence first
/// (R0 < R1, first atom most significant), then terms position by position
/// with variables before constants.
std::vector<Query> enumerate_queries(int atoms, int variables, bool constants);

struct EnumConfig {
  int atoms_p = 2;
  int atoms_q = 2;
  int variables = kVariableCount;
  bool constants = true;
  std::uint64_t max_pairs = 1'000'000'000'000ULL;
  DeciderOptions decider;

  GeneratorSpec spec() const;
};

struct EnumSummary {
  std::uint64_t queries_p = 0;
  std::uint64_t queries_q = 0;
  std::uint64_t pairs = 0;
  std::uint64_t positives = 0;
};

/// Labels every pair of the configured space exactly once, in rank order
/// (rank = index_p * |Q| + index_q). Records carry id = rank and the rank as
/// certificate. `sink` may be empty for a count-only run. Throws
/// BudgetExceeded when the space exceeds max_pairs.
EnumSummary enumerate_all(const EnumConfig& config, const RecordSink& sink,
                          unsigned threads = 1);

/// Uniform sample, with replacement, of `count` pairs from the same space.
EnumSummary enumerate_sample(const EnumConfig& config, std::uint64_t count,
                             std::uint64_t master, const RecordSink& sink,
                             unsigned threads = 1);

/// Pair of the given rank in the configured space.
QueryPair unrank_pair(const EnumConfig& config, std::uint64_t rank);

// Line-delimited records, one JSON object per line.
void write_record(std::ostream& os, const DatasetRecord& r);
std::string format_record(const DatasetRecord& r);
/// Throws DataError naming the line on malformed input.
DatasetRecord parse_record(std::string_view line, std::uint64_t line_number = 0);

struct ReadResult {
  std::vector<DatasetRecord> records;
  std::vector<std::string> warnings;
};

/// Reads every record. Records whose generator this build cannot replay are
/// kept and reported in `warnings`.
ReadResult read_records(std::istream& is);
ReadResult read_records_file(const std::string& path);
void write_records_file(const std::string& path,
                        std::span<const DatasetRecord> records);

struct DatasetStats {
  std::uint64_t count = 0;
  std::uint64_t positives = 0;
  std::map<int, std::uint64_t> atoms_p;
  std::map<int, std::uint64_t> atoms_q;
  std::map<int, std::uint64_t> variables_p;
  std::map<int, std::uint64_t> variables_q;
  /// Records whose canonical (p, q) already appeared earlier in the input.
  std::uint64_t duplicates = 0;

  double positive_fraction() const {
    return count == 0 ? 0.0 : static_cast<double>(positives) / static_cast<double>(count);
  }
};

DatasetStats stats(std::span<const DatasetRecord> records);
void write_stats(std::ostream& os, const DatasetStats& s);

/// `label<TAB>p ids<TAB>q ids`, ids space-separated and zero-padded to the
/// sequence length. Throws TokenOverflow.
void export_tokens(std::span<const DatasetRecord> records, std::ostream& os);

/// Orders records by id; used to merge per-shard outputs.
void sort_by_id(std::vector<DatasetRecord>& records);

}  // namespace cqc
