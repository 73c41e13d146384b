#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cqc/dataset.hpp"

namespace cqc {

struct VerifyResult {
  bool ok = false;
  std::string diagnostic;

  explicit operator bool() const noexcept { return ok; }
};

/// Re-runs the generator named in the record's `gen` field on the record's
/// certificate and checks that it reproduces (p, q, label).
///
/// For sampled records every certificate segment must also equal the exact
/// prefix of the splitmix64 stream of the segment's seed, and the replay must
/// consume each segment completely. Seed labels are recomputed with the
/// decider; augmented records replay the seed and then `chain_step`
/// augmentation steps. Enumerated records carry their rank, which is unranked
/// and decided again.
///
/// Tape underrun or overrun and malformed certificates yield ok == false with
/// a diagnostic. Throws VersionMismatch for a generator this build does not
/// implement.
VerifyResult replay_verify(const DatasetRecord& record,
                           const DeciderOptions& decider = {});

struct VerifySummary {
  std::uint64_t total = 0;
  std::uint64_t verified = 0;
  std::vector<std::pair<std::uint64_t, std::string>> failures;  // (id, why)
};

VerifySummary verify_all(std::span<const DatasetRecord> records,
                         unsigned threads = 1, std::size_t max_failures = 20);

struct ProbeResult {
  std::string name;
  double threshold = 0.0;
  /// "le": predict 1 when value <= threshold; "gt": when value > threshold.
  /// Empty for the token-frequency scorer.
  std::string polarity;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
};

struct LeakageReport {
  std::vector<ProbeResult> probes;
};

/// Single-feature stumps on p/q atom counts, their difference, distinct
/// variable counts and difference, and token length difference; plus a
/// class-conditional token-frequency scorer. Throws DataError on empty sets
/// or a single-class training set.
LeakageReport leakage_probe(std::span<const DatasetRecord> train,
                            std::span<const DatasetRecord> test);

struct Stump {
  double threshold = 0.0;
  bool predict_one_below = true;  // value <= threshold -> 1
  double train_accuracy = 0.0;

  int predict(double x) const {
    return (x <= threshold) == predict_one_below ? 1 : 0;
  }
};

/// Exhaustive threshold scan over observed values; ties go to the smaller
/// threshold, then to the "le" polarity.
Stump fit_stump(std::span<const double> values, std::span<const int> labels);

struct FeatureDistance {
  std::string feature;
  double distance = 0.0;
};

struct DivergenceReport {
  std::vector<FeatureDistance> features;
  double max_distance = 0.0;
  double mean_distance = 0.0;
};

/// Total-variation distance between the categorical histograms of both
/// datasets, per feature.
DivergenceReport divergence(std::span<const DatasetRecord> a,
                            std::span<const DatasetRecord> b);

struct DuplicateGroup {
  std::string key;  // canonical "p|q"
  std::vector<std::uint64_t> ids;
};

struct DedupReport {
  std::uint64_t records = 0;
  std::vector<DuplicateGroup> groups;  // only groups of size >= 2
  /// Records whose canonical pair appeared earlier in the input.
  std::uint64_t duplicates = 0;
  /// Of those, how many repeat a pair already seen in the same chain.
  std::uint64_t within_chain = 0;

  double within_chain_fraction() const {
    return duplicates == 0 ? 0.0 : static_cast<double>(within_chain) / static_cast<double>(duplicates);
  }
};

DedupReport dedup(std::span<const DatasetRecord> records);

void write_leakage_csv(std::ostream& os, const LeakageReport& r);
void write_divergence_csv(std::ostream& os, const DivergenceReport& r);
void write_dedup_csv(std::ostream& os, const DedupReport& r);

}  // namespace cqc
