#include "cqc/audit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <ostream>
#include <unordered_map>

#include "cqc/errors.hpp"
#include "cqc/parallel.hpp"
#include "cqc/tokenizer.hpp"

namespace cqc {

namespace {

VerifyResult fail(std::string why) { return VerifyResult{false, std::move(why)}; }

// Decodes the next segment and checks it against its generator stream.
TapeSegment checked_segment(const std::string& cert, std::size_t& pos) {
  TapeSegment seg = decode_segment(cert, pos);
  if (seg.bits != generator_bits(seg.seed, seg.bits.size()))
    throw DataError("tape is not the generator stream of its seed");
  return seg;
}

std::uint64_t parse_rank(const std::string& cert, std::size_t& pos) {
  if (pos + 16 > cert.size()) throw DataError("certificate too short for a rank");
  std::uint64_t rank = 0;
  for (int i = 0; i < 16; ++i) {
    char c = cert[pos++];
    int d = (c >= '0' && c <= '9') ? c - '0' : (c >= 'a' && c <= 'f') ? c - 'a' + 10 : -1;
    if (d < 0) throw DataError("certificate has non-hex digit");
    rank = (rank << 4) | static_cast<std::uint64_t>(d);
  }
  return rank;
}

}  // namespace

VerifyResult replay_verify(const DatasetRecord& record, const DeciderOptions& decider) {
  const GeneratorSpec spec = GeneratorSpec::parse(record.gen);
  const bool augmented = record.origin == Origin::kAug;
  if (augmented != spec.augment.has_value())
    return fail("origin does not match generator stages");

  try {
    std::size_t pos = 0;
    QueryPair pair{Query({Atom{}}), Query({Atom{}})};
    if (spec.kind == GeneratorSpec::Kind::kEnumerate) {
      EnumConfig config;
      config.atoms_p = spec.atoms_p;
      config.atoms_q = spec.atoms_q;
      config.variables = spec.variables;
      config.constants = spec.constants;
      pair = unrank_pair(config, parse_rank(record.cert, pos));
    } else {
      TapeSegment seg = checked_segment(record.cert, pos);
      TapeRng rng = TapeRng::replay(std::move(seg.bits));
      pair = sample_seed_pair(spec, rng);
      if (!rng.exhausted())
        return fail("tape overrun: " + std::to_string(rng.tape().size() - rng.position()) +
                    " unused bits in seed segment");
    }
    LabeledPair cur{pair.p, pair.q, contains(pair.p, pair.q, decider) ? 1 : 0};

    if (augmented) {
      const std::uint64_t expected = augmentation_seed(std::string_view(record.cert).substr(0, pos));
      TapeSegment seg = checked_segment(record.cert, pos);
      if (seg.seed != expected) return fail("augmentation seed does not match the seed certificate");
      TapeRng rng = TapeRng::replay(std::move(seg.bits));
      for (int step = 0; step < record.chain_step; ++step)
        cur = augment_pair(cur, rng, *spec.augment);
      if (!rng.exhausted())
        return fail("tape overrun: " + std::to_string(rng.tape().size() - rng.position()) +
                    " unused bits in augmentation segment");
    }
    if (pos != record.cert.size()) return fail("trailing data after certificate");

    if (render(cur.p) != record.p) return fail("replayed p differs: " + render(cur.p));
    if (render(cur.q) != record.q) return fail("replayed q differs: " + render(cur.q));
    if (cur.label != record.label)
      return fail("replayed label " + std::to_string(cur.label) + " differs");
    return VerifyResult{true, {}};
  } catch (const TapeUnderrun& e) {
    return fail(e.what());
  } catch (const VersionMismatch&) {
    throw;
  } catch (const BudgetExceeded&) {
    throw;
  } catch (const Error& e) {
    return fail(e.what());
  }
}

VerifySummary verify_all(std::span<const DatasetRecord> records, unsigned threads,
                         std::size_t max_failures) {
  std::vector<VerifyResult> results(records.size());
  parallel_for(records.size(), threads,
               [&](std::size_t i) { results[i] = replay_verify(records[i]); });
  VerifySummary s;
  s.total = records.size();
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (results[i].ok) {
      ++s.verified;
    } else if (s.failures.size() < max_failures) {
      s.failures.emplace_back(records[i].id, results[i].diagnostic);
    }
  }
  return s;
}

Stump fit_stump(std::span<const double> values, std::span<const int> labels) {
  if (values.size() != labels.size() || values.empty())
    throw DataError("stump needs matching, nonempty values and labels");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  const double n = static_cast<double>(values.size());
  const std::size_t total_pos =
      static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  const std::size_t total_neg = values.size() - total_pos;

  Stump best;
  best.train_accuracy = -1.0;
  std::size_t pos_le = 0, neg_le = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double t = values[order[i]];
    while (i < order.size() && values[order[i]] == t) {
      (labels[order[i]] == 1 ? pos_le : neg_le)++;
      ++i;
    }
    const double le = static_cast<double>(pos_le + (total_neg - neg_le)) / n;
    const double gt = static_cast<double>(neg_le + (total_pos - pos_le)) / n;
    if (le > best.train_accuracy) best = Stump{t, true, le};
    if (gt > best.train_accuracy) best = Stump{t, false, gt};
  }
  return best;
}

namespace {

struct Features {
  int atoms_p, atoms_q, vars_p, vars_q, constants_p, constants_q, tokens_p, tokens_q;
  TokenIds ids_p, ids_q;
};

int count_constants(const Query& q) {
  int n = 0;
  for (const Atom& a : q.atoms())
    for (Term t : a.terms) n += t.is_constant();
  return n;
}

Features features(const DatasetRecord& r) {
  const Query p = parse(r.p, 64), q = parse(r.q, 64);
  Features f{};
  f.atoms_p = static_cast<int>(p.size());
  f.atoms_q = static_cast<int>(q.size());
  f.vars_p = static_cast<int>(p.variables().size());
  f.vars_q = static_cast<int>(q.variables().size());
  f.constants_p = count_constants(p);
  f.constants_q = count_constants(q);
  f.tokens_p = EncodingSpec::token_count(f.atoms_p);
  f.tokens_q = EncodingSpec::token_count(f.atoms_q);
  f.ids_p = tokenize(p);
  f.ids_q = tokenize(q);
  return f;
}

std::vector<Features> all_features(std::span<const DatasetRecord> records) {
  std::vector<Features> out;
  out.reserve(records.size());
  for (const DatasetRecord& r : records) out.push_back(features(r));
  return out;
}

using ScalarFeature = std::pair<const char*, std::function<double(const Features&)>>;

const std::vector<ScalarFeature>& stump_features() {
  static const std::vector<ScalarFeature> list{
      {"atoms_p", [](const Features& f) { return double(f.atoms_p); }},
      {"atoms_q", [](const Features& f) { return double(f.atoms_q); }},
      {"atoms_diff", [](const Features& f) { return double(f.atoms_p - f.atoms_q); }},
      {"vars_p", [](const Features& f) { return double(f.vars_p); }},
      {"vars_q", [](const Features& f) { return double(f.vars_q); }},
      {"vars_diff", [](const Features& f) { return double(f.vars_p - f.vars_q); }},
      {"tokens_diff", [](const Features& f) { return double(f.tokens_p - f.tokens_q); }},
  };
  return list;
}

// Naive-Bayes style scorer over (side, token id) counts with add-one smoothing.
class TokenScorer {
 public:
  static constexpr int kVocab = 2 * (EncodingSpec::kDictionarySize + 1);

  void fit(std::span<const Features> xs, std::span<const int> ys) {
    std::array<std::array<double, kVocab>, 2> counts{};
    std::array<double, 2> totals{}, docs{};
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const int y = ys[i];
      docs[y] += 1;
      for (auto id : xs[i].ids_p) counts[y][id] += 1, totals[y] += 1;
      for (auto id : xs[i].ids_q)
        counts[y][EncodingSpec::kDictionarySize + 1 + id] += 1, totals[y] += 1;
    }
    for (int k = 0; k < kVocab; ++k)
      weight_[k] = std::log((counts[1][k] + 1) / (totals[1] + kVocab)) -
                   std::log((counts[0][k] + 1) / (totals[0] + kVocab));
    bias_ = std::log(docs[1] / docs[0]);
  }

  int predict(const Features& f) const {
    double s = bias_;
    for (auto id : f.ids_p) s += weight_[id];
    for (auto id : f.ids_q) s += weight_[EncodingSpec::kDictionarySize + 1 + id];
    return s > 0 ? 1 : 0;
  }

 private:
  std::array<double, kVocab> weight_{};
  double bias_ = 0;
};

}  // namespace

LeakageReport leakage_probe(std::span<const DatasetRecord> train,
                            std::span<const DatasetRecord> test) {
  if (train.empty()) throw DataError("leakage probe needs a nonempty training set");
  if (test.empty()) throw DataError("leakage probe needs a nonempty test set");
  std::vector<int> ytrain, ytest;
  for (const auto& r : train) ytrain.push_back(r.label);
  for (const auto& r : test) ytest.push_back(r.label);
  const auto positives = std::count(ytrain.begin(), ytrain.end(), 1);
  if (positives == 0 || positives == static_cast<long>(ytrain.size()))
    throw DataError("leakage probe needs both classes in the training set");

  const std::vector<Features> ftrain = all_features(train);
  const std::vector<Features> ftest = all_features(test);

  LeakageReport report;
  for (const auto& [name, fn] : stump_features()) {
    std::vector<double> xs;
    xs.reserve(ftrain.size());
    for (const auto& f : ftrain) xs.push_back(fn(f));
    const Stump stump = fit_stump(xs, ytrain);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < ftest.size(); ++i)
      correct += stump.predict(fn(ftest[i])) == ytest[i];
    report.probes.push_back(ProbeResult{
        name, stump.threshold, stump.predict_one_below ? "le" : "gt",
        stump.train_accuracy, static_cast<double>(correct) / static_cast<double>(ftest.size())});
  }

  TokenScorer scorer;
  scorer.fit(ftrain, ytrain);
  std::size_t train_ok = 0, test_ok = 0;
  for (std::size_t i = 0; i < ftrain.size(); ++i) train_ok += scorer.predict(ftrain[i]) == ytrain[i];
  for (std::size_t i = 0; i < ftest.size(); ++i) test_ok += scorer.predict(ftest[i]) == ytest[i];
  report.probes.push_back(ProbeResult{
      "token_frequency", 0.0, "",
      static_cast<double>(train_ok) / static_cast<double>(ftrain.size()),
      static_cast<double>(test_ok) / static_cast<double>(ftest.size())});
  return report;
}

DivergenceReport divergence(std::span<const DatasetRecord> a,
                            std::span<const DatasetRecord> b) {
  if (a.empty() || b.empty()) throw DataError("divergence needs two nonempty datasets");
  using Extract = std::function<int(const Features&, int label)>;
  const std::vector<std::pair<const char*, Extract>> list{
      {"atoms_p", [](const Features& f, int) { return f.atoms_p; }},
      {"atoms_q", [](const Features& f, int) { return f.atoms_q; }},
      {"atoms_diff", [](const Features& f, int) { return f.atoms_p - f.atoms_q; }},
      {"vars_p", [](const Features& f, int) { return f.vars_p; }},
      {"vars_q", [](const Features& f, int) { return f.vars_q; }},
      {"constants_p", [](const Features& f, int) { return f.constants_p; }},
      {"constants_q", [](const Features& f, int) { return f.constants_q; }},
      {"label", [](const Features&, int label) { return label; }},
  };
  const auto fa = all_features(a), fb = all_features(b);
  DivergenceReport report;
  for (const auto& [name, fn] : list) {
    std::map<int, double> ha, hb;
    for (std::size_t i = 0; i < fa.size(); ++i) ha[fn(fa[i], a[i].label)] += 1;
    for (std::size_t i = 0; i < fb.size(); ++i) hb[fn(fb[i], b[i].label)] += 1;
    std::map<int, double> keys = ha;
    for (auto& [k, v] : hb) keys[k] += 0;
    double sum = 0;
    for (auto& [k, unused] : keys) {
      const double pa = ha.count(k) ? ha[k] / static_cast<double>(fa.size()) : 0.0;
      const double pb = hb.count(k) ? hb[k] / static_cast<double>(fb.size()) : 0.0;
      sum += std::abs(pa - pb);
    }
    const double tv = std::min(1.0, 0.5 * sum);
    report.features.push_back({name, tv});
    report.max_distance = std::max(report.max_distance, tv);
    report.mean_distance += tv;
  }
  report.mean_distance /= static_cast<double>(report.features.size());
  return report;
}

DedupReport dedup(std::span<const DatasetRecord> records) {
  DedupReport report;
  report.records = records.size();
  std::unordered_map<std::string, std::size_t> index;
  std::vector<DuplicateGroup> groups;
  std::vector<std::vector<std::uint64_t>> chains;
  for (const DatasetRecord& r : records) {
    std::string key = render(canonicalize(parse(r.p, 64))) + "|" +
                      render(canonicalize(parse(r.q, 64)));
    auto [it, inserted] = index.emplace(key, groups.size());
    if (inserted) {
      groups.push_back(DuplicateGroup{std::move(key), {r.id}});
      chains.push_back({r.seed_id});
      continue;
    }
    ++report.duplicates;
    auto& chain_ids = chains[it->second];
    if (std::find(chain_ids.begin(), chain_ids.end(), r.seed_id) != chain_ids.end())
      ++report.within_chain;
    else
      chain_ids.push_back(r.seed_id);
    groups[it->second].ids.push_back(r.id);
  }
  for (auto& g : groups)
    if (g.ids.size() >= 2) report.groups.push_back(std::move(g));
  return report;
}

namespace {
std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}
}  // namespace

void write_leakage_csv(std::ostream& os, const LeakageReport& r) {
  os << "probe,threshold,polarity,train_accuracy,test_accuracy\n";
  for (const auto& p : r.probes)
    os << p.name << ',' << fmt(p.threshold) << ',' << p.polarity << ','
       << fmt(p.train_accuracy) << ',' << fmt(p.test_accuracy) << '\n';
}

void write_divergence_csv(std::ostream& os, const DivergenceReport& r) {
  os << "feature,tv_distance\n";
  for (const auto& f : r.features) os << f.feature << ',' << fmt(f.distance) << '\n';
  os << "max," << fmt(r.max_distance) << '\n';
  os << "mean," << fmt(r.mean_distance) << '\n';
}

void write_dedup_csv(std::ostream& os, const DedupReport& r) {
  os << "key,size,ids\n";
  for (const auto& g : r.groups) {
    os << '"' << g.key << "\"," << g.ids.size() << ',';
    for (std::size_t i = 0; i < g.ids.size(); ++i) os << (i ? " " : "") << g.ids[i];
    os << '\n';
  }
}

}  // namespace cqc
