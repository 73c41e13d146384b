#include "cqc/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include "cqc/errors.hpp"
#include "cqc/parallel.hpp"
#include "cqc/tokenizer.hpp"

namespace cqc {

std::string_view to_string(Origin o) { return o == Origin::kSeed ? "seed" : "aug"; }

namespace {

constexpr std::string_view kSeedName = "cqc-seed";
constexpr std::string_view kMuName = "cqc-mu";
constexpr std::string_view kEnumName = "cqc-enum";
constexpr std::string_view kAugName = "aug";

std::pair<std::string_view, int> split_name(std::string_view token) {
  auto slash = token.find('/');
  if (slash == std::string_view::npos)
    throw VersionMismatch("generator token without version: '" +
                          std::string(token) + "'");
  int version = 0;
  for (char c : token.substr(slash + 1)) {
    if (c < '0' || c > '9')
      throw VersionMismatch("bad generator version in '" + std::string(token) + "'");
    version = version * 10 + (c - '0');
  }
  return {token.substr(0, slash), version};
}

int parse_int(std::string_view key, std::string_view v) {
  if (v.empty() || v.size() > 9)
    throw DataError("bad value for " + std::string(key));
  int out = 0;
  for (char c : v) {
    if (c < '0' || c > '9') throw DataError("bad value for " + std::string(key));
    out = out * 10 + (c - '0');
  }
  return out;
}

std::vector<std::string_view> split_spaces(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && s[i] == ' ') ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string rank_cert(std::uint64_t rank) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rank));
  return buf;
}

// Generates records in index blocks on `threads` workers and hands them to
// the sink in index order.
template <typename Make>
void ordered_emit(std::uint64_t count, unsigned threads, Make&& make,
                  const RecordSink& sink) {
  const std::uint64_t block = 2048ULL * std::max(1u, threads);
  std::vector<std::vector<DatasetRecord>> out;
  for (std::uint64_t start = 0; start < count; start += block) {
    const std::uint64_t n = std::min(block, count - start);
    out.assign(n, {});
    parallel_for(n, threads, [&](std::size_t i) { out[i] = make(start + i); });
    if (sink)
      for (const auto& group : out)
        for (const auto& r : group) sink(r);
  }
}

DatasetRecord labeled_record(std::uint64_t id, const QueryPair& pair, int label,
                             std::string cert, std::string gen) {
  DatasetRecord r;
  r.id = id;
  r.p = render(pair.p);
  r.q = render(pair.q);
  r.label = label;
  r.origin = Origin::kSeed;
  r.seed_id = id;
  r.chain_step = 0;
  r.cert = std::move(cert);
  r.gen = std::move(gen);
  return r;
}

void generate_sampled(const GeneratorSpec& spec, std::uint64_t count,
                      std::uint64_t master, const RecordSink& sink,
                      unsigned threads, const DeciderOptions& decider) {
  const std::string gen = spec.str();
  ordered_emit(
      count, threads,
      [&](std::uint64_t i) {
        const std::uint64_t seed =
            derive_seed(master, static_cast<std::uint64_t>(Stream::kSeedSampling), i);
        TapeRng rng = TapeRng::record(seed);
        QueryPair pair = sample_seed_pair(spec, rng);
        const int label = contains(pair.p, pair.q, decider) ? 1 : 0;
        return std::vector<DatasetRecord>{labeled_record(
            i, pair, label, encode_segment({seed, rng.tape()}), gen)};
      },
      sink);
}

}  // namespace

std::string GeneratorSpec::str() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::kSeed:
      os << kSeedName << '/' << version << " m1=" << m1_min << ':' << m1_max
         << " m2max=" << m2_max << " c=" << c.str() << " consts=" << constants;
      break;
    case Kind::kMu:
      os << kMuName << '/' << version << " m1=" << m1 << " m2=" << m2
         << " c=" << c.str() << " consts=" << constants;
      break;
    case Kind::kEnumerate:
      os << kEnumName << '/' << version << " ap=" << atoms_p
         << " aq=" << atoms_q << " n=" << variables << " consts=" << constants;
      break;
  }
  if (augment)
    os << ' ' << kAugName << '/' << kVersion << " capp=" << augment->max_atoms_p
       << " capq=" << augment->max_atoms_q << " retries=" << augment->max_retries;
  return os.str();
}

GeneratorSpec GeneratorSpec::parse(std::string_view text) {
  const auto tokens = split_spaces(text);
  if (tokens.empty()) throw VersionMismatch("empty generator string");
  GeneratorSpec spec;
  auto [name, version] = split_name(tokens[0]);
  if (name == kSeedName)
    spec.kind = Kind::kSeed;
  else if (name == kMuName)
    spec.kind = Kind::kMu;
  else if (name == kEnumName)
    spec.kind = Kind::kEnumerate;
  else
    throw VersionMismatch("unknown generator '" + std::string(name) + "'");
  if (version != kVersion)
    throw VersionMismatch("generator " + std::string(tokens[0]) +
                          " does not match this build (version " +
                          std::to_string(kVersion) + ")");
  spec.version = version;

  bool in_aug = false;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    std::string_view tok = tokens[i];
    if (tok.find('=') == std::string_view::npos) {
      auto [aname, aversion] = split_name(tok);
      if (aname != kAugName || aversion != kVersion || in_aug)
        throw VersionMismatch("unknown generator stage '" + std::string(tok) + "'");
      in_aug = true;
      spec.augment = AugmentOptions{};
      continue;
    }
    auto eq = tok.find('=');
    std::string_view key = tok.substr(0, eq), val = tok.substr(eq + 1);
    if (in_aug) {
      if (key == "capp") spec.augment->max_atoms_p = parse_int(key, val);
      else if (key == "capq") spec.augment->max_atoms_q = parse_int(key, val);
      else if (key == "retries") spec.augment->max_retries = parse_int(key, val);
      else throw DataError("unknown augmentation parameter '" + std::string(key) + "'");
      continue;
    }
    if (key == "c") {
      try {
        spec.c = Ratio::parse(val);
      } catch (const Error&) {
        throw DataError("bad value for c");
      }
    } else if (key == "consts") {
      spec.constants = parse_int(key, val) != 0;
    } else if (key == "m1" && spec.kind == Kind::kSeed) {
      auto colon = val.find(':');
      if (colon == std::string_view::npos) throw DataError("m1 must be a range");
      spec.m1_min = parse_int(key, val.substr(0, colon));
      spec.m1_max = parse_int(key, val.substr(colon + 1));
    } else if (key == "m2max") {
      spec.m2_max = parse_int(key, val);
    } else if (key == "m1") {
      spec.m1 = parse_int(key, val);
    } else if (key == "m2") {
      spec.m2 = parse_int(key, val);
    } else if (key == "ap") {
      spec.atoms_p = parse_int(key, val);
    } else if (key == "aq") {
      spec.atoms_q = parse_int(key, val);
    } else if (key == "n") {
      spec.variables = parse_int(key, val);
    } else {
      throw DataError("unknown generator parameter '" + std::string(key) + "'");
    }
  }
  return spec;
}

QueryPair sample_seed_pair(const GeneratorSpec& spec, TapeRng& rng) {
  int m1 = spec.m1, m2 = spec.m2;
  if (spec.kind == GeneratorSpec::Kind::kSeed) {
    if (spec.m1_min < 1 || spec.m1_max < spec.m1_min || spec.m2_max < 1)
      throw Error("invalid seed size ranges");
    m1 = spec.m1_min + static_cast<int>(rng.uniform(spec.m1_max - spec.m1_min + 1));
    m2 = 1 + static_cast<int>(rng.uniform(std::min(m1, spec.m2_max)));
  } else if (spec.kind != GeneratorSpec::Kind::kMu) {
    throw Error("generator does not sample");
  }
  return sample_mu(MuParams::balanced(m1, m2, spec.c, spec.constants), rng);
}

void gen_seed(std::uint64_t count, const SeedGenConfig& config,
              std::uint64_t master, const RecordSink& sink, unsigned threads) {
  GeneratorSpec spec;
  spec.kind = GeneratorSpec::Kind::kSeed;
  spec.m1_min = config.m1_min;
  spec.m1_max = config.m1_max;
  spec.m2_max = config.m2_max;
  spec.c = config.c;
  spec.constants = config.constants;
  if (config.m1_min < 1 || config.m1_max < config.m1_min ||
      config.m1_max > kDefaultMaxAtoms || config.m2_max < 1)
    throw Error("seed size ranges must satisfy 1 <= m1 range <= 10, m2max >= 1");
  generate_sampled(spec, count, master, sink, threads, config.decider);
}

void gen_mu_test(int m1, int m2, std::uint64_t count, std::uint64_t master,
                 const RecordSink& sink, unsigned threads, Ratio c,
                 bool constants, const DeciderOptions& decider) {
  GeneratorSpec spec;
  spec.kind = GeneratorSpec::Kind::kMu;
  spec.m1 = m1;
  spec.m2 = m2;
  spec.c = c;
  spec.constants = constants;
  MuParams::balanced(m1, m2, c, constants).validate();
  generate_sampled(spec, count, master, sink, threads, decider);
}

std::vector<DatasetRecord> collect_seed(std::uint64_t count,
                                        const SeedGenConfig& config,
                                        std::uint64_t master, unsigned threads) {
  std::vector<DatasetRecord> out;
  out.reserve(count);
  gen_seed(count, config, master, [&](const DatasetRecord& r) { out.push_back(r); },
           threads);
  return out;
}

std::uint64_t augmentation_seed(std::string_view seed_cert) {
  // FNV-1a over the certificate text.
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : seed_cert) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return derive_seed(h, static_cast<std::uint64_t>(Stream::kAugmentation), 0);
}

void expand(std::span<const DatasetRecord> seeds, int factor,
            const RecordSink& sink, unsigned threads,
            const AugmentOptions& opts) {
  if (factor < 1) throw Error("expansion factor must be >= 1");
  ordered_emit(
      seeds.size(), threads,
      [&](std::uint64_t i) {
        const DatasetRecord& s = seeds[i];
        if (s.origin != Origin::kSeed)
          throw DataError("record " + std::to_string(s.id) +
                          " is not a seed and cannot be expanded");
        GeneratorSpec spec = GeneratorSpec::parse(s.gen);
        spec.augment = opts;
        const std::string gen = spec.str();
        const std::uint64_t base = i * static_cast<std::uint64_t>(factor);

        std::vector<DatasetRecord> out;
        out.reserve(factor);
        DatasetRecord head = s;
        head.id = base;
        head.seed_id = base;
        out.push_back(head);

        const std::uint64_t aug_seed = augmentation_seed(s.cert);
        TapeRng rng = TapeRng::record(aug_seed);
        LabeledPair cur{parse(s.p, opts.max_atoms_p),
                        parse(s.q, opts.max_atoms_q), s.label};
        for (int step = 1; step < factor; ++step) {
          cur = augment_pair(cur, rng, opts);
          const BitTape& tape = rng.tape();
          TapeSegment seg{aug_seed, BitTape(tape.begin(), tape.begin() +
                                                static_cast<std::ptrdiff_t>(rng.position()))};
          DatasetRecord r;
          r.id = base + static_cast<std::uint64_t>(step);
          r.p = render(cur.p);
          r.q = render(cur.q);
          r.label = cur.label;
          r.origin = Origin::kAug;
          r.seed_id = base;
          r.chain_step = step;
          r.cert = s.cert + encode_segment(seg);
          r.gen = gen;
          out.push_back(std::move(r));
        }
        return out;
      },
      sink);
}

std::vector<DatasetRecord> collect_expand(std::span<const DatasetRecord> seeds,
                                          int factor, unsigned threads,
                                          const AugmentOptions& opts) {
  std::vector<DatasetRecord> out;
  out.reserve(seeds.size() * static_cast<std::size_t>(std::max(factor, 0)));
  expand(seeds, factor, [&](const DatasetRecord& r) { out.push_back(r); },
         threads, opts);
  return out;
}

namespace {

void enumerate_terms(int positions, int variables, bool constants,
                     std::vector<Term>& cur, int next_var,
                     std::vector<std::vector<Term>>& out) {
  if (static_cast<int>(cur.size()) == positions) {
    out.push_back(cur);
    return;
  }
  const int limit = std::min(next_var + 1, variables);
  for (int v = 0; v < limit; ++v) {
    cur.push_back(Term::variable(v));
    enumerate_terms(positions, variables, constants, cur,
                    v == next_var ? next_var + 1 : next_var, out);
    cur.pop_back();
  }
  if (constants) {
    for (int c = 0; c < 2; ++c) {
      cur.push_back(Term::constant(c));
      enumerate_terms(positions, variables, constants, cur, next_var, out);
      cur.pop_back();
    }
  }
}

}  // namespace

std::vector<Query> enumerate_queries(int atoms, int variables, bool constants) {
  if (atoms < 1 || atoms > kDefaultMaxAtoms)
    throw Error("atom count must be in [1, 10]");
  if (variables < 0 || variables > kVariableCount)
    throw Error("variable pool size must be in [0, 33]");
  if (variables == 0 && !constants)
    throw Error("empty term pool");
  std::vector<std::vector<Term>> term_rows;
  std::vector<Term> cur;
  enumerate_terms(3 * atoms, variables, constants, cur, 0, term_rows);

  std::vector<Query> out;
  out.reserve(term_rows.size() << atoms);
  for (unsigned rel = 0; rel < (1u << atoms); ++rel) {
    for (const auto& row : term_rows) {
      std::vector<Atom> as(atoms);
      for (int a = 0; a < atoms; ++a) {
        as[a].relation = ((rel >> (atoms - 1 - a)) & 1U) ? Relation::R1 : Relation::R0;
        for (int k = 0; k < 3; ++k) as[a].terms[k] = row[3 * a + k];
      }
      out.emplace_back(std::move(as));
    }
  }
  return out;
}

GeneratorSpec EnumConfig::spec() const {
  GeneratorSpec s;
  s.kind = GeneratorSpec::Kind::kEnumerate;
  s.atoms_p = atoms_p;
  s.atoms_q = atoms_q;
  s.variables = variables;
  s.constants = constants;
  return s;
}

namespace {

struct QuerySpace {
  std::vector<Query> p;
  std::vector<Query> q;
};

const QuerySpace& query_space(const EnumConfig& config) {
  static std::mutex mutex;
  static std::map<std::tuple<int, int, int, bool>, QuerySpace> cache;
  std::lock_guard lock(mutex);
  auto key = std::make_tuple(config.atoms_p, config.atoms_q, config.variables,
                             config.constants);
  auto it = cache.find(key);
  if (it == cache.end()) {
    QuerySpace space{
        enumerate_queries(config.atoms_p, config.variables, config.constants),
        enumerate_queries(config.atoms_q, config.variables, config.constants)};
    it = cache.emplace(key, std::move(space)).first;
  }
  return it->second;
}

}  // namespace

QueryPair unrank_pair(const EnumConfig& config, std::uint64_t rank) {
  const QuerySpace& space = query_space(config);
  const std::uint64_t total =
      static_cast<std::uint64_t>(space.p.size()) * space.q.size();
  if (rank >= total)
    throw DataError("rank " + std::to_string(rank) + " outside space of " +
                    std::to_string(total) + " pairs");
  return QueryPair{space.p[rank / space.q.size()], space.q[rank % space.q.size()]};
}

EnumSummary enumerate_all(const EnumConfig& config, const RecordSink& sink,
                          unsigned threads) {
  const QuerySpace& space = query_space(config);
  EnumSummary summary;
  summary.queries_p = space.p.size();
  summary.queries_q = space.q.size();
  const std::uint64_t total = summary.queries_p * summary.queries_q;
  if (total > config.max_pairs)
    throw BudgetExceeded("enumeration space of " + std::to_string(total) +
                         " pairs exceeds the budget of " +
                         std::to_string(config.max_pairs));
  summary.pairs = total;

  if (!sink) {
    std::atomic<std::uint64_t> positives{0};
    parallel_for(space.p.size(), threads, [&](std::size_t i) {
      std::uint64_t local = 0;
      for (const Query& q : space.q) local += contains(space.p[i], q, config.decider);
      positives += local;
    });
    summary.positives = positives;
    return summary;
  }

  const std::string gen = config.spec().str();
  std::uint64_t positives = 0;
  ordered_emit(
      total, threads,
      [&](std::uint64_t rank) {
        const Query& p = space.p[rank / space.q.size()];
        const Query& q = space.q[rank % space.q.size()];
        const int label = contains(p, q, config.decider) ? 1 : 0;
        return std::vector<DatasetRecord>{
            labeled_record(rank, QueryPair{p, q}, label, rank_cert(rank), gen)};
      },
      [&](const DatasetRecord& r) {
        positives += static_cast<std::uint64_t>(r.label);
        sink(r);
      });
  summary.positives = positives;
  return summary;
}

EnumSummary enumerate_sample(const EnumConfig& config, std::uint64_t count,
                             std::uint64_t master, const RecordSink& sink,
                             unsigned threads) {
  const QuerySpace& space = query_space(config);
  EnumSummary summary;
  summary.queries_p = space.p.size();
  summary.queries_q = space.q.size();
  const std::uint64_t total = summary.queries_p * summary.queries_q;
  summary.pairs = count;
  const std::string gen = config.spec().str();
  std::uint64_t positives = 0;
  ordered_emit(
      count, threads,
      [&](std::uint64_t i) {
        TapeRng rng = TapeRng::record(
            derive_seed(master, static_cast<std::uint64_t>(Stream::kSubsample), i));
        const std::uint64_t rank = rng.uniform(total);
        const Query& p = space.p[rank / space.q.size()];
        const Query& q = space.q[rank % space.q.size()];
        const int label = contains(p, q, config.decider) ? 1 : 0;
        return std::vector<DatasetRecord>{
            labeled_record(i, QueryPair{p, q}, label, rank_cert(rank), gen)};
      },
      [&](const DatasetRecord& r) {
        positives += static_cast<std::uint64_t>(r.label);
        if (sink) sink(r);
      });
  summary.positives = positives;
  return summary;
}

namespace {

std::string canonical_key(const DatasetRecord& r) {
  return render(canonicalize(parse(r.p, 64))) + "|" +
         render(canonicalize(parse(r.q, 64)));
}

}  // namespace

DatasetStats stats(std::span<const DatasetRecord> records) {
  DatasetStats s;
  std::set<std::string> seen;
  for (const DatasetRecord& r : records) {
    const Query p = parse(r.p, 64), q = parse(r.q, 64);
    ++s.count;
    s.positives += static_cast<std::uint64_t>(r.label == 1);
    ++s.atoms_p[static_cast<int>(p.size())];
    ++s.atoms_q[static_cast<int>(q.size())];
    ++s.variables_p[static_cast<int>(p.variables().size())];
    ++s.variables_q[static_cast<int>(q.variables().size())];
    if (!seen.insert(canonical_key(r)).second) ++s.duplicates;
  }
  return s;
}

void write_stats(std::ostream& os, const DatasetStats& s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", s.positive_fraction());
  os << "records," << s.count << '\n'
     << "positives," << s.positives << '\n'
     << "positive_fraction," << buf << '\n'
     << "canonical_duplicates," << s.duplicates << '\n';
  auto hist = [&](const char* name, const std::map<int, std::uint64_t>& h) {
    for (auto [k, v] : h) os << name << '=' << k << ',' << v << '\n';
  };
  hist("atoms_p", s.atoms_p);
  hist("atoms_q", s.atoms_q);
  hist("variables_p", s.variables_p);
  hist("variables_q", s.variables_q);
}

void export_tokens(std::span<const DatasetRecord> records, std::ostream& os) {
  auto emit = [&](const std::string& text) {
    const auto ids = tokenize_padded(parse(text, 64));
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (i > 0) os << ' ';
      os << static_cast<int>(ids[i]);
    }
  };
  for (const DatasetRecord& r : records) {
    os << r.label << '\t';
    emit(r.p);
    os << '\t';
    emit(r.q);
    os << '\n';
  }
}

void sort_by_id(std::vector<DatasetRecord>& records) {
  std::stable_sort(records.begin(), records.end(),
                   [](const DatasetRecord& a, const DatasetRecord& b) { return a.id < b.id; });
}

}  // namespace cqc
