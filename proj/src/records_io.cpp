#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "cqc/dataset.hpp"
#include "cqc/errors.hpp"
#include "json.hpp"

namespace cqc {

using ordered_json = nlohmann::ordered_json;

std::string format_record(const DatasetRecord& r) {
  ordered_json j;
  j["id"] = r.id;
  j["p"] = r.p;
  j["q"] = r.q;
  j["label"] = r.label;
  j["origin"] = to_string(r.origin);
  j["seed_id"] = r.seed_id;
  j["chain_step"] = r.chain_step;
  j["cert"] = r.cert;
  j["gen"] = r.gen;
  return j.dump();
}

void write_record(std::ostream& os, const DatasetRecord& r) {
  os << format_record(r) << '\n';
}

DatasetRecord parse_record(std::string_view line, std::uint64_t line_number) {
  auto fail = [&](const std::string& what) {
    return DataError("line " + std::to_string(line_number) + ": " + what);
  };
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw fail(std::string("malformed record (") + e.what() + ")");
  }
  if (!j.is_object()) throw fail("record is not an object");

  auto field = [&](const char* key) -> const ordered_json& {
    auto it = j.find(key);
    if (it == j.end()) throw fail(std::string("missing field '") + key + "'");
    return *it;
  };
  auto unsigned_field = [&](const char* key) {
    const ordered_json& v = field(key);
    if (!v.is_number_unsigned())
      throw fail(std::string("field '") + key + "' must be a nonnegative integer");
    return v.get<std::uint64_t>();
  };
  auto string_field = [&](const char* key) {
    const ordered_json& v = field(key);
    if (!v.is_string()) throw fail(std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
  };

  DatasetRecord r;
  r.id = unsigned_field("id");
  r.p = string_field("p");
  r.q = string_field("q");
  const std::uint64_t label = unsigned_field("label");
  if (label > 1) throw fail("field 'label' must be 0 or 1");
  r.label = static_cast<int>(label);
  const std::string origin = string_field("origin");
  if (origin == "seed")
    r.origin = Origin::kSeed;
  else if (origin == "aug")
    r.origin = Origin::kAug;
  else
    throw fail("field 'origin' must be \"seed\" or \"aug\"");
  r.seed_id = unsigned_field("seed_id");
  const std::uint64_t step = unsigned_field("chain_step");
  if (step > 1'000'000'000) throw fail("field 'chain_step' out of range");
  r.chain_step = static_cast<int>(step);
  if (r.origin == Origin::kAug && r.chain_step < 1)
    throw fail("augmented record must have chain_step >= 1");
  if (r.origin == Origin::kSeed && r.chain_step != 0)
    throw fail("seed record must have chain_step 0");
  r.cert = string_field("cert");
  r.gen = string_field("gen");
  for (char c : r.cert)
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f')))
      throw fail("field 'cert' must be lowercase hex");
  try {
    parse(r.p, 64);
    parse(r.q, 64);
  } catch (const ParseError& e) {
    throw fail(std::string("bad query: ") + e.what());
  }
  return r;
}

ReadResult read_records(std::istream& is) {
  ReadResult out;
  std::string line;
  std::uint64_t n = 0;
  std::set<std::string> warned;
  while (std::getline(is, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    DatasetRecord r = parse_record(line, n);
    try {
      GeneratorSpec::parse(r.gen);
    } catch (const VersionMismatch& e) {
      if (warned.insert(r.gen).second)
        out.warnings.push_back("line " + std::to_string(n) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(n) + ": " + e.what());
    }
    out.records.push_back(std::move(r));
  }
  return out;
}

ReadResult read_records_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return read_records(in);
}

void write_records_file(const std::string& path,
                        std::span<const DatasetRecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  for (const DatasetRecord& r : records) write_record(out, r);
  if (!out) throw DataError("write failed for " + path);
}

}  // namespace cqc
