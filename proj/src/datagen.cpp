#include "mapqa/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "mapqa/errors.hpp"
#include "mapqa/rng.hpp"
#include "mapqa/strings.hpp"

namespace mapqa {

using nlohmann::json;

std::string to_string(DataKind kind) {
  return kind == DataKind::Absolute ? "absolute" : "relative";
}

std::string to_string(Distribution dist) {
  return dist == Distribution::Uniform ? "uniform" : "normal";
}

std::string to_string(ClassScheme scheme) {
  return scheme == ClassScheme::EqualInterval ? "equal_interval" : "quantile";
}

DataKind parse_data_kind(std::string_view s) {
  if (s == "absolute") return DataKind::Absolute;
  if (s == "relative") return DataKind::Relative;
  throw Error(ErrorKind::ParseError, "unknown data kind '" + std::string(s) + "'");
}

ClassScheme parse_class_scheme(std::string_view s) {
  if (s == "equal_interval") return ClassScheme::EqualInterval;
  if (s == "quantile") return ClassScheme::Quantile;
  throw Error(ErrorKind::ParseError, "unknown classification scheme '" + std::string(s) + "'");
}

ValueRange canonical_range(DataKind kind) {
  return kind == DataKind::Absolute ? ValueRange{1.0, 1e8} : ValueRange{1.0, 100.0};
}

namespace {

double grid_scale(DataKind kind) { return kind == DataKind::Absolute ? 1.0 : 10.0; }

// Every grid value is produced by this one expression so that comparisons
// against class boundaries agree bit-for-bit with the stored data.
double grid_value(DataKind kind, long long n) {
  return kind == DataKind::Absolute ? static_cast<double>(n) : static_cast<double>(n) / 10.0;
}

long long grid_index(DataKind kind, double v) { return std::llround(v * grid_scale(kind)); }

}  // namespace

double snap_to_grid(DataKind kind, double v) { return grid_value(kind, grid_index(kind, v)); }

std::vector<double> UnderlyingTable::present_values() const {
  std::vector<double> out;
  for (const auto& [id, v] : values) {
    if (v) out.push_back(*v);
  }
  return out;
}

bool UnderlyingTable::has_missing() const {
  return std::any_of(values.begin(), values.end(), [](const auto& kv) { return !kv.second; });
}

double UnderlyingTable::observed_min() const {
  const auto vs = present_values();
  if (vs.empty()) throw Error(ErrorKind::DegenerateData, "table has no values");
  return *std::min_element(vs.begin(), vs.end());
}

double UnderlyingTable::observed_max() const {
  const auto vs = present_values();
  if (vs.empty()) throw Error(ErrorKind::DegenerateData, "table has no values");
  return *std::max_element(vs.begin(), vs.end());
}

UnderlyingTable sample_table(const GeoModel& geo, DataKind kind, Distribution dist,
                             const MissingPolicy& policy, std::uint64_t seed) {
  Rng rng(seed);
  UnderlyingTable table;
  table.kind = kind;
  table.range = canonical_range(kind);
  const double lo = table.range.lo;
  const double hi = table.range.hi;
  for (const RegionGeometry& r : geo.regions()) {
    double v = 0.0;
    if (dist == Distribution::Uniform) {
      v = rng.uniform(lo, hi);
    } else {
      v = rng.normal((lo + hi) / 2.0, (hi - lo) / 6.0);
    }
    table.values[r.id] = std::clamp(snap_to_grid(kind, std::clamp(v, lo, hi)), lo, hi);
  }

  const bool affected = policy.enabled && rng.bernoulli(policy.map_probability);
  const auto n = static_cast<std::int64_t>(geo.size());
  if (affected && n >= 2) {
    const std::int64_t m = rng.between(1, n / 2);
    std::vector<RegionId> ids;
    for (const RegionGeometry& r : geo.regions()) ids.push_back(r.id);
    // Partial Fisher-Yates: the first m slots become a uniform m-subset.
    for (std::int64_t i = 0; i < m; ++i) {
      const auto j = static_cast<std::size_t>(rng.between(i, n - 1));
      std::swap(ids[static_cast<std::size_t>(i)], ids[j]);
      table.values[ids[static_cast<std::size_t>(i)]] = std::nullopt;
    }
  }
  return table;
}

IngestResult ingest_table(const GeoModel& geo, std::istream& csv, DataKind kind) {
  IngestResult result;
  UnderlyingTable& table = result.table;
  table.kind = kind;
  table.range = canonical_range(kind);
  for (const RegionGeometry& r : geo.regions()) table.values[r.id] = std::nullopt;

  std::string line;
  if (!std::getline(csv, line)) throw Error(ErrorKind::ParseError, "empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (text::lower(text::trim(line)) != "region,value") {
    throw Error(ErrorKind::ParseError, "CSV header must be 'region,value', got '" + line + "'");
  }
  std::set<RegionId> seen;
  int line_no = 1;
  while (std::getline(csv, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    std::string name;
    std::string value;
    if (!line.empty() && line.front() == '"') {
      const auto close = line.find('"', 1);
      if (close == std::string::npos || close + 1 >= line.size() + 1) {
        throw Error(ErrorKind::ParseError, "unterminated quote on line " + std::to_string(line_no));
      }
      name = line.substr(1, close - 1);
      const auto comma = line.find(',', close);
      if (comma == std::string::npos) {
        throw Error(ErrorKind::ParseError, "missing value column on line " + std::to_string(line_no));
      }
      value = line.substr(comma + 1);
    } else {
      const auto comma = line.find(',');
      if (comma == std::string::npos) {
        throw Error(ErrorKind::ParseError, "missing value column on line " + std::to_string(line_no));
      }
      name = line.substr(0, comma);
      value = line.substr(comma + 1);
    }
    const auto id = geo.find_by_name(text::trim(name));
    if (!id) {
      throw Error(ErrorKind::UnknownRegion,
                  "unknown region '" + text::trim(name) + "' on line " + std::to_string(line_no));
    }
    if (!seen.insert(*id).second) {
      throw Error(ErrorKind::ParseError, "duplicate row for region '" + text::trim(name) + "'");
    }
    value = text::trim(value);
    if (value.empty()) continue;
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(value, &used);
      if (used != value.size() || !std::isfinite(v)) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw Error(ErrorKind::ParseError,
                  "bad numeric value '" + value + "' on line " + std::to_string(line_no));
    }
    const double clamped = std::clamp(v, table.range.lo, table.range.hi);
    if (clamped != v) {
      result.warnings.push_back("value " + value + " for '" + text::trim(name) + "' clamped to " +
                                format_value(kind, clamped));
    }
    table.values[*id] = std::clamp(snap_to_grid(kind, clamped), table.range.lo, table.range.hi);
  }
  return result;
}

IngestResult ingest_table(const GeoModel& geo, const std::filesystem::path& csv_file, DataKind kind) {
  std::ifstream in(csv_file);
  if (!in) throw Error(ErrorKind::IoError, "cannot open CSV " + csv_file.string());
  return ingest_table(geo, in, kind);
}

int class_of(std::span<const double> b, double v) {
  const int k = static_cast<int>(b.size()) - 1;
  for (int i = 0; i < k - 1; ++i) {
    if (v <= b[static_cast<std::size_t>(i + 1)]) return i;
  }
  return k - 1;
}

std::vector<RegionId> Classification::members(int class_index) const {
  std::vector<RegionId> out;
  for (const auto& [id, c] : assignment) {
    if (c && *c == class_index) out.push_back(id);
  }
  return out;
}

Classification classify(const UnderlyingTable& table, ClassScheme scheme, int k) {
  if (k < 2 || k > 5) throw Error(ErrorKind::OutOfRange, "class count must be in [2, 5]");
  std::vector<double> values = table.present_values();
  std::sort(values.begin(), values.end());
  const std::set<double> distinct(values.begin(), values.end());
  if (static_cast<int>(distinct.size()) < k) {
    throw Error(ErrorKind::DegenerateData, "only " + std::to_string(distinct.size()) +
                                               " distinct values for " + std::to_string(k) + " classes");
  }
  const double vmin = values.front();
  const double vmax = values.back();
  const auto n = static_cast<long long>(values.size());

  Classification c;
  c.scheme = scheme;
  c.k = k;
  c.boundaries.resize(static_cast<std::size_t>(k + 1));
  c.boundaries.front() = vmin;
  c.boundaries.back() = vmax;
  for (int i = 1; i < k; ++i) {
    if (scheme == ClassScheme::EqualInterval) {
      c.boundaries[static_cast<std::size_t>(i)] = vmin + i * (vmax - vmin) / k;
    } else {
      // ceil(i * n / k)-th order statistic, 1-based.
      const long long rank = (i * n + k - 1) / k;
      c.boundaries[static_cast<std::size_t>(i)] = values[static_cast<std::size_t>(rank - 1)];
    }
  }

  std::vector<int> sizes(static_cast<std::size_t>(k), 0);
  for (const auto& [id, v] : table.values) {
    if (!v) {
      c.assignment[id] = std::nullopt;
      continue;
    }
    const int cls = class_of(c.boundaries, *v);
    c.assignment[id] = cls;
    ++sizes[static_cast<std::size_t>(cls)];
  }
  for (int i = 0; i < k; ++i) {
    if (sizes[static_cast<std::size_t>(i)] == 0) {
      throw Error(ErrorKind::DegenerateData, "class " + std::to_string(i) + " is empty");
    }
  }
  std::set<std::string> seen;
  for (int i = 0; i < k; ++i) {
    c.descriptions.push_back(describe_class(table.kind, c.boundaries, i));
    if (!seen.insert(c.descriptions.back()).second) {
      throw Error(ErrorKind::DegenerateData, "duplicate class description " + c.descriptions.back());
    }
  }
  return c;
}

namespace {

std::string format_grid(DataKind kind, long long n) {
  if (kind == DataKind::Absolute) return text::with_thousands(n);
  const long long whole = n / 10;
  const long long tenth = n % 10;
  return std::to_string(whole) + "." + std::to_string(tenth) + "%";
}

// Smallest grid index whose value is > b (or >= b when inclusive).
long long first_grid_above(DataKind kind, double b, bool inclusive) {
  long long n = static_cast<long long>(std::floor(b * grid_scale(kind))) - 1;
  auto ok = [&](long long m) { return inclusive ? grid_value(kind, m) >= b : grid_value(kind, m) > b; };
  while (!ok(n)) ++n;
  while (ok(n - 1)) --n;
  return n;
}

// Largest grid index whose value is <= b.
long long last_grid_at_most(DataKind kind, double b) {
  long long n = static_cast<long long>(std::floor(b * grid_scale(kind))) + 1;
  while (grid_value(kind, n) > b) --n;
  while (grid_value(kind, n + 1) <= b) ++n;
  return n;
}

}  // namespace

std::string describe_class(DataKind kind, std::span<const double> b, int i) {
  const auto idx = static_cast<std::size_t>(i);
  const long long lo = first_grid_above(kind, b[idx], i == 0);
  const long long hi = last_grid_at_most(kind, b[idx + 1]);
  return format_grid(kind, lo) + "-" + format_grid(kind, hi);
}

std::string format_value(DataKind kind, double v) {
  return format_grid(kind, grid_index(kind, v));
}

std::vector<std::string> load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open lexicon " + path.string());
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    std::string w = text::trim(line);
    if (!w.empty()) words.push_back(std::move(w));
  }
  return words;
}

std::string make_title(DataKind kind, std::span<const std::string> lexicon, std::uint64_t seed) {
  if (lexicon.empty()) throw Error(ErrorKind::EmptyLexicon, "noun lexicon is empty");
  Rng rng(seed);
  const std::string& noun = lexicon[static_cast<std::size_t>(rng.below(lexicon.size()))];
  const char* lead = kind == DataKind::Absolute ? "The Number of " : "The Percentage of ";
  return lead + noun + " in the USA";
}

json to_json(const UnderlyingTable& table) {
  json values = json::object();
  for (const auto& [id, v] : table.values) values[id.value] = v ? json(*v) : json(nullptr);
  return {{"title", table.title},
          {"data_kind", to_string(table.kind)},
          {"value_range", {table.range.lo, table.range.hi}},
          {"values", values}};
}

UnderlyingTable table_from_json(const json& j) {
  UnderlyingTable t;
  t.title = j.at("title").get<std::string>();
  t.kind = parse_data_kind(j.at("data_kind").get<std::string>());
  t.range = {j.at("value_range").at(0).get<double>(), j.at("value_range").at(1).get<double>()};
  for (const auto& [id, v] : j.at("values").items()) {
    t.values[RegionId{id}] = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
  }
  return t;
}

json to_json(const Classification& c) {
  json assignment = json::object();
  for (const auto& [id, cls] : c.assignment) assignment[id.value] = cls ? json(*cls) : json(nullptr);
  return {{"scheme", to_string(c.scheme)},
          {"k", c.k},
          {"boundaries", c.boundaries},
          {"descriptions", c.descriptions},
          {"assignment", assignment}};
}

Classification classification_from_json(const json& j) {
  Classification c;
  c.scheme = parse_class_scheme(j.at("scheme").get<std::string>());
  c.k = j.at("k").get<int>();
  c.boundaries = j.at("boundaries").get<std::vector<double>>();
  c.descriptions = j.at("descriptions").get<std::vector<std::string>>();
  for (const auto& [id, v] : j.at("assignment").items()) {
    c.assignment[RegionId{id}] = v.is_null() ? std::nullopt : std::optional<int>(v.get<int>());
  }
  return c;
}

}  // namespace mapqa
