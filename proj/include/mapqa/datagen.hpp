#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mapqa/geo.hpp"

namespace mapqa {

enum class DataKind { Absolute, Relative };
enum class Distribution { Uniform, Normal };
enum class ClassScheme { EqualInterval, Quantile };

std::string to_string(DataKind kind);
std::string to_string(Distribution dist);
std::string to_string(ClassScheme scheme);
DataKind parse_data_kind(std::string_view s);
ClassScheme parse_class_scheme(std::string_view s);

struct ValueRange {
  double lo = 0.0;
  double hi = 0.0;
};

// (1, 1e8) for absolute counts, (1, 100) for percentages.
ValueRange canonical_range(DataKind kind);

// Absolute values live on the integer grid, relative values on tenths.
double snap_to_grid(DataKind kind, double v);

struct UnderlyingTable {
  std::string title;
  DataKind kind = DataKind::Absolute;
  // nullopt marks a missing value.
  std::map<RegionId, std::optional<double>> values;
  ValueRange range;

  std::vector<double> present_values() const;
  bool has_missing() const;
  // Observed extremes over non-missing values.
  double observed_min() const;
  double observed_max() const;
};

struct MissingPolicy {
  bool enabled = true;
  // Probability that a map has at least one missing region.
  double map_probability = 0.28;
};

UnderlyingTable sample_table(const GeoModel& geo, DataKind kind, Distribution dist,
                             const MissingPolicy& policy, std::uint64_t seed);

struct IngestResult {
  UnderlyingTable table;
  std::vector<std::string> warnings;
};

IngestResult ingest_table(const GeoModel& geo, const std::filesystem::path& csv_file, DataKind kind);
IngestResult ingest_table(const GeoModel& geo, std::istream& csv, DataKind kind);

struct Classification {
  ClassScheme scheme = ClassScheme::EqualInterval;
  int k = 0;
  // k + 1 sorted break points; b.front() = observed min, b.back() = observed max.
  std::vector<double> boundaries;
  std::vector<std::string> descriptions;
  std::map<RegionId, std::optional<int>> assignment;

  std::vector<RegionId> members(int class_index) const;
};

// Membership rule shared by every scheme: class 0 is [b0, b1], class i > 0 is
// (b_i, b_{i+1}]. Values equal to an interior break stay in the lower class.
int class_of(std::span<const double> boundaries, double v);

Classification classify(const UnderlyingTable& table, ClassScheme scheme, int k);

// "3,709-9,349" for absolute data, "12.4%-25.0%" for relative data.
std::string describe_class(DataKind kind, std::span<const double> boundaries, int class_index);
// Single value label, used for colorbar endpoints.
std::string format_value(DataKind kind, double v);

std::vector<std::string> load_lexicon(const std::filesystem::path& path);
std::string make_title(DataKind kind, std::span<const std::string> lexicon, std::uint64_t seed);

nlohmann::json to_json(const UnderlyingTable& table);
UnderlyingTable table_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Classification& c);
Classification classification_from_json(const nlohmann::json& j);

}  // namespace mapqa
