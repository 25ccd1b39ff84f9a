#pragma once

#include <compare>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace mapqa {

struct RegionId {
  std::string value;

  auto operator<=>(const RegionId&) const = default;
};

void to_json(nlohmann::json& j, const RegionId& id);
void from_json(const nlohmann::json& j, RegionId& id);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Closed ring: front() == back().
using Ring = std::vector<Point>;

struct RegionGeometry {
  RegionId id;
  std::string name;
  std::vector<Ring> rings;
  Point label_point;
};

struct Bounds {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;
};

// Region geometry plus declared adjacency and named subareas. Immutable once
// constructed; the constructor enforces every structural invariant.
class GeoModel {
 public:
  GeoModel(std::vector<RegionGeometry> regions,
           std::map<RegionId, std::set<RegionId>> adjacency,
           std::map<std::string, std::set<RegionId>> subareas);

  const std::vector<RegionGeometry>& regions() const { return regions_; }
  std::size_t size() const { return regions_.size(); }

  bool contains(const RegionId& id) const { return index_.count(id) != 0; }
  const RegionGeometry& region(const RegionId& id) const;
  const std::string& name_of(const RegionId& id) const { return region(id).name; }

  const std::set<RegionId>& neighbors(const RegionId& id) const;
  const std::map<RegionId, std::set<RegionId>>& adjacency() const { return adjacency_; }

  const std::map<std::string, std::set<RegionId>>& subareas() const { return subareas_; }
  const std::set<RegionId>& subarea(std::string_view name) const;

  // Case-insensitive lookups used by the question parser and CSV ingestion.
  std::optional<RegionId> find_by_name(std::string_view name) const;
  std::optional<std::string> find_subarea(std::string_view name) const;

  Bounds bounds() const;

 private:
  std::vector<RegionGeometry> regions_;
  std::map<RegionId, std::size_t> index_;
  std::map<RegionId, std::set<RegionId>> adjacency_;
  std::map<std::string, std::set<RegionId>> subareas_;
};

GeoModel load_geography(const std::filesystem::path& geo_file);
GeoModel parse_geography(const nlohmann::json& doc);

std::set<RegionId> neighbors(const GeoModel& geo, const RegionId& region);

// Even-odd containment over all rings; points on an edge count as outside.
bool point_in_rings(const std::vector<Ring>& rings, Point p);

// Smallest distance from p to any ring edge.
double distance_to_boundary(const std::vector<Ring>& rings, Point p);

}  // namespace mapqa
