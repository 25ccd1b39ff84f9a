#include "mapqa/geo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "mapqa/errors.hpp"
#include "mapqa/strings.hpp"

namespace mapqa {

using nlohmann::json;

void to_json(json& j, const RegionId& id) { j = id.value; }
void from_json(const json& j, RegionId& id) { id.value = j.get<std::string>(); }

namespace {

bool on_segment(Point p, Point a, Point b) {
  const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
  if (std::abs(cross) > 1e-12) return false;
  return p.x >= std::min(a.x, b.x) - 1e-12 && p.x <= std::max(a.x, b.x) + 1e-12 &&
         p.y >= std::min(a.y, b.y) - 1e-12 && p.y <= std::max(a.y, b.y) + 1e-12;
}

double segment_distance(Point p, Point a, Point b) {
  const double ax = b.x - a.x;
  const double ay = b.y - a.y;
  const double len2 = ax * ax + ay * ay;
  double t = len2 > 0.0 ? ((p.x - a.x) * ax + (p.y - a.y) * ay) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(a.x + t * ax - p.x, a.y + t * ay - p.y);
}

}  // namespace

bool point_in_rings(const std::vector<Ring>& rings, Point p) {
  bool inside = false;
  for (const Ring& ring : rings) {
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
      const Point a = ring[i];
      const Point b = ring[i + 1];
      if (on_segment(p, a, b)) return false;
      if ((a.y > p.y) != (b.y > p.y)) {
        const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
        if (p.x < x) inside = !inside;
      }
    }
  }
  return inside;
}

double distance_to_boundary(const std::vector<Ring>& rings, Point p) {
  double best = std::numeric_limits<double>::infinity();
  for (const Ring& ring : rings) {
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
      best = std::min(best, segment_distance(p, ring[i], ring[i + 1]));
    }
  }
  return best;
}

GeoModel::GeoModel(std::vector<RegionGeometry> regions,
                   std::map<RegionId, std::set<RegionId>> adjacency,
                   std::map<std::string, std::set<RegionId>> subareas)
    : regions_(std::move(regions)),
      adjacency_(std::move(adjacency)),
      subareas_(std::move(subareas)) {
  std::set<std::string> names;
  for (std::size_t i = 0; i < regions_.size(); ++i) {
    const RegionGeometry& r = regions_[i];
    if (r.id.value.empty()) throw Error(ErrorKind::InvariantError, "region with empty id");
    if (!index_.emplace(r.id, i).second) {
      throw Error(ErrorKind::InvariantError, "duplicate region id '" + r.id.value + "'");
    }
    if (!names.insert(text::lower(r.name)).second) {
      throw Error(ErrorKind::InvariantError, "duplicate region name '" + r.name + "'");
    }
    if (r.rings.empty()) {
      throw Error(ErrorKind::InvariantError, "region '" + r.id.value + "' has no rings");
    }
    for (const Ring& ring : r.rings) {
      if (ring.size() < 4) {
        throw Error(ErrorKind::InvariantError,
                    "region '" + r.id.value + "' has a ring with fewer than 4 vertices");
      }
      if (ring.front().x != ring.back().x || ring.front().y != ring.back().y) {
        throw Error(ErrorKind::InvariantError, "region '" + r.id.value + "' has an open ring");
      }
    }
    if (!point_in_rings(r.rings, r.label_point)) {
      throw Error(ErrorKind::InvariantError,
                  "label point of region '" + r.id.value + "' is not inside its polygon");
    }
  }
  for (const RegionGeometry& r : regions_) adjacency_[r.id];
  for (const auto& [id, nbrs] : adjacency_) {
    if (!contains(id)) {
      throw Error(ErrorKind::InvariantError, "adjacency refers to unknown region '" + id.value + "'");
    }
    for (const RegionId& n : nbrs) {
      if (n == id) {
        throw Error(ErrorKind::InvariantError, "region '" + id.value + "' lists itself as neighbor");
      }
      auto it = adjacency_.find(n);
      if (it == adjacency_.end() || !contains(n)) {
        throw Error(ErrorKind::InvariantError,
                    "region '" + id.value + "' has unknown neighbor '" + n.value + "'");
      }
      if (it->second.count(id) == 0) {
        throw Error(ErrorKind::InvariantError,
                    "asymmetric adjacency between '" + id.value + "' and '" + n.value + "'");
      }
    }
  }
  for (const auto& [name, members] : subareas_) {
    for (const RegionId& m : members) {
      if (!contains(m)) {
        throw Error(ErrorKind::InvariantError,
                    "subarea '" + name + "' refers to unknown region '" + m.value + "'");
      }
    }
  }
}

const RegionGeometry& GeoModel::region(const RegionId& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw Error(ErrorKind::UnknownRegion, "unknown region '" + id.value + "'");
  return regions_[it->second];
}

const std::set<RegionId>& GeoModel::neighbors(const RegionId& id) const {
  auto it = adjacency_.find(id);
  if (it == adjacency_.end()) throw Error(ErrorKind::UnknownRegion, "unknown region '" + id.value + "'");
  return it->second;
}

const std::set<RegionId>& GeoModel::subarea(std::string_view name) const {
  auto it = subareas_.find(std::string(name));
  if (it == subareas_.end()) {
    throw Error(ErrorKind::UnknownSlot, "unknown subarea '" + std::string(name) + "'");
  }
  return it->second;
}

std::optional<RegionId> GeoModel::find_by_name(std::string_view name) const {
  const std::string wanted = text::collapse_ws(name);
  for (const RegionGeometry& r : regions_) {
    if (text::iequals(r.name, wanted)) return r.id;
  }
  return std::nullopt;
}

std::optional<std::string> GeoModel::find_subarea(std::string_view name) const {
  const std::string wanted = text::collapse_ws(name);
  for (const auto& [key, members] : subareas_) {
    if (text::iequals(key, wanted)) return key;
  }
  return std::nullopt;
}

Bounds GeoModel::bounds() const {
  Bounds b{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
           -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const RegionGeometry& r : regions_) {
    for (const Ring& ring : r.rings) {
      for (const Point& p : ring) {
        b.min_x = std::min(b.min_x, p.x);
        b.min_y = std::min(b.min_y, p.y);
        b.max_x = std::max(b.max_x, p.x);
        b.max_y = std::max(b.max_y, p.y);
      }
    }
  }
  return b;
}

namespace {

Point parse_point(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw Error(ErrorKind::ParseError, "expected [x, y] point, got " + j.dump());
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

GeoModel parse_geography(const json& doc) {
  try {
    std::vector<RegionGeometry> regions;
    std::map<RegionId, std::set<RegionId>> declared;
    for (const json& r : doc.at("regions")) {
      RegionGeometry g;
      g.id = RegionId{r.at("id").get<std::string>()};
      g.name = r.at("name").get<std::string>();
      for (const json& ring_json : r.at("rings")) {
        Ring ring;
        for (const json& p : ring_json) ring.push_back(parse_point(p));
        g.rings.push_back(std::move(ring));
      }
      g.label_point = parse_point(r.at("label_point"));
      auto& nbrs = declared[g.id];
      if (r.contains("neighbors")) {
        for (const json& n : r.at("neighbors")) nbrs.insert(RegionId{n.get<std::string>()});
      }
      regions.push_back(std::move(g));
    }
    // Declared pairs are symmetrized; self-loops and unknown ids are left in
    // place so the GeoModel constructor reports them.
    std::map<RegionId, std::set<RegionId>> adjacency = declared;
    for (const auto& [id, nbrs] : declared) {
      for (const RegionId& n : nbrs) {
        if (declared.count(n) != 0) adjacency[n].insert(id);
      }
    }
    std::map<std::string, std::set<RegionId>> subareas;
    if (doc.contains("subareas")) {
      for (const auto& [name, members] : doc.at("subareas").items()) {
        auto& set = subareas[name];
        for (const json& m : members) set.insert(RegionId{m.get<std::string>()});
      }
    }
    return GeoModel(std::move(regions), std::move(adjacency), std::move(subareas));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("malformed geography: ") + e.what());
  }
}

GeoModel load_geography(const std::filesystem::path& geo_file) {
  std::ifstream in(geo_file);
  if (!in) throw Error(ErrorKind::IoError, "cannot open geography file " + geo_file.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, geo_file.string() + ": " + e.what());
  }
  return parse_geography(doc);
}

std::set<RegionId> neighbors(const GeoModel& geo, const RegionId& region) {
  return geo.neighbors(region);
}

}  // namespace mapqa
