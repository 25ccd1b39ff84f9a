#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <iterator>
#include <string>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "mapqa/errors.hpp"
#include "mapqa/datagen.hpp"
#include "mapqa/geo.hpp"
#include "mapqa/rng.hpp"
#include "mapqa/style.hpp"

namespace mapqa::testing {

inline std::filesystem::path data_dir() { return MAPQA_DATA_DIR; }

inline const GeoModel& us_geo() {
  static const GeoModel geo = load_geography(data_dir() / "us_states.json");
  return geo;
}

// Unit squares laid out left to right. Neighbors are declared one-way so the
// loader's symmetric closure is exercised.
inline nlohmann::json square_region(const std::string& id, double x0, std::vector<std::string> neighbors = {}) {
  const double x1 = x0 + 1.0;
  return {{"id", id},
          {"name", id},
          {"rings", {{{x0, 0.0}, {x1, 0.0}, {x1, 1.0}, {x0, 1.0}, {x0, 0.0}}}},
          {"label_point", {x0 + 0.5, 0.5}},
          {"neighbors", neighbors}};
}

// Chain A-B-C plus island D; subarea "Left" = {A, B}.
inline nlohmann::json toy_geo_json(bool with_island = false) {
  nlohmann::json regions = nlohmann::json::array();
  regions.push_back(square_region("A", 0.0, {"B"}));
  regions.push_back(square_region("B", 1.0, {"C"}));
  regions.push_back(square_region("C", 2.0));
  if (with_island) regions.push_back(square_region("D", 4.0));
  return {{"name", "Toy"}, {"regions", regions}, {"subareas", {{"Left", {"A", "B"}}}}};
}

inline GeoModel toy_geo(bool with_island = false) { return parse_geography(toy_geo_json(with_island)); }

// n squares in a chain R0-R1-...; subareas "Left" and "Right" split it in half.
inline GeoModel chain_geo(int n) {
  nlohmann::json regions = nlohmann::json::array();
  nlohmann::json left = nlohmann::json::array(), right = nlohmann::json::array();
  for (int i = 0; i < n; ++i) {
    const std::string id = "R" + std::to_string(i);
    std::vector<std::string> nb;
    if (i + 1 < n) nb.push_back("R" + std::to_string(i + 1));
    regions.push_back(square_region(id, i, nb));
    (i < n / 2 ? left : right).push_back(id);
  }
  return parse_geography({{"name", "Chain"}, {"regions", regions}, {"subareas", {{"Left", left}, {"Right", right}}}});
}

// Kind of the Error thrown by fn, or nullopt when it returns normally.
inline std::optional<ErrorKind> error_kind(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

inline RegionId rid(const std::string& s) { return RegionId{s}; }

// A random varied-mode map over the US geography, drawn the way the generator
// draws one.
struct DrawnMap {
  UnderlyingTable table;
  std::optional<Classification> classification;
  MapStyle style;
};

inline DrawnMap draw_map(std::uint64_t seed, std::optional<LegendKind> force_kind = std::nullopt) {
  Rng rng(seed);
  DrawnMap d;
  const DataKind kind = rng.bernoulli(0.5) ? DataKind::Absolute : DataKind::Relative;
  const Distribution dist = rng.bernoulli(0.5) ? Distribution::Uniform : Distribution::Normal;
  d.table = sample_table(us_geo(), kind, dist, {}, mix_seed(seed, "data"));
  d.table.title = "The Number of widgets in the USA";
  d.style = choose_style(varied_style_config(), kAllSplits[seed % 3], mix_seed(seed, "style"));
  if (force_kind) d.style.legend_kind = *force_kind;
  if (d.style.legend_kind == LegendKind::Discrete) {
    const auto scheme = rng.bernoulli(0.5) ? ClassScheme::EqualInterval : ClassScheme::Quantile;
    d.classification = classify(d.table, scheme, static_cast<int>(rng.between(2, 5)));
  }
  return d;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("mapqa_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary);
  out << body;
}

}  // namespace mapqa::testing
