#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mapqa/geo.hpp"
#include "mapqa/raster.hpp"
#include "mapqa/render.hpp"

namespace mapqa {

enum class RecordKind { LegendType, NSymbols, LegendOrder, HasMissing, RegionValue };

struct RecordQuery {
  RecordKind kind = RecordKind::LegendType;
  std::optional<RegionId> region;  // RegionValue only
};

// legend_type, n_symbols, legend_order, has_missing, then one query per region.
std::vector<RecordQuery> standard_queries(const GeoModel& geo);

enum class Gate { Classification, Regression };

Gate resolve_gate(const RecordQuery& query, LegendKind predicted_legend_type);

struct ExtractedValue {
  Gate gate = Gate::Classification;
  // Rank of the region's class in value order (0 = lowest), independent of
  // how the legend is drawn.
  std::optional<int> class_index;
  std::optional<double> relative_value;
  bool missing = false;
  // Set when the region could not be read; the region is then treated as missing.
  std::optional<std::string> error;
};

struct ExtractedTable {
  std::string map_id;
  LegendKind legend_type = LegendKind::Discrete;
  std::optional<int> n_symbols;
  std::optional<LegendOrder> legend_order;
  bool has_missing = false;
  std::map<RegionId, ExtractedValue> region_values;
};

nlohmann::json to_json(const ExtractedTable& t);
ExtractedTable extracted_table_from_json(const nlohmann::json& j);

// What the extractor is told about a map: legend geometry, legend text in
// reading order, and one probe pixel per region.
struct LegendLayout {
  LegendKind kind = LegendKind::Discrete;
  std::vector<BBox> swatch_boxes;
  std::optional<BBox> colorbar;
  Orientation colorbar_axis = Orientation::Horizontal;
  std::vector<std::string> labels;
  std::map<RegionId, Pixel> probes;
};

LegendLayout layout_from_manifest(const LayoutManifest& m);

inline constexpr double kDefaultTau = 30.0;

// Per-channel median of the 3x3 neighborhood (clamped at the image edge).
Rgb probe_color(const Image& image, Pixel p);

int match_swatch(Rgb color, const std::vector<Rgb>& swatches, double tau = kDefaultTau);

double invert_colorbar(const Image& image, BBox bar, Orientation axis, LegendOrder order, Rgb color);

// Ascending when the first label's leading number is below the last one's.
std::optional<LegendOrder> infer_legend_order(const std::vector<std::string>& labels);

ExtractedTable extract_table(const Image& image, const LegendLayout& layout, const std::vector<RecordQuery>& queries);

}  // namespace mapqa
