#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mapqa/datagen.hpp"
#include "mapqa/geo.hpp"
#include "mapqa/raster.hpp"
#include "mapqa/style.hpp"

namespace mapqa {

inline constexpr Rgb kMissingColor{211, 211, 211};
inline constexpr const char* kMissingNote = "N/A";
inline constexpr int kColorbarLength = 256;

struct Canvas {
  int width = 800;
  int height = 600;
};

struct Swatch {
  BBox bbox;
  Rgb color;
  std::string description;
  BBox text_bbox;
};

struct Colorbar {
  BBox bbox;
  Orientation axis = Orientation::Horizontal;
  LegendOrder order = LegendOrder::Ascending;
  // Endpoint labels in reading order, with their text boxes.
  std::vector<std::string> labels;
  std::vector<BBox> label_bboxes;
};

struct RegionFill {
  Rgb color;
  bool missing = false;
  // Pixel under the region's label point.
  Pixel probe;
};

struct TextBox {
  BBox bbox;
  std::string text;
};

struct MissingMarker {
  Rgb color = kMissingColor;
  BBox swatch_bbox;
  BBox note_bbox;
};

struct LayoutManifest {
  int width = 0;
  int height = 0;
  LegendKind legend_kind = LegendKind::Discrete;
  std::string scale_id;
  LegendPosition legend_position = LegendPosition::Right;
  Orientation legend_orientation = Orientation::Vertical;
  BBox legend_bbox;
  // Reading order (left-right, top-bottom).
  std::vector<Swatch> swatches;
  std::optional<Colorbar> colorbar;
  std::map<RegionId, RegionFill> region_fills;
  TextBox title;
  std::optional<MissingMarker> missing_marker;
};

nlohmann::json to_json(const LayoutManifest& m);
LayoutManifest manifest_from_json(const nlohmann::json& j);

struct RenderedMap {
  Image image;
  LayoutManifest manifest;
};

FontSpec title_font(int font_index);

// Color of class i out of k, before legend ordering is applied.
Rgb class_color(const ColorScale& scale, int class_index, int k);

RenderedMap render_map(const GeoModel& geo, const UnderlyingTable& table,
                       const std::optional<Classification>& classification, const MapStyle& style,
                       Canvas canvas = {});

}  // namespace mapqa
