#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "mapqa/color.hpp"

namespace mapqa {

enum class LegendKind { Discrete, Continuous };
enum class LegendPosition { Left, Right, Top, Bottom };
enum class Orientation { Horizontal, Vertical };
// Ascending: values increase in reading direction (left to right, top to bottom).
enum class LegendOrder { Ascending, Descending };
enum class TitlePosition { TopLeft, TopCenter, TopRight, BottomCenter };
enum class Split { Train, Valid, Test };

NLOHMANN_JSON_SERIALIZE_ENUM(LegendKind, {{LegendKind::Discrete, "discrete"}, {LegendKind::Continuous, "continuous"}})
NLOHMANN_JSON_SERIALIZE_ENUM(LegendPosition, {{LegendPosition::Left, "left"},
                                              {LegendPosition::Right, "right"},
                                              {LegendPosition::Top, "top"},
                                              {LegendPosition::Bottom, "bottom"}})
NLOHMANN_JSON_SERIALIZE_ENUM(Orientation, {{Orientation::Horizontal, "horizontal"}, {Orientation::Vertical, "vertical"}})
NLOHMANN_JSON_SERIALIZE_ENUM(LegendOrder, {{LegendOrder::Ascending, "ascending"}, {LegendOrder::Descending, "descending"}})
NLOHMANN_JSON_SERIALIZE_ENUM(TitlePosition, {{TitlePosition::TopLeft, "top_left"},
                                             {TitlePosition::TopCenter, "top_center"},
                                             {TitlePosition::TopRight, "top_right"},
                                             {TitlePosition::BottomCenter, "bottom_center"}})
NLOHMANN_JSON_SERIALIZE_ENUM(Split, {{Split::Train, "train"}, {Split::Valid, "valid"}, {Split::Test, "test"}})

[[noreturn]] void throw_unknown_enum(const std::string& name);

template <typename E>
std::string enum_name(E e) {
  return nlohmann::json(e).template get<std::string>();
}

// Throws ParseError for names outside the enum's vocabulary.
template <typename E>
E parse_enum(const std::string& name, const std::vector<E>& all) {
  for (E e : all) {
    if (enum_name(e) == name) return e;
  }
  throw_unknown_enum(name);
}

inline const std::vector<Split> kAllSplits = {Split::Train, Split::Valid, Split::Test};

struct MapStyle {
  ColorScale scale;
  LegendKind legend_kind = LegendKind::Discrete;
  LegendPosition legend_position = LegendPosition::Right;
  Orientation legend_orientation = Orientation::Vertical;
  LegendOrder legend_order = LegendOrder::Ascending;
  TitlePosition title_position = TitlePosition::TopCenter;
  int title_font_index = 0;
  bool gridlines = false;
  Rgb background{255, 255, 255};
};

nlohmann::json to_json(const MapStyle& style);
MapStyle style_from_json(const nlohmann::json& j);
bool operator==(const MapStyle& a, const MapStyle& b);

// Scale ids available to each split.
using ScalePartition = std::map<Split, std::vector<std::string>>;

struct StyleConfig {
  bool uniform = false;
  ScalePartition partition;
  std::vector<LegendKind> legend_kinds;
  std::vector<LegendPosition> positions;
  std::vector<Orientation> orientations;
  std::vector<LegendOrder> orders;
  std::vector<TitlePosition> title_positions;
  std::vector<int> font_indices;
  std::vector<bool> gridlines;
  std::vector<Rgb> backgrounds;
};

inline constexpr int kTitleFontCount = 3;

// Every base scale shares a split with its inversion; 10/3/3 bases.
ScalePartition default_scale_partition();
StyleConfig varied_style_config(ScalePartition partition = default_scale_partition());
// One fixed style for every map, in every split.
StyleConfig uniform_style_config();

// Throws ConfigError on unknown ids or overlapping cells (varied mode only).
void validate_partition(const ScalePartition& partition, bool allow_shared);

MapStyle choose_style(const StyleConfig& config, Split split, std::uint64_t seed);

nlohmann::json partition_to_json(const ScalePartition& p);
ScalePartition partition_from_json(const nlohmann::json& j);

}  // namespace mapqa
