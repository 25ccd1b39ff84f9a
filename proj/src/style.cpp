#include "mapqa/style.hpp"

#include <set>

#include "mapqa/errors.hpp"
#include "mapqa/rng.hpp"

namespace mapqa {

using nlohmann::json;

void throw_unknown_enum(const std::string& name) {
  throw Error(ErrorKind::ParseError, "unknown enum value '" + name + "'");
}

namespace {

template <typename E>
E enum_from(const json& j, const std::vector<E>& all) {
  return parse_enum(j.get<std::string>(), all);
}

const std::vector<LegendKind> kKinds = {LegendKind::Discrete, LegendKind::Continuous};
const std::vector<LegendPosition> kPositions = {LegendPosition::Left, LegendPosition::Right, LegendPosition::Top,
                                                LegendPosition::Bottom};
const std::vector<Orientation> kOrientations = {Orientation::Horizontal, Orientation::Vertical};
const std::vector<LegendOrder> kOrders = {LegendOrder::Ascending, LegendOrder::Descending};
const std::vector<TitlePosition> kTitlePositions = {TitlePosition::TopLeft, TitlePosition::TopCenter,
                                                    TitlePosition::TopRight, TitlePosition::BottomCenter};

template <typename T>
T pick_axis(Rng& rng, const std::vector<T>& options, const char* axis) {
  if (options.empty()) throw Error(ErrorKind::ConfigError, std::string("style axis '") + axis + "' has no options");
  return options[static_cast<std::size_t>(rng.below(options.size()))];
}

}  // namespace

json to_json(const MapStyle& style) {
  return {{"scale", to_json(style.scale)},
          {"legend_kind", style.legend_kind},
          {"legend_position", style.legend_position},
          {"legend_orientation", style.legend_orientation},
          {"legend_order", style.legend_order},
          {"title_position", style.title_position},
          {"title_font_index", style.title_font_index},
          {"gridlines", style.gridlines},
          {"background", to_hex(style.background)}};
}

MapStyle style_from_json(const json& j) {
  MapStyle s;
  s.scale = scale_from_json(j.at("scale"));
  s.legend_kind = enum_from(j.at("legend_kind"), kKinds);
  s.legend_position = enum_from(j.at("legend_position"), kPositions);
  s.legend_orientation = enum_from(j.at("legend_orientation"), kOrientations);
  s.legend_order = enum_from(j.at("legend_order"), kOrders);
  s.title_position = enum_from(j.at("title_position"), kTitlePositions);
  s.title_font_index = j.at("title_font_index").get<int>();
  s.gridlines = j.at("gridlines").get<bool>();
  s.background = rgb_from_hex(j.at("background").get<std::string>());
  return s;
}

bool operator==(const MapStyle& a, const MapStyle& b) { return to_json(a) == to_json(b); }

ScalePartition default_scale_partition() {
  const std::map<Split, std::vector<std::string>> bases = {
      {Split::Train,
       {"blues", "greens", "reds", "oranges", "purples", "viridis", "plasma", "inferno", "ylorrd", "rdbu"}},
      {Split::Valid, {"cividis", "ylgnbu", "piyg"}},
      {Split::Test, {"bupu", "rdpu", "turbo"}},
  };
  ScalePartition p;
  for (const auto& [split, ids] : bases) {
    for (const auto& id : ids) {
      p[split].push_back(id);
      p[split].push_back(id + "_r");
    }
  }
  return p;
}

StyleConfig varied_style_config(ScalePartition partition) {
  StyleConfig c;
  c.partition = std::move(partition);
  c.legend_kinds = kKinds;
  c.positions = kPositions;
  c.orientations = kOrientations;
  c.orders = kOrders;
  c.title_positions = kTitlePositions;
  c.font_indices = {0, 1, 2};
  c.gridlines = {false, true};
  c.backgrounds = {{255, 255, 255}, {250, 248, 240}, {238, 243, 248}};
  return c;
}

StyleConfig uniform_style_config() {
  StyleConfig c;
  c.uniform = true;
  for (Split s : kAllSplits) c.partition[s] = {"blues"};
  c.legend_kinds = {LegendKind::Discrete};
  c.positions = {LegendPosition::Bottom};
  c.orientations = {Orientation::Horizontal};
  c.orders = {LegendOrder::Ascending};
  c.title_positions = {TitlePosition::TopLeft};
  c.font_indices = {0};
  c.gridlines = {false};
  c.backgrounds = {{255, 255, 255}};
  return c;
}

void validate_partition(const ScalePartition& partition, bool allow_shared) {
  std::set<std::string> seen;
  for (const auto& [split, ids] : partition) {
    for (const auto& id : ids) {
      builtin_scale(id);
      if (!seen.insert(id).second && !allow_shared) {
        throw Error(ErrorKind::ConfigError, "scale '" + id + "' assigned to more than one split");
      }
    }
  }
}

MapStyle choose_style(const StyleConfig& config, Split split, std::uint64_t seed) {
  const auto cell = config.partition.find(split);
  if (cell == config.partition.end() || cell->second.empty()) {
    throw Error(ErrorKind::EmptySplitScaleSet, "no color scales for split '" + enum_name(split) + "'");
  }
  Rng rng(seed);
  MapStyle s;
  s.scale = builtin_scale(rng.pick(cell->second));
  s.legend_kind = pick_axis(rng, config.legend_kinds, "legend_kind");
  s.legend_position = pick_axis(rng, config.positions, "legend_position");
  s.legend_orientation = pick_axis(rng, config.orientations, "legend_orientation");
  s.legend_order = pick_axis(rng, config.orders, "legend_order");
  s.title_position = pick_axis(rng, config.title_positions, "title_position");
  s.title_font_index = pick_axis(rng, config.font_indices, "title_font_index");
  s.gridlines = pick_axis(rng, config.gridlines, "gridlines");
  s.background = pick_axis(rng, config.backgrounds, "background");
  return s;
}

json partition_to_json(const ScalePartition& p) {
  json j = json::object();
  for (const auto& [split, ids] : p) j[enum_name(split)] = ids;
  return j;
}

ScalePartition partition_from_json(const json& j) {
  ScalePartition p;
  for (const auto& [name, ids] : j.items()) {
    p[parse_enum(name, kAllSplits)] = ids.get<std::vector<std::string>>();
  }
  return p;
}

}  // namespace mapqa
