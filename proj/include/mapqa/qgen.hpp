#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mapqa/datagen.hpp"
#include "mapqa/geo.hpp"
#include "mapqa/style.hpp"
#include "mapqa/tableqa.hpp"

namespace mapqa {

struct Question {
  std::string id;
  std::string map_id;
  Category category = Category::Surface;
  std::string template_id;
  std::string text;
  LogicalForm logical_form;
  AnswerSet answers;
};

nlohmann::json to_json(const Question& q);
Question question_from_json(const nlohmann::json& j);

struct MapInstance {
  std::string map_id;
  Split split = Split::Train;
  UnderlyingTable table;
  std::optional<Classification> classification;
  MapStyle style;
};

// Legend descriptions in reading order (discrete maps only).
std::vector<std::string> legend_entries(const MapInstance& map);

enum class TemplateFamily {
  LegendContinuous,
  SymbolCount,
  FirstSymbolSmallest,
  HasMissing,
  ValueOf,
  RegionsInRange,
  ArgExtremeGlobal,
  ArgExtremeSubarea,
  ArgExtremeNeighbors,
  ExtremeValueSubarea,
  ExtremeMember,
  Compare,
};

struct QgenConfig {
  int per_map_quota = 14;
  // Smallest relative-position gap a relational question may hinge on when
  // the legend is continuous.
  double continuous_margin = 0.02;
  std::map<TemplateFamily, double> weights = default_weights();

  static std::map<TemplateFamily, double> default_weights();
};

struct SkippedSlot {
  std::string map_id;
  TemplateFamily family;
  std::string reason;
};

std::vector<Question> generate_questions(const MapInstance& map, const GeoModel& geo, const QgenConfig& config,
                                         std::uint64_t seed, std::vector<SkippedSlot>* skipped = nullptr);

// Numeric / description answers are dropped on continuous maps, then the
// majority label of every yes/no relational template is subsampled to 1:1.
std::vector<Question> postprocess(std::vector<Question> questions,
                                  const std::function<LegendKind(const std::string& map_id)>& legend_kind_of,
                                  std::uint64_t seed);

bool asks_exact_value(const LogicalForm& lf);

}  // namespace mapqa
