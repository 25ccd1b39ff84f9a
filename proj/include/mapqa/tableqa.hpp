#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "mapqa/datagen.hpp"
#include "mapqa/extract.hpp"
#include "mapqa/geo.hpp"
#include "mapqa/style.hpp"

namespace mapqa {

// Normalized answers: case-folded, trimmed, internal whitespace collapsed.
using AnswerSet = std::set<std::string>;

std::string normalize_answer(std::string_view s);
AnswerSet make_answer_set(const std::vector<std::string>& items);

inline const std::string kYes = "yes";
inline const std::string kNo = "no";
inline const std::string kNone = "none";
inline const std::string kNotAvailable = "n/a";

enum class Extreme { Min, Max };
enum class Comparison { Greater, Less };

struct GlobalScope {
  bool operator==(const GlobalScope&) const = default;
};
struct SubareaScope {
  std::string name;
  bool operator==(const SubareaScope&) const = default;
};
struct NeighborScope {
  RegionId region;
  bool operator==(const NeighborScope&) const = default;
};
using Scope = std::variant<GlobalScope, SubareaScope, NeighborScope>;

namespace op {

struct LegendIsContinuous {
  bool operator==(const LegendIsContinuous&) const = default;
};
struct SymbolCount {
  bool operator==(const SymbolCount&) const = default;
};
struct FirstSymbolIsSmallest {
  bool operator==(const FirstSymbolIsSmallest&) const = default;
};
struct HasMissing {
  bool operator==(const HasMissing&) const = default;
};
struct ValueOf {
  RegionId region;
  bool operator==(const ValueOf&) const = default;
};
// legend_index is the 0-based position in the drawn legend (legend_{i+1}).
struct RegionsInClass {
  int legend_index = 0;
  bool operator==(const RegionsInClass&) const = default;
};
struct ArgExtreme {
  Extreme extreme = Extreme::Max;
  Scope scope;
  bool operator==(const ArgExtreme&) const = default;
};
struct ExtremeValue {
  Extreme extreme = Extreme::Max;
  Scope scope;
  bool operator==(const ExtremeValue&) const = default;
};
// Does `candidate` attain the extreme among the neighbors of `center`?
struct ExtremeMember {
  Extreme extreme = Extreme::Max;
  RegionId center;
  RegionId candidate;
  bool operator==(const ExtremeMember&) const = default;
};
struct Compare {
  Comparison cmp = Comparison::Greater;
  RegionId lhs;
  RegionId rhs;
  bool operator==(const Compare&) const = default;
};

}  // namespace op

using LogicalForm = std::variant<op::LegendIsContinuous, op::SymbolCount, op::FirstSymbolIsSmallest, op::HasMissing,
                                 op::ValueOf, op::RegionsInClass, op::ArgExtreme, op::ExtremeValue,
                                 op::ExtremeMember, op::Compare>;

nlohmann::json to_json(const LogicalForm& lf);
LogicalForm logical_form_from_json(const nlohmann::json& j);

enum class Category { Surface, Retrieval, Relational };
NLOHMANN_JSON_SERIALIZE_ENUM(Category, {{Category::Surface, "surface"},
                                        {Category::Retrieval, "retrieval"},
                                        {Category::Relational, "relational"}})

Category category_of(const LogicalForm& lf);
// Identifies the template and its variant, e.g. "relational.compare.higher".
std::string template_id(const LogicalForm& lf);
bool is_yes_no(const LogicalForm& lf);

// Surface text; `legend_entries` are the legend descriptions in reading order.
std::string question_text(const LogicalForm& lf, const GeoModel& geo, const std::vector<std::string>& legend_entries);

// Accepts generated wording, with range slots already rewritten to legend_k.
LogicalForm parse_question(std::string_view text, int legend_count, const GeoModel& geo);

// The facts the executor reads, built from either the gold data or an
// extracted table.
struct QaRegion {
  bool missing = false;
  std::optional<int> rank;         // class index in value order (discrete)
  std::optional<double> relative;  // position on the colorbar (continuous)
};

struct QaTable {
  LegendKind kind = LegendKind::Discrete;
  std::optional<int> n_symbols;
  std::optional<LegendOrder> order;
  bool has_missing = false;
  std::map<RegionId, QaRegion> regions;
  // Answer string of each class, indexed by value rank.
  std::vector<std::string> class_labels;

  int rank_of_legend_index(int legend_index) const;
  int legend_index_of_rank(int rank) const;
};

QaTable gold_view(const UnderlyingTable& table, const std::optional<Classification>& classification,
                  const MapStyle& style);
// Class labels are the symbolic tokens legend_1..legend_n in legend order.
QaTable extracted_view(const ExtractedTable& table);

std::string legend_token(int legend_index);

AnswerSet execute(const LogicalForm& lf, const QaTable& table, const GeoModel& geo);

// "Legend type is ... . Maine's value is 0.08. ..."
std::string flatten(const QaTable& table, const GeoModel& geo);

}  // namespace mapqa
