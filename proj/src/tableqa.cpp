#include "mapqa/tableqa.hpp"

#include <algorithm>
#include <regex>

#include "mapqa/errors.hpp"
#include "mapqa/strings.hpp"

namespace mapqa {

using nlohmann::json;

std::string normalize_answer(std::string_view s) { return text::lower(text::collapse_ws(s)); }

AnswerSet make_answer_set(const std::vector<std::string>& items) {
  AnswerSet out;
  for (const auto& s : items) out.insert(normalize_answer(s));
  return out;
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const char* extreme_name(Extreme e) { return e == Extreme::Min ? "min" : "max"; }
const char* extreme_word(Extreme e) { return e == Extreme::Min ? "lowest" : "highest"; }

Extreme parse_extreme(const std::string& s) {
  if (s == "min" || text::iequals(s, "lowest")) return Extreme::Min;
  if (s == "max" || text::iequals(s, "highest")) return Extreme::Max;
  throw Error(ErrorKind::ParseError, "unknown extreme '" + s + "'");
}

json scope_json(const Scope& scope) {
  return std::visit(overloaded{[](const GlobalScope&) { return json{{"type", "global"}}; },
                               [](const SubareaScope& s) { return json{{"type", "subarea"}, {"name", s.name}}; },
                               [](const NeighborScope& s) {
                                 return json{{"type", "neighbors"}, {"region", s.region.value}};
                               }},
                    scope);
}

Scope scope_from(const json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "global") return GlobalScope{};
  if (type == "subarea") return SubareaScope{j.at("name").get<std::string>()};
  if (type == "neighbors") return NeighborScope{RegionId{j.at("region").get<std::string>()}};
  throw Error(ErrorKind::ParseError, "unknown scope '" + type + "'");
}

std::string scope_tag(const Scope& scope) {
  return std::visit(overloaded{[](const GlobalScope&) { return std::string("global"); },
                               [](const SubareaScope&) { return std::string("subarea"); },
                               [](const NeighborScope&) { return std::string("neighbors"); }},
                    scope);
}

}  // namespace

json to_json(const LogicalForm& lf) {
  return std::visit(
      overloaded{
          [](const op::LegendIsContinuous&) { return json{{"op", "legend_is_continuous"}, {"args", json::object()}}; },
          [](const op::SymbolCount&) { return json{{"op", "symbol_count"}, {"args", json::object()}}; },
          [](const op::FirstSymbolIsSmallest&) {
            return json{{"op", "first_symbol_is_smallest"}, {"args", json::object()}};
          },
          [](const op::HasMissing&) { return json{{"op", "has_missing"}, {"args", json::object()}}; },
          [](const op::ValueOf& o) { return json{{"op", "value_of"}, {"args", {{"region", o.region.value}}}}; },
          [](const op::RegionsInClass& o) {
            return json{{"op", "regions_in_class"}, {"args", {{"legend_index", o.legend_index}}}};
          },
          [](const op::ArgExtreme& o) {
            return json{{"op", "arg_extreme"}, {"args", {{"extreme", extreme_name(o.extreme)}}}, {"scope", scope_json(o.scope)}};
          },
          [](const op::ExtremeValue& o) {
            return json{
                {"op", "extreme_value"}, {"args", {{"extreme", extreme_name(o.extreme)}}}, {"scope", scope_json(o.scope)}};
          },
          [](const op::ExtremeMember& o) {
            return json{{"op", "extreme_member"},
                        {"args",
                         {{"extreme", extreme_name(o.extreme)},
                          {"center", o.center.value},
                          {"candidate", o.candidate.value}}}};
          },
          [](const op::Compare& o) {
            return json{{"op", "compare"},
                        {"args",
                         {{"cmp", o.cmp == Comparison::Greater ? "gt" : "lt"},
                          {"lhs", o.lhs.value},
                          {"rhs", o.rhs.value}}}};
          },
      },
      lf);
}

LogicalForm logical_form_from_json(const json& j) {
  const auto name = j.at("op").get<std::string>();
  const json& a = j.at("args");
  auto region = [&](const char* key) { return RegionId{a.at(key).get<std::string>()}; };
  if (name == "legend_is_continuous") return op::LegendIsContinuous{};
  if (name == "symbol_count") return op::SymbolCount{};
  if (name == "first_symbol_is_smallest") return op::FirstSymbolIsSmallest{};
  if (name == "has_missing") return op::HasMissing{};
  if (name == "value_of") return op::ValueOf{region("region")};
  if (name == "regions_in_class") return op::RegionsInClass{a.at("legend_index").get<int>()};
  if (name == "arg_extreme") return op::ArgExtreme{parse_extreme(a.at("extreme").get<std::string>()), scope_from(j.at("scope"))};
  if (name == "extreme_value") {
    return op::ExtremeValue{parse_extreme(a.at("extreme").get<std::string>()), scope_from(j.at("scope"))};
  }
  if (name == "extreme_member") {
    return op::ExtremeMember{parse_extreme(a.at("extreme").get<std::string>()), region("center"), region("candidate")};
  }
  if (name == "compare") {
    const auto cmp = a.at("cmp").get<std::string>();
    if (cmp != "gt" && cmp != "lt") throw Error(ErrorKind::ParseError, "unknown comparison '" + cmp + "'");
    return op::Compare{cmp == "gt" ? Comparison::Greater : Comparison::Less, region("lhs"), region("rhs")};
  }
  throw Error(ErrorKind::ParseError, "unknown logical form op '" + name + "'");
}

Category category_of(const LogicalForm& lf) {
  switch (lf.index()) {
    case 0:
    case 1:
    case 2:
    case 3: return Category::Surface;
    case 4:
    case 5: return Category::Retrieval;
    default: return Category::Relational;
  }
}

std::string template_id(const LogicalForm& lf) {
  return std::visit(
      overloaded{
          [](const op::LegendIsContinuous&) { return std::string("surface.legend_continuous"); },
          [](const op::SymbolCount&) { return std::string("surface.symbol_count"); },
          [](const op::FirstSymbolIsSmallest&) { return std::string("surface.first_symbol_smallest"); },
          [](const op::HasMissing&) { return std::string("surface.has_missing"); },
          [](const op::ValueOf&) { return std::string("retrieval.value_of"); },
          [](const op::RegionsInClass&) { return std::string("retrieval.regions_in_range"); },
          [](const op::ArgExtreme& o) {
            return "relational.arg_extreme." + scope_tag(o.scope) + "." + extreme_word(o.extreme);
          },
          [](const op::ExtremeValue& o) {
            return "relational.extreme_value." + scope_tag(o.scope) + "." + extreme_word(o.extreme);
          },
          [](const op::ExtremeMember& o) { return std::string("relational.extreme_member.") + extreme_word(o.extreme); },
          [](const op::Compare& o) {
            return std::string("relational.compare.") + (o.cmp == Comparison::Greater ? "higher" : "lower");
          },
      },
      lf);
}

bool is_yes_no(const LogicalForm& lf) {
  return std::holds_alternative<op::LegendIsContinuous>(lf) || std::holds_alternative<op::FirstSymbolIsSmallest>(lf) ||
         std::holds_alternative<op::HasMissing>(lf) || std::holds_alternative<op::ExtremeMember>(lf) ||
         std::holds_alternative<op::Compare>(lf);
}

std::string question_text(const LogicalForm& lf, const GeoModel& geo, const std::vector<std::string>& legend_entries) {
  auto name = [&](const RegionId& id) { return geo.name_of(id); };
  return std::visit(
      overloaded{
          [](const op::LegendIsContinuous&) { return std::string("Is the legend a continuous bar?"); },
          [](const op::SymbolCount&) { return std::string("How many symbols are there in the legend?"); },
          [](const op::FirstSymbolIsSmallest&) {
            return std::string("Does the first symbol in the legend represent the smallest category?");
          },
          [](const op::HasMissing&) { return std::string("Does the map have missing data?"); },
          [&](const op::ValueOf& o) { return "What is the value of " + name(o.region) + "?"; },
          [&](const op::RegionsInClass& o) {
            if (o.legend_index < 0 || o.legend_index >= static_cast<int>(legend_entries.size())) {
              throw Error(ErrorKind::OutOfRange, "legend index " + std::to_string(o.legend_index) + " out of range");
            }
            return "Name the regions that have a value in the range " +
                   legend_entries[static_cast<std::size_t>(o.legend_index)] + ".";
          },
          [&](const op::ArgExtreme& o) {
            const std::string w = extreme_word(o.extreme);
            return std::visit(
                overloaded{[&](const GlobalScope&) { return "Which regions have the " + w + " value on the map?"; },
                           [&](const SubareaScope& s) {
                             return "Which regions in subarea " + s.name + " have the " + w + " value?";
                           },
                           [&](const NeighborScope& s) {
                             return "Which regions that border " + name(s.region) + " have the " + w + " value?";
                           }},
                o.scope);
          },
          [&](const op::ExtremeValue& o) {
            const std::string w = extreme_word(o.extreme);
            return std::visit(
                overloaded{[&](const GlobalScope&) { return "What is the " + w + " value on the map?"; },
                           [&](const SubareaScope& s) { return "What is the " + w + " value in subarea " + s.name + "?"; },
                           [&](const NeighborScope& s) {
                             return "What is the " + w + " value among the regions that border " + name(s.region) + "?";
                           }},
                o.scope);
          },
          [&](const op::ExtremeMember& o) {
            return "Among the regions that border " + name(o.center) + ", does " + name(o.candidate) + " have the " +
                   extreme_word(o.extreme) + " value?";
          },
          [&](const op::Compare& o) {
            return "Does " + name(o.lhs) + " have a " + (o.cmp == Comparison::Greater ? "higher" : "lower") +
                   " value than " + name(o.rhs) + "?";
          },
      },
      lf);
}

namespace {

std::string canonical_question(std::string_view raw) {
  std::string s = text::collapse_ws(raw);
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == ' ' && i + 1 < s.size() && (s[i + 1] == '?' || s[i + 1] == '.' || s[i + 1] == ',')) continue;
    out += s[i];
  }
  while (!out.empty() && (out.back() == '?' || out.back() == '.')) out.pop_back();
  return text::trim(out);
}

RegionId resolve_region(const GeoModel& geo, const std::string& name) {
  auto id = geo.find_by_name(text::trim(name));
  if (!id) throw Error(ErrorKind::UnknownSlot, "unknown region '" + name + "'");
  return *id;
}

std::string resolve_subarea(const GeoModel& geo, const std::string& name) {
  auto s = geo.find_subarea(text::trim(name));
  if (!s) throw Error(ErrorKind::UnknownSlot, "unknown subarea '" + name + "'");
  return *s;
}

int resolve_legend_slot(const std::string& slot, int legend_count) {
  static const std::regex token(R"(legend_(\d+))", std::regex::icase);
  std::smatch m;
  const std::string s = text::trim(slot);
  if (!std::regex_match(s, m, token)) throw Error(ErrorKind::UnknownSlot, "range slot '" + s + "' is not a legend token");
  const int k = std::stoi(m[1].str());
  if (k < 1 || k > legend_count) {
    throw Error(ErrorKind::UnknownSlot, "legend token '" + s + "' exceeds legend size " + std::to_string(legend_count));
  }
  return k - 1;
}

struct Pattern {
  std::regex re;
  LogicalForm (*build)(const std::smatch& m, int legend_count, const GeoModel& geo);
};

std::regex icase(const char* p) { return std::regex(p, std::regex::icase | std::regex::ECMAScript); }

const std::vector<Pattern>& patterns() {
  static const std::vector<Pattern> all = {
      {icase(R"(^is the legend a continuous bar$)"),
       [](const std::smatch&, int, const GeoModel&) -> LogicalForm { return op::LegendIsContinuous{}; }},
      {icase(R"(^how many symbols are there in the legend$)"),
       [](const std::smatch&, int, const GeoModel&) -> LogicalForm { return op::SymbolCount{}; }},
      {icase(R"(^does the first symbol in the legend represent the smallest category$)"),
       [](const std::smatch&, int, const GeoModel&) -> LogicalForm { return op::FirstSymbolIsSmallest{}; }},
      {icase(R"(^does the map have missing data$)"),
       [](const std::smatch&, int, const GeoModel&) -> LogicalForm { return op::HasMissing{}; }},
      {icase(R"(^what is the value of (?:region )?(.+)$)"),
       [](const std::smatch& m, int, const GeoModel& geo) -> LogicalForm {
         return op::ValueOf{resolve_region(geo, m[1].str())};
       }},
      {icase(R"(^(?:name the|which) (?:regions|states) (?:that )?have an? (?:value|number) in the range (.+)$)"),
       [](const std::smatch& m, int n, const GeoModel&) -> LogicalForm {
         return op::RegionsInClass{resolve_legend_slot(m[1].str(), n)};
       }},
      {icase(R"(^which (?:regions|states) have the (lowest|highest) value on the map$)"),
       [](const std::smatch& m, int, const GeoModel&) -> LogicalForm {
         return op::ArgExtreme{parse_extreme(m[1].str()), GlobalScope{}};
       }},
      {icase(R"(^which (?:regions|states) in subarea (.+) have the (lowest|highest) value$)"),
       [](const std::smatch& m, int, const GeoModel& geo) -> LogicalForm {
         return op::ArgExtreme{parse_extreme(m[2].str()), SubareaScope{resolve_subarea(geo, m[1].str())}};
       }},
      {icase(R"(^which (?:regions|states) that border (.+) have the (lowest|highest) value$)"),
       [](const std::smatch& m, int, const GeoModel& geo) -> LogicalForm {
         return op::ArgExtreme{parse_extreme(m[2].str()), NeighborScope{resolve_region(geo, m[1].str())}};
       }},
      {icase(R"(^what is the (lowest|highest) value on the map$)"),
       [](const std::smatch& m, int, const GeoModel&) -> LogicalForm {
         return op::ExtremeValue{parse_extreme(m[1].str()), GlobalScope{}};
       }},
      {icase(R"(^what is the (lowest|highest) value in subarea (.+)$)"),
       [](const std::smatch& m, int, const GeoModel& geo) -> LogicalForm {
         return op::ExtremeValue{parse_extreme(m[1].str()), SubareaScope{resolve_subarea(geo, m[2].str())}};
       }},
      {icase(R"(^what is the (lowest|highest) value among the (?:regions|states) that border (.+)$)"),
       [](const std::smatch& m, int, const GeoModel& geo) -> LogicalForm {
         return op::ExtremeValue{parse_extreme(m[1].str()), NeighborScope{resolve_region(geo, m[2].str())}};
       }},
      {icase(R"(^among the (?:regions|states) that border (.+), does (?:region )?(.+) have the (lowest|highest) value$)"),
       [](const std::smatch& m, int, const GeoModel& geo) -> LogicalForm {
         return op::ExtremeMember{parse_extreme(m[3].str()), resolve_region(geo, m[1].str()),
                                  resolve_region(geo, m[2].str())};
       }},
      {icase(R"(^does (?:region )?(.+) have a (higher|lower) value than (?:region )?(.+)$)"),
       [](const std::smatch& m, int, const GeoModel& geo) -> LogicalForm {
         return op::Compare{text::iequals(m[2].str(), "higher") ? Comparison::Greater : Comparison::Less,
                            resolve_region(geo, m[1].str()), resolve_region(geo, m[3].str())};
       }},
  };
  return all;
}

}  // namespace

LogicalForm parse_question(std::string_view raw, int legend_count, const GeoModel& geo) {
  const std::string q = canonical_question(raw);
  std::smatch m;
  for (const Pattern& p : patterns()) {
    if (std::regex_match(q, m, p.re)) return p.build(m, legend_count, geo);
  }
  throw Error(ErrorKind::UnparseableQuestion, "no template matches '" + std::string(raw) + "'");
}

std::string legend_token(int legend_index) { return "legend_" + std::to_string(legend_index + 1); }

int QaTable::rank_of_legend_index(int legend_index) const {
  const int n = static_cast<int>(class_labels.size());
  return order.value_or(LegendOrder::Ascending) == LegendOrder::Ascending ? legend_index : n - 1 - legend_index;
}

int QaTable::legend_index_of_rank(int rank) const { return rank_of_legend_index(rank); }

QaTable gold_view(const UnderlyingTable& table, const std::optional<Classification>& classification,
                  const MapStyle& style) {
  QaTable v;
  v.kind = style.legend_kind;
  v.order = style.legend_order;
  v.has_missing = table.has_missing();
  if (v.kind == LegendKind::Discrete) {
    if (!classification) throw Error(ErrorKind::MismatchedClassification, "discrete map without a classification");
    v.n_symbols = classification->k;
    v.class_labels = classification->descriptions;
    for (const auto& [id, value] : table.values) {
      QaRegion r;
      r.missing = !value;
      if (value) r.rank = classification->assignment.at(id);
      v.regions[id] = r;
    }
  } else {
    const double lo = table.observed_min();
    const double hi = table.observed_max();
    for (const auto& [id, value] : table.values) {
      QaRegion r;
      r.missing = !value;
      if (value) r.relative = hi > lo ? (*value - lo) / (hi - lo) : 0.0;
      v.regions[id] = r;
    }
  }
  return v;
}

QaTable extracted_view(const ExtractedTable& t) {
  QaTable v;
  v.kind = t.legend_type;
  v.n_symbols = t.n_symbols;
  v.order = t.legend_order;
  v.has_missing = t.has_missing;
  if (t.n_symbols) {
    const int n = *t.n_symbols;
    v.class_labels.resize(static_cast<std::size_t>(n));
    for (int rank = 0; rank < n; ++rank) v.class_labels[static_cast<std::size_t>(rank)] = legend_token(v.legend_index_of_rank(rank));
  }
  for (const auto& [id, x] : t.region_values) {
    QaRegion r;
    r.missing = x.missing;
    if (!x.missing) {
      r.rank = x.class_index;
      r.relative = x.relative_value;
    }
    v.regions[id] = r;
  }
  return v;
}

namespace {

const QaRegion& region_in(const QaTable& t, const RegionId& id) {
  const auto it = t.regions.find(id);
  if (it == t.regions.end()) throw Error(ErrorKind::UnknownRegion, "table has no region '" + id.value + "'");
  return it->second;
}

std::optional<double> key_of(const QaTable& t, const QaRegion& r) {
  if (r.missing) return std::nullopt;
  if (t.kind == LegendKind::Discrete) {
    if (!r.rank) return std::nullopt;
    return static_cast<double>(*r.rank);
  }
  return r.relative;
}

std::string label_of(const QaTable& t, const QaRegion& r) {
  if (t.kind == LegendKind::Discrete) {
    if (!r.rank || *r.rank < 0 || *r.rank >= static_cast<int>(t.class_labels.size())) return kNotAvailable;
    return t.class_labels[static_cast<std::size_t>(*r.rank)];
  }
  return text::fixed_half_up(*r.relative, 2);
}

std::vector<RegionId> scope_members(const Scope& scope, const QaTable& t, const GeoModel& geo) {
  return std::visit(overloaded{[&](const GlobalScope&) {
                                 std::vector<RegionId> out;
                                 for (const auto& [id, r] : t.regions) out.push_back(id);
                                 return out;
                               },
                               [&](const SubareaScope& s) {
                                 const auto& m = geo.subarea(s.name);
                                 return std::vector<RegionId>(m.begin(), m.end());
                               },
                               [&](const NeighborScope& s) {
                                 const auto& m = geo.neighbors(s.region);
                                 return std::vector<RegionId>(m.begin(), m.end());
                               }},
                    scope);
}

// Regions attaining the extreme among `members`, ignoring missing ones.
std::vector<RegionId> extreme_regions(const std::vector<RegionId>& members, Extreme e, const QaTable& t) {
  std::optional<double> best;
  for (const auto& id : members) {
    const auto k = key_of(t, region_in(t, id));
    if (!k) continue;
    if (!best || (e == Extreme::Max ? *k > *best : *k < *best)) best = k;
  }
  std::vector<RegionId> out;
  if (!best) return out;
  for (const auto& id : members) {
    const auto k = key_of(t, region_in(t, id));
    if (k && *k == *best) out.push_back(id);
  }
  return out;
}

AnswerSet yes_no(bool b) { return {b ? kYes : kNo}; }

AnswerSet names(const std::vector<RegionId>& ids, const GeoModel& geo) {
  if (ids.empty()) return {kNone};
  AnswerSet out;
  for (const auto& id : ids) out.insert(normalize_answer(geo.name_of(id)));
  return out;
}

}  // namespace

AnswerSet execute(const LogicalForm& lf, const QaTable& t, const GeoModel& geo) {
  return std::visit(
      overloaded{
          [&](const op::LegendIsContinuous&) { return yes_no(t.kind == LegendKind::Continuous); },
          [&](const op::SymbolCount&) {
            return AnswerSet{t.n_symbols ? std::to_string(*t.n_symbols) : kNotAvailable};
          },
          [&](const op::FirstSymbolIsSmallest&) {
            return yes_no(t.order.value_or(LegendOrder::Ascending) == LegendOrder::Ascending);
          },
          [&](const op::HasMissing&) { return yes_no(t.has_missing); },
          [&](const op::ValueOf& o) {
            const QaRegion& r = region_in(t, o.region);
            if (!key_of(t, r)) return AnswerSet{kNotAvailable};
            return AnswerSet{normalize_answer(label_of(t, r))};
          },
          [&](const op::RegionsInClass& o) {
            const int n = static_cast<int>(t.class_labels.size());
            if (o.legend_index < 0 || o.legend_index >= n) {
              throw Error(ErrorKind::OutOfRange, "legend index " + std::to_string(o.legend_index) + " out of range");
            }
            const int rank = t.rank_of_legend_index(o.legend_index);
            std::vector<RegionId> hits;
            for (const auto& [id, r] : t.regions) {
              if (!r.missing && r.rank && *r.rank == rank) hits.push_back(id);
            }
            return names(hits, geo);
          },
          [&](const op::ArgExtreme& o) { return names(extreme_regions(scope_members(o.scope, t, geo), o.extreme, t), geo); },
          [&](const op::ExtremeValue& o) {
            const auto ext = extreme_regions(scope_members(o.scope, t, geo), o.extreme, t);
            if (ext.empty()) return AnswerSet{kNone};
            AnswerSet out;
            for (const auto& id : ext) out.insert(normalize_answer(label_of(t, region_in(t, id))));
            return out;
          },
          [&](const op::ExtremeMember& o) {
            const auto& nb = geo.neighbors(o.center);
            if (!nb.count(o.candidate)) return yes_no(false);
            const auto ext = extreme_regions(std::vector<RegionId>(nb.begin(), nb.end()), o.extreme, t);
            return yes_no(std::find(ext.begin(), ext.end(), o.candidate) != ext.end());
          },
          [&](const op::Compare& o) {
            const auto a = key_of(t, region_in(t, o.lhs));
            const auto b = key_of(t, region_in(t, o.rhs));
            if (!a || !b) return AnswerSet{kNotAvailable};
            return yes_no(o.cmp == Comparison::Greater ? *a > *b : *a < *b);
          },
      },
      lf);
}

std::string flatten(const QaTable& t, const GeoModel& geo) {
  const bool continuous = t.kind == LegendKind::Continuous;
  std::string out = "Legend type is " + std::string(continuous ? "continuous" : "discrete") + ".";
  out += " The number of symbols is " + (t.n_symbols ? std::to_string(*t.n_symbols) : std::string("N/A")) + ".";
  out += " The legend order is " + (t.order ? enum_name(*t.order) : std::string("N/A")) + ".";
  out += " Missing data: " + std::string(t.has_missing ? "yes" : "no") + ".";
  for (const auto& region : geo.regions()) {
    const auto it = t.regions.find(region.id);
    std::string v = "N/A";
    if (it != t.regions.end() && key_of(t, it->second)) v = label_of(t, it->second);
    out += " " + region.name + "'s value is " + v + ".";
  }
  return out;
}

}  // namespace mapqa
