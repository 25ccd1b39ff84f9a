#include "mapqa/qgen.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "mapqa/errors.hpp"
#include "mapqa/rng.hpp"

namespace mapqa {

using nlohmann::json;

json to_json(const Question& q) {
  return {{"question_id", q.id},
          {"map_id", q.map_id},
          {"category", q.category},
          {"template_id", q.template_id},
          {"text", q.text},
          {"logical_form", to_json(q.logical_form)},
          {"answers", std::vector<std::string>(q.answers.begin(), q.answers.end())}};
}

Question question_from_json(const json& j) {
  Question q;
  q.id = j.at("question_id").get<std::string>();
  q.map_id = j.at("map_id").get<std::string>();
  q.category = parse_enum(j.at("category").get<std::string>(),
                          std::vector<Category>{Category::Surface, Category::Retrieval, Category::Relational});
  q.template_id = j.at("template_id").get<std::string>();
  q.text = j.at("text").get<std::string>();
  q.logical_form = logical_form_from_json(j.at("logical_form"));
  q.answers = make_answer_set(j.at("answers").get<std::vector<std::string>>());
  return q;
}

std::vector<std::string> legend_entries(const MapInstance& map) {
  std::vector<std::string> out;
  if (!map.classification) return out;
  out = map.classification->descriptions;
  if (map.style.legend_order == LegendOrder::Descending) std::reverse(out.begin(), out.end());
  return out;
}

std::map<TemplateFamily, double> QgenConfig::default_weights() {
  // Tuned so yes/no questions make up roughly a quarter of a dataset and the
  // mean answer-set size lands near 3.
  return {
      {TemplateFamily::LegendContinuous, 0.45},
      {TemplateFamily::SymbolCount, 1.0},
      {TemplateFamily::FirstSymbolSmallest, 0.45},
      {TemplateFamily::HasMissing, 0.45},
      {TemplateFamily::ValueOf, 3.0},
      {TemplateFamily::RegionsInRange, 4.0},
      {TemplateFamily::ArgExtremeGlobal, 3.0},
      {TemplateFamily::ArgExtremeSubarea, 1.5},
      {TemplateFamily::ArgExtremeNeighbors, 1.0},
      {TemplateFamily::ExtremeValueSubarea, 1.5},
      {TemplateFamily::ExtremeMember, 0.55},
      {TemplateFamily::Compare, 0.55},
  };
}

bool asks_exact_value(const LogicalForm& lf) {
  return std::holds_alternative<op::ValueOf>(lf) || std::holds_alternative<op::RegionsInClass>(lf) ||
         std::holds_alternative<op::ExtremeValue>(lf) || std::holds_alternative<op::SymbolCount>(lf);
}

namespace {

struct NoSlot {
  std::string reason;
};

class Instantiator {
 public:
  Instantiator(const MapInstance& map, const GeoModel& geo, const QgenConfig& config, Rng& rng)
      : map_(map), geo_(geo), config_(config), rng_(rng), table_(gold_view(map.table, map.classification, map.style)) {
    for (const auto& [id, r] : table_.regions) {
      if (!r.missing) present_.push_back(id);
    }
  }

  const QaTable& table() const { return table_; }
  bool continuous() const { return table_.kind == LegendKind::Continuous; }

  bool applicable(TemplateFamily f) const {
    switch (f) {
      case TemplateFamily::SymbolCount:
      case TemplateFamily::FirstSymbolSmallest:
      case TemplateFamily::ValueOf:
      case TemplateFamily::RegionsInRange:
      case TemplateFamily::ExtremeValueSubarea: return !continuous();
      default: return true;
    }
  }

  // Throws NoSlot when no valid filling was found for this draw.
  LogicalForm build(TemplateFamily f) {
    const Extreme ext = rng_.bernoulli(0.5) ? Extreme::Max : Extreme::Min;
    switch (f) {
      case TemplateFamily::LegendContinuous: return op::LegendIsContinuous{};
      case TemplateFamily::SymbolCount: return op::SymbolCount{};
      case TemplateFamily::FirstSymbolSmallest: return op::FirstSymbolIsSmallest{};
      case TemplateFamily::HasMissing: return op::HasMissing{};
      case TemplateFamily::ValueOf: return op::ValueOf{rng_.pick(present_)};
      case TemplateFamily::RegionsInRange:
        return op::RegionsInClass{static_cast<int>(rng_.below(static_cast<std::uint64_t>(*table_.n_symbols)))};
      case TemplateFamily::ArgExtremeGlobal: {
        require_decisive(present_, ext);
        return op::ArgExtreme{ext, GlobalScope{}};
      }
      case TemplateFamily::ArgExtremeSubarea: {
        const std::string s = pick_subarea();
        const auto& members = geo_.subarea(s);
        require_decisive({members.begin(), members.end()}, ext);
        return op::ArgExtreme{ext, SubareaScope{s}};
      }
      case TemplateFamily::ArgExtremeNeighbors: {
        const RegionId center = pick_with_neighbors(1);
        const auto& nb = geo_.neighbors(center);
        require_decisive({nb.begin(), nb.end()}, ext);
        return op::ArgExtreme{ext, NeighborScope{center}};
      }
      case TemplateFamily::ExtremeValueSubarea: {
        const std::string s = pick_subarea();
        const auto& members = geo_.subarea(s);
        require_decisive({members.begin(), members.end()}, ext);
        return op::ExtremeValue{ext, SubareaScope{s}};
      }
      case TemplateFamily::ExtremeMember: {
        const RegionId center = pick_with_neighbors(2);
        const auto& nb = geo_.neighbors(center);
        std::vector<RegionId> members(nb.begin(), nb.end());
        require_decisive(members, ext);
        std::vector<RegionId> top;
        std::vector<RegionId> rest;
        const auto best = extreme_key(members, ext);
        for (const auto& id : members) {
          const auto k = key(id);
          if (!k) continue;
          (*k == *best ? top : rest).push_back(id);
        }
        const bool want_yes = rng_.bernoulli(0.5);
        const auto& pool = (want_yes && !top.empty()) || rest.empty() ? top : rest;
        return op::ExtremeMember{ext, center, rng_.pick(pool)};
      }
      case TemplateFamily::Compare: {
        if (present_.size() < 2) throw NoSlot{"fewer than two regions with data"};
        const RegionId a = rng_.pick(present_);
        const RegionId b = rng_.pick(present_);
        if (a == b) throw NoSlot{"same region drawn twice"};
        const double ka = *key(a);
        const double kb = *key(b);
        if (ka == kb) throw NoSlot{"regions share a value"};
        if (continuous() && std::abs(ka - kb) < config_.continuous_margin) throw NoSlot{"values too close"};
        return op::Compare{rng_.bernoulli(0.5) ? Comparison::Greater : Comparison::Less, a, b};
      }
    }
    throw NoSlot{"unknown template family"};
  }

 private:
  std::optional<double> key(const RegionId& id) const {
    const QaRegion& r = table_.regions.at(id);
    if (r.missing) return std::nullopt;
    return continuous() ? r.relative : std::optional<double>(static_cast<double>(*r.rank));
  }

  std::optional<double> extreme_key(const std::vector<RegionId>& members, Extreme e) const {
    std::optional<double> best;
    for (const auto& id : members) {
      const auto k = key(id);
      if (k && (!best || (e == Extreme::Max ? *k > *best : *k < *best))) best = k;
    }
    return best;
  }

  // Every scoped question needs data, and on continuous maps the winner must
  // stand clear of the runner-up.
  void require_decisive(const std::vector<RegionId>& members, Extreme e) const {
    const auto best = extreme_key(members, e);
    if (!best) throw NoSlot{"no region with data in scope"};
    if (!continuous()) return;
    for (const auto& id : members) {
      const auto k = key(id);
      if (k && *k != *best && std::abs(*k - *best) < config_.continuous_margin) {
        throw NoSlot{"extreme not separated from runner-up"};
      }
    }
  }

  std::string pick_subarea() {
    std::vector<std::string> names;
    for (const auto& [name, members] : geo_.subareas()) names.push_back(name);
    if (names.empty()) throw NoSlot{"geography has no subareas"};
    return rng_.pick(names);
  }

  RegionId pick_with_neighbors(std::size_t min_neighbors) {
    std::vector<RegionId> ids;
    for (const auto& r : geo_.regions()) {
      if (geo_.neighbors(r.id).size() >= min_neighbors) ids.push_back(r.id);
    }
    if (ids.empty()) throw NoSlot{"no region with enough neighbors"};
    return rng_.pick(ids);
  }

  const MapInstance& map_;
  const GeoModel& geo_;
  const QgenConfig& config_;
  Rng& rng_;
  QaTable table_;
  std::vector<RegionId> present_;
};

std::string question_id(const std::string& map_id, int n) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "_q%03d", n);
  return map_id + buf;
}

const char* family_name(TemplateFamily f) {
  switch (f) {
    case TemplateFamily::LegendContinuous: return "legend_continuous";
    case TemplateFamily::SymbolCount: return "symbol_count";
    case TemplateFamily::FirstSymbolSmallest: return "first_symbol_smallest";
    case TemplateFamily::HasMissing: return "has_missing";
    case TemplateFamily::ValueOf: return "value_of";
    case TemplateFamily::RegionsInRange: return "regions_in_range";
    case TemplateFamily::ArgExtremeGlobal: return "arg_extreme_global";
    case TemplateFamily::ArgExtremeSubarea: return "arg_extreme_subarea";
    case TemplateFamily::ArgExtremeNeighbors: return "arg_extreme_neighbors";
    case TemplateFamily::ExtremeValueSubarea: return "extreme_value_subarea";
    case TemplateFamily::ExtremeMember: return "extreme_member";
    case TemplateFamily::Compare: return "compare";
  }
  return "?";
}

}  // namespace

std::vector<Question> generate_questions(const MapInstance& map, const GeoModel& geo, const QgenConfig& config,
                                         std::uint64_t seed, std::vector<SkippedSlot>* skipped) {
  Rng rng(seed);
  Instantiator inst(map, geo, config, rng);
  std::vector<TemplateFamily> families;
  std::vector<double> cumulative;
  double total = 0.0;
  for (const auto& [f, w] : config.weights) {
    if (w <= 0.0 || !inst.applicable(f)) continue;
    total += w;
    families.push_back(f);
    cumulative.push_back(total);
  }
  const auto entries = legend_entries(map);
  std::vector<Question> out;
  std::set<std::string> seen;
  const int max_draws = config.per_map_quota * 10;
  for (int draw = 0; draw < max_draws && static_cast<int>(out.size()) < config.per_map_quota && total > 0.0; ++draw) {
    const double u = rng.uniform() * total;
    const auto idx = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
    const TemplateFamily family = families[std::min(idx, families.size() - 1)];
    LogicalForm lf;
    try {
      lf = inst.build(family);
    } catch (const NoSlot& e) {
      if (skipped) skipped->push_back({map.map_id, family, std::string(family_name(family)) + ": " + e.reason});
      continue;
    }
    std::string text = question_text(lf, geo, entries);
    if (!seen.insert(text).second) continue;
    Question q;
    q.map_id = map.map_id;
    q.id = question_id(map.map_id, static_cast<int>(out.size()) + 1);
    q.category = category_of(lf);
    q.template_id = template_id(lf);
    q.text = std::move(text);
    q.answers = execute(lf, inst.table(), geo);
    q.logical_form = std::move(lf);
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<Question> postprocess(std::vector<Question> questions,
                                  const std::function<LegendKind(const std::string& map_id)>& legend_kind_of,
                                  std::uint64_t seed) {
  std::vector<Question> kept;
  for (auto& q : questions) {
    if (legend_kind_of(q.map_id) == LegendKind::Continuous && asks_exact_value(q.logical_form)) continue;
    kept.push_back(std::move(q));
  }

  // Balance yes/no per relational template.
  std::map<std::string, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> by_template;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const Question& q = kept[i];
    if (q.category != Category::Relational || !is_yes_no(q.logical_form)) continue;
    auto& [yes, no] = by_template[q.template_id];
    if (q.answers == AnswerSet{kYes}) yes.push_back(i);
    if (q.answers == AnswerSet{kNo}) no.push_back(i);
  }
  std::vector<bool> drop(kept.size(), false);
  for (auto& [tid, groups] : by_template) {
    auto& [yes, no] = groups;
    auto& majority = yes.size() > no.size() ? yes : no;
    const std::size_t target = std::min(yes.size(), no.size());
    Rng rng(mix_seed(seed, tid));
    rng.shuffle(majority);
    for (std::size_t i = target; i < majority.size(); ++i) drop[majority[i]] = true;
  }
  std::vector<Question> out;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (!drop[i]) out.push_back(std::move(kept[i]));
  }
  return out;
}

}  // namespace mapqa
