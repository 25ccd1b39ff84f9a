#pragma once

// Independent reference implementations. They restate the definitions as
// directly as possible and share no code paths with the library beyond the
// plain data types they read.

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mapqa/datagen.hpp"
#include "mapqa/geo.hpp"
#include "mapqa/tableqa.hpp"

namespace mapqa::oracle {

// Break points straight from the definitions: equal steps between the
// observed extremes, or the ceil(i*n/k)-th order statistic.
inline std::vector<double> breaks(std::vector<double> present, ClassScheme scheme, int k) {
  std::sort(present.begin(), present.end());
  const double lo = present.front();
  const double hi = present.back();
  std::vector<double> b{lo};
  for (int i = 1; i < k; ++i) {
    if (scheme == ClassScheme::EqualInterval) {
      b.push_back(lo + i * (hi - lo) / k);
    } else {
      const auto rank = static_cast<std::size_t>(std::ceil(static_cast<double>(i) * present.size() / k));
      b.push_back(present[rank - 1]);
    }
  }
  b.push_back(hi);
  return b;
}

// Tests v against every interval; returns -1 unless exactly one contains it.
inline int interval_of(const std::vector<double>& b, double v) {
  int hit = -1;
  int hits = 0;
  const int k = static_cast<int>(b.size()) - 1;
  for (int i = 0; i < k; ++i) {
    const bool lower_ok = i == 0 ? v >= b[0] : v > b[static_cast<std::size_t>(i)];
    const bool upper_ok = v <= b[static_cast<std::size_t>(i + 1)];
    if (lower_ok && upper_ok) {
      hit = i;
      ++hits;
    }
  }
  return hits == 1 ? hit : -1;
}

inline std::string name_key(const GeoModel& geo, const RegionId& id) { return normalize_answer(geo.name_of(id)); }

// Comparable key of a present region: class rank or colorbar position.
inline std::optional<double> key_of(const QaTable& t, const RegionId& id) {
  const QaRegion& r = t.regions.at(id);
  if (r.missing) return std::nullopt;
  if (t.kind == LegendKind::Discrete) return static_cast<double>(*r.rank);
  return *r.relative;
}

inline std::set<RegionId> scope_members(const Scope& scope, const GeoModel& geo) {
  std::set<RegionId> out;
  if (std::holds_alternative<GlobalScope>(scope)) {
    for (const auto& r : geo.regions()) out.insert(r.id);
  } else if (auto* s = std::get_if<SubareaScope>(&scope)) {
    out = geo.subarea(s->name);
  } else {
    out = geo.neighbors(std::get<NeighborScope>(scope).region);
  }
  return out;
}

// Regions r in scope such that no present region in scope beats r.
inline std::set<RegionId> attaining(const QaTable& t, const std::set<RegionId>& scope, Extreme e) {
  std::set<RegionId> out;
  for (const RegionId& r : scope) {
    const auto kr = key_of(t, r);
    if (!kr) continue;
    bool best = true;
    for (const RegionId& s : scope) {
      const auto ks = key_of(t, s);
      if (!ks) continue;
      if (e == Extreme::Max ? *ks > *kr : *ks < *kr) best = false;
    }
    if (best) out.insert(r);
  }
  return out;
}

inline std::string value_label(const QaTable& t, const RegionId& id) {
  const QaRegion& r = t.regions.at(id);
  if (t.kind == LegendKind::Discrete) return normalize_answer(t.class_labels[static_cast<std::size_t>(*r.rank)]);
  // Round half up to hundredths, by hand.
  const long long hundredths = static_cast<long long>(std::floor(*r.relative * 100.0 + 0.5 + 1e-9));
  const std::string frac = std::to_string(hundredths % 100);
  return std::to_string(hundredths / 100) + "." + (frac.size() == 1 ? "0" + frac : frac);
}

inline AnswerSet execute(const LogicalForm& lf, const QaTable& t, const GeoModel& geo) {
  auto yn = [](bool b) { return AnswerSet{b ? kYes : kNo}; };
  auto names = [&](const std::set<RegionId>& ids) {
    AnswerSet out;
    for (const auto& id : ids) out.insert(name_key(geo, id));
    if (out.empty()) out.insert(kNone);
    return out;
  };
  if (std::holds_alternative<op::LegendIsContinuous>(lf)) return yn(t.kind == LegendKind::Continuous);
  if (std::holds_alternative<op::SymbolCount>(lf)) {
    return {t.n_symbols ? std::to_string(*t.n_symbols) : kNotAvailable};
  }
  if (std::holds_alternative<op::FirstSymbolIsSmallest>(lf)) {
    return yn(t.order && *t.order == LegendOrder::Ascending);
  }
  if (std::holds_alternative<op::HasMissing>(lf)) return yn(t.has_missing);
  if (auto* o = std::get_if<op::ValueOf>(&lf)) {
    if (t.regions.at(o->region).missing) return {kNotAvailable};
    return {value_label(t, o->region)};
  }
  if (auto* o = std::get_if<op::RegionsInClass>(&lf)) {
    const int n = *t.n_symbols;
    const int rank = *t.order == LegendOrder::Ascending ? o->legend_index : n - 1 - o->legend_index;
    std::set<RegionId> ids;
    for (const auto& [id, r] : t.regions) {
      if (!r.missing && *r.rank == rank) ids.insert(id);
    }
    return names(ids);
  }
  if (auto* o = std::get_if<op::ArgExtreme>(&lf)) return names(attaining(t, scope_members(o->scope, geo), o->extreme));
  if (auto* o = std::get_if<op::ExtremeValue>(&lf)) {
    const auto best = attaining(t, scope_members(o->scope, geo), o->extreme);
    if (best.empty()) return {kNone};
    return {value_label(t, *best.begin())};
  }
  if (auto* o = std::get_if<op::ExtremeMember>(&lf)) {
    const auto& nb = geo.neighbors(o->center);
    return yn(nb.count(o->candidate) != 0 && attaining(t, nb, o->extreme).count(o->candidate) != 0);
  }
  const auto& c = std::get<op::Compare>(lf);
  const auto a = key_of(t, c.lhs);
  const auto b = key_of(t, c.rhs);
  if (!a || !b) return {kNotAvailable};
  return yn(c.cmp == Comparison::Greater ? *a > *b : *a < *b);
}

}  // namespace mapqa::oracle
