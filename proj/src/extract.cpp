#include "mapqa/extract.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>

#include "mapqa/errors.hpp"

namespace mapqa {

using nlohmann::json;

std::vector<RecordQuery> standard_queries(const GeoModel& geo) {
  std::vector<RecordQuery> q = {
      {RecordKind::LegendType, {}}, {RecordKind::NSymbols, {}}, {RecordKind::LegendOrder, {}}, {RecordKind::HasMissing, {}}};
  for (const auto& r : geo.regions()) q.push_back({RecordKind::RegionValue, r.id});
  return q;
}

Gate resolve_gate(const RecordQuery& query, LegendKind predicted_legend_type) {
  return query.kind == RecordKind::RegionValue && predicted_legend_type == LegendKind::Continuous
             ? Gate::Regression
             : Gate::Classification;
}

LegendLayout layout_from_manifest(const LayoutManifest& m) {
  LegendLayout l;
  l.kind = m.legend_kind;
  for (const auto& s : m.swatches) {
    l.swatch_boxes.push_back(s.bbox);
    l.labels.push_back(s.description);
  }
  if (m.colorbar) {
    l.colorbar = m.colorbar->bbox;
    l.colorbar_axis = m.colorbar->axis;
    l.labels = m.colorbar->labels;
  }
  for (const auto& [id, f] : m.region_fills) l.probes[id] = f.probe;
  return l;
}

Rgb probe_color(const Image& image, Pixel p) {
  std::array<std::array<std::uint8_t, 9>, 3> ch{};
  int n = 0;
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      const int x = std::clamp(p.x + dx, 0, image.width() - 1);
      const int y = std::clamp(p.y + dy, 0, image.height() - 1);
      const Rgb c = image.at(x, y);
      ch[0][static_cast<std::size_t>(n)] = c.r;
      ch[1][static_cast<std::size_t>(n)] = c.g;
      ch[2][static_cast<std::size_t>(n)] = c.b;
      ++n;
    }
  }
  for (auto& c : ch) std::nth_element(c.begin(), c.begin() + 4, c.end());
  return {ch[0][4], ch[1][4], ch[2][4]};
}

int match_swatch(Rgb color, const std::vector<Rgb>& swatches, double tau) {
  if (swatches.empty()) throw Error(ErrorKind::InvalidQuery, "no swatches to match against");
  std::vector<double> d;
  for (Rgb s : swatches) d.push_back(distance(color, s));
  const auto best = static_cast<std::size_t>(std::min_element(d.begin(), d.end()) - d.begin());
  // A tie is reported even when both swatches are far away.
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (i != best && d[i] - d[best] <= 1.0) {
      throw Error(ErrorKind::AmbiguousMatch, "color " + to_hex(color) + " is equidistant from two swatches");
    }
  }
  if (d[best] > tau) {
    throw Error(ErrorKind::NoMatch, "color " + to_hex(color) + " is " + std::to_string(d[best]) + " from every swatch");
  }
  return static_cast<int>(best);
}

double invert_colorbar(const Image& image, BBox bar, Orientation axis, LegendOrder order, Rgb color) {
  constexpr int kSamples = 256;
  const bool horizontal = axis == Orientation::Horizontal;
  const int length = horizontal ? bar.width() : bar.height();
  if (length < 2) throw Error(ErrorKind::InvalidQuery, "colorbar too short to invert");
  const Pixel mid = bar.center();
  std::vector<double> ts(kSamples);
  std::vector<double> ds(kSamples);
  std::vector<Rgb> seen;
  for (int j = 0; j < kSamples; ++j) {
    const int along = static_cast<int>(std::lround(j * (length - 1) / 255.0));
    const Rgb c = horizontal ? image.at(bar.x0 + along, mid.y) : image.at(mid.x, bar.y0 + along);
    if (seen.size() < 2 && std::find(seen.begin(), seen.end(), c) == seen.end()) seen.push_back(c);
    ts[static_cast<std::size_t>(j)] = order == LegendOrder::Ascending ? j / 255.0 : 1.0 - j / 255.0;
    ds[static_cast<std::size_t>(j)] = distance(c, color);
  }
  if (seen.size() < 2) throw Error(ErrorKind::AmbiguousColor, "colorbar has a single color");
  double near_lo = 2.0;
  double near_hi = -1.0;
  for (int j = 0; j < kSamples; ++j) {
    if (ds[static_cast<std::size_t>(j)] <= 2.0) {
      near_lo = std::min(near_lo, ts[static_cast<std::size_t>(j)]);
      near_hi = std::max(near_hi, ts[static_cast<std::size_t>(j)]);
    }
  }
  if (near_hi - near_lo > 0.05) {
    throw Error(ErrorKind::AmbiguousColor, "color " + to_hex(color) + " appears at distant colorbar positions");
  }
  const double dmin = *std::min_element(ds.begin(), ds.end());
  double sum = 0.0;
  int n = 0;
  for (int j = 0; j < kSamples; ++j) {
    if (ds[static_cast<std::size_t>(j)] == dmin) {
      sum += ts[static_cast<std::size_t>(j)];
      ++n;
    }
  }
  return std::clamp(sum / n, 0.0, 1.0);
}

namespace {

std::optional<double> leading_number(const std::string& s) {
  std::string digits;
  std::size_t i = 0;
  while (i < s.size() && !std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  for (; i < s.size(); ++i) {
    const char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      digits += c;
    } else if (c != ',') {
      break;
    }
  }
  if (digits.empty()) return std::nullopt;
  return std::strtod(digits.c_str(), nullptr);
}

}  // namespace

std::optional<LegendOrder> infer_legend_order(const std::vector<std::string>& labels) {
  if (labels.size() < 2) return std::nullopt;
  const auto first = leading_number(labels.front());
  const auto last = leading_number(labels.back());
  if (!first || !last || *first == *last) return std::nullopt;
  return *first < *last ? LegendOrder::Ascending : LegendOrder::Descending;
}

ExtractedTable extract_table(const Image& image, const LegendLayout& layout, const std::vector<RecordQuery>& queries) {
  if (queries.empty() || queries.front().kind != RecordKind::LegendType) {
    throw Error(ErrorKind::InvalidQuery, "record queries must begin with legend_type");
  }
  ExtractedTable out;
  out.legend_type = layout.kind;
  const bool discrete = layout.kind == LegendKind::Discrete;
  const auto order = infer_legend_order(layout.labels);
  const LegendOrder oriented = order.value_or(LegendOrder::Ascending);

  std::vector<Rgb> swatch_colors;
  for (const BBox& b : layout.swatch_boxes) swatch_colors.push_back(image.at(b.center().x, b.center().y));
  const int n = static_cast<int>(swatch_colors.size());

  bool any_missing = false;
  for (const auto& [id, probe] : layout.probes) {
    if (probe_color(image, probe) == kMissingColor) any_missing = true;
  }

  for (const RecordQuery& q : queries) {
    switch (q.kind) {
      case RecordKind::LegendType: break;
      case RecordKind::NSymbols:
        if (discrete) out.n_symbols = n;
        break;
      case RecordKind::LegendOrder: out.legend_order = order; break;
      case RecordKind::HasMissing: out.has_missing = any_missing; break;
      case RecordKind::RegionValue: {
        if (!q.region) throw Error(ErrorKind::InvalidQuery, "region_value query without a region");
        const auto it = layout.probes.find(*q.region);
        if (it == layout.probes.end()) throw Error(ErrorKind::UnknownRegion, "no probe for '" + q.region->value + "'");
        ExtractedValue v;
        v.gate = resolve_gate(q, layout.kind);
        const Rgb c = probe_color(image, it->second);
        if (c == kMissingColor) {
          v.missing = true;
        } else {
          try {
            if (v.gate == Gate::Classification) {
              const int pos = match_swatch(c, swatch_colors);
              v.class_index = oriented == LegendOrder::Ascending ? pos : n - 1 - pos;
            } else {
              if (!layout.colorbar) throw Error(ErrorKind::InvalidQuery, "continuous layout without a colorbar");
              v.relative_value = invert_colorbar(image, *layout.colorbar, layout.colorbar_axis, oriented, c);
            }
          } catch (const Error& e) {
            v.missing = true;
            v.error = std::string(to_string(e.kind())) + ": " + e.what();
          }
        }
        out.region_values[*q.region] = v;
        break;
      }
    }
  }
  return out;
}

json to_json(const ExtractedTable& t) {
  json regions = json::object();
  for (const auto& [id, v] : t.region_values) {
    json r = {{"gate", v.gate == Gate::Regression ? "regression" : "classification"}, {"missing", v.missing}};
    if (v.class_index) r["class_index"] = *v.class_index;
    if (v.relative_value) r["relative_value"] = *v.relative_value;
    if (v.error) r["error"] = *v.error;
    regions[id.value] = r;
  }
  return {{"map_id", t.map_id},
          {"legend_type", t.legend_type},
          {"n_symbols", t.n_symbols ? json(*t.n_symbols) : json(nullptr)},
          {"legend_order", t.legend_order ? json(*t.legend_order) : json(nullptr)},
          {"has_missing", t.has_missing},
          {"regions", regions}};
}

ExtractedTable extracted_table_from_json(const json& j) {
  ExtractedTable t;
  t.map_id = j.at("map_id").get<std::string>();
  t.legend_type = parse_enum(j.at("legend_type").get<std::string>(),
                             std::vector<LegendKind>{LegendKind::Discrete, LegendKind::Continuous});
  if (!j.at("n_symbols").is_null()) t.n_symbols = j.at("n_symbols").get<int>();
  if (!j.at("legend_order").is_null()) {
    t.legend_order = parse_enum(j.at("legend_order").get<std::string>(),
                                std::vector<LegendOrder>{LegendOrder::Ascending, LegendOrder::Descending});
  }
  t.has_missing = j.at("has_missing").get<bool>();
  for (const auto& [id, r] : j.at("regions").items()) {
    ExtractedValue v;
    v.gate = r.at("gate").get<std::string>() == "regression" ? Gate::Regression : Gate::Classification;
    v.missing = r.at("missing").get<bool>();
    if (r.contains("class_index")) v.class_index = r.at("class_index").get<int>();
    if (r.contains("relative_value")) v.relative_value = r.at("relative_value").get<double>();
    if (r.contains("error")) v.error = r.at("error").get<std::string>();
    t.region_values[RegionId{id}] = v;
  }
  return t;
}

}  // namespace mapqa
