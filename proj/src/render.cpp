#include "mapqa/render.hpp"

#include <algorithm>
#include <cmath>

#include "mapqa/errors.hpp"

namespace mapqa {

using nlohmann::json;

namespace {

constexpr int kMargin = 10;
constexpr int kSwatchW = 20;
constexpr int kSwatchH = 12;
constexpr int kSwatchTextGap = 6;
constexpr int kRowPitch = 16;
constexpr int kItemGap = 14;
constexpr int kBarThickness = 16;
constexpr int kLegendMapGap = 16;
constexpr int kSideLegendMaxWidth = 240;
constexpr int kMapPadding = 8;
constexpr int kGridStep = 40;
constexpr FontSpec kLegendFont{1, false};
constexpr Rgb kTextColor{25, 25, 25};
constexpr Rgb kSwatchOutline{110, 110, 110};
constexpr Rgb kGridColor{222, 222, 222};

BBox offset(BBox b, int dx, int dy) { return {b.x0 + dx, b.y0 + dy, b.x1 + dx, b.y1 + dy}; }

BBox unite(BBox a, BBox b) {
  return {std::min(a.x0, b.x0), std::min(a.y0, b.y0), std::max(a.x1, b.x1), std::max(a.y1, b.y1)};
}

// Legend laid out at the origin, then translated once its placement is known.
struct LegendLayout {
  std::vector<Swatch> swatches;
  std::optional<Colorbar> colorbar;
  std::optional<MissingMarker> missing;
  int width = 0;
  int height = 0;

  void translate(int dx, int dy) {
    for (auto& s : swatches) {
      s.bbox = offset(s.bbox, dx, dy);
      s.text_bbox = offset(s.text_bbox, dx, dy);
    }
    if (colorbar) {
      colorbar->bbox = offset(colorbar->bbox, dx, dy);
      for (auto& b : colorbar->label_bboxes) b = offset(b, dx, dy);
    }
    if (missing) {
      missing->swatch_bbox = offset(missing->swatch_bbox, dx, dy);
      missing->note_bbox = offset(missing->note_bbox, dx, dy);
    }
  }
};

struct LegendItem {
  Rgb color;
  std::string text;
};

int text_w(const std::string& s) { return text_width(s, kLegendFont); }

// Swatch rows (vertical) or a wrapping flow (horizontal). The missing note, if
// any, is the final item.
LegendLayout layout_discrete(const std::vector<LegendItem>& items, bool with_missing, Orientation orient,
                             int max_width) {
  LegendLayout out;
  int x = 0;
  int y = 0;
  BBox extent{0, 0, 0, 0};
  for (std::size_t i = 0; i < items.size(); ++i) {
    const int item_w = kSwatchW + kSwatchTextGap + text_w(items[i].text);
    if (orient == Orientation::Horizontal && x > 0 && x + item_w > max_width) {
      x = 0;
      y += kRowPitch;
    }
    const BBox sw{x, y, x + kSwatchW, y + kSwatchH};
    const int tx = x + kSwatchW + kSwatchTextGap;
    const int ty = y + (kSwatchH - text_height(kLegendFont) + 1) / 2;
    const BBox tb{tx, ty, tx + text_w(items[i].text), ty + text_height(kLegendFont)};
    extent = unite(extent, unite(sw, tb));
    const bool is_note = with_missing && i + 1 == items.size();
    if (is_note) {
      out.missing = MissingMarker{kMissingColor, sw, tb};
    } else {
      out.swatches.push_back({sw, items[i].color, items[i].text, tb});
    }
    if (orient == Orientation::Horizontal) {
      x += item_w + kItemGap;
    } else {
      y += kRowPitch;
    }
  }
  out.width = extent.x1;
  out.height = extent.y1;
  return out;
}

LegendLayout layout_continuous(const std::string& first_label, const std::string& last_label, bool with_missing,
                               Orientation orient, LegendOrder order) {
  LegendLayout out;
  Colorbar bar;
  bar.axis = orient;
  bar.order = order;
  bar.labels = {first_label, last_label};
  const int th = text_height(kLegendFont);
  const int note_w = kSwatchW + kSwatchTextGap + text_w(kMissingNote);
  if (orient == Orientation::Vertical) {
    bar.bbox = {0, 0, kBarThickness, kColorbarLength};
    const int lx = kBarThickness + kSwatchTextGap;
    bar.label_bboxes = {{lx, 0, lx + text_w(first_label), th},
                        {lx, kColorbarLength - th, lx + text_w(last_label), kColorbarLength}};
    out.width = std::max(lx + std::max(text_w(first_label), text_w(last_label)), with_missing ? note_w : 0);
    out.height = kColorbarLength;
    if (with_missing) {
      const int y = kColorbarLength + 8;
      const BBox sw{0, y, kSwatchW, y + kSwatchH};
      const int ty = y + (kSwatchH - th + 1) / 2;
      out.missing = MissingMarker{kMissingColor, sw, {kSwatchW + kSwatchTextGap, ty, note_w, ty + th}};
      out.height = y + kSwatchH;
    }
  } else {
    bar.bbox = {0, 0, kColorbarLength, kBarThickness};
    const int ly = kBarThickness + 4;
    const int w_last = text_w(last_label);
    bar.label_bboxes = {{0, ly, text_w(first_label), ly + th},
                        {kColorbarLength - w_last, ly, kColorbarLength, ly + th}};
    out.width = kColorbarLength;
    out.height = ly + th;
    if (with_missing) {
      const int x = kColorbarLength + kItemGap;
      const int y = (kBarThickness - kSwatchH) / 2;
      const BBox sw{x, y, x + kSwatchW, y + kSwatchH};
      const int ty = y + (kSwatchH - th + 1) / 2;
      out.missing = MissingMarker{kMissingColor, sw, {x + kSwatchW + kSwatchTextGap, ty, x + note_w, ty + th}};
      out.width = x + note_w;
    }
  }
  out.colorbar = bar;
  return out;
}

Rgb border_color(Rgb fill) { return darken(fill, 0.6); }

struct MapTransform {
  double scale = 1.0;
  double ox = 0.0;
  double oy = 0.0;
  Bounds b;

  PointD apply(Point p) const { return {ox + (p.x - b.min_x) * scale, oy + (p.y - b.min_y) * scale}; }
};

MapTransform fit(const Bounds& b, BBox area) {
  const double aw = area.width() - 2.0 * kMapPadding;
  const double ah = area.height() - 2.0 * kMapPadding;
  const double bw = b.max_x - b.min_x;
  const double bh = b.max_y - b.min_y;
  if (aw <= 0 || ah <= 0 || bw <= 0 || bh <= 0) {
    throw Error(ErrorKind::InvariantError, "no room left for the map after placing title and legend");
  }
  MapTransform t;
  t.b = b;
  t.scale = std::min(aw / bw, ah / bh);
  t.ox = area.x0 + (area.width() - bw * t.scale) / 2.0;
  t.oy = area.y0 + (area.height() - bh * t.scale) / 2.0;
  return t;
}

void draw_legend(Image& img, const LegendLayout& legend, const ColorScale& scale) {
  for (const auto& s : legend.swatches) {
    fill_rect(img, s.bbox, s.color);
    outline_rect(img, s.bbox, kSwatchOutline);
    draw_text(img, s.text_bbox.x0, s.text_bbox.y0, s.description, kLegendFont, kTextColor);
  }
  if (legend.colorbar) {
    const Colorbar& bar = *legend.colorbar;
    for (int i = 0; i < kColorbarLength; ++i) {
      const double t = bar.order == LegendOrder::Ascending ? i / 255.0 : 1.0 - i / 255.0;
      const Rgb c = color_at(scale, t);
      const BBox strip = bar.axis == Orientation::Horizontal
                             ? BBox{bar.bbox.x0 + i, bar.bbox.y0, bar.bbox.x0 + i + 1, bar.bbox.y1}
                             : BBox{bar.bbox.x0, bar.bbox.y0 + i, bar.bbox.x1, bar.bbox.y0 + i + 1};
      fill_rect(img, strip, c);
    }
    for (std::size_t i = 0; i < bar.labels.size(); ++i) {
      draw_text(img, bar.label_bboxes[i].x0, bar.label_bboxes[i].y0, bar.labels[i], kLegendFont, kTextColor);
    }
  }
  if (legend.missing) {
    fill_rect(img, legend.missing->swatch_bbox, kMissingColor);
    outline_rect(img, legend.missing->swatch_bbox, kSwatchOutline);
    draw_text(img, legend.missing->note_bbox.x0, legend.missing->note_bbox.y0, kMissingNote, kLegendFont,
              kTextColor);
  }
}

json bbox_json(BBox b) { return json::array({b.x0, b.y0, b.x1, b.y1}); }

BBox bbox_from(const json& j) {
  return {j.at(0).get<int>(), j.at(1).get<int>(), j.at(2).get<int>(), j.at(3).get<int>()};
}

}  // namespace

FontSpec title_font(int font_index) {
  switch (font_index) {
    case 1: return {2, true};
    case 2: return {3, false};
    default: return {2, false};
  }
}

Rgb class_color(const ColorScale& scale, int class_index, int k) {
  return color_at(scale, k > 1 ? static_cast<double>(class_index) / (k - 1) : 0.0);
}

RenderedMap render_map(const GeoModel& geo, const UnderlyingTable& table,
                       const std::optional<Classification>& classification, const MapStyle& style, Canvas canvas) {
  const bool discrete = style.legend_kind == LegendKind::Discrete;
  if (discrete != classification.has_value()) {
    throw Error(ErrorKind::MismatchedClassification,
                discrete ? "discrete legend requires a classification" : "continuous legend takes no classification");
  }
  for (const auto& region : geo.regions()) {
    if (!table.values.count(region.id)) {
      throw Error(ErrorKind::UnknownRegion, "table has no entry for region '" + region.id.value + "'");
    }
    if (classification && !classification->assignment.count(region.id)) {
      throw Error(ErrorKind::MismatchedClassification, "classification has no entry for '" + region.id.value + "'");
    }
  }

  const int W = canvas.width;
  const int H = canvas.height;
  Image img(W, H, style.background);
  LayoutManifest m;
  m.width = W;
  m.height = H;
  m.legend_kind = style.legend_kind;
  m.scale_id = style.scale.id;
  m.legend_position = style.legend_position;
  m.legend_orientation = style.legend_orientation;

  // Title band.
  FontSpec tf = title_font(style.title_font_index);
  while (tf.scale > 1 && text_width(table.title, tf) > W - 2 * kMargin) --tf.scale;
  const int tw = text_width(table.title, tf);
  const int th = text_height(tf);
  int content_top = kMargin;
  int content_bottom = H - kMargin;
  int tx = kMargin;
  int ty = kMargin;
  switch (style.title_position) {
    case TitlePosition::TopLeft: break;
    case TitlePosition::TopCenter: tx = (W - tw) / 2; break;
    case TitlePosition::TopRight: tx = W - kMargin - tw; break;
    case TitlePosition::BottomCenter:
      tx = (W - tw) / 2;
      ty = H - kMargin - th;
      break;
  }
  if (style.title_position == TitlePosition::BottomCenter) {
    content_bottom = ty - 10;
  } else {
    content_top = ty + th + 10;
  }
  m.title = {draw_text(img, std::max(tx, 0), ty, table.title, tf, kTextColor), table.title};

  // Legend, measured before the map is fitted into the remaining space.
  const bool with_missing = table.has_missing();
  const bool side = style.legend_position == LegendPosition::Left || style.legend_position == LegendPosition::Right;
  LegendLayout legend;
  double vmin = 0.0;
  double vmax = 0.0;
  std::vector<Rgb> class_colors;
  if (discrete) {
    const int k = classification->k;
    std::vector<LegendItem> items;
    for (int i = 0; i < k; ++i) class_colors.push_back(class_color(style.scale, i, k));
    for (int i = 0; i < k; ++i) {
      const int cls = style.legend_order == LegendOrder::Ascending ? i : k - 1 - i;
      items.push_back({class_colors[static_cast<std::size_t>(cls)],
                       classification->descriptions[static_cast<std::size_t>(cls)]});
    }
    if (with_missing) items.push_back({kMissingColor, kMissingNote});
    legend = layout_discrete(items, with_missing, style.legend_orientation,
                             side ? kSideLegendMaxWidth : W - 2 * kMargin);
  } else {
    vmin = table.observed_min();
    vmax = table.observed_max();
    const std::string lo = format_value(table.kind, vmin);
    const std::string hi = format_value(table.kind, vmax);
    const bool asc = style.legend_order == LegendOrder::Ascending;
    legend = layout_continuous(asc ? lo : hi, asc ? hi : lo, with_missing, style.legend_orientation,
                               style.legend_order);
  }

  BBox map_area{kMargin, content_top, W - kMargin, content_bottom};
  int lx = 0;
  int ly = 0;
  const int content_h = content_bottom - content_top;
  switch (style.legend_position) {
    case LegendPosition::Left:
      lx = kMargin;
      ly = content_top + (content_h - legend.height) / 2;
      map_area.x0 = lx + legend.width + kLegendMapGap;
      break;
    case LegendPosition::Right:
      lx = W - kMargin - legend.width;
      ly = content_top + (content_h - legend.height) / 2;
      map_area.x1 = lx - kLegendMapGap;
      break;
    case LegendPosition::Top:
      lx = (W - legend.width) / 2;
      ly = content_top;
      map_area.y0 = ly + legend.height + kLegendMapGap;
      break;
    case LegendPosition::Bottom:
      lx = (W - legend.width) / 2;
      ly = content_bottom - legend.height;
      map_area.y1 = ly - kLegendMapGap;
      break;
  }
  legend.translate(lx, ly);
  m.legend_bbox = {lx, ly, lx + legend.width, ly + legend.height};
  if (!m.legend_bbox.within(W, H) || !m.title.bbox.within(W, H)) {
    throw Error(ErrorKind::InvariantError, "legend or title does not fit on the canvas");
  }

  const MapTransform xf = fit(geo.bounds(), map_area);
  if (style.gridlines) {
    for (int x = map_area.x0; x < map_area.x1; x += kGridStep) draw_line(img, {x, map_area.y0}, {x, map_area.y1 - 1}, kGridColor);
    for (int y = map_area.y0; y < map_area.y1; y += kGridStep) draw_line(img, {map_area.x0, y}, {map_area.x1 - 1, y}, kGridColor);
  }

  std::vector<std::vector<std::vector<PointD>>> pixel_rings;
  for (const auto& region : geo.regions()) {
    const auto& value = table.values.at(region.id);
    RegionFill fill;
    if (!value) {
      fill.color = kMissingColor;
      fill.missing = true;
    } else if (discrete) {
      const auto cls = classification->assignment.at(region.id);
      if (!cls) throw Error(ErrorKind::MismatchedClassification, "region '" + region.id.value + "' has no class");
      fill.color = class_colors[static_cast<std::size_t>(*cls)];
    } else {
      const double t = vmax > vmin ? (*value - vmin) / (vmax - vmin) : 0.0;
      fill.color = color_at(style.scale, std::clamp(t, 0.0, 1.0));
    }
    const PointD lp = xf.apply(region.label_point);
    fill.probe = {static_cast<int>(std::floor(lp.x)), static_cast<int>(std::floor(lp.y))};
    auto& rings = pixel_rings.emplace_back();
    for (const Ring& ring : region.rings) {
      auto& out = rings.emplace_back();
      for (const Point& p : ring) out.push_back(xf.apply(p));
    }
    fill_polygon(img, rings, fill.color);
    m.region_fills[region.id] = fill;
  }
  for (std::size_t r = 0; r < geo.regions().size(); ++r) {
    const Rgb bc = border_color(m.region_fills.at(geo.regions()[r].id).color);
    for (const auto& ring : pixel_rings[r]) {
      for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        draw_line(img, {static_cast<int>(std::floor(ring[i].x)), static_cast<int>(std::floor(ring[i].y))},
                  {static_cast<int>(std::floor(ring[i + 1].x)), static_cast<int>(std::floor(ring[i + 1].y))}, bc);
      }
    }
  }
  // The 3x3 neighborhood of every probe must be flat so that median probing is exact.
  for (const auto& [id, fill] : m.region_fills) {
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int x = fill.probe.x + dx;
        const int y = fill.probe.y + dy;
        if (!img.in_bounds(x, y) || img.at(x, y) != fill.color) {
          throw Error(ErrorKind::InvariantError, "label point of '" + id.value + "' is too close to a border");
        }
      }
    }
  }

  draw_legend(img, legend, style.scale);
  m.swatches = legend.swatches;
  m.colorbar = legend.colorbar;
  m.missing_marker = legend.missing;
  return {std::move(img), std::move(m)};
}

json to_json(const LayoutManifest& m) {
  json j = {{"width", m.width},
            {"height", m.height},
            {"legend_kind", m.legend_kind},
            {"scale_id", m.scale_id},
            {"legend_position", m.legend_position},
            {"legend_orientation", m.legend_orientation},
            {"legend_bbox", bbox_json(m.legend_bbox)},
            {"title", {{"bbox", bbox_json(m.title.bbox)}, {"text", m.title.text}}}};
  json swatches = json::array();
  for (const auto& s : m.swatches) {
    swatches.push_back({{"bbox", bbox_json(s.bbox)},
                        {"color", to_hex(s.color)},
                        {"description", s.description},
                        {"text_bbox", bbox_json(s.text_bbox)}});
  }
  j["swatches"] = swatches;
  if (m.colorbar) {
    json boxes = json::array();
    for (const auto& b : m.colorbar->label_bboxes) boxes.push_back(bbox_json(b));
    j["colorbar"] = {{"bbox", bbox_json(m.colorbar->bbox)},
                     {"axis", m.colorbar->axis},
                     {"order", m.colorbar->order},
                     {"labels", m.colorbar->labels},
                     {"label_bboxes", boxes}};
  } else {
    j["colorbar"] = nullptr;
  }
  json fills = json::object();
  for (const auto& [id, f] : m.region_fills) {
    fills[id.value] = {{"color", to_hex(f.color)}, {"missing", f.missing}, {"probe", {f.probe.x, f.probe.y}}};
  }
  j["region_fills"] = fills;
  if (m.missing_marker) {
    j["missing_marker"] = {{"color", to_hex(m.missing_marker->color)},
                           {"swatch_bbox", bbox_json(m.missing_marker->swatch_bbox)},
                           {"note_bbox", bbox_json(m.missing_marker->note_bbox)}};
  } else {
    j["missing_marker"] = nullptr;
  }
  return j;
}

LayoutManifest manifest_from_json(const json& j) {
  LayoutManifest m;
  m.width = j.at("width").get<int>();
  m.height = j.at("height").get<int>();
  m.legend_kind = parse_enum(j.at("legend_kind").get<std::string>(),
                             std::vector<LegendKind>{LegendKind::Discrete, LegendKind::Continuous});
  m.scale_id = j.at("scale_id").get<std::string>();
  m.legend_position = parse_enum(j.at("legend_position").get<std::string>(),
                                 std::vector<LegendPosition>{LegendPosition::Left, LegendPosition::Right,
                                                             LegendPosition::Top, LegendPosition::Bottom});
  const std::vector<Orientation> orients{Orientation::Horizontal, Orientation::Vertical};
  m.legend_orientation = parse_enum(j.at("legend_orientation").get<std::string>(), orients);
  m.legend_bbox = bbox_from(j.at("legend_bbox"));
  m.title = {bbox_from(j.at("title").at("bbox")), j.at("title").at("text").get<std::string>()};
  for (const auto& s : j.at("swatches")) {
    m.swatches.push_back({bbox_from(s.at("bbox")), rgb_from_hex(s.at("color").get<std::string>()),
                          s.at("description").get<std::string>(), bbox_from(s.at("text_bbox"))});
  }
  if (!j.at("colorbar").is_null()) {
    const json& c = j.at("colorbar");
    Colorbar bar;
    bar.bbox = bbox_from(c.at("bbox"));
    bar.axis = parse_enum(c.at("axis").get<std::string>(), orients);
    bar.order = parse_enum(c.at("order").get<std::string>(),
                           std::vector<LegendOrder>{LegendOrder::Ascending, LegendOrder::Descending});
    bar.labels = c.at("labels").get<std::vector<std::string>>();
    for (const auto& b : c.at("label_bboxes")) bar.label_bboxes.push_back(bbox_from(b));
    m.colorbar = bar;
  }
  for (const auto& [id, f] : j.at("region_fills").items()) {
    m.region_fills[RegionId{id}] = {rgb_from_hex(f.at("color").get<std::string>()), f.at("missing").get<bool>(),
                                    {f.at("probe").at(0).get<int>(), f.at("probe").at(1).get<int>()}};
  }
  if (!j.at("missing_marker").is_null()) {
    const json& mm = j.at("missing_marker");
    m.missing_marker = MissingMarker{rgb_from_hex(mm.at("color").get<std::string>()), bbox_from(mm.at("swatch_bbox")),
                                     bbox_from(mm.at("note_bbox"))};
  }
  return m;
}

}  // namespace mapqa
