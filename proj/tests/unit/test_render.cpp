#include <doctest.h>

#include <algorithm>
#include <set>

#include "../support.hpp"
#include "mapqa/color.hpp"
#include "mapqa/datagen.hpp"
#include "mapqa/extract.hpp"
#include "mapqa/raster.hpp"
#include "mapqa/render.hpp"
#include "mapqa/rng.hpp"
#include "mapqa/style.hpp"

using namespace mapqa;
using namespace mapqa::testing;

namespace {

const ColorScale kBlackWhite{"bw", {{0.0, {0, 0, 0}}, {1.0, {255, 255, 255}}}, false};

UnderlyingTable toy_table(std::vector<std::optional<double>> v) {
  UnderlyingTable t;
  t.kind = DataKind::Absolute;
  t.range = canonical_range(t.kind);
  t.title = "The Number of toys in the USA";
  const char* ids[] = {"A", "B", "C", "D"};
  for (std::size_t i = 0; i < v.size(); ++i) t.values[RegionId{ids[i]}] = v[i];
  return t;
}

MapStyle plain_style(LegendKind kind) {
  MapStyle s;
  s.scale = builtin_scale("blues");
  s.legend_kind = kind;
  return s;
}

}  // namespace

TEST_CASE("color interpolation") {
  CHECK(color_at(kBlackWhite, 0.5) == Rgb{128, 128, 128});
  CHECK(color_at(inverted(kBlackWhite), 0.25) == color_at(kBlackWhite, 0.75));
  CHECK(color_at(inverted(kBlackWhite), 0.25) == Rgb{191, 191, 191});
  for (const ColorScale& s : builtin_scales()) {
    CHECK(color_at(s, 0.0) == (s.inverted ? s.stops.back().color : s.stops.front().color));
    CHECK(color_at(s, 1.0) == (s.inverted ? s.stops.front().color : s.stops.back().color));
  }
  CHECK(error_kind([] { color_at(kBlackWhite, 1.5); }) == ErrorKind::OutOfRange);
  CHECK(error_kind([] { validate(ColorScale{"x", {{0.0, {}}}, false}); }) == ErrorKind::InvariantError);
  CHECK(to_hex(Rgb{255, 8, 171}) == "#ff08ab");
  CHECK(rgb_from_hex("#ff08ab") == Rgb{255, 8, 171});
}

TEST_CASE("builtin scales are readable by the extractor") {
  const auto& scales = builtin_scales();
  CHECK(scales.size() == 32);
  std::set<std::string> ids;
  for (const ColorScale& s : scales) {
    ids.insert(s.id);
    validate(s);
    // Class colors are unambiguous at the matching threshold. Missing regions
    // are recognized by exact color, so no scale color may equal the gray.
    for (int t = 0; t < kColorbarLength; ++t) CHECK(color_at(s, t / 255.0) != kMissingColor);
    for (int k = 2; k <= 5; ++k) {
      for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) CHECK(distance(class_color(s, i, k), class_color(s, j, k)) > 2 * kDefaultTau);
      }
    }
    CHECK(scale_from_json(to_json(s)).stops.size() == s.stops.size());
  }
  CHECK(ids.size() == 32);
  CHECK(error_kind([] { builtin_scale("nope"); }) == ErrorKind::ConfigError);
}

TEST_CASE("style selection honours the split partition") {
  const auto& scales = builtin_scales();
  ScalePartition p;
  for (int i = 0; i < 12; ++i) p[i < 8 ? Split::Train : i < 10 ? Split::Valid : Split::Test].push_back(scales[static_cast<std::size_t>(i)].id);
  validate_partition(p, false);
  const StyleConfig cfg = varied_style_config(p);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const MapStyle s = choose_style(cfg, Split::Test, seed);
    CHECK(std::find(p[Split::Test].begin(), p[Split::Test].end(), s.scale.id) != p[Split::Test].end());
  }

  ScalePartition overlapping = p;
  overlapping[Split::Test].push_back(p[Split::Train].front());
  CHECK(error_kind([&] { validate_partition(overlapping, false); }) == ErrorKind::ConfigError);
  ScalePartition unknown = p;
  unknown[Split::Valid].push_back("mauve");
  CHECK(error_kind([&] { validate_partition(unknown, false); }) == ErrorKind::ConfigError);

  ScalePartition empty = p;
  empty[Split::Test].clear();
  CHECK(error_kind([&] { choose_style(varied_style_config(empty), Split::Test, 1); }) == ErrorKind::EmptySplitScaleSet);
}

TEST_CASE("1000 draws cover every style axis") {
  const StyleConfig cfg = varied_style_config();
  std::set<LegendKind> kinds;
  std::set<LegendPosition> positions;
  std::set<Orientation> orientations;
  std::set<LegendOrder> orders;
  std::set<TitlePosition> titles;
  std::set<int> fonts;
  std::set<bool> grids;
  std::set<Rgb> backgrounds;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const MapStyle s = choose_style(cfg, Split::Train, seed);
    kinds.insert(s.legend_kind);
    positions.insert(s.legend_position);
    orientations.insert(s.legend_orientation);
    orders.insert(s.legend_order);
    titles.insert(s.title_position);
    fonts.insert(s.title_font_index);
    grids.insert(s.gridlines);
    backgrounds.insert(s.background);
  }
  CHECK(kinds.size() == cfg.legend_kinds.size());
  CHECK(positions.size() == cfg.positions.size());
  CHECK(orientations.size() == cfg.orientations.size());
  CHECK(orders.size() == cfg.orders.size());
  CHECK(titles.size() == cfg.title_positions.size());
  CHECK(fonts.size() == cfg.font_indices.size());
  CHECK(grids.size() == 2);
  CHECK(backgrounds.size() == cfg.backgrounds.size());
  CHECK(cfg.positions.size() == 4);
}

TEST_CASE("uniform mode fixes the style") {
  const StyleConfig cfg = uniform_style_config();
  const MapStyle first = choose_style(cfg, Split::Train, 0);
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const MapStyle s = choose_style(cfg, kAllSplits[seed % 3], seed);
    CHECK(s == first);
  }
}

TEST_CASE("style json round trip") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const MapStyle s = choose_style(varied_style_config(), Split::Valid, seed);
    CHECK(style_from_json(to_json(s)) == s);
  }
  CHECK(partition_from_json(partition_to_json(default_scale_partition())) == default_scale_partition());
  CHECK(error_kind([] { parse_enum<Split>("holdout", kAllSplits); }) == ErrorKind::ParseError);
}

TEST_CASE("toy map with two classes") {
  const GeoModel geo = toy_geo();
  const auto table = toy_table({10, 20, 100});
  const auto c = classify(table, ClassScheme::EqualInterval, 2);
  REQUIRE(c.assignment.at(rid("A")) == 0);
  REQUIRE(c.assignment.at(rid("C")) == 1);
  const RenderedMap m = render_map(geo, table, c, plain_style(LegendKind::Discrete));
  const auto& fills = m.manifest.region_fills;
  CHECK(m.manifest.swatches.size() == 2);
  CHECK(fills.at(rid("A")).color == fills.at(rid("B")).color);
  CHECK(fills.at(rid("A")).color != fills.at(rid("C")).color);
  CHECK_FALSE(m.manifest.colorbar);
  CHECK_FALSE(m.manifest.missing_marker);
  CHECK(m.manifest.title.text == table.title);
}

TEST_CASE("continuous endpoints and missing regions") {
  const GeoModel geo = toy_geo();
  const auto table = toy_table({10, std::nullopt, 100});
  const RenderedMap m = render_map(geo, table, std::nullopt, plain_style(LegendKind::Continuous));
  const auto& fills = m.manifest.region_fills;
  CHECK(fills.at(rid("A")).color == color_at(builtin_scale("blues"), 0.0));
  CHECK(fills.at(rid("C")).color == color_at(builtin_scale("blues"), 1.0));
  CHECK(fills.at(rid("B")).missing);
  CHECK(fills.at(rid("B")).color == kMissingColor);
  REQUIRE(m.manifest.missing_marker);
  REQUIRE(m.manifest.colorbar);
  CHECK(m.manifest.colorbar->labels.size() == 2);
  CHECK(m.manifest.swatches.empty());
}

TEST_CASE("classification must match the legend kind") {
  const GeoModel geo = toy_geo();
  const auto table = toy_table({10, 20, 100});
  const auto c = classify(table, ClassScheme::EqualInterval, 2);
  CHECK(error_kind([&] { render_map(geo, table, std::nullopt, plain_style(LegendKind::Discrete)); }) ==
        ErrorKind::MismatchedClassification);
  CHECK(error_kind([&] { render_map(geo, table, c, plain_style(LegendKind::Continuous)); }) ==
        ErrorKind::MismatchedClassification);
}

TEST_CASE("pixel probe over 100 renders") {
  const GeoModel& geo = us_geo();
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const DrawnMap d = draw_map(seed);
    const RenderedMap m = render_map(geo, d.table, d.classification, d.style);
    const LayoutManifest& man = m.manifest;
    REQUIRE(man.region_fills.size() == geo.size());
    REQUIRE(man.legend_bbox.within(man.width, man.height));
    REQUIRE(man.title.bbox.within(man.width, man.height));
    const double vmin = d.table.observed_min();
    const double vmax = d.table.observed_max();
    for (const auto& [id, fill] : man.region_fills) {
      // Every pixel of the 3x3 probe neighborhood carries the fill.
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) REQUIRE(m.image.at(fill.probe.x + dx, fill.probe.y + dy) == fill.color);
      }
      const auto v = d.table.values.at(id);
      REQUIRE(fill.missing == !v.has_value());
      if (!v) {
        REQUIRE(fill.color == kMissingColor);
      } else if (d.classification) {
        // The fill is the color of the swatch whose text describes the class.
        const int cls = *d.classification->assignment.at(id);
        const auto& desc = d.classification->descriptions[static_cast<std::size_t>(cls)];
        const auto sw = std::find_if(man.swatches.begin(), man.swatches.end(),
                                     [&](const Swatch& s) { return s.description == desc; });
        REQUIRE(sw != man.swatches.end());
        REQUIRE(sw->color == fill.color);
      } else {
        REQUIRE(fill.color == color_at(d.style.scale, (*v - vmin) / (vmax - vmin)));
      }
    }
    if (d.classification) {
      REQUIRE(static_cast<int>(man.swatches.size()) == d.classification->k);
      for (const Swatch& s : man.swatches) {
        REQUIRE(s.bbox.within(man.width, man.height));
        const Pixel c = s.bbox.center();
        REQUIRE(m.image.at(c.x, c.y) == s.color);
      }
      // Ascending legends list classes from low to high.
      auto descs = d.classification->descriptions;
      if (d.style.legend_order == LegendOrder::Descending) std::reverse(descs.begin(), descs.end());
      for (std::size_t i = 0; i < descs.size(); ++i) REQUIRE(man.swatches[i].description == descs[i]);
    }
    REQUIRE(man.missing_marker.has_value() == d.table.has_missing());
  }
}

TEST_CASE("rendering is deterministic") {
  const DrawnMap d = draw_map(11);
  const RenderedMap a = render_map(us_geo(), d.table, d.classification, d.style);
  const RenderedMap b = render_map(us_geo(), d.table, d.classification, d.style);
  CHECK(encode_png(a.image) == encode_png(b.image));
  CHECK(to_json(a.manifest) == to_json(b.manifest));
}

TEST_CASE("manifest json round trip") {
  for (std::uint64_t seed : {3u, 4u, 5u, 6u}) {
    const DrawnMap d = draw_map(seed);
    const auto man = render_map(us_geo(), d.table, d.classification, d.style).manifest;
    CHECK(to_json(manifest_from_json(to_json(man))) == to_json(man));
  }
}

TEST_CASE("raster primitives") {
  Image img(6, 4, {255, 255, 255});
  fill_polygon(img, {{{0, 0}, {2, 0}, {2, 2}, {0, 2}, {0, 0}}}, {1, 2, 3});
  int filled = 0;
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 6; ++x) filled += img.at(x, y) == Rgb{1, 2, 3};
  }
  CHECK(filled == 4);
  CHECK(img.at(1, 1) == Rgb{1, 2, 3});
  CHECK(img.at(2, 2) == Rgb{255, 255, 255});

  const FontSpec f{2, false};
  CHECK(text_width("AB", f) == 2 * 6 * 2 - 2);
  CHECK(text_height(f) == 14);
  Image canvas(100, 30);
  const BBox ink = draw_text(canvas, 5, 5, "Hi", f, {0, 0, 0});
  CHECK(ink.within(100, 30));
  CHECK(ink.width() <= text_width("Hi", f));

  TempDir tmp("raster");
  Image pic(7, 5, {9, 8, 7});
  pic.set(3, 2, {200, 100, 0});
  write_png(pic, tmp / "p.png");
  CHECK(read_png(tmp / "p.png") == pic);
  CHECK(error_kind([&] { read_png(tmp / "absent.png"); }) == ErrorKind::IoError);
}
