#include <doctest.h>

#include <cmath>

#include "../support.hpp"
#include "mapqa/color.hpp"
#include "mapqa/extract.hpp"
#include "mapqa/render.hpp"

using namespace mapqa;
using namespace mapqa::testing;

namespace {

const ColorScale kBlackWhite{"bw", {{0.0, {0, 0, 0}}, {1.0, {255, 255, 255}}}, false};
const ColorScale kBlackWhiteBlack{"bwb", {{0.0, {0, 0, 0}}, {0.5, {255, 255, 255}}, {1.0, {0, 0, 0}}}, false};

// A 256-strip bar drawn by hand, high end first when descending.
Image bar_image(const ColorScale& scale, Orientation axis, LegendOrder order, BBox* bar) {
  Image img(300, 300, {255, 255, 255});
  *bar = axis == Orientation::Horizontal ? BBox{20, 40, 276, 56} : BBox{40, 20, 56, 276};
  for (int j = 0; j < 256; ++j) {
    const double t = order == LegendOrder::Ascending ? j / 255.0 : 1.0 - j / 255.0;
    const BBox strip = axis == Orientation::Horizontal ? BBox{bar->x0 + j, bar->y0, bar->x0 + j + 1, bar->y1}
                                                       : BBox{bar->x0, bar->y0 + j, bar->x1, bar->y0 + j + 1};
    fill_rect(img, strip, color_at(scale, t));
  }
  return img;
}

ExtractedTable extract_oracle(const RenderedMap& m) {
  return extract_table(m.image, layout_from_manifest(m.manifest), standard_queries(us_geo()));
}

}  // namespace

TEST_CASE("hard gate") {
  const RecordQuery region{RecordKind::RegionValue, RegionId{"ME"}};
  CHECK(resolve_gate(region, LegendKind::Continuous) == Gate::Regression);
  CHECK(resolve_gate(region, LegendKind::Discrete) == Gate::Classification);
  for (RecordKind k : {RecordKind::LegendType, RecordKind::NSymbols, RecordKind::LegendOrder, RecordKind::HasMissing}) {
    for (LegendKind lk : {LegendKind::Discrete, LegendKind::Continuous}) {
      CHECK(resolve_gate(RecordQuery{k, std::nullopt}, lk) == Gate::Classification);
    }
  }
  const auto qs = standard_queries(us_geo());
  CHECK(qs.size() == 4 + us_geo().size());
  CHECK(qs.front().kind == RecordKind::LegendType);
}

TEST_CASE("swatch matching") {
  const std::vector<Rgb> rg{{255, 0, 0}, {0, 255, 0}};
  CHECK(match_swatch({250, 10, 10}, rg) == 0);
  CHECK(match_swatch({5, 240, 3}, rg) == 1);
  CHECK(error_kind([&] { match_swatch({128, 128, 0}, rg); }) == ErrorKind::AmbiguousMatch);
  CHECK(error_kind([] { match_swatch({100, 100, 100}, {{90, 100, 100}, {110, 100, 100}}); }) == ErrorKind::AmbiguousMatch);
  CHECK(error_kind([&] { match_swatch({0, 60, 255}, rg); }) == ErrorKind::NoMatch);
}

TEST_CASE("black to white bar inversion") {
  for (Orientation axis : {Orientation::Horizontal, Orientation::Vertical}) {
    for (LegendOrder order : {LegendOrder::Ascending, LegendOrder::Descending}) {
      BBox bar;
      const Image img = bar_image(kBlackWhite, axis, order, &bar);
      CHECK(std::abs(invert_colorbar(img, bar, axis, order, {128, 128, 128}) - 0.5) <= 1.0 / 255);
      CHECK(invert_colorbar(img, bar, axis, order, {0, 0, 0}) == 0.0);
      CHECK(invert_colorbar(img, bar, axis, order, {255, 255, 255}) == 1.0);
    }
  }
}

TEST_CASE("non-injective bar is ambiguous") {
  BBox bar;
  const Image img = bar_image(kBlackWhiteBlack, Orientation::Horizontal, LegendOrder::Ascending, &bar);
  CHECK(error_kind([&] { invert_colorbar(img, bar, Orientation::Horizontal, LegendOrder::Ascending, {128, 128, 128}); }) ==
        ErrorKind::AmbiguousColor);
}

TEST_CASE("probe color is a 3x3 median") {
  Image img(5, 5, {10, 10, 10});
  img.set(2, 2, {200, 0, 0});
  img.set(1, 1, {0, 200, 0});
  CHECK(probe_color(img, {2, 2}) == Rgb{10, 10, 10});
  CHECK(probe_color(img, {0, 0}) == Rgb{10, 10, 10});
}

TEST_CASE("legend order from labels") {
  CHECK(infer_legend_order({"1-3,708", "3,709-9,349"}) == LegendOrder::Ascending);
  CHECK(infer_legend_order({"50.1%-90.0%", "1.0%-50.0%"}) == LegendOrder::Descending);
  CHECK(infer_legend_order({"only"}) == std::nullopt);
}

TEST_CASE("discrete round trip over generated maps") {
  int maps = 0;
  for (std::uint64_t seed = 0; maps < 60; ++seed) {
    const DrawnMap d = draw_map(seed, LegendKind::Discrete);
    const RenderedMap m = render_map(us_geo(), d.table, d.classification, d.style);
    const ExtractedTable t = extract_oracle(m);
    ++maps;
    CHECK(t.legend_type == LegendKind::Discrete);
    CHECK(t.n_symbols == d.classification->k);
    CHECK(t.legend_order == d.style.legend_order);
    CHECK(t.has_missing == d.table.has_missing());
    for (const auto& [id, gold] : d.classification->assignment) {
      const ExtractedValue& v = t.region_values.at(id);
      REQUIRE_FALSE(v.error);
      REQUIRE(v.gate == Gate::Classification);
      REQUIRE(v.missing == !gold.has_value());
      REQUIRE(v.class_index == gold);
    }
  }
}

TEST_CASE("continuous round trip over 1000 regions") {
  std::size_t regions = 0;
  for (std::uint64_t seed = 0; regions < 1000; ++seed) {
    const DrawnMap d = draw_map(seed, LegendKind::Continuous);
    const RenderedMap m = render_map(us_geo(), d.table, std::nullopt, d.style);
    const ExtractedTable t = extract_oracle(m);
    CHECK(t.n_symbols == std::nullopt);
    CHECK(t.legend_order == d.style.legend_order);
    const double vmin = d.table.observed_min();
    const double vmax = d.table.observed_max();
    for (const auto& [id, value] : d.table.values) {
      const ExtractedValue& v = t.region_values.at(id);
      REQUIRE_FALSE(v.error);
      REQUIRE(v.missing == !value.has_value());
      if (!value) continue;
      ++regions;
      REQUIRE(v.gate == Gate::Regression);
      const double gold = (*value - vmin) / (vmax - vmin);
      // Tie tolerance: the stretch of bar samples that share the fill color.
      const Rgb fill = color_at(d.style.scale, gold);
      int lo = 256, hi = -1;
      for (int j = 0; j < 256; ++j) {
        if (color_at(d.style.scale, j / 255.0) == fill) {
          lo = std::min(lo, j);
          hi = std::max(hi, j);
        }
      }
      const double tie = hi >= lo ? (hi - lo) / 255.0 : 0.0;
      REQUIRE(*v.relative_value >= 0.0);
      REQUIRE(*v.relative_value <= 1.0);
      REQUIRE(std::abs(*v.relative_value - gold) <= 1.0 / 255 + tie);
    }
  }
}

TEST_CASE("missing regions are flagged") {
  DrawnMap d = draw_map(5, LegendKind::Discrete);
  for (auto& [id, v] : d.table.values) {
    if (!v) v = d.table.observed_min();
  }
  d.table.values[RegionId{"OH"}] = std::nullopt;
  d.table.values[RegionId{"TX"}] = std::nullopt;
  d.classification = classify(d.table, d.classification->scheme, d.classification->k);
  const ExtractedTable t = extract_oracle(render_map(us_geo(), d.table, d.classification, d.style));
  CHECK(t.has_missing);
  std::set<RegionId> missing;
  for (const auto& [id, v] : t.region_values) {
    if (v.missing) missing.insert(id);
  }
  CHECK(missing == std::set<RegionId>{RegionId{"OH"}, RegionId{"TX"}});
}

TEST_CASE("query protocol") {
  const DrawnMap d = draw_map(8, LegendKind::Discrete);
  const RenderedMap m = render_map(us_geo(), d.table, d.classification, d.style);
  auto qs = standard_queries(us_geo());
  std::swap(qs[0], qs[1]);
  CHECK(error_kind([&] { extract_table(m.image, layout_from_manifest(m.manifest), qs); }) == ErrorKind::InvalidQuery);
  CHECK(error_kind([&] { extract_table(m.image, layout_from_manifest(m.manifest), {}); }) == ErrorKind::InvalidQuery);
}

TEST_CASE("unreadable regions become missing with an error note") {
  const DrawnMap d = draw_map(9, LegendKind::Discrete);
  RenderedMap m = render_map(us_geo(), d.table, d.classification, d.style);
  const Pixel p = m.manifest.region_fills.at(RegionId{"KS"}).probe;
  fill_rect(m.image, {p.x - 2, p.y - 2, p.x + 3, p.y + 3}, {1, 254, 1});
  const ExtractedTable t = extract_oracle(m);
  const ExtractedValue& v = t.region_values.at(RegionId{"KS"});
  CHECK(v.missing);
  REQUIRE(v.error);
  CHECK(v.error->find("NoMatch") != std::string::npos);
}

TEST_CASE("extracted table json round trip") {
  const DrawnMap d = draw_map(12, LegendKind::Continuous);
  ExtractedTable t = extract_oracle(render_map(us_geo(), d.table, std::nullopt, d.style));
  t.map_id = "map_000012";
  const ExtractedTable back = extracted_table_from_json(to_json(t));
  CHECK(to_json(back) == to_json(t));
  CHECK(back.region_values.size() == t.region_values.size());
}
