#include "mapqa/color.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "mapqa/errors.hpp"

namespace mapqa {

using nlohmann::json;

std::string to_hex(Rgb c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
  return buf;
}

Rgb rgb_from_hex(std::string_view hex) {
  if (hex.size() != 7 || hex[0] != '#') {
    throw Error(ErrorKind::ParseError, "bad color '" + std::string(hex) + "'");
  }
  auto channel = [&](std::size_t pos) {
    const std::string part(hex.substr(pos, 2));
    char* end = nullptr;
    const long v = std::strtol(part.c_str(), &end, 16);
    if (end != part.c_str() + 2) throw Error(ErrorKind::ParseError, "bad color '" + std::string(hex) + "'");
    return static_cast<std::uint8_t>(v);
  };
  return {channel(1), channel(3), channel(5)};
}

double distance(Rgb a, Rgb b) {
  const double dr = double(a.r) - double(b.r);
  const double dg = double(a.g) - double(b.g);
  const double db = double(a.b) - double(b.b);
  return std::sqrt(dr * dr + dg * dg + db * db);
}

Rgb darken(Rgb c, double f) {
  auto ch = [f](std::uint8_t v) { return static_cast<std::uint8_t>(std::floor(v * f + 0.5)); };
  return {ch(c.r), ch(c.g), ch(c.b)};
}

void validate(const ColorScale& scale) {
  if (scale.stops.size() < 2) throw Error(ErrorKind::InvariantError, "scale '" + scale.id + "' needs 2 stops");
  if (scale.stops.front().t != 0.0 || scale.stops.back().t != 1.0) {
    throw Error(ErrorKind::InvariantError, "scale '" + scale.id + "' must span t = 0..1");
  }
  for (std::size_t i = 1; i < scale.stops.size(); ++i) {
    if (!(scale.stops[i - 1].t < scale.stops[i].t)) {
      throw Error(ErrorKind::InvariantError, "scale '" + scale.id + "' stops are not sorted");
    }
  }
}

Rgb color_at(const ColorScale& scale, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw Error(ErrorKind::OutOfRange, "color position " + std::to_string(t) + " outside [0, 1]");
  }
  if (scale.inverted) t = 1.0 - t;
  const auto& stops = scale.stops;
  std::size_t hi = 1;
  while (hi + 1 < stops.size() && stops[hi].t < t) ++hi;
  const ColorStop& a = stops[hi - 1];
  const ColorStop& b = stops[hi];
  const double f = (t - a.t) / (b.t - a.t);
  auto lerp = [f](std::uint8_t x, std::uint8_t y) {
    const double v = double(x) + f * (double(y) - double(x));
    return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
  };
  return {lerp(a.color.r, b.color.r), lerp(a.color.g, b.color.g), lerp(a.color.b, b.color.b)};
}

ColorScale inverted(const ColorScale& scale) {
  ColorScale out = scale;
  out.inverted = !scale.inverted;
  out.id = scale.id + "_r";
  return out;
}

namespace {

ColorScale make_scale(std::string id, std::initializer_list<Rgb> colors) {
  ColorScale s;
  s.id = std::move(id);
  const double n = static_cast<double>(colors.size() - 1);
  int i = 0;
  for (const Rgb& c : colors) {
    s.stops.push_back({i == static_cast<int>(n) ? 1.0 : i / n, c});
    ++i;
  }
  return s;
}

std::vector<ColorScale> build_scales() {
  std::vector<ColorScale> base = {
      make_scale("blues", {{247, 251, 255}, {190, 215, 238}, {107, 174, 214}, {33, 113, 181}, {8, 48, 107}}),
      make_scale("greens", {{247, 252, 245}, {192, 230, 184}, {116, 196, 118}, {35, 139, 69}, {0, 68, 27}}),
      make_scale("reds", {{255, 245, 240}, {252, 187, 161}, {251, 106, 74}, {203, 24, 29}, {103, 0, 13}}),
      make_scale("oranges", {{255, 245, 235}, {253, 208, 162}, {253, 141, 60}, {217, 72, 1}, {127, 39, 4}}),
      make_scale("purples", {{252, 251, 253}, {198, 196, 226}, {158, 154, 200}, {106, 81, 163}, {63, 0, 125}}),
      make_scale("viridis", {{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}),
      make_scale("plasma", {{13, 8, 135}, {126, 3, 168}, {204, 71, 120}, {248, 149, 64}, {240, 249, 33}}),
      make_scale("inferno", {{0, 0, 4}, {87, 16, 110}, {188, 55, 84}, {249, 142, 9}, {252, 255, 164}}),
      make_scale("cividis", {{0, 34, 78}, {65, 77, 107}, {124, 123, 120}, {187, 175, 113}, {255, 234, 70}}),
      make_scale("ylorrd", {{255, 255, 204}, {254, 217, 118}, {253, 141, 60}, {227, 26, 28}, {128, 0, 38}}),
      make_scale("ylgnbu", {{255, 255, 217}, {199, 233, 180}, {65, 182, 196}, {34, 94, 168}, {8, 29, 88}}),
      make_scale("bupu", {{247, 252, 253}, {185, 205, 229}, {140, 150, 198}, {136, 65, 157}, {77, 0, 75}}),
      make_scale("rdpu", {{255, 247, 243}, {252, 197, 192}, {247, 104, 161}, {174, 1, 126}, {73, 0, 106}}),
      make_scale("turbo", {{48, 18, 59}, {70, 134, 251}, {27, 229, 181}, {251, 185, 56}, {122, 4, 3}}),
      make_scale("rdbu", {{103, 0, 31}, {214, 96, 77}, {247, 247, 247}, {67, 147, 195}, {5, 48, 97}}),
      make_scale("piyg", {{142, 1, 82}, {222, 119, 174}, {247, 247, 247}, {127, 188, 65}, {39, 100, 25}}),
  };
  std::vector<ColorScale> all = base;
  for (const ColorScale& s : base) all.push_back(inverted(s));
  for (const ColorScale& s : all) validate(s);
  return all;
}

}  // namespace

const std::vector<ColorScale>& builtin_scales() {
  static const std::vector<ColorScale> scales = build_scales();
  return scales;
}

const ColorScale& builtin_scale(std::string_view id) {
  for (const ColorScale& s : builtin_scales()) {
    if (s.id == id) return s;
  }
  throw Error(ErrorKind::ConfigError, "unknown color scale '" + std::string(id) + "'");
}

json to_json(const ColorScale& scale) {
  json stops = json::array();
  for (const ColorStop& s : scale.stops) stops.push_back({s.t, to_hex(s.color)});
  return {{"id", scale.id}, {"stops", stops}, {"inverted", scale.inverted}};
}

ColorScale scale_from_json(const json& j) {
  ColorScale s;
  s.id = j.at("id").get<std::string>();
  for (const json& stop : j.at("stops")) {
    s.stops.push_back({stop.at(0).get<double>(), rgb_from_hex(stop.at(1).get<std::string>())});
  }
  s.inverted = j.at("inverted").get<bool>();
  validate(s);
  return s;
}

}  // namespace mapqa
