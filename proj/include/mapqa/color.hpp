#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace mapqa {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  auto operator<=>(const Rgb&) const = default;
};

std::string to_hex(Rgb c);
Rgb rgb_from_hex(std::string_view hex);
double distance(Rgb a, Rgb b);
// Multiplies every channel by f (used for region borders).
Rgb darken(Rgb c, double f);

struct ColorStop {
  double t = 0.0;
  Rgb color;
};

struct ColorScale {
  std::string id;
  std::vector<ColorStop> stops;
  bool inverted = false;
};

// Throws InvariantError unless stops are sorted, start at 0, end at 1, and
// number at least two.
void validate(const ColorScale& scale);

// Piecewise-linear per channel, evaluated at 1 - t for inverted scales,
// channels rounded half up.
Rgb color_at(const ColorScale& scale, double t);

ColorScale inverted(const ColorScale& scale);

// 16 base scales followed by their inversions (ids suffixed "_r").
const std::vector<ColorScale>& builtin_scales();
const ColorScale& builtin_scale(std::string_view id);

nlohmann::json to_json(const ColorScale& scale);
ColorScale scale_from_json(const nlohmann::json& j);

}  // namespace mapqa
