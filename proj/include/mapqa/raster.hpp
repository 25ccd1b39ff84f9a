#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "mapqa/color.hpp"

namespace mapqa {

struct Pixel {
  int x = 0;
  int y = 0;

  auto operator<=>(const Pixel&) const = default;
};

// Half-open pixel rectangle [x0, x1) x [y0, y1).
struct BBox {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
  Pixel center() const { return {(x0 + x1) / 2, (y0 + y1) / 2}; }
  bool contains(Pixel p) const { return p.x >= x0 && p.x < x1 && p.y >= y0 && p.y < y1; }
  bool within(int w, int h) const { return x0 >= 0 && y0 >= 0 && x1 <= w && y1 <= h && x0 <= x1 && y0 <= y1; }

  auto operator<=>(const BBox&) const = default;
};

class Image {
 public:
  Image() = default;
  Image(int width, int height, Rgb fill = {255, 255, 255});

  int width() const { return width_; }
  int height() const { return height_; }
  bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  Rgb at(int x, int y) const;
  void set(int x, int y, Rgb c);

  const std::vector<std::uint8_t>& data() const { return data_; }

  bool operator==(const Image&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

void fill_rect(Image& img, BBox box, Rgb c);
void outline_rect(Image& img, BBox box, Rgb c);
void draw_line(Image& img, Pixel a, Pixel b, Rgb c);

struct PointD {
  double x = 0.0;
  double y = 0.0;
};

// Hard-edged even-odd fill; a pixel is covered when its center is inside.
void fill_polygon(Image& img, const std::vector<std::vector<PointD>>& rings, Rgb c);

// Bundled 5x7 bitmap font. `scale` multiplies glyph pixels; bold overstrikes
// one pixel to the right.
struct FontSpec {
  int scale = 1;
  bool bold = false;
};

int text_width(std::string_view s, FontSpec font);
int text_height(FontSpec font);
// Draws with the top-left corner at (x, y) and returns the ink box.
BBox draw_text(Image& img, int x, int y, std::string_view s, FontSpec font, Rgb c);

std::vector<std::uint8_t> encode_png(const Image& img);
void write_png(const Image& img, const std::filesystem::path& path);
Image read_png(const std::filesystem::path& path);

}  // namespace mapqa
