#include "resmap/io/palette.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "resmap/errors.hpp"
#include "resmap/io/fgrid.hpp"

namespace resmap::io {

namespace {

void append_header(std::vector<std::uint8_t>& out, const char* magic, std::uint32_t width,
                   std::uint32_t height) {
  const std::string header =
      std::string(magic) + "\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  out.insert(out.end(), header.begin(), header.end());
}

void require_pixels(std::size_t n, std::uint32_t width, std::uint32_t height) {
  if (n != std::size_t{width} * height) throw ShapeError("image buffer does not match extents");
}

}  // namespace

std::vector<std::uint8_t> encode_level_ppm(const LevelMap& map) {
  map.validate();
  std::vector<std::uint8_t> out;
  append_header(out, "P6", map.width, map.height);
  for (auto level : map.levels) {
    const Rgb& c = kLevelPalette[level];
    out.push_back(c.r);
    out.push_back(c.g);
    out.push_back(c.b);
  }
  return out;
}

std::vector<std::uint8_t> encode_gray_pgm(std::span<const float> values, std::uint32_t width,
                                          std::uint32_t height, float lo, float hi) {
  require_pixels(values.size(), width, height);
  std::vector<std::uint8_t> out;
  append_header(out, "P5", width, height);
  const float range = hi > lo ? hi - lo : 1.0f;
  for (float v : values) {
    const float t = std::clamp((v - lo) / range, 0.0f, 1.0f);
    out.push_back(static_cast<std::uint8_t>(std::lround(t * 255.0f)));
  }
  return out;
}

std::vector<std::uint8_t> encode_mask_pgm(std::span<const std::uint8_t> mask, std::uint32_t width,
                                          std::uint32_t height) {
  require_pixels(mask.size(), width, height);
  std::vector<std::uint8_t> out;
  append_header(out, "P5", width, height);
  for (auto m : mask) out.push_back(m ? 255 : 0);
  return out;
}

void write_level_ppm(const std::filesystem::path& path, const LevelMap& map) {
  write_bytes(path, encode_level_ppm(map));
}

void write_gray_pgm(const std::filesystem::path& path, std::span<const float> values,
                    std::uint32_t width, std::uint32_t height, float lo, float hi) {
  write_bytes(path, encode_gray_pgm(values, width, height, lo, hi));
}

void write_mask_pgm(const std::filesystem::path& path, std::span<const std::uint8_t> mask,
                    std::uint32_t width, std::uint32_t height) {
  write_bytes(path, encode_mask_pgm(mask, width, height));
}

}  // namespace resmap::io
