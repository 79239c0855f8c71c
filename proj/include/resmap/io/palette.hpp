#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "resmap/raster.hpp"

namespace resmap::io {

struct Rgb {
  std::uint8_t r, g, b;
  bool operator==(const Rgb&) const = default;
};

/// Level colors, none -> ponding:
///   none      dark brown  ( 74,  44,  23)
///   low       tan         (210, 180, 140)
///   moderate  orange      (230, 140,  40)
///   heavy     red-brown   (150,  60,  40)
///   ponding   yellow      (245, 220,  50)
inline constexpr std::array<Rgb, kNumLevels> kLevelPalette{{
    {74, 44, 23},
    {210, 180, 140},
    {230, 140, 40},
    {150, 60, 40},
    {245, 220, 50},
}};

/// Binary PPM (P6) with one palette color per level.
std::vector<std::uint8_t> encode_level_ppm(const LevelMap& map);

/// Binary PGM (P5); values mapped linearly from [lo, hi] to [0, 255] and
/// clipped. Used for entropy maps (lo = 0, hi = ln 5).
std::vector<std::uint8_t> encode_gray_pgm(std::span<const float> values, std::uint32_t width,
                                          std::uint32_t height, float lo, float hi);

/// Binary PGM with 255 where mask is nonzero, else 0.
std::vector<std::uint8_t> encode_mask_pgm(std::span<const std::uint8_t> mask, std::uint32_t width,
                                          std::uint32_t height);

void write_level_ppm(const std::filesystem::path& path, const LevelMap& map);
void write_gray_pgm(const std::filesystem::path& path, std::span<const float> values,
                    std::uint32_t width, std::uint32_t height, float lo, float hi);
void write_mask_pgm(const std::filesystem::path& path, std::span<const std::uint8_t> mask,
                    std::uint32_t width, std::uint32_t height);

}  // namespace resmap::io
