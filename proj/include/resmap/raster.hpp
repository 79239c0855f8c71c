#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace resmap {

inline constexpr int kNumLevels = 5;

/// Residue density level taxonomy, ordered by increasing cover.
enum class Level : std::uint8_t {
  kNone = 0,
  kLow = 1,
  kModerate = 2,
  kHeavy = 3,
  kPonding = 4,
};

/// "none", "low", "moderate", "heavy", "ponding"; throws std::out_of_range.
std::string_view level_name(int level);

enum class Dtype : std::uint8_t { kF32 = 0, kU8 = 1 };

/// Multi-channel 2-D grid. Samples are stored channel-last, row-major:
/// index = (y * width + x) * channels + c. Only the vector matching `dtype`
/// is populated.
struct Raster {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint32_t channels = 0;
  Dtype dtype = Dtype::kF32;
  double resolution = 1.0;  // meters per pixel
  std::vector<float> f32;
  std::vector<std::uint8_t> u8;

  static Raster make_f32(std::uint32_t width, std::uint32_t height, std::uint32_t channels,
                         double resolution = 1.0);
  static Raster make_u8(std::uint32_t width, std::uint32_t height, std::uint32_t channels,
                        double resolution = 1.0);

  std::size_t pixel_count() const { return std::size_t{width} * height; }
  std::size_t sample_count() const { return pixel_count() * channels; }
  std::size_t index(std::size_t y, std::size_t x, std::size_t c) const {
    return (y * width + x) * channels + c;
  }
  float& at(std::size_t y, std::size_t x, std::size_t c) { return f32[index(y, x, c)]; }
  float at(std::size_t y, std::size_t x, std::size_t c) const { return f32[index(y, x, c)]; }

  /// Throws ShapeError if the populated payload does not match the header.
  void validate() const;

  bool operator==(const Raster&) const = default;
};

/// Per-pixel residue level in [0, 4], row-major.
struct LevelMap {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::uint8_t> levels;

  LevelMap() = default;
  LevelMap(std::uint32_t w, std::uint32_t h, std::uint8_t fill = 0)
      : width(w), height(h), levels(std::size_t{w} * h, fill) {}

  std::size_t size() const { return levels.size(); }
  std::uint8_t& at(std::size_t y, std::size_t x) { return levels[y * width + x]; }
  std::uint8_t at(std::size_t y, std::size_t x) const { return levels[y * width + x]; }

  /// Throws ShapeError on size mismatch or values outside [0, 4].
  void validate() const;

  bool operator==(const LevelMap&) const = default;
};

/// Single-channel u8 raster view of a level map, and back.
Raster to_raster(const LevelMap& map, double resolution = 1.0);
LevelMap to_level_map(const Raster& raster);

void require_same_extent(const LevelMap& a, const LevelMap& b);

}  // namespace resmap
