#include "resmap/raster.hpp"

#include <stdexcept>
#include <string>

#include "resmap/errors.hpp"

namespace resmap {

std::string_view level_name(int level) {
  static constexpr std::string_view kNames[kNumLevels] = {"none", "low", "moderate", "heavy",
                                                          "ponding"};
  if (level < 0 || level >= kNumLevels) {
    throw std::out_of_range("level " + std::to_string(level) + " outside [0, 4]");
  }
  return kNames[level];
}

Raster Raster::make_f32(std::uint32_t width, std::uint32_t height, std::uint32_t channels,
                        double resolution) {
  Raster r;
  r.width = width;
  r.height = height;
  r.channels = channels;
  r.dtype = Dtype::kF32;
  r.resolution = resolution;
  r.f32.assign(r.sample_count(), 0.0f);
  return r;
}

Raster Raster::make_u8(std::uint32_t width, std::uint32_t height, std::uint32_t channels,
                       double resolution) {
  Raster r;
  r.width = width;
  r.height = height;
  r.channels = channels;
  r.dtype = Dtype::kU8;
  r.resolution = resolution;
  r.u8.assign(r.sample_count(), 0);
  return r;
}

void Raster::validate() const {
  const std::size_t expected = sample_count();
  const bool ok = dtype == Dtype::kF32 ? (f32.size() == expected && u8.empty())
                                       : (u8.size() == expected && f32.empty());
  if (!ok) {
    throw ShapeError("raster payload does not match " + std::to_string(width) + "x" +
                     std::to_string(height) + "x" + std::to_string(channels));
  }
}

void LevelMap::validate() const {
  if (levels.size() != std::size_t{width} * height) {
    throw ShapeError("level map size does not match its extents");
  }
  for (auto v : levels) {
    if (v >= kNumLevels) {
      throw ShapeError("level value " + std::to_string(v) + " outside [0, 4]");
    }
  }
}

Raster to_raster(const LevelMap& map, double resolution) {
  Raster r = Raster::make_u8(map.width, map.height, 1, resolution);
  r.u8 = map.levels;
  return r;
}

LevelMap to_level_map(const Raster& raster) {
  if (raster.dtype != Dtype::kU8 || raster.channels != 1) {
    throw ShapeError("level map raster must be single-channel u8");
  }
  LevelMap map;
  map.width = raster.width;
  map.height = raster.height;
  map.levels = raster.u8;
  map.validate();
  return map;
}

void require_same_extent(const LevelMap& a, const LevelMap& b) {
  if (a.width != b.width || a.height != b.height) {
    throw ShapeError("level maps differ in extent: " + std::to_string(a.width) + "x" +
                     std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                     std::to_string(b.height));
  }
}

}  // namespace resmap
