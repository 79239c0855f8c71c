#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "resmap/io/json_util.hpp"
#include "resmap/raster.hpp"
#include "resmap/synth/annotate.hpp"
#include "resmap/synth/render.hpp"
#include "resmap/synth/scene.hpp"

namespace resmap::synth {

struct DatasetSpec {
  std::uint32_t n_tiles = 200;
  std::uint32_t tile_size = 64;
  SceneParams scene;  // size and seed are set per tile
  RenderParams render;
  std::vector<AnnotatorProfile> annotators{AnnotatorProfile{}};
  std::uint64_t seed = 1;

  io::Json params_json() const;
};

struct Tile {
  std::uint32_t id = 0;
  std::uint64_t seed = 0;
  Raster input;  // 5 channels f32: R, G, B, NIR, per-tile min-max height
  LevelMap truth;
  std::vector<LevelMap> annotations;  // one per annotator, in spec.annotators order
};

struct Dataset {
  DatasetSpec spec;
  std::vector<Tile> tiles;

  std::uint32_t n_annotators() const { return static_cast<std::uint32_t>(spec.annotators.size()); }
};

inline constexpr std::uint32_t kInputChannels = 5;

/// Seed of tile `index` of a dataset with root seed `seed`.
std::uint64_t tile_seed(std::uint64_t seed, std::uint32_t index);

SceneParams tile_scene_params(const DatasetSpec& spec, std::uint64_t seed);
FieldScene tile_scene(const DatasetSpec& spec, std::uint64_t seed);

/// Stacks a 4-channel RGBN raster and a heightmap (min-max normalized per
/// tile) into the 5-channel model input.
Raster stack_input(const Raster& rgbn, const Grid& heightmap);

Tile make_tile(const DatasetSpec& spec, std::uint32_t index);

/// Generates every tile in memory. Throws std::invalid_argument for
/// n_tiles == 0 or no annotators.
Dataset make_dataset(const DatasetSpec& spec);

/// Writes manifest.json plus one directory of FGRID files per tile.
void write_dataset(const std::filesystem::path& dir, const Dataset& dataset);
/// Reads a dataset written by write_dataset; accepts the directory or the
/// manifest path.
Dataset read_dataset(const std::filesystem::path& path);

/// Manifest file name inside a dataset directory.
inline constexpr const char* kDatasetManifest = "manifest.json";

void parse(const io::Json& j, DatasetSpec& out, std::string_view where);

/// Per-level pixel counts over all truth maps.
std::vector<std::uint64_t> truth_histogram(const Dataset& dataset);

}  // namespace resmap::synth
