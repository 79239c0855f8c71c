#include "resmap/synth/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "resmap/errors.hpp"
#include "resmap/io/fgrid.hpp"
#include "resmap/rng.hpp"
#include "resmap/synth/params_json.hpp"

namespace resmap::synth {

using io::Json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kFormat = "resmap-dataset";
constexpr int kVersion = 1;

std::string tile_dir(std::uint32_t id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "tiles/%05u", id);
  return buf;
}

std::string annotation_name(std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "annotator_%02zu.fgrid", k);
  return buf;
}

LevelMap read_levels(const fs::path& path) {
  try {
    return to_level_map(io::read_fgrid(path));
  } catch (const std::invalid_argument& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace

Json DatasetSpec::params_json() const {
  Json ann = Json::array();
  for (const auto& a : annotators) ann.push_back(to_json(a));
  return Json{{"n_tiles", n_tiles},       {"tile_size", tile_size},
              {"scene", to_json(scene)},  {"render", to_json(render)},
              {"annotators", ann},        {"seed", seed}};
}

void parse(const Json& j, DatasetSpec& out, std::string_view where) {
  io::require_object(j, {"n_tiles", "tile_size", "scene", "render", "annotators", "seed"}, where);
  const std::string w(where);
  io::read_field(j, "n_tiles", out.n_tiles, where);
  io::read_field(j, "tile_size", out.tile_size, where);
  io::read_field(j, "seed", out.seed, where);
  if (const auto it = j.find("scene"); it != j.end()) parse(*it, out.scene, w + ".scene");
  if (const auto it = j.find("render"); it != j.end()) parse(*it, out.render, w + ".render");
  if (const auto it = j.find("annotators"); it != j.end()) {
    if (!it->is_array() || it->empty()) {
      throw DataError(w + ".annotators: expected a non-empty array");
    }
    out.annotators.clear();
    for (std::size_t k = 0; k < it->size(); ++k) {
      AnnotatorProfile p;
      parse((*it)[k], p, w + ".annotators[" + std::to_string(k) + "]");
      out.annotators.push_back(p);
    }
  }
  if (out.n_tiles == 0) throw DataError(w + ".n_tiles: must be at least 1");
  if (out.tile_size < kMinSceneSize) {
    throw DataError(w + ".tile_size: must be at least " + std::to_string(kMinSceneSize));
  }
}

std::uint64_t tile_seed(std::uint64_t seed, std::uint32_t index) {
  return Rng(seed).split(index).key();
}

SceneParams tile_scene_params(const DatasetSpec& spec, std::uint64_t seed) {
  SceneParams p = spec.scene;
  p.size = spec.tile_size;
  p.seed = seed;
  return p;
}

FieldScene tile_scene(const DatasetSpec& spec, std::uint64_t seed) {
  return generate_scene(tile_scene_params(spec, seed));
}

Raster stack_input(const Raster& rgbn, const Grid& heightmap) {
  if (rgbn.channels != 4 || rgbn.dtype != Dtype::kF32) {
    throw std::invalid_argument("stack_input expects a 4-channel f32 raster");
  }
  if (rgbn.width != heightmap.width || rgbn.height != heightmap.height) {
    throw std::invalid_argument("image and heightmap extents differ");
  }
  const Grid height = normalize_min_max(heightmap);
  Raster out = Raster::make_f32(rgbn.width, rgbn.height, kInputChannels, rgbn.resolution);
  for (std::uint32_t y = 0; y < rgbn.height; ++y) {
    for (std::uint32_t x = 0; x < rgbn.width; ++x) {
      for (std::uint32_t c = 0; c < 4; ++c) out.at(y, x, c) = rgbn.at(y, x, c);
      out.at(y, x, 4) = height.at(y, x);
    }
  }
  return out;
}

Tile make_tile(const DatasetSpec& spec, std::uint32_t index) {
  Tile tile;
  tile.id = index;
  tile.seed = tile_seed(spec.seed, index);
  const FieldScene scene = tile_scene(spec, tile.seed);
  const Raster rgbn = render_rgbn(scene, spec.render, Rng(tile.seed).split(7).key());
  tile.input = stack_input(rgbn, scene.heightmap);
  const VisibilityMap vis = visibility(scene);
  tile.truth = levels_from_visibility(vis);
  tile.annotations.reserve(spec.annotators.size());
  for (const auto& profile : spec.annotators) {
    tile.annotations.push_back(annotate(tile.truth, for_tile(profile, tile.seed), &vis));
  }
  return tile;
}

Dataset make_dataset(const DatasetSpec& spec) {
  if (spec.n_tiles == 0) throw std::invalid_argument("dataset needs at least one tile");
  if (spec.annotators.empty()) throw std::invalid_argument("dataset needs at least one annotator");
  Dataset ds{spec, {}};
  ds.tiles.reserve(spec.n_tiles);
  for (std::uint32_t i = 0; i < spec.n_tiles; ++i) ds.tiles.push_back(make_tile(spec, i));
  return ds;
}

void write_dataset(const fs::path& dir, const Dataset& dataset) {
  const Json params = dataset.spec.params_json();
  const std::string hash = io::params_hash(params);
  Json tiles = Json::array();
  for (const Tile& t : dataset.tiles) {
    const std::string sub = tile_dir(t.id);
    io::write_fgrid(dir / sub / "input.fgrid", t.input);
    io::write_fgrid(dir / sub / "truth.fgrid", to_raster(t.truth, t.input.resolution));
    Json ann = Json::array();
    for (std::size_t k = 0; k < t.annotations.size(); ++k) {
      const std::string rel = sub + "/" + annotation_name(k);
      io::write_fgrid(dir / rel, to_raster(t.annotations[k], t.input.resolution));
      ann.push_back(rel);
    }
    tiles.push_back(Json{{"id", t.id},
                         {"seed", t.seed},
                         {"params_hash", hash},
                         {"input", sub + "/input.fgrid"},
                         {"truth", sub + "/truth.fgrid"},
                         {"annotations", ann}});
  }
  io::write_json(dir / kDatasetManifest,
                 Json{{"format", kFormat},
                      {"version", kVersion},
                      {"tile_size", dataset.spec.tile_size},
                      {"resolution", dataset.spec.scene.resolution},
                      {"n_annotators", dataset.n_annotators()},
                      {"params", params},
                      {"params_hash", hash},
                      {"tiles", tiles}});
}

Dataset read_dataset(const fs::path& path) {
  const fs::path manifest = fs::is_directory(path) ? path / kDatasetManifest : path;
  const fs::path root = manifest.parent_path();
  const Json j = io::read_json(manifest);
  const std::string where = manifest.string();
  if (!j.is_object() || j.value("format", "") != kFormat) {
    throw DataError(where + ": not a dataset manifest");
  }
  if (j.value("version", 0) != kVersion) throw DataError(where + ": unsupported version");
  Dataset ds;
  if (!j.contains("params")) throw DataError(where + ": missing params");
  parse(j["params"], ds.spec, where + ":params");
  if (!j.contains("tiles") || !j["tiles"].is_array()) throw DataError(where + ": missing tiles");
  for (const Json& t : j["tiles"]) {
    Tile tile;
    try {
      tile.id = t.at("id").get<std::uint32_t>();
      tile.seed = t.at("seed").get<std::uint64_t>();
      tile.input = io::read_fgrid(root / t.at("input").get<std::string>());
      tile.truth = read_levels(root / t.at("truth").get<std::string>());
      for (const Json& a : t.at("annotations")) {
        tile.annotations.push_back(read_levels(root / a.get<std::string>()));
      }
    } catch (const Json::exception& e) {
      throw DataError(where + ": malformed tile entry: " + e.what());
    }
    if (tile.input.channels != kInputChannels || tile.input.dtype != Dtype::kF32) {
      throw DataError(where + ": tile " + std::to_string(tile.id) + " input is not 5-channel f32");
    }
    if (tile.truth.width != tile.input.width || tile.truth.height != tile.input.height) {
      throw DataError(where + ": tile " + std::to_string(tile.id) + " label extent mismatch");
    }
    if (tile.annotations.size() != ds.spec.annotators.size()) {
      throw DataError(where + ": tile " + std::to_string(tile.id) + " annotation count mismatch");
    }
    for (const LevelMap& a : tile.annotations) {
      if (a.width != tile.truth.width || a.height != tile.truth.height) {
        throw DataError(where + ": tile " + std::to_string(tile.id) + " label extent mismatch");
      }
    }
    ds.tiles.push_back(std::move(tile));
  }
  if (ds.tiles.empty()) throw DataError(where + ": dataset has no tiles");
  ds.spec.n_tiles = static_cast<std::uint32_t>(ds.tiles.size());
  return ds;
}

std::vector<std::uint64_t> truth_histogram(const Dataset& dataset) {
  std::vector<std::uint64_t> counts(kNumLevels, 0);
  for (const Tile& t : dataset.tiles)
    for (std::uint8_t v : t.truth.levels) ++counts[v];
  return counts;
}

}  // namespace resmap::synth
