#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "resmap/rng.hpp"
#include "resmap/synth/scene.hpp"

namespace resmap::synth {

ResidueMaps gen_residue_fraction(const ResidueInputs& in, const SceneParams& params) {
  const Grid& soil = in.soil_quality;
  if (in.wetness.width != soil.width || in.wetness.height != soil.height ||
      in.slope.width != soil.width || in.slope.height != soil.height ||
      in.management.size() != soil.size() ||
      (in.noise && (in.noise->width != soil.width || in.noise->height != soil.height))) {
    throw std::invalid_argument("residue inputs do not share extents");
  }
  const ResidueWeights& w = params.weights;
  ResidueMaps out{Grid(soil.width, soil.height),
                  std::vector<std::uint8_t>(soil.size(), 0)};
  for (std::uint32_t y = 0; y < soil.height; ++y) {
    for (std::uint32_t x = 0; x < soil.width; ++x) {
      const std::size_t i = std::size_t{y} * soil.width + x;
      const Management m = in.management[i];
      double r = w.management * management_factor(m, x, params.management.stripe_width) +
                 w.soil * soil.values[i] + w.wetness * in.wetness.values[i] -
                 w.slope * in.slope.values[i];
      if (in.noise) r += params.noise_amplitude * in.noise->values[i];
      r = std::clamp(r, 0.0, 1.0);
      std::uint8_t layers = r > 0.0 ? 1 : 0;
      if (m == Management::kNoTill && in.wetness.values[i] > params.ponding_threshold) {
        // Multi-layer buildup implies no soil is visible.
        layers = 2;
        r = 1.0;
      }
      out.residue_fraction.values[i] = static_cast<float>(r);
      out.layer_count[i] = layers;
    }
  }
  return out;
}

FieldScene generate_scene(const SceneParams& params) {
  if (params.size < kMinSceneSize) {
    throw std::invalid_argument("scene size " + std::to_string(params.size) + " is below " +
                                std::to_string(kMinSceneSize));
  }
  const Rng root(params.seed);
  FieldScene scene;
  scene.width = scene.height = params.size;
  scene.resolution = params.resolution;
  scene.heightmap =
      gen_heightmap(params.size, params.roughness, root.split(1).key(), params.relief);
  scene.soil_quality = gen_smooth_field(params.size, params.soil_correlation, root.split(2).key());
  scene.management = gen_management(params.size, params.management, root.split(3).key());
  scene.wetness = normalize_min_max(
      box_blur(wetness_index(scene.heightmap, params.resolution), params.terrain_smoothing));
  const Grid slope = normalize_min_max(
      box_blur(slope_tangent(scene.heightmap, params.resolution), params.terrain_smoothing));

  Grid noise = gen_smooth_field(params.size, params.soil_correlation / 2.0, root.split(4).key());
  for (auto& v : noise.values) v = 2.0f * (v - 0.5f);

  ResidueMaps maps = gen_residue_fraction(
      ResidueInputs{scene.soil_quality, scene.wetness, slope, scene.management, &noise}, params);
  scene.residue_fraction = std::move(maps.residue_fraction);
  scene.layer_count = std::move(maps.layer_count);
  return scene;
}

Level level_from_visibility(double s, int layers, double shift) {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw std::invalid_argument("soil-visible fraction " + std::to_string(s) +
                                " outside [0, 1]");
  }
  if (s == 1.0) return Level::kNone;
  if (s == 0.0) return layers >= 2 ? Level::kPonding : Level::kHeavy;
  if (s >= 0.75 + shift) return Level::kLow;
  if (s >= 0.50 + shift) return Level::kModerate;
  return Level::kHeavy;
}

VisibilityMap visibility(const FieldScene& scene) {
  VisibilityMap vis;
  vis.width = scene.width;
  vis.height = scene.height;
  vis.soil_visible.resize(scene.residue_fraction.size());
  for (std::size_t i = 0; i < vis.soil_visible.size(); ++i)
    vis.soil_visible[i] = 1.0f - scene.residue_fraction.values[i];
  vis.layers = scene.layer_count;
  return vis;
}

LevelMap levels_from_visibility(const VisibilityMap& vis, double shift) {
  LevelMap out(vis.width, vis.height);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.levels[i] = static_cast<std::uint8_t>(
        level_from_visibility(vis.soil_visible[i], vis.layers[i], shift));
  }
  return out;
}

LevelMap truth_levels(const FieldScene& scene) { return levels_from_visibility(visibility(scene)); }

}  // namespace resmap::synth
