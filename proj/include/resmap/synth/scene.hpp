#pragma once

#include <cstdint>
#include <vector>

#include "resmap/raster.hpp"

namespace resmap::synth {

/// Scalar field on a width x height grid, row-major.
struct Grid {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<float> values;

  Grid() = default;
  Grid(std::uint32_t w, std::uint32_t h, float fill = 0.0f)
      : width(w), height(h), values(std::size_t{w} * h, fill) {}

  std::size_t size() const { return values.size(); }
  float& at(std::size_t y, std::size_t x) { return values[y * width + x]; }
  float at(std::size_t y, std::size_t x) const { return values[y * width + x]; }
};

enum class Management : std::uint8_t { kTill = 0, kNoTill = 1, kStrip = 2 };

struct ManagementPattern {
  enum class Kind : std::uint8_t {
    kUniform,    // every pixel uses `uniform`
    kStripes,    // whole tile strip-tilled
    kPatchwork,  // square parcels with random till / no-till / strip
  };
  Kind kind = Kind::kPatchwork;
  Management uniform = Management::kNoTill;
  std::uint32_t stripe_width = 8;  // pixels per strip band
  std::uint32_t patch_size = 32;   // parcel edge in pixels
};

/// Weights of the residue-fraction model.
struct ResidueWeights {
  double management = 1.0;
  double soil = 0.3;
  double wetness = 0.35;
  double slope = 0.5;
};

struct SceneParams {
  std::uint32_t size = 64;
  double resolution = 0.5;          // meters per pixel
  double relief = 3.0;              // meters between lowest and highest point
  double roughness = 0.7;           // fBm Hurst exponent; 0 yields a planar ramp
  double soil_correlation = 16.0;   // pixels
  ManagementPattern management;
  ResidueWeights weights;
  double noise_amplitude = 0.15;
  double ponding_threshold = 0.68;  // on min-max normalized wetness
  std::uint32_t terrain_smoothing = 3;  // box radius applied to wetness and slope, pixels
  std::uint64_t seed = 1;
};

/// Synthetic ground truth for one tile. All maps share extents.
struct FieldScene {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  double resolution = 0.5;
  Grid heightmap;                       // meters
  Grid soil_quality;                    // [0, 1]
  std::vector<Management> management;
  Grid wetness;                         // min-max normalized wetness index, [0, 1]
  Grid residue_fraction;                // [0, 1]
  std::vector<std::uint8_t> layer_count;
};

/// Smallest heightmap edge accepted by the generators.
inline constexpr std::uint32_t kMinSceneSize = 16;

/// fBm surface by diamond-square, normalized to [0, 1] and scaled by
/// `relief` meters. roughness <= 0 yields a planar ramp descending from the
/// top row to the bottom row. Throws std::invalid_argument for size < 16.
Grid gen_heightmap(std::uint32_t size, double roughness, std::uint64_t seed, double relief = 1.0);

/// D8 receiver of each cell (index into the grid), or -1 for cells without
/// a strictly lower neighbour. The steepest drop per unit distance wins;
/// ties keep the first neighbour in row-major order of the 3x3 window.
std::vector<std::int64_t> d8_receivers(const Grid& heightmap);

/// Number of upslope cells draining through each cell (excluding itself).
std::vector<std::uint32_t> d8_accumulation(const Grid& heightmap);

/// tan(slope) from central differences (one-sided at the border).
Grid slope_tangent(const Grid& heightmap, double cell_size);

/// ln((1 + upslope cells) / (tan(slope) + 1e-3)).
Grid wetness_index(const Grid& heightmap, double cell_size);

/// Rescales to [0, 1]; a constant grid maps to zeros.
Grid normalize_min_max(const Grid& grid);

/// Mean over a (2r+1) x (2r+1) window clipped at the border.
Grid box_blur(const Grid& grid, std::uint32_t radius);

/// Smooth random field in [0, 1] with the given correlation length.
Grid gen_smooth_field(std::uint32_t size, double correlation_length, std::uint64_t seed);

std::vector<Management> gen_management(std::uint32_t size, const ManagementPattern& pattern,
                                       std::uint64_t seed);

/// Management factor of one pixel; strip tillage alternates till and
/// no-till bands every `stripe_width` columns.
double management_factor(Management m, std::uint32_t x, std::uint32_t stripe_width);

struct ResidueInputs {
  const Grid& soil_quality;
  const Grid& wetness;       // normalized [0, 1]
  const Grid& slope;         // normalized [0, 1]
  const std::vector<Management>& management;
  const Grid* noise = nullptr;  // zero-mean field, scaled by noise_amplitude
};

struct ResidueMaps {
  Grid residue_fraction;
  std::vector<std::uint8_t> layer_count;
};

/// r = clamp01(w_m * mgmt + w_s * soil + w_w * wetness - w_sl * slope + noise).
/// Pixels that are no-till and wetter than the ponding threshold carry two
/// layers and full cover; other pixels carry one layer if r > 0, else none.
ResidueMaps gen_residue_fraction(const ResidueInputs& inputs, const SceneParams& params);

FieldScene generate_scene(const SceneParams& params);

/// Residue level from soil-visible fraction s = 1 - r:
///   s == 1 -> none; [0.75, 1) -> low; [0.50, 0.75) -> moderate;
///   (0, 0.50) -> heavy; s == 0 -> ponding with >= 2 layers, else heavy.
/// `shift` moves the two interior thresholds (annotator bias).
/// Throws std::invalid_argument for s outside [0, 1].
Level level_from_visibility(double soil_visible, int layers, double shift = 0.0);

/// Soil-visible fraction and layer count per pixel, the inputs of
/// level_from_visibility.
struct VisibilityMap {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<float> soil_visible;
  std::vector<std::uint8_t> layers;
};

VisibilityMap visibility(const FieldScene& scene);
LevelMap levels_from_visibility(const VisibilityMap& vis, double shift = 0.0);
LevelMap truth_levels(const FieldScene& scene);

}  // namespace resmap::synth
