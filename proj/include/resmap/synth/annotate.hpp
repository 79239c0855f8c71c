#pragma once

#include <cstdint>
#include <vector>

#include "resmap/raster.hpp"
#include "resmap/synth/scene.hpp"

namespace resmap::synth {

/// One simulated human labeller.
struct AnnotatorProfile {
  double threshold_shift = 0.0;  // added to the 0.50 / 0.75 soil-visible thresholds
  std::uint32_t boundary_jitter = 0;  // max dilation/erosion radius per region, pixels
  double confusion_rate = 0.0;   // flip probability near class boundaries
  std::uint64_t seed = 0;

  bool is_identity() const {
    return threshold_shift == 0.0 && boundary_jitter == 0 && confusion_rate == 0.0;
  }
};

/// Pixels within this Chebyshev distance of another class are eligible for
/// confusion flips.
inline constexpr std::uint32_t kConfusionBand = 2;

/// Simulates an annotator:
///  1. re-threshold the soil-visible map with `threshold_shift` (requires
///     `vis` when the shift is nonzero),
///  2. dilate or erode each 4-connected region by its own random radius in
///     [-boundary_jitter, boundary_jitter],
///  3. flip pixels near a class boundary to an adjacent level with
///     probability `confusion_rate`.
/// Deterministic in profile.seed.
LevelMap annotate(const LevelMap& truth, const AnnotatorProfile& profile,
                  const VisibilityMap* vis = nullptr);

/// True if some pixel within Chebyshev `radius` of (y, x) has another level.
bool near_boundary(const LevelMap& map, std::uint32_t y, std::uint32_t x, std::uint32_t radius);

/// A panel of plausible annotators: small threshold disagreement, one-pixel
/// boundary jitter and a low flip rate.
std::vector<AnnotatorProfile> default_annotators(std::size_t count, std::uint64_t seed);

/// Same annotator, re-seeded for one tile.
AnnotatorProfile for_tile(const AnnotatorProfile& profile, std::uint64_t tile_seed);

}  // namespace resmap::synth
