#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "resmap/raster.hpp"

namespace resmap::mapping {

using Fractions = std::array<double, kNumLevels>;

/// Per-pixel categorical distribution over residue levels.
struct DistributionMap {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint32_t samples = 0;          // M; 0 when loaded without a sample count
  std::vector<double> probabilities;  // level-major: [k * H * W + y * W + x]
  std::vector<double> entropy;        // nats, H x W

  std::size_t pixel_count() const { return std::size_t{width} * height; }
  double p(int level, std::size_t pixel) const { return probabilities[level * pixel_count() + pixel]; }

  /// Throws ShapeError on wrong sizes, probabilities outside [0, 1], rows
  /// not summing to 1 within `tolerance` or entropy outside [0, ln 5].
  void validate(double tolerance = 1e-6) const;
};

/// -sum p ln p with 0 ln 0 = 0.
double categorical_entropy(std::span<const double> p);

/// Empirical per-pixel class frequencies of M >= 1 maps of equal extent.
/// Throws std::invalid_argument for an empty set, ShapeError on extent
/// mismatch or invalid levels.
DistributionMap aggregate(std::span<const LevelMap> samples);

/// Most probable level per pixel; ties go to the lowest level.
LevelMap mode_map(const DistributionMap& dist);

/// Pixel share of every level (hard map) or mean probability per level.
Fractions coverage_fractions(const LevelMap& map);
Fractions coverage_fractions(const DistributionMap& dist);

/// Levels treated as an emergence risk: heavy and ponding.
inline constexpr std::array<Level, 2> kRiskLevels{Level::kHeavy, Level::kPonding};
inline constexpr double kDefaultRiskThreshold = 0.5;

/// 1 where P(heavy) + P(ponding) >= tau, else 0. Throws
/// std::invalid_argument unless tau lies in [0, 1].
std::vector<std::uint8_t> flag_risk(const DistributionMap& dist, double tau = kDefaultRiskThreshold);

/// Probabilities as a 5-channel f32 raster, entropy as a 1-channel one.
Raster probability_raster(const DistributionMap& dist, double resolution = 1.0);
Raster entropy_raster(const DistributionMap& dist, double resolution = 1.0);
/// Inverse of probability_raster. Entropy is recomputed; rows must sum to
/// 1 within f32 rounding (1e-5). Throws ShapeError otherwise.
DistributionMap distribution_from_raster(const Raster& probabilities, std::uint32_t samples = 0);

}  // namespace resmap::mapping
