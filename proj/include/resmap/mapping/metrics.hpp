#pragma once

#include <array>
#include <span>
#include <vector>

#include "resmap/io/json_util.hpp"
#include "resmap/raster.hpp"

namespace resmap::mapping {

/// |pred & truth| / |pred | truth| for the class-k masks; 1 when both are
/// empty. Throws ShapeError on extent mismatch.
double iou(const LevelMap& pred, const LevelMap& truth, int k);

/// Mean IoU over the classes present in either map (0 classes gives 1).
double mean_present_iou(const LevelMap& a, const LevelMap& b);

/// 1 - mean_present_iou.
double segmentation_distance(const LevelMap& a, const LevelMap& b);

/// Squared generalized energy distance,
///   2 E d(a, b) - E d(a, a') - E d(b, b'),
/// with every expectation taken over all ordered pairs, self-pairs
/// included (d(a, a) = 0). A singleton set therefore has zero spread and
/// ged(A, A) = 0. Throws std::invalid_argument if either set is empty.
double ged(std::span<const LevelMap> a, std::span<const LevelMap> b);

struct MetricsReport {
  double accuracy = 0.0;
  std::array<double, kNumLevels> iou{};
  double mean_iou = 0.0;  // over the five classes
  double ged = 0.0;       // mean over tiles
  std::uint32_t samples = 0;
  std::uint32_t tiles = 0;

  io::Json to_json() const;
};

/// One tile to score: model samples, the annotator set and a reference map.
struct TileEvaluation {
  std::vector<LevelMap> samples;
  std::vector<LevelMap> annotations;
  LevelMap truth;
};

/// Accuracy and IoU of the per-pixel mode of the samples against `truth`,
/// pooled over all pixels of all tiles; GED between samples and
/// annotations averaged over tiles. Throws std::invalid_argument when
/// there are no tiles.
MetricsReport evaluate(std::span<const TileEvaluation> tiles);

}  // namespace resmap::mapping
