#include "resmap/mapping/metrics.hpp"

#include <stdexcept>
#include <string>

#include "resmap/errors.hpp"
#include "resmap/mapping/distribution.hpp"

namespace resmap::mapping {

namespace {

struct ClassCounts {
  std::array<std::size_t, kNumLevels> intersection{};
  std::array<std::size_t, kNumLevels> uni{};
};

ClassCounts count_classes(const LevelMap& a, const LevelMap& b) {
  require_same_extent(a, b);
  ClassCounts c;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const int x = a.levels[i], y = b.levels[i];
    if (x >= kNumLevels || y >= kNumLevels) {
      throw ShapeError("level outside [0, 4] at pixel " + std::to_string(i));
    }
    if (x == y) {
      ++c.intersection[x];
      ++c.uni[x];
    } else {
      ++c.uni[x];
      ++c.uni[y];
    }
  }
  return c;
}

double mean_pair_distance(std::span<const LevelMap> a, std::span<const LevelMap> b) {
  double sum = 0.0;
  for (const LevelMap& x : a)
    for (const LevelMap& y : b) sum += segmentation_distance(x, y);
  return sum / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

}  // namespace

double iou(const LevelMap& pred, const LevelMap& truth, int k) {
  if (k < 0 || k >= kNumLevels) throw std::out_of_range("iou: class " + std::to_string(k));
  const ClassCounts c = count_classes(pred, truth);
  if (c.uni[k] == 0) return 1.0;
  return static_cast<double>(c.intersection[k]) / static_cast<double>(c.uni[k]);
}

double mean_present_iou(const LevelMap& a, const LevelMap& b) {
  const ClassCounts c = count_classes(a, b);
  double sum = 0.0;
  int present = 0;
  for (int k = 0; k < kNumLevels; ++k) {
    if (c.uni[k] == 0) continue;
    sum += static_cast<double>(c.intersection[k]) / static_cast<double>(c.uni[k]);
    ++present;
  }
  return present == 0 ? 1.0 : sum / present;
}

double segmentation_distance(const LevelMap& a, const LevelMap& b) {
  return 1.0 - mean_present_iou(a, b);
}

double ged(std::span<const LevelMap> a, std::span<const LevelMap> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ged: empty sample set");
  return 2.0 * mean_pair_distance(a, b) - mean_pair_distance(a, a) - mean_pair_distance(b, b);
}

io::Json MetricsReport::to_json() const {
  io::Json per_class = io::Json::object();
  for (int k = 0; k < kNumLevels; ++k) per_class[std::string(level_name(k))] = iou[k];
  return io::Json{{"accuracy", accuracy}, {"iou", per_class}, {"mean_iou", mean_iou},
                  {"ged", ged},           {"samples", samples}, {"tiles", tiles}};
}

MetricsReport evaluate(std::span<const TileEvaluation> tiles) {
  if (tiles.empty()) throw std::invalid_argument("evaluate: no tiles");
  MetricsReport report;
  report.tiles = static_cast<std::uint32_t>(tiles.size());
  report.samples = static_cast<std::uint32_t>(tiles.front().samples.size());
  ClassCounts pooled;
  std::size_t hits = 0, pixels = 0;
  double ged_sum = 0.0;
  for (const TileEvaluation& t : tiles) {
    const LevelMap pred = mode_map(aggregate(t.samples));
    const ClassCounts c = count_classes(pred, t.truth);
    for (int k = 0; k < kNumLevels; ++k) {
      pooled.intersection[k] += c.intersection[k];
      pooled.uni[k] += c.uni[k];
      hits += c.intersection[k];
    }
    pixels += pred.size();
    ged_sum += ged(t.samples, t.annotations);
  }
  report.accuracy = pixels == 0 ? 1.0 : static_cast<double>(hits) / static_cast<double>(pixels);
  double sum = 0.0;
  for (int k = 0; k < kNumLevels; ++k) {
    report.iou[k] = pooled.uni[k] == 0
                        ? 1.0
                        : static_cast<double>(pooled.intersection[k]) / static_cast<double>(pooled.uni[k]);
    sum += report.iou[k];
  }
  report.mean_iou = sum / kNumLevels;
  report.ged = ged_sum / static_cast<double>(tiles.size());
  return report;
}

}  // namespace resmap::mapping
