#include "resmap/mapping/distribution.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "resmap/errors.hpp"

namespace resmap::mapping {

namespace {

void fill_entropy(DistributionMap& dist) {
  const std::size_t n = dist.pixel_count();
  dist.entropy.assign(n, 0.0);
  std::array<double, kNumLevels> row{};
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = 0; k < kNumLevels; ++k) row[k] = dist.p(k, i);
    dist.entropy[i] = categorical_entropy(row);
  }
}

}  // namespace

void DistributionMap::validate(double tolerance) const {
  const std::size_t n = pixel_count();
  if (probabilities.size() != n * kNumLevels || entropy.size() != n) {
    throw ShapeError("distribution map: buffers do not match " + std::to_string(width) + "x" +
                     std::to_string(height));
  }
  const double max_entropy = std::log(static_cast<double>(kNumLevels));
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int k = 0; k < kNumLevels; ++k) {
      const double v = p(k, i);
      if (!(v >= 0.0 && v <= 1.0 + tolerance)) {
        throw ShapeError("distribution map: probability " + std::to_string(v) + " at pixel " +
                         std::to_string(i));
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > tolerance) {
      throw ShapeError("distribution map: probabilities at pixel " + std::to_string(i) +
                       " sum to " + std::to_string(sum));
    }
    if (!(entropy[i] >= -tolerance && entropy[i] <= max_entropy + tolerance)) {
      throw ShapeError("distribution map: entropy out of range at pixel " + std::to_string(i));
    }
  }
}

double categorical_entropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

DistributionMap aggregate(std::span<const LevelMap> samples) {
  if (samples.empty()) throw std::invalid_argument("aggregate: no samples");
  const LevelMap& first = samples.front();
  DistributionMap dist;
  dist.width = first.width;
  dist.height = first.height;
  dist.samples = static_cast<std::uint32_t>(samples.size());
  const std::size_t n = dist.pixel_count();
  std::vector<std::uint32_t> counts(n * kNumLevels, 0);
  for (const LevelMap& s : samples) {
    require_same_extent(first, s);
    s.validate();
    for (std::size_t i = 0; i < n; ++i) ++counts[s.levels[i] * n + i];
  }
  dist.probabilities.resize(counts.size());
  const double m = static_cast<double>(samples.size());
  for (std::size_t i = 0; i < counts.size(); ++i) dist.probabilities[i] = counts[i] / m;
  fill_entropy(dist);
  return dist;
}

LevelMap mode_map(const DistributionMap& dist) {
  LevelMap out(dist.width, dist.height);
  for (std::size_t i = 0; i < dist.pixel_count(); ++i) {
    int best = 0;
    for (int k = 1; k < kNumLevels; ++k) {
      if (dist.p(k, i) > dist.p(best, i)) best = k;
    }
    out.levels[i] = static_cast<std::uint8_t>(best);
  }
  return out;
}

Fractions coverage_fractions(const LevelMap& map) {
  map.validate();
  Fractions out{};
  if (map.size() == 0) return out;
  std::array<std::size_t, kNumLevels> counts{};
  for (auto v : map.levels) ++counts[v];
  for (int k = 0; k < kNumLevels; ++k) out[k] = static_cast<double>(counts[k]) / map.size();
  return out;
}

Fractions coverage_fractions(const DistributionMap& dist) {
  Fractions out{};
  const std::size_t n = dist.pixel_count();
  if (n == 0) return out;
  for (int k = 0; k < kNumLevels; ++k) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += dist.p(k, i);
    out[k] = sum / static_cast<double>(n);
  }
  return out;
}

std::vector<std::uint8_t> flag_risk(const DistributionMap& dist, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw std::invalid_argument("flag_risk: tau must lie in [0, 1], got " + std::to_string(tau));
  }
  std::vector<std::uint8_t> mask(dist.pixel_count(), 0);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    double risk = 0.0;
    for (Level l : kRiskLevels) risk += dist.p(static_cast<int>(l), i);
    mask[i] = risk >= tau ? 1 : 0;
  }
  return mask;
}

Raster probability_raster(const DistributionMap& dist, double resolution) {
  Raster r = Raster::make_f32(dist.width, dist.height, kNumLevels, resolution);
  const std::size_t n = dist.pixel_count();
  for (std::size_t i = 0; i < n; ++i)
    for (int k = 0; k < kNumLevels; ++k) r.f32[i * kNumLevels + k] = static_cast<float>(dist.p(k, i));
  return r;
}

Raster entropy_raster(const DistributionMap& dist, double resolution) {
  Raster r = Raster::make_f32(dist.width, dist.height, 1, resolution);
  for (std::size_t i = 0; i < dist.pixel_count(); ++i) r.f32[i] = static_cast<float>(dist.entropy[i]);
  return r;
}

DistributionMap distribution_from_raster(const Raster& probabilities, std::uint32_t samples) {
  probabilities.validate();
  if (probabilities.channels != kNumLevels || probabilities.dtype != Dtype::kF32) {
    throw ShapeError("distribution raster must be 5-channel f32, got " +
                     std::to_string(probabilities.channels) + " channels");
  }
  DistributionMap dist;
  dist.width = probabilities.width;
  dist.height = probabilities.height;
  dist.samples = samples;
  const std::size_t n = dist.pixel_count();
  dist.probabilities.resize(n * kNumLevels);
  for (std::size_t i = 0; i < n; ++i)
    for (int k = 0; k < kNumLevels; ++k) dist.probabilities[k * n + i] = probabilities.f32[i * kNumLevels + k];
  fill_entropy(dist);
  dist.validate(1e-5);
  return dist;
}

}  // namespace resmap::mapping
