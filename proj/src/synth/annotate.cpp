#include "resmap/synth/annotate.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "resmap/rng.hpp"

namespace resmap::synth {

namespace {

/// 4-connected components of equal level, numbered in raster order.
std::vector<std::uint32_t> label_components(const LevelMap& map, std::uint32_t& count) {
  constexpr auto kUnset = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> label(map.size(), kUnset);
  std::vector<std::size_t> stack;
  count = 0;
  for (std::size_t start = 0; start < map.size(); ++start) {
    if (label[start] != kUnset) continue;
    const std::uint8_t level = map.levels[start];
    label[start] = count;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      const std::size_t y = i / map.width, x = i % map.width;
      auto visit = [&](std::size_t j) {
        if (label[j] == kUnset && map.levels[j] == level) {
          label[j] = count;
          stack.push_back(j);
        }
      };
      if (y > 0) visit(i - map.width);
      if (y + 1 < map.height) visit(i + map.width);
      if (x > 0) visit(i - 1);
      if (x + 1 < map.width) visit(i + 1);
    }
    ++count;
  }
  return label;
}

LevelMap jitter_regions(const LevelMap& base, std::uint32_t radius, Rng rng) {
  std::uint32_t count = 0;
  const auto label = label_components(base, count);
  std::vector<int> region_radius(count);
  const auto span = static_cast<std::uint64_t>(2 * radius + 1);
  for (auto& r : region_radius) r = static_cast<int>(rng.below(span)) - static_cast<int>(radius);

  LevelMap out = base;
  const auto w = static_cast<int>(base.width), h = static_cast<int>(base.height);
  const int reach = static_cast<int>(radius);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const std::uint8_t own = base.levels[i];
      const int own_radius = region_radius[label[i]];
      int claim_dist = std::numeric_limits<int>::max();
      std::uint8_t claim_level = own;
      int erode_dist = std::numeric_limits<int>::max();
      std::uint8_t erode_level = own;
      for (int dy = -reach; dy <= reach; ++dy) {
        const int ny = y + dy;
        if (ny < 0 || ny >= h) continue;
        for (int dx = -reach; dx <= reach; ++dx) {
          const int nx = x + dx;
          if (nx < 0 || nx >= w) continue;
          const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
          if (base.levels[j] == own) continue;
          const int dist = std::max(std::abs(dy), std::abs(dx));
          // A dilating neighbour region reaching this pixel.
          if (region_radius[label[j]] >= dist && dist < claim_dist) {
            claim_dist = dist;
            claim_level = base.levels[j];
          }
          // This pixel's own region eroding away from its border.
          if (own_radius < 0 && -own_radius >= dist && dist < erode_dist) {
            erode_dist = dist;
            erode_level = base.levels[j];
          }
        }
      }
      if (claim_level != own) {
        out.levels[i] = claim_level;
      } else if (erode_level != own) {
        out.levels[i] = erode_level;
      }
    }
  }
  return out;
}

}  // namespace

bool near_boundary(const LevelMap& map, std::uint32_t y, std::uint32_t x, std::uint32_t radius) {
  const std::uint8_t own = map.at(y, x);
  const std::uint32_t y0 = y >= radius ? y - radius : 0;
  const std::uint32_t x0 = x >= radius ? x - radius : 0;
  const std::uint32_t y1 = std::min(y + radius, map.height - 1);
  const std::uint32_t x1 = std::min(x + radius, map.width - 1);
  for (std::uint32_t yy = y0; yy <= y1; ++yy)
    for (std::uint32_t xx = x0; xx <= x1; ++xx)
      if (map.at(yy, xx) != own) return true;
  return false;
}

LevelMap annotate(const LevelMap& truth, const AnnotatorProfile& profile,
                  const VisibilityMap* vis) {
  truth.validate();
  if (profile.confusion_rate < 0.0 || profile.confusion_rate > 1.0) {
    throw std::invalid_argument("confusion_rate must lie in [0, 1]");
  }
  LevelMap labels = truth;
  if (profile.threshold_shift != 0.0) {
    if (!vis) throw std::invalid_argument("threshold_shift needs the soil-visible map");
    if (vis->width != truth.width || vis->height != truth.height) {
      throw std::invalid_argument("soil-visible map extent differs from truth");
    }
    labels = levels_from_visibility(*vis, profile.threshold_shift);
  }

  const Rng rng(profile.seed);
  if (profile.boundary_jitter > 0) labels = jitter_regions(labels, profile.boundary_jitter, rng.split(1));

  if (profile.confusion_rate > 0.0) {
    Rng flips = rng.split(2);
    const LevelMap reference = labels;
    for (std::uint32_t y = 0; y < labels.height; ++y) {
      for (std::uint32_t x = 0; x < labels.width; ++x) {
        if (!near_boundary(reference, y, x, kConfusionBand)) continue;
        if (flips.uniform() >= profile.confusion_rate) continue;
        const std::uint8_t level = reference.at(y, x);
        std::uint8_t flipped;
        if (level == 0) {
          flipped = 1;
        } else if (level == kNumLevels - 1) {
          flipped = level - 1;
        } else {
          flipped = flips.below(2) == 0 ? level - 1 : level + 1;
        }
        labels.at(y, x) = flipped;
      }
    }
  }
  return labels;
}

std::vector<AnnotatorProfile> default_annotators(std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<AnnotatorProfile> out(count);
  for (auto& p : out) {
    p.threshold_shift = rng.uniform(-0.05, 0.05);
    p.boundary_jitter = 1;
    p.confusion_rate = 0.05;
    p.seed = rng.next_u64();
  }
  return out;
}

AnnotatorProfile for_tile(const AnnotatorProfile& profile, std::uint64_t tile_seed) {
  AnnotatorProfile p = profile;
  p.seed = mix64(profile.seed ^ mix64(tile_seed));
  return p;
}

}  // namespace resmap::synth
