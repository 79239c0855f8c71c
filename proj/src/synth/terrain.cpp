#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "resmap/rng.hpp"
#include "resmap/synth/scene.hpp"

namespace resmap::synth {

namespace {

constexpr int kNeighbourDy[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
constexpr int kNeighbourDx[8] = {-1, 0, 1, -1, 1, -1, 0, 1};

void require_size(std::uint32_t size) {
  if (size < kMinSceneSize) {
    throw std::invalid_argument("scene size " + std::to_string(size) + " is below " +
                                std::to_string(kMinSceneSize));
  }
}

}  // namespace

Grid gen_heightmap(std::uint32_t size, double roughness, std::uint64_t seed, double relief) {
  require_size(size);
  Grid out(size, size);
  if (roughness <= 0.0) {
    for (std::uint32_t y = 0; y < size; ++y)
      for (std::uint32_t x = 0; x < size; ++x)
        out.at(y, x) = static_cast<float>(relief * (1.0 - static_cast<double>(y) / (size - 1)));
    return out;
  }

  std::uint32_t n = 2;
  while (n + 1 < size) n *= 2;
  const std::uint32_t dim = n + 1;
  std::vector<double> h(std::size_t{dim} * dim, 0.0);
  auto at = [&](std::uint32_t y, std::uint32_t x) -> double& { return h[std::size_t{y} * dim + x]; };

  Rng rng(seed);
  at(0, 0) = rng.normal();
  at(0, n) = rng.normal();
  at(n, 0) = rng.normal();
  at(n, n) = rng.normal();

  const double decay = std::pow(2.0, -roughness);
  double amplitude = decay;
  for (std::uint32_t step = n; step > 1; step /= 2) {
    const std::uint32_t half = step / 2;
    for (std::uint32_t y = half; y < dim; y += step) {
      for (std::uint32_t x = half; x < dim; x += step) {
        const double mean = 0.25 * (at(y - half, x - half) + at(y - half, x + half) +
                                    at(y + half, x - half) + at(y + half, x + half));
        at(y, x) = mean + amplitude * rng.normal();
      }
    }
    for (std::uint32_t y = 0; y < dim; y += half) {
      for (std::uint32_t x = (y / half) % 2 == 0 ? half : 0; x < dim; x += step) {
        double acc = 0.0;
        int count = 0;
        if (y >= half) acc += at(y - half, x), ++count;
        if (y + half < dim) acc += at(y + half, x), ++count;
        if (x >= half) acc += at(y, x - half), ++count;
        if (x + half < dim) acc += at(y, x + half), ++count;
        at(y, x) = acc / count + amplitude * rng.normal();
      }
    }
    amplitude *= decay;
  }

  for (std::uint32_t y = 0; y < size; ++y)
    for (std::uint32_t x = 0; x < size; ++x) out.at(y, x) = static_cast<float>(at(y, x));
  Grid norm = normalize_min_max(out);
  for (auto& v : norm.values) v = static_cast<float>(v * relief);
  return norm;
}

std::vector<std::int64_t> d8_receivers(const Grid& hm) {
  const auto w = static_cast<std::int64_t>(hm.width);
  const auto h = static_cast<std::int64_t>(hm.height);
  std::vector<std::int64_t> recv(hm.size(), -1);
  for (std::int64_t y = 0; y < h; ++y) {
    for (std::int64_t x = 0; x < w; ++x) {
      const double z = hm.values[y * w + x];
      double best = 0.0;
      for (int k = 0; k < 8; ++k) {
        const std::int64_t ny = y + kNeighbourDy[k];
        const std::int64_t nx = x + kNeighbourDx[k];
        if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
        const double drop = z - hm.values[ny * w + nx];
        if (drop <= 0.0) continue;
        const double dist = (kNeighbourDy[k] != 0 && kNeighbourDx[k] != 0) ? std::sqrt(2.0) : 1.0;
        if (drop / dist > best) {
          best = drop / dist;
          recv[y * w + x] = ny * w + nx;
        }
      }
    }
  }
  return recv;
}

std::vector<std::uint32_t> d8_accumulation(const Grid& hm) {
  const auto recv = d8_receivers(hm);
  // Flow only goes strictly downhill, so visiting cells from high to low
  // settles every donor before its receiver.
  std::vector<std::size_t> order(hm.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return hm.values[a] > hm.values[b]; });
  std::vector<std::uint32_t> acc(hm.size(), 0);
  for (std::size_t i : order) {
    if (recv[i] >= 0) acc[static_cast<std::size_t>(recv[i])] += acc[i] + 1;
  }
  return acc;
}

Grid slope_tangent(const Grid& hm, double cell_size) {
  Grid out(hm.width, hm.height);
  const std::uint32_t w = hm.width, h = hm.height;
  for (std::uint32_t y = 0; y < h; ++y) {
    for (std::uint32_t x = 0; x < w; ++x) {
      const std::uint32_t x0 = x > 0 ? x - 1 : x, x1 = x + 1 < w ? x + 1 : x;
      const std::uint32_t y0 = y > 0 ? y - 1 : y, y1 = y + 1 < h ? y + 1 : y;
      const double gx = (hm.at(y, x1) - hm.at(y, x0)) / ((x1 - x0) * cell_size);
      const double gy = (hm.at(y1, x) - hm.at(y0, x)) / ((y1 - y0) * cell_size);
      out.at(y, x) = static_cast<float>(std::hypot(gx, gy));
    }
  }
  return out;
}

Grid wetness_index(const Grid& hm, double cell_size) {
  constexpr double kEps = 1e-3;
  const auto acc = d8_accumulation(hm);
  const Grid tan_slope = slope_tangent(hm, cell_size);
  Grid out(hm.width, hm.height);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.values[i] =
        static_cast<float>(std::log((1.0 + acc[i]) / (tan_slope.values[i] + kEps)));
  }
  return out;
}

Grid normalize_min_max(const Grid& grid) {
  Grid out(grid.width, grid.height);
  if (grid.values.empty()) return out;
  const auto [lo, hi] = std::minmax_element(grid.values.begin(), grid.values.end());
  const double range = static_cast<double>(*hi) - *lo;
  if (range <= 0.0) return out;
  for (std::size_t i = 0; i < grid.size(); ++i)
    out.values[i] = static_cast<float>((grid.values[i] - *lo) / range);
  return out;
}

Grid box_blur(const Grid& grid, std::uint32_t radius) {
  if (radius == 0) return grid;
  // Separable mean filter with the window clipped at the border.
  auto pass = [radius](const Grid& in, bool horizontal) {
    Grid out(in.width, in.height);
    const std::int64_t r = radius;
    for (std::uint32_t y = 0; y < in.height; ++y) {
      for (std::uint32_t x = 0; x < in.width; ++x) {
        const std::int64_t c = horizontal ? x : y;
        const std::int64_t n = horizontal ? in.width : in.height;
        double sum = 0.0;
        int count = 0;
        for (std::int64_t k = std::max<std::int64_t>(0, c - r); k <= std::min(n - 1, c + r); ++k) {
          sum += horizontal ? in.at(y, k) : in.at(k, x);
          ++count;
        }
        out.at(y, x) = static_cast<float>(sum / count);
      }
    }
    return out;
  };
  return pass(pass(grid, true), false);
}

Grid gen_smooth_field(std::uint32_t size, double correlation_length, std::uint64_t seed) {
  Grid out(size, size);
  Rng rng(seed);
  // Two octaves of value noise with smoothstep interpolation.
  struct Octave {
    double spacing, weight;
  };
  const Octave octaves[2] = {{std::max(correlation_length, 1.0), 1.0},
                             {std::max(correlation_length / 2.0, 1.0), 0.5}};
  std::vector<double> acc(out.size(), 0.0);
  for (const auto& oct : octaves) {
    const auto cells = static_cast<std::size_t>(std::ceil(size / oct.spacing)) + 2;
    std::vector<double> lattice(cells * cells);
    for (auto& v : lattice) v = rng.uniform();
    const double ox = rng.uniform(), oy = rng.uniform();
    for (std::uint32_t y = 0; y < size; ++y) {
      const double fy = y / oct.spacing + oy;
      const auto iy = static_cast<std::size_t>(fy);
      double ty = fy - iy;
      ty = ty * ty * (3 - 2 * ty);
      for (std::uint32_t x = 0; x < size; ++x) {
        const double fx = x / oct.spacing + ox;
        const auto ix = static_cast<std::size_t>(fx);
        double tx = fx - ix;
        tx = tx * tx * (3 - 2 * tx);
        const double a = lattice[iy * cells + ix], b = lattice[iy * cells + ix + 1];
        const double c = lattice[(iy + 1) * cells + ix], d = lattice[(iy + 1) * cells + ix + 1];
        acc[std::size_t{y} * size + x] +=
            oct.weight * ((a * (1 - tx) + b * tx) * (1 - ty) + (c * (1 - tx) + d * tx) * ty);
      }
    }
  }
  for (std::size_t i = 0; i < acc.size(); ++i) out.values[i] = static_cast<float>(acc[i] / 1.5);
  return out;
}

std::vector<Management> gen_management(std::uint32_t size, const ManagementPattern& pattern,
                                       std::uint64_t seed) {
  std::vector<Management> out(std::size_t{size} * size, pattern.uniform);
  switch (pattern.kind) {
    case ManagementPattern::Kind::kUniform:
      break;
    case ManagementPattern::Kind::kStripes:
      std::fill(out.begin(), out.end(), Management::kStrip);
      break;
    case ManagementPattern::Kind::kPatchwork: {
      Rng rng(seed);
      const std::uint32_t patch = std::max<std::uint32_t>(pattern.patch_size, 1);
      const auto offset_y = static_cast<std::uint32_t>(rng.below(patch));
      const auto offset_x = static_cast<std::uint32_t>(rng.below(patch));
      const std::uint32_t cells = (size + patch) / patch + 1;
      std::vector<Management> parcels(std::size_t{cells} * cells);
      for (auto& p : parcels) p = static_cast<Management>(rng.below(3));
      for (std::uint32_t y = 0; y < size; ++y)
        for (std::uint32_t x = 0; x < size; ++x)
          out[std::size_t{y} * size + x] =
              parcels[std::size_t{(y + offset_y) / patch} * cells + (x + offset_x) / patch];
      break;
    }
  }
  return out;
}

double management_factor(Management m, std::uint32_t x, std::uint32_t stripe_width) {
  constexpr double kTill = 0.1;
  constexpr double kNoTill = 0.8;
  switch (m) {
    case Management::kTill:
      return kTill;
    case Management::kNoTill:
      return kNoTill;
    case Management::kStrip:
      return (x / std::max<std::uint32_t>(stripe_width, 1)) % 2 == 0 ? kTill : kNoTill;
  }
  return kTill;
}

}  // namespace resmap::synth
