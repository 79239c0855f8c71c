#include "resmap/synth/render.hpp"

#include <algorithm>
#include <cmath>

#include "resmap/rng.hpp"

namespace resmap::synth {

namespace {

// Unit vector towards a light from the north-west, 45 degrees up.
constexpr double kLightX = -0.5, kLightY = -0.5, kLightZ = 0.70710678118654752;

}  // namespace

Raster render_rgbn(const FieldScene& scene, const RenderParams& params, std::uint64_t seed) {
  Raster out = Raster::make_f32(scene.width, scene.height, 4, scene.resolution);
  Rng rng(seed);
  const Grid& hm = scene.heightmap;
  const std::uint32_t w = scene.width, h = scene.height;
  for (std::uint32_t y = 0; y < h; ++y) {
    for (std::uint32_t x = 0; x < w; ++x) {
      const std::size_t i = std::size_t{y} * w + x;
      const std::uint32_t x0 = x > 0 ? x - 1 : x, x1 = x + 1 < w ? x + 1 : x;
      const std::uint32_t y0 = y > 0 ? y - 1 : y, y1 = y + 1 < h ? y + 1 : y;
      const double gx = (hm.at(y, x1) - hm.at(y, x0)) / ((x1 - x0) * scene.resolution);
      const double gy = (hm.at(y1, x) - hm.at(y0, x)) / ((y1 - y0) * scene.resolution);
      // Lambertian term relative to flat ground, so flat pixels get exactly 1.
      const double lambert =
          (-gx * kLightX - gy * kLightY + kLightZ) / std::sqrt(gx * gx + gy * gy + 1.0);
      const double shade = 1.0 + params.shading * (lambert - kLightZ);

      const double q = scene.soil_quality.values[i];
      const double r = scene.residue_fraction.values[i];
      const Rgbn& cover = scene.layer_count[i] >= 2 ? params.buildup : params.residue;
      for (std::uint32_t c = 0; c < 4; ++c) {
        const double soil = (1.0 - q) * params.soil_poor[c] + q * params.soil_rich[c];
        double v = ((1.0 - r) * soil + r * cover[c]) * shade;
        if (params.noise_sigma > 0.0f) v += params.noise_sigma * rng.normal();
        out.at(y, x, c) = static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
    }
  }
  return out;
}

}  // namespace resmap::synth
