#pragma once

#include <array>
#include <cstdint>

#include "resmap/raster.hpp"
#include "resmap/synth/scene.hpp"

namespace resmap::synth {

/// Reflectance in R, G, B, NIR order.
using Rgbn = std::array<float, 4>;

struct RenderParams {
  Rgbn soil_poor{0.50f, 0.38f, 0.28f, 0.30f};  // soil_quality = 0
  Rgbn soil_rich{0.26f, 0.17f, 0.11f, 0.20f};  // soil_quality = 1
  Rgbn residue{0.80f, 0.72f, 0.52f, 0.62f};    // single layer
  Rgbn buildup{0.90f, 0.84f, 0.46f, 0.74f};    // multi-layer ponding
  float shading = 0.6f;       // relief shading strength, 0 disables
  float noise_sigma = 0.02f;  // additive Gaussian sensor noise
};

/// RGB + NIR image, 4 channels, values clipped to [0, 1].
Raster render_rgbn(const FieldScene& scene, const RenderParams& params, std::uint64_t seed);

}  // namespace resmap::synth
