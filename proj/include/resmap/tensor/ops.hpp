#pragma once

#include <cstdint>
#include <span>
#include <type_traits>

#include "resmap/tensor/tape.hpp"

// Differentiable primitives. Image tensors are C x H x W; latent vectors are
// L x 1 x 1 so they compose with 1x1 convolutions. Every op records itself
// on the tape of its inputs and throws ShapeError on contract violations.

namespace resmap::tensor {

/// 2-D cross-correlation. input C x H x W, kernel O x C x Kh x Kw, bias O.
/// Output extent (H + 2 pad - Kh) / stride + 1 must divide exactly.
template <typename T>
Var<T> conv2d(Var<T> input, Var<T> kernel, Var<T> bias, int stride = 1, int padding = 0);

/// Nearest-neighbour 2x upsampling.
template <typename T>
Var<T> upsample_nearest2x(Var<T> input);

/// 2x2 max pooling with stride 2. Ties route the gradient to the first
/// element of the block in row-major order.
template <typename T>
Var<T> pool_max2x(Var<T> input);

/// max(x, slope * x) elementwise; the derivative at 0 is `slope`.
template <typename T>
Var<T> leaky_relu(Var<T> input, std::type_identity_t<T> slope);

template <typename T>
Var<T> relu(Var<T> input) {
  return leaky_relu(input, T{0});
}

/// Channels of a followed by channels of b.
template <typename T>
Var<T> concat_channels(Var<T> a, Var<T> b);

/// Per-pixel softmax over the channel axis.
template <typename T>
Var<T> softmax_channels(Var<T> logits);

/// Mean over pixels of -log softmax(logits)[target]. target is H x W,
/// row-major, with class indices in [0, K).
template <typename T>
Var<T> cross_entropy(Var<T> logits, std::span<const std::uint8_t> target);

/// KL(q || p) for diagonal Gaussians, summed over dimensions.
template <typename T>
Var<T> kl_diag_gaussian(Var<T> mu_q, Var<T> logvar_q, Var<T> mu_p, Var<T> logvar_p);

/// z = mu + exp(logvar / 2) * noise; noise is a constant.
template <typename T>
Var<T> sample_latent(Var<T> mu, Var<T> logvar, const Tensor<T>& noise);

/// L x 1 x 1 (or length-L) vector broadcast to L x H x W.
template <typename T>
Var<T> broadcast_spatial(Var<T> z, std::size_t height, std::size_t width);

/// C x H x W -> C x 1 x 1 spatial mean.
template <typename T>
Var<T> spatial_mean(Var<T> input);

/// Elementwise clamp; gradient passes only where lo <= x <= hi.
template <typename T>
Var<T> clamp(Var<T> input, std::type_identity_t<T> lo, std::type_identity_t<T> hi);

template <typename T>
Var<T> add(Var<T> a, Var<T> b);

template <typename T>
Var<T> mul(Var<T> a, Var<T> b);

template <typename T>
Var<T> scale(Var<T> a, std::type_identity_t<T> factor);

/// Sum of all elements as a 1-element tensor.
template <typename T>
Var<T> sum(Var<T> a);

}  // namespace resmap::tensor
