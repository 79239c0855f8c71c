#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "resmap/io/json_util.hpp"
#include "resmap/raster.hpp"
#include "resmap/tensor/ops.hpp"

namespace resmap::probseg {

using tensor::Shape;
using tensor::Tape;
using tensor::Tensor;
using tensor::Var;

/// How topography reaches the segmentation network.
enum class FusionMode : std::uint8_t {
  kEarly,      // RGBN + height stacked into one 5-channel input
  kLate,       // RGBN through the U-Net, height through a small encoder joined at the bottleneck
  kImageOnly,  // RGBN only; control model without topography
};

std::string_view fusion_name(FusionMode mode);
FusionMode parse_fusion(std::string_view name);

struct UNetConfig {
  std::uint32_t depth = 3;          // encoder levels, including the bottleneck
  std::uint32_t base_channels = 16;
  std::uint32_t latent_dim = 6;
  FusionMode fusion = FusionMode::kEarly;
  std::uint32_t num_classes = kNumLevels;
  double leaky_slope = 0.1;
  std::uint32_t aux_channels = 8;   // late fusion height encoder width

  /// Throws std::invalid_argument on a broken invariant.
  void validate() const;
  io::Json to_json() const;
};

void parse(const io::Json& j, UNetConfig& out, std::string_view where);

/// Logvar outputs of the latent heads are clamped to this range.
inline constexpr double kLogvarMin = -10.0;
inline constexpr double kLogvarMax = 10.0;

template <typename T>
struct NamedTensor {
  std::string name;
  Tensor<T> value;
};

/// Probabilistic U-Net: deterministic U-Net features, prior and posterior
/// Gaussian latent nets, and f_comb (1x1 convs on features plus broadcast z).
template <typename T>
class ProbUNet {
 public:
  ProbUNet() = default;
  /// He-initialized weights, zero biases, zero final f_comb layer.
  ProbUNet(const UNetConfig& config, std::uint64_t seed);

  const UNetConfig& config() const { return config_; }
  std::vector<NamedTensor<T>>& params() { return params_; }
  const std::vector<NamedTensor<T>>& params() const { return params_; }
  std::size_t parameter_count() const;

  std::size_t index(std::string_view name) const;
  bool has(std::string_view name) const { return lookup_.count(std::string(name)) != 0; }
  Tensor<T>& param(std::string_view name) { return params_[index(name)].value; }
  const Tensor<T>& param(std::string_view name) const { return params_[index(name)].value; }

  template <typename U>
  ProbUNet<U> cast() const {
    ProbUNet<U> out;
    out.config_ = config_;
    for (const auto& p : params_) out.add(p.name, p.value.template cast<U>());
    return out;
  }

  bool operator==(const ProbUNet& other) const;

 private:
  template <typename>
  friend class ProbUNet;

  void add(std::string name, Tensor<T> value);

  UNetConfig config_;
  std::vector<NamedTensor<T>> params_;
  std::unordered_map<std::string, std::size_t> lookup_;
};

/// Untrained model, same as the constructor.
ProbUNet<float> build_model(const UNetConfig& config, std::uint64_t seed);

/// Model parameters placed on one tape, as leaves (trainable) or constants.
template <typename T>
class Bound {
 public:
  Bound(Tape<T>& tape, const ProbUNet<T>& model, bool trainable);

  Var<T> operator()(std::string_view name) const { return vars_[model_->index(name)]; }
  std::span<const Var<T>> vars() const { return vars_; }
  Tape<T>& tape() const { return *tape_; }
  const ProbUNet<T>& model() const { return *model_; }

 private:
  Tape<T>* tape_;
  const ProbUNet<T>* model_;
  std::vector<Var<T>> vars_;
};

/// Image (4 x H x W RGBN) and height (1 x H x W, min-max normalized).
template <typename T>
struct ModelInput {
  Tensor<T> image;
  Tensor<T> height;
};

template <typename T>
struct InputVars {
  Var<T> image;
  Var<T> height;
};

/// Aligns a 4-channel RGBN raster and a 1-channel heightmap, normalizing
/// the height to [0, 1] within the tile. Throws ShapeError on extent or
/// channel mismatch.
template <typename T>
ModelInput<T> fuse_input(const Raster& rgbn, const Raster& height);

/// Splits a 5-channel dataset input (height already normalized).
template <typename T>
ModelInput<T> split_input(const Raster& five_channel);

template <typename T>
InputVars<T> bind_input(Tape<T>& tape, const ModelInput<T>& input, bool trainable = false);

/// Channels the prior net sees: 5 with topography, 4 for image-only models.
std::uint32_t prior_input_channels(FusionMode mode);

template <typename T>
struct Latent {
  Var<T> mu;      // L x 1 x 1
  Var<T> logvar;  // L x 1 x 1, clamped
};

template <typename T>
struct ElboTerms {
  Var<T> total;
  Var<T> recon;
  Var<T> kl;
};

/// U-Net decoder output at full resolution, base_channels x H x W.
template <typename T>
Var<T> unet_features(const Bound<T>& m, const InputVars<T>& in);

template <typename T>
Latent<T> prior_forward(const Bound<T>& m, const InputVars<T>& in);

/// Throws ShapeError for labels outside [0, 5) or of the wrong extent.
template <typename T>
Latent<T> posterior_forward(const Bound<T>& m, const InputVars<T>& in, const LevelMap& y);

/// f_comb applied to [features || broadcast z]; logits num_classes x H x W.
template <typename T>
Var<T> decode_with_latent(const Bound<T>& m, Var<T> features, Var<T> z);

/// recon = CE(decode(features, z_q), y), z_q = mu_q + sigma_q * eps;
/// kl = KL(q || p); total = recon + beta * kl.
template <typename T>
ElboTerms<T> elbo_loss(const Bound<T>& m, const InputVars<T>& in, const LevelMap& y,
                       double beta, const Tensor<T>& eps);

/// One-hot encoding of a level map, num_classes x H x W.
template <typename T>
Tensor<T> one_hot(const LevelMap& y, std::uint32_t num_classes);

/// Per-pixel argmax over channels; ties go to the lowest class.
LevelMap argmax_levels(const Tensor<float>& logits);

/// M segmentations with z drawn from the prior; sample m uses the noise
/// stream Rng(seed).split(m). U-Net features are computed once.
std::vector<LevelMap> predict_samples(const ProbUNet<float>& model, const ModelInput<float>& x,
                                      std::uint32_t samples, std::uint64_t seed);

/// Segmentation at the prior mean (z = mu_p).
LevelMap predict_prior_mean(const ProbUNet<float>& model, const ModelInput<float>& x);

extern template class ProbUNet<float>;
extern template class ProbUNet<double>;
extern template class Bound<float>;
extern template class Bound<double>;

}  // namespace resmap::probseg
