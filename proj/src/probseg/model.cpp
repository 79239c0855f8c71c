#include "resmap/probseg/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "resmap/errors.hpp"
#include "resmap/rng.hpp"

namespace resmap::probseg {

namespace {

std::string conv_name(std::string_view prefix, std::uint32_t level, std::uint32_t conv) {
  return std::string(prefix) + std::to_string(level) + ".conv" + std::to_string(conv);
}

std::uint32_t level_channels(const UNetConfig& c, std::uint32_t level) {
  return c.base_channels << level;
}

std::uint32_t unet_input_channels(FusionMode mode) { return mode == FusionMode::kEarly ? 5 : 4; }

/// Conv layers of the model in parameter order: name, in, out, kernel.
struct ConvDef {
  std::string name;
  std::uint32_t in, out, kernel;
  enum class Init { kHe, kLinear, kZero } init = Init::kHe;
};

void encoder_defs(const UNetConfig& c, std::string_view prefix, std::uint32_t in_channels,
                  std::vector<ConvDef>& defs) {
  std::uint32_t in = in_channels;
  for (std::uint32_t i = 0; i < c.depth; ++i) {
    const std::uint32_t ch = level_channels(c, i);
    defs.push_back({conv_name(prefix, i, 0), in, ch, 3});
    defs.push_back({conv_name(prefix, i, 1), ch, ch, 3});
    in = ch;
  }
}

std::vector<ConvDef> layer_defs(const UNetConfig& c) {
  std::vector<ConvDef> defs;
  encoder_defs(c, "unet.enc", unet_input_channels(c.fusion), defs);
  const bool late = c.fusion == FusionMode::kLate;
  if (late) {
    for (std::uint32_t i = 0; i < c.depth; ++i) {
      defs.push_back({conv_name("aux.enc", i, 0), i == 0 ? 1u : c.aux_channels, c.aux_channels, 3});
    }
  }
  for (std::uint32_t i = c.depth - 1; i-- > 0;) {
    std::uint32_t in = level_channels(c, i + 1) + level_channels(c, i);
    if (late && i == c.depth - 2) in += c.aux_channels;
    const std::uint32_t ch = level_channels(c, i);
    defs.push_back({conv_name("unet.dec", i, 0), in, ch, 3});
    defs.push_back({conv_name("unet.dec", i, 1), ch, ch, 3});
  }
  const std::uint32_t top = level_channels(c, c.depth - 1);
  const std::uint32_t prior_in = prior_input_channels(c.fusion);
  for (const auto& [prefix, in] : {std::pair<std::string, std::uint32_t>{"prior", prior_in},
                                   {"posterior", prior_in + c.num_classes}}) {
    encoder_defs(c, prefix + ".enc", in, defs);
    defs.push_back({prefix + ".mu", top, c.latent_dim, 1, ConvDef::Init::kLinear});
    defs.push_back({prefix + ".logvar", top, c.latent_dim, 1, ConvDef::Init::kZero});
  }
  defs.push_back({"fcomb.conv0", c.base_channels + c.latent_dim, c.base_channels, 1});
  defs.push_back({"fcomb.conv1", c.base_channels, c.base_channels, 1});
  defs.push_back({"fcomb.conv2", c.base_channels, c.num_classes, 1, ConvDef::Init::kZero});
  return defs;
}

template <typename T>
Var<T> conv(const Bound<T>& m, const std::string& name, Var<T> x) {
  const Var<T> w = m(name + ".weight");
  const int pad = static_cast<int>(w.shape()[2] / 2);
  return tensor::conv2d(x, w, m(name + ".bias"), 1, pad);
}

template <typename T>
Var<T> conv_act(const Bound<T>& m, const std::string& name, Var<T> x) {
  return tensor::leaky_relu(conv(m, name, x), static_cast<T>(m.model().config().leaky_slope));
}

/// Encoder levels; returns the output of each level before pooling.
template <typename T>
std::vector<Var<T>> encode(const Bound<T>& m, std::string_view prefix, Var<T> x) {
  std::vector<Var<T>> levels;
  const std::uint32_t depth = m.model().config().depth;
  for (std::uint32_t i = 0; i < depth; ++i) {
    if (i > 0) x = tensor::pool_max2x(x);
    x = conv_act(m, conv_name(prefix, i, 0), x);
    x = conv_act(m, conv_name(prefix, i, 1), x);
    levels.push_back(x);
  }
  return levels;
}

template <typename T>
Var<T> prior_input(const Bound<T>& m, const InputVars<T>& in) {
  if (m.model().config().fusion == FusionMode::kImageOnly) return in.image;
  return tensor::concat_channels(in.image, in.height);
}

template <typename T>
Latent<T> latent_head(const Bound<T>& m, const std::string& prefix, Var<T> x) {
  const std::vector<Var<T>> levels = encode(m, prefix + ".enc", x);
  const Var<T> pooled = tensor::spatial_mean(levels.back());
  return {conv(m, prefix + ".mu", pooled),
          tensor::clamp(conv(m, prefix + ".logvar", pooled), static_cast<T>(kLogvarMin),
                        static_cast<T>(kLogvarMax))};
}

void require_input_shape(const Shape& image, const Shape& height) {
  if (image.size() != 3 || image[0] != 4) {
    throw ShapeError("model image must be 4 x H x W, got " + tensor::to_string(image));
  }
  if (height.size() != 3 || height[0] != 1 || height[1] != image[1] || height[2] != image[2]) {
    throw ShapeError("model height must be 1 x H x W matching the image, got " +
                     tensor::to_string(height));
  }
}

}  // namespace

std::string_view fusion_name(FusionMode mode) {
  switch (mode) {
    case FusionMode::kEarly: return "early";
    case FusionMode::kLate: return "late";
    case FusionMode::kImageOnly: return "image_only";
  }
  return "early";
}

FusionMode parse_fusion(std::string_view name) {
  if (name == "early") return FusionMode::kEarly;
  if (name == "late") return FusionMode::kLate;
  if (name == "image_only") return FusionMode::kImageOnly;
  throw DataError("unknown fusion mode \"" + std::string(name) + "\"");
}

std::uint32_t prior_input_channels(FusionMode mode) {
  return mode == FusionMode::kImageOnly ? 4 : 5;
}

void UNetConfig::validate() const {
  if (depth < 2) throw std::invalid_argument("UNetConfig: depth must be at least 2");
  if (depth > 8) throw std::invalid_argument("UNetConfig: depth above 8 is not supported");
  if (latent_dim < 1) throw std::invalid_argument("UNetConfig: latent_dim must be at least 1");
  if (base_channels < 1) throw std::invalid_argument("UNetConfig: base_channels must be positive");
  if (num_classes != kNumLevels) throw std::invalid_argument("UNetConfig: num_classes must be 5");
  if (!(leaky_slope >= 0.0 && leaky_slope < 1.0)) {
    throw std::invalid_argument("UNetConfig: leaky_slope must lie in [0, 1)");
  }
  if (fusion == FusionMode::kLate && aux_channels < 1) {
    throw std::invalid_argument("UNetConfig: late fusion needs aux_channels >= 1");
  }
}

io::Json UNetConfig::to_json() const {
  return io::Json{{"depth", depth},
                  {"base_channels", base_channels},
                  {"latent_dim", latent_dim},
                  {"fusion", fusion_name(fusion)},
                  {"num_classes", num_classes},
                  {"leaky_slope", leaky_slope},
                  {"aux_channels", aux_channels}};
}

void parse(const io::Json& j, UNetConfig& out, std::string_view where) {
  io::require_object(j,
                     {"depth", "base_channels", "latent_dim", "fusion", "num_classes",
                      "leaky_slope", "aux_channels"},
                     where);
  io::read_field(j, "depth", out.depth, where);
  io::read_field(j, "base_channels", out.base_channels, where);
  io::read_field(j, "latent_dim", out.latent_dim, where);
  io::read_field(j, "num_classes", out.num_classes, where);
  io::read_field(j, "leaky_slope", out.leaky_slope, where);
  io::read_field(j, "aux_channels", out.aux_channels, where);
  std::string fusion(fusion_name(out.fusion));
  io::read_field(j, "fusion", fusion, where);
  try {
    out.fusion = parse_fusion(fusion);
    out.validate();
  } catch (const std::exception& e) {
    throw DataError(std::string(where) + ": " + e.what());
  }
}

template <typename T>
ProbUNet<T>::ProbUNet(const UNetConfig& config, std::uint64_t seed) : config_(config) {
  config_.validate();
  const Rng root(seed);
  const double slope = config_.leaky_slope;
  std::uint64_t stream = 0;
  for (const ConvDef& d : layer_defs(config_)) {
    Tensor<T> w(Shape{d.out, d.in, d.kernel, d.kernel});
    const double fan_in = static_cast<double>(d.in) * d.kernel * d.kernel;
    double stddev = 0.0;
    if (d.init == ConvDef::Init::kHe) stddev = std::sqrt(2.0 / ((1.0 + slope * slope) * fan_in));
    if (d.init == ConvDef::Init::kLinear) stddev = std::sqrt(1.0 / fan_in);
    Rng rng = root.split(stream++);
    if (stddev > 0.0) {
      for (auto& v : w.values()) v = static_cast<T>(stddev * rng.normal());
    }
    add(d.name + ".weight", std::move(w));
    add(d.name + ".bias", Tensor<T>(Shape{d.out}));
  }
}

template <typename T>
void ProbUNet<T>::add(std::string name, Tensor<T> value) {
  if (!lookup_.emplace(name, params_.size()).second) {
    throw std::logic_error("duplicate parameter " + name);
  }
  params_.push_back({std::move(name), std::move(value)});
}

template <typename T>
std::size_t ProbUNet<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

template <typename T>
std::size_t ProbUNet<T>::index(std::string_view name) const {
  const auto it = lookup_.find(std::string(name));
  if (it == lookup_.end()) throw std::out_of_range("no parameter named " + std::string(name));
  return it->second;
}

template <typename T>
bool ProbUNet<T>::operator==(const ProbUNet& other) const {
  if (params_.size() != other.params_.size()) return false;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (params_[i].name != other.params_[i].name || !(params_[i].value == other.params_[i].value)) {
      return false;
    }
  }
  return config_.to_json() == other.config_.to_json();
}

ProbUNet<float> build_model(const UNetConfig& config, std::uint64_t seed) {
  return ProbUNet<float>(config, seed);
}

template <typename T>
Bound<T>::Bound(Tape<T>& tape, const ProbUNet<T>& model, bool trainable)
    : tape_(&tape), model_(&model) {
  vars_.reserve(model.params().size());
  for (const auto& p : model.params()) {
    vars_.push_back(trainable ? tape.leaf(p.value) : tape.constant(p.value));
  }
}

template <typename T>
ModelInput<T> fuse_input(const Raster& rgbn, const Raster& height) {
  if (rgbn.channels != 4 || rgbn.dtype != Dtype::kF32) {
    throw ShapeError("fuse_input: image must be 4-channel f32");
  }
  if (height.channels != 1 || height.dtype != Dtype::kF32) {
    throw ShapeError("fuse_input: height must be 1-channel f32");
  }
  if (rgbn.width != height.width || rgbn.height != height.height) {
    throw ShapeError("fuse_input: image and height extents differ");
  }
  rgbn.validate();
  height.validate();
  const std::size_t h = rgbn.height, w = rgbn.width;
  ModelInput<T> out{Tensor<T>(Shape{4, h, w}), Tensor<T>(Shape{1, h, w})};
  const auto [lo, hi] = std::minmax_element(height.f32.begin(), height.f32.end());
  const double span = *hi - *lo;
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      for (std::size_t c = 0; c < 4; ++c) out.image.at(c, y, x) = static_cast<T>(rgbn.at(y, x, c));
      const double v = height.at(y, x, 0);
      out.height.at(0, y, x) = span > 0.0 ? static_cast<T>((v - *lo) / span) : T{0};
    }
  }
  return out;
}

template <typename T>
ModelInput<T> split_input(const Raster& five) {
  if (five.channels != 5 || five.dtype != Dtype::kF32) {
    throw ShapeError("model input raster must be 5-channel f32");
  }
  five.validate();
  const std::size_t h = five.height, w = five.width;
  ModelInput<T> out{Tensor<T>(Shape{4, h, w}), Tensor<T>(Shape{1, h, w})};
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      for (std::size_t c = 0; c < 4; ++c) out.image.at(c, y, x) = static_cast<T>(five.at(y, x, c));
      out.height.at(0, y, x) = static_cast<T>(five.at(y, x, 4));
    }
  }
  return out;
}

template <typename T>
InputVars<T> bind_input(Tape<T>& tape, const ModelInput<T>& input, bool trainable) {
  require_input_shape(input.image.shape(), input.height.shape());
  if (trainable) return {tape.leaf(input.image), tape.leaf(input.height)};
  return {tape.constant(input.image), tape.constant(input.height)};
}

template <typename T>
Tensor<T> one_hot(const LevelMap& y, std::uint32_t num_classes) {
  if (y.levels.size() != std::size_t{y.width} * y.height) {
    throw ShapeError("label map size does not match its extent");
  }
  Tensor<T> out(Shape{num_classes, y.height, y.width});
  for (std::size_t i = 0; i < y.levels.size(); ++i) {
    const std::uint8_t k = y.levels[i];
    if (k >= num_classes) {
      throw ShapeError("label class " + std::to_string(k) + " out of range [0, " +
                       std::to_string(num_classes) + ")");
    }
    out[k * y.levels.size() + i] = T{1};
  }
  return out;
}

template <typename T>
Var<T> unet_features(const Bound<T>& m, const InputVars<T>& in) {
  require_input_shape(in.image.shape(), in.height.shape());
  const UNetConfig& c = m.model().config();
  const Var<T> x =
      c.fusion == FusionMode::kEarly ? tensor::concat_channels(in.image, in.height) : in.image;
  std::vector<Var<T>> levels = encode(m, "unet.enc", x);
  Var<T> up = levels.back();
  if (c.fusion == FusionMode::kLate) {
    Var<T> aux = in.height;
    for (std::uint32_t i = 0; i < c.depth; ++i) {
      if (i > 0) aux = tensor::pool_max2x(aux);
      aux = conv_act(m, conv_name("aux.enc", i, 0), aux);
    }
    up = tensor::concat_channels(up, aux);
  }
  for (std::uint32_t i = c.depth - 1; i-- > 0;) {
    up = tensor::concat_channels(tensor::upsample_nearest2x(up), levels[i]);
    up = conv_act(m, conv_name("unet.dec", i, 0), up);
    up = conv_act(m, conv_name("unet.dec", i, 1), up);
  }
  return up;
}

template <typename T>
Latent<T> prior_forward(const Bound<T>& m, const InputVars<T>& in) {
  require_input_shape(in.image.shape(), in.height.shape());
  return latent_head(m, "prior", prior_input(m, in));
}

template <typename T>
Latent<T> posterior_forward(const Bound<T>& m, const InputVars<T>& in, const LevelMap& y) {
  require_input_shape(in.image.shape(), in.height.shape());
  const Shape& s = in.image.shape();
  if (y.height != s[1] || y.width != s[2]) {
    throw ShapeError("label extent " + std::to_string(y.height) + "x" + std::to_string(y.width) +
                     " does not match input " + tensor::to_string(s));
  }
  const Var<T> labels = m.tape().constant(one_hot<T>(y, m.model().config().num_classes));
  return latent_head(m, "posterior", tensor::concat_channels(prior_input(m, in), labels));
}

template <typename T>
Var<T> decode_with_latent(const Bound<T>& m, Var<T> features, Var<T> z) {
  const Shape& f = features.shape();
  if (z.value().size() != m.model().config().latent_dim) {
    throw ShapeError("latent length " + std::to_string(z.value().size()) + " != " +
                     std::to_string(m.model().config().latent_dim));
  }
  Var<T> x = tensor::concat_channels(features, tensor::broadcast_spatial(z, f[1], f[2]));
  x = conv_act(m, "fcomb.conv0", x);
  x = conv_act(m, "fcomb.conv1", x);
  return conv(m, "fcomb.conv2", x);
}

template <typename T>
ElboTerms<T> elbo_loss(const Bound<T>& m, const InputVars<T>& in, const LevelMap& y, double beta,
                       const Tensor<T>& eps) {
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be non-negative");
  const Var<T> features = unet_features(m, in);
  const Latent<T> q = posterior_forward(m, in, y);
  const Latent<T> p = prior_forward(m, in);
  const Var<T> z = tensor::sample_latent(q.mu, q.logvar, eps);
  const Var<T> recon = tensor::cross_entropy(decode_with_latent(m, features, z), y.levels);
  const Var<T> kl = tensor::kl_diag_gaussian(q.mu, q.logvar, p.mu, p.logvar);
  return {tensor::add(recon, tensor::scale(kl, static_cast<T>(beta))), recon, kl};
}

LevelMap argmax_levels(const Tensor<float>& logits) {
  if (logits.rank() != 3) throw ShapeError("argmax_levels expects K x H x W");
  const std::size_t k = logits.dim(0), h = logits.dim(1), w = logits.dim(2);
  if (k > kNumLevels) throw ShapeError("argmax_levels: more than 5 classes");
  LevelMap out(static_cast<std::uint32_t>(w), static_cast<std::uint32_t>(h));
  for (std::size_t i = 0; i < h * w; ++i) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < k; ++c) {
      if (logits[c * h * w + i] > logits[best * h * w + i]) best = c;
    }
    out.levels[i] = static_cast<std::uint8_t>(best);
  }
  return out;
}

std::vector<LevelMap> predict_samples(const ProbUNet<float>& model, const ModelInput<float>& x,
                                      std::uint32_t samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("predict_samples needs M >= 1");
  Tape<float> tape;
  const Bound<float> m(tape, model, false);
  const InputVars<float> in = bind_input(tape, x);
  const Var<float> features = unet_features(m, in);
  const Latent<float> p = prior_forward(m, in);
  const std::size_t latent = model.config().latent_dim;
  const Rng root(seed);
  std::vector<LevelMap> out;
  out.reserve(samples);
  for (std::uint32_t s = 0; s < samples; ++s) {
    Rng rng = root.split(s);
    Tensor<float> eps(Shape{latent, 1, 1});
    for (auto& v : eps.values()) v = static_cast<float>(rng.normal());
    const Var<float> z = tensor::sample_latent(p.mu, p.logvar, eps);
    out.push_back(argmax_levels(decode_with_latent(m, features, z).value()));
  }
  return out;
}

LevelMap predict_prior_mean(const ProbUNet<float>& model, const ModelInput<float>& x) {
  Tape<float> tape;
  const Bound<float> m(tape, model, false);
  const InputVars<float> in = bind_input(tape, x);
  const Latent<float> p = prior_forward(m, in);
  return argmax_levels(decode_with_latent(m, unet_features(m, in), p.mu).value());
}

template class ProbUNet<float>;
template class ProbUNet<double>;
template class Bound<float>;
template class Bound<double>;

#define RESMAP_INSTANTIATE_MODEL(T)                                                           \
  template ModelInput<T> fuse_input<T>(const Raster&, const Raster&);                         \
  template ModelInput<T> split_input<T>(const Raster&);                                       \
  template InputVars<T> bind_input<T>(Tape<T>&, const ModelInput<T>&, bool);                  \
  template Tensor<T> one_hot<T>(const LevelMap&, std::uint32_t);                              \
  template Var<T> unet_features<T>(const Bound<T>&, const InputVars<T>&);                     \
  template Latent<T> prior_forward<T>(const Bound<T>&, const InputVars<T>&);                  \
  template Latent<T> posterior_forward<T>(const Bound<T>&, const InputVars<T>&,               \
                                          const LevelMap&);                                   \
  template Var<T> decode_with_latent<T>(const Bound<T>&, Var<T>, Var<T>);                     \
  template ElboTerms<T> elbo_loss<T>(const Bound<T>&, const InputVars<T>&, const LevelMap&,   \
                                     double, const Tensor<T>&);

RESMAP_INSTANTIATE_MODEL(float)
RESMAP_INSTANTIATE_MODEL(double)

}  // namespace resmap::probseg
