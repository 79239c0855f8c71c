#include "resmap/tensor/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace resmap::tensor {

namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstMatMap = Eigen::Map<const RowMat<T>>;

void require(bool ok, const std::string& what) {
  if (!ok) throw ShapeError(what);
}

void require_chw(const Shape& s, const char* op) {
  require(s.size() == 3, std::string(op) + ": expected C x H x W tensor, got " + to_string(s));
}

struct ConvGeometry {
  std::size_t channels, height, width;
  std::size_t out_channels, kh, kw;
  std::size_t stride, pad;
  std::size_t out_h, out_w;

  std::size_t patch() const { return channels * kh * kw; }
  std::size_t out_pixels() const { return out_h * out_w; }
  bool pointwise() const { return kh == 1 && kw == 1 && stride == 1 && pad == 0; }
};

/// dst (+)= a * b. Eigen's matrix-vector kernels peel loops according to
/// pointer alignment, which makes the summation order depend on where the
/// buffers happen to live; degenerate shapes use a fixed-order loop instead.
template <typename Dst, typename A, typename B>
void multiply(Dst&& dst, const A& a, const B& b, bool accumulate) {
  if (dst.rows() > 1 && dst.cols() > 1) {
    if (accumulate) {
      dst.noalias() += a * b;
    } else {
      dst.noalias() = a * b;
    }
    return;
  }
  using T = typename std::decay_t<Dst>::Scalar;
  for (Eigen::Index i = 0; i < dst.rows(); ++i) {
    for (Eigen::Index j = 0; j < dst.cols(); ++j) {
      T acc{0};
      for (Eigen::Index k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      dst(i, j) = accumulate ? dst(i, j) + acc : acc;
    }
  }
}

template <typename T>
void im2col(const T* in, const ConvGeometry& g, T* cols) {
  const std::size_t np = g.out_pixels();
  for (std::size_t c = 0; c < g.channels; ++c) {
    for (std::size_t ky = 0; ky < g.kh; ++ky) {
      for (std::size_t kx = 0; kx < g.kw; ++kx) {
        T* row = cols + ((c * g.kh + ky) * g.kw + kx) * np;
        for (std::size_t oy = 0; oy < g.out_h; ++oy) {
          const auto iy = static_cast<std::ptrdiff_t>(oy * g.stride + ky) -
                          static_cast<std::ptrdiff_t>(g.pad);
          T* dst = row + oy * g.out_w;
          if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(g.height)) {
            std::fill(dst, dst + g.out_w, T{0});
            continue;
          }
          const T* src = in + (c * g.height + static_cast<std::size_t>(iy)) * g.width;
          for (std::size_t ox = 0; ox < g.out_w; ++ox) {
            const auto ix = static_cast<std::ptrdiff_t>(ox * g.stride + kx) -
                            static_cast<std::ptrdiff_t>(g.pad);
            dst[ox] = (ix < 0 || ix >= static_cast<std::ptrdiff_t>(g.width))
                          ? T{0}
                          : src[static_cast<std::size_t>(ix)];
          }
        }
      }
    }
  }
}

template <typename T>
void col2im_add(const T* cols, const ConvGeometry& g, T* in_grad) {
  const std::size_t np = g.out_pixels();
  for (std::size_t c = 0; c < g.channels; ++c) {
    for (std::size_t ky = 0; ky < g.kh; ++ky) {
      for (std::size_t kx = 0; kx < g.kw; ++kx) {
        const T* row = cols + ((c * g.kh + ky) * g.kw + kx) * np;
        for (std::size_t oy = 0; oy < g.out_h; ++oy) {
          const auto iy = static_cast<std::ptrdiff_t>(oy * g.stride + ky) -
                          static_cast<std::ptrdiff_t>(g.pad);
          if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(g.height)) continue;
          T* dst = in_grad + (c * g.height + static_cast<std::size_t>(iy)) * g.width;
          const T* src = row + oy * g.out_w;
          for (std::size_t ox = 0; ox < g.out_w; ++ox) {
            const auto ix = static_cast<std::ptrdiff_t>(ox * g.stride + kx) -
                            static_cast<std::ptrdiff_t>(g.pad);
            if (ix >= 0 && ix < static_cast<std::ptrdiff_t>(g.width)) {
              dst[static_cast<std::size_t>(ix)] += src[ox];
            }
          }
        }
      }
    }
  }
}

ConvGeometry conv_geometry(const Shape& in, const Shape& k, const Shape& b, int stride,
                           int padding) {
  require_chw(in, "conv2d");
  require(k.size() == 4, "conv2d: kernel must be O x C x Kh x Kw, got " + to_string(k));
  require(k[1] == in[0], "conv2d: kernel expects " + std::to_string(k[1]) +
                             " input channels, input has " + std::to_string(in[0]));
  require(b.size() == 1 && b[0] == k[0], "conv2d: bias must have " + std::to_string(k[0]) +
                                             " elements, got " + to_string(b));
  require(stride >= 1, "conv2d: stride must be >= 1");
  require(padding >= 0, "conv2d: padding must be >= 0");
  ConvGeometry g{in[0], in[1], in[2], k[0], k[2], k[3],
                 static_cast<std::size_t>(stride), static_cast<std::size_t>(padding), 0, 0};
  const auto span_h = static_cast<std::ptrdiff_t>(g.height + 2 * g.pad) -
                      static_cast<std::ptrdiff_t>(g.kh);
  const auto span_w = static_cast<std::ptrdiff_t>(g.width + 2 * g.pad) -
                      static_cast<std::ptrdiff_t>(g.kw);
  require(span_h >= 0 && span_w >= 0, "conv2d: kernel larger than padded input");
  require(span_h % stride == 0 && span_w % stride == 0,
          "conv2d: non-integral output extent for stride " + std::to_string(stride));
  g.out_h = static_cast<std::size_t>(span_h) / g.stride + 1;
  g.out_w = static_cast<std::size_t>(span_w) / g.stride + 1;
  return g;
}

}  // namespace

template <typename T>
Var<T> conv2d(Var<T> input, Var<T> kernel, Var<T> bias, int stride, int padding) {
  Tape<T>& tape = *input.tape;
  const ConvGeometry g =
      conv_geometry(input.shape(), kernel.shape(), bias.shape(), stride, padding);
  const std::size_t np = g.out_pixels();

  Tensor<T> out(Shape{g.out_channels, g.out_h, g.out_w});
  MatMap<T> out_m(out.data(), g.out_channels, np);
  ConstMatMap<T> k_m(kernel.value().data(), g.out_channels, g.patch());
  if (g.pointwise()) {
    multiply(out_m, k_m, ConstMatMap<T>(input.value().data(), g.channels, np), false);
  } else {
    RowMat<T> cols(g.patch(), np);
    im2col(input.value().data(), g, cols.data());
    multiply(out_m, k_m, cols, false);
  }
  const T* b = bias.value().data();
  for (std::size_t o = 0; o < g.out_channels; ++o) out_m.row(o).array() += b[o];

  return tape.record(
      std::move(out), {input, kernel, bias},
      [input, kernel, bias, g](Tape<T>& t, const Tensor<T>& grad_out) {
        const std::size_t np = g.out_pixels();
        ConstMatMap<T> go(grad_out.data(), g.out_channels, np);
        if (Tensor<T>* db = t.grad_sink(bias)) {
          for (std::size_t o = 0; o < g.out_channels; ++o) {
            T acc{0};
            for (std::size_t p = 0; p < np; ++p) acc += grad_out[o * np + p];
            (*db)[o] += acc;
          }
        }
        Tensor<T>* dk = t.grad_sink(kernel);
        Tensor<T>* din = t.grad_sink(input);
        if (!dk && !din) return;
        const T* in = t.value(input).data();
        RowMat<T> cols;
        if (dk) {
          MatMap<T> dk_m(dk->data(), g.out_channels, g.patch());
          if (g.pointwise()) {
            multiply(dk_m, go, ConstMatMap<T>(in, g.channels, np).transpose(), true);
          } else {
            cols.resize(static_cast<Eigen::Index>(g.patch()), static_cast<Eigen::Index>(np));
            im2col(in, g, cols.data());
            multiply(dk_m, go, cols.transpose(), true);
          }
        }
        if (din) {
          ConstMatMap<T> k_m(t.value(kernel).data(), g.out_channels, g.patch());
          if (g.pointwise()) {
            multiply(MatMap<T>(din->data(), g.channels, np), k_m.transpose(), go, true);
          } else {
            RowMat<T> dcols(g.patch(), np);
            multiply(dcols, k_m.transpose(), go, false);
            col2im_add(dcols.data(), g, din->data());
          }
        }
      });
}

template <typename T>
Var<T> upsample_nearest2x(Var<T> input) {
  const Shape& s = input.shape();
  require_chw(s, "upsample_nearest2x");
  const std::size_t c = s[0], h = s[1], w = s[2];
  Tensor<T> out(Shape{c, 2 * h, 2 * w});
  const Tensor<T>& in = input.value();
  for (std::size_t ch = 0; ch < c; ++ch)
    for (std::size_t y = 0; y < 2 * h; ++y)
      for (std::size_t x = 0; x < 2 * w; ++x) out.at(ch, y, x) = in.at(ch, y / 2, x / 2);

  return input.tape->record(std::move(out), {input},
                            [input, c, h, w](Tape<T>& t, const Tensor<T>& go) {
                              Tensor<T>* din = t.grad_sink(input);
                              if (!din) return;
                              for (std::size_t ch = 0; ch < c; ++ch)
                                for (std::size_t y = 0; y < 2 * h; ++y)
                                  for (std::size_t x = 0; x < 2 * w; ++x)
                                    din->at(ch, y / 2, x / 2) += go.at(ch, y, x);
                            });
}

template <typename T>
Var<T> pool_max2x(Var<T> input) {
  const Shape& s = input.shape();
  require_chw(s, "pool_max2x");
  const std::size_t c = s[0], h = s[1], w = s[2];
  require(h % 2 == 0 && w % 2 == 0, "pool_max2x: odd extent " + to_string(s));
  const std::size_t oh = h / 2, ow = w / 2;
  Tensor<T> out(Shape{c, oh, ow});
  std::vector<std::uint32_t> argmax(out.size());
  const Tensor<T>& in = input.value();
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t y = 0; y < oh; ++y) {
      for (std::size_t x = 0; x < ow; ++x) {
        std::size_t best = (ch * h + 2 * y) * w + 2 * x;
        for (std::size_t dy = 0; dy < 2; ++dy) {
          for (std::size_t dx = 0; dx < 2; ++dx) {
            const std::size_t idx = (ch * h + 2 * y + dy) * w + 2 * x + dx;
            if (in[idx] > in[best]) best = idx;  // strict: first maximum wins
          }
        }
        const std::size_t o = (ch * oh + y) * ow + x;
        out[o] = in[best];
        argmax[o] = static_cast<std::uint32_t>(best);
      }
    }
  }
  if (input.tape->tracking_branches())
    for (std::uint32_t a : argmax) input.tape->note_branch(a);
  return input.tape->record(std::move(out), {input},
                            [input, argmax = std::move(argmax)](Tape<T>& t, const Tensor<T>& go) {
                              Tensor<T>* din = t.grad_sink(input);
                              if (!din) return;
                              for (std::size_t i = 0; i < argmax.size(); ++i)
                                (*din)[argmax[i]] += go[i];
                            });
}

template <typename T>
Var<T> leaky_relu(Var<T> input, std::type_identity_t<T> slope) {
  require(slope >= T{0} && slope < T{1}, "leaky_relu: slope must lie in [0, 1)");
  const Tensor<T>& in = input.value();
  Tensor<T> out(in.shape());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] > T{0} ? in[i] : slope * in[i];
  if (input.tape->tracking_branches())
    for (std::size_t i = 0; i < in.size(); ++i) input.tape->note_branch(i * 2 + (in[i] > T{0}));
  return input.tape->record(std::move(out), {input},
                            [input, slope](Tape<T>& t, const Tensor<T>& go) {
                              Tensor<T>* din = t.grad_sink(input);
                              if (!din) return;
                              const Tensor<T>& x = t.value(input);
                              for (std::size_t i = 0; i < x.size(); ++i)
                                (*din)[i] += x[i] > T{0} ? go[i] : slope * go[i];
                            });
}

template <typename T>
Var<T> concat_channels(Var<T> a, Var<T> b) {
  const Shape& sa = a.shape();
  const Shape& sb = b.shape();
  require_chw(sa, "concat_channels");
  require_chw(sb, "concat_channels");
  require(sa[1] == sb[1] && sa[2] == sb[2],
          "concat_channels: spatial mismatch " + to_string(sa) + " vs " + to_string(sb));
  const std::size_t na = a.value().size();
  std::vector<T> data;
  data.reserve(na + b.value().size());
  data.insert(data.end(), a.value().storage().begin(), a.value().storage().end());
  data.insert(data.end(), b.value().storage().begin(), b.value().storage().end());
  Tensor<T> out(Shape{sa[0] + sb[0], sa[1], sa[2]}, std::move(data));
  return a.tape->record(std::move(out), {a, b}, [a, b, na](Tape<T>& t, const Tensor<T>& go) {
    if (Tensor<T>* da = t.grad_sink(a))
      for (std::size_t i = 0; i < na; ++i) (*da)[i] += go[i];
    if (Tensor<T>* db = t.grad_sink(b))
      for (std::size_t i = 0; i < db->size(); ++i) (*db)[i] += go[na + i];
  });
}

namespace {

template <typename T>
Tensor<T> softmax_values(const Tensor<T>& logits) {
  const std::size_t k = logits.dim(0);
  const std::size_t np = logits.dim(1) * logits.dim(2);
  Tensor<T> p(logits.shape());
  for (std::size_t i = 0; i < np; ++i) {
    T m = logits[i];
    for (std::size_t c = 1; c < k; ++c) m = std::max(m, logits[c * np + i]);
    double z = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      const double e = std::exp(static_cast<double>(logits[c * np + i] - m));
      p[c * np + i] = static_cast<T>(e);
      z += e;
    }
    for (std::size_t c = 0; c < k; ++c)
      p[c * np + i] = static_cast<T>(static_cast<double>(p[c * np + i]) / z);
  }
  return p;
}

}  // namespace

template <typename T>
Var<T> softmax_channels(Var<T> logits) {
  require_chw(logits.shape(), "softmax_channels");
  require(logits.shape()[0] >= 1, "softmax_channels: need at least one channel");
  Tensor<T> p = softmax_values(logits.value());
  const std::size_t k = logits.shape()[0];
  const std::size_t np = logits.shape()[1] * logits.shape()[2];
  Tensor<T> saved = p;
  return logits.tape->record(
      std::move(p), {logits},
      [logits, saved = std::move(saved), k, np](Tape<T>& t, const Tensor<T>& go) {
        Tensor<T>* din = t.grad_sink(logits);
        if (!din) return;
        for (std::size_t i = 0; i < np; ++i) {
          T dot{0};
          for (std::size_t c = 0; c < k; ++c) dot += saved[c * np + i] * go[c * np + i];
          for (std::size_t c = 0; c < k; ++c)
            (*din)[c * np + i] += saved[c * np + i] * (go[c * np + i] - dot);
        }
      });
}

template <typename T>
Var<T> cross_entropy(Var<T> logits, std::span<const std::uint8_t> target) {
  const Shape& s = logits.shape();
  require_chw(s, "cross_entropy");
  const std::size_t k = s[0];
  const std::size_t np = s[1] * s[2];
  require(target.size() == np, "cross_entropy: target has " + std::to_string(target.size()) +
                                   " pixels, logits have " + std::to_string(np));
  for (auto v : target) {
    require(v < k, "cross_entropy: class index " + std::to_string(v) + " outside [0, " +
                       std::to_string(k) + ")");
  }
  const Tensor<T>& x = logits.value();
  Tensor<T> p(s);
  double total = 0.0;
  for (std::size_t i = 0; i < np; ++i) {
    double m = x[i];
    for (std::size_t c = 1; c < k; ++c) m = std::max(m, static_cast<double>(x[c * np + i]));
    double z = 0.0;
    for (std::size_t c = 0; c < k; ++c) z += std::exp(static_cast<double>(x[c * np + i]) - m);
    const double lse = m + std::log(z);
    total += lse - static_cast<double>(x[target[i] * np + i]);
    for (std::size_t c = 0; c < k; ++c)
      p[c * np + i] = static_cast<T>(std::exp(static_cast<double>(x[c * np + i]) - lse));
  }
  std::vector<std::uint8_t> labels(target.begin(), target.end());
  return logits.tape->record(
      Tensor<T>::scalar(static_cast<T>(total / static_cast<double>(np))), {logits},
      [logits, p = std::move(p), labels = std::move(labels), k, np](Tape<T>& t,
                                                                    const Tensor<T>& go) {
        Tensor<T>* din = t.grad_sink(logits);
        if (!din) return;
        const T w = go[0] / static_cast<T>(np);
        for (std::size_t c = 0; c < k; ++c) {
          for (std::size_t i = 0; i < np; ++i) {
            const T onehot = labels[i] == c ? T{1} : T{0};
            (*din)[c * np + i] += w * (p[c * np + i] - onehot);
          }
        }
      });
}

template <typename T>
Var<T> kl_diag_gaussian(Var<T> mu_q, Var<T> logvar_q, Var<T> mu_p, Var<T> logvar_p) {
  const std::size_t n = mu_q.value().size();
  require(logvar_q.value().size() == n && mu_p.value().size() == n &&
              logvar_p.value().size() == n,
          "kl_diag_gaussian: parameter lengths differ");
  const Tensor<T>& mq = mu_q.value();
  const Tensor<T>& lq = logvar_q.value();
  const Tensor<T>& mp = mu_p.value();
  const Tensor<T>& lp = logvar_p.value();
  double kl = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dl = static_cast<double>(lq[i]) - lp[i];
    const double dm = static_cast<double>(mp[i]) - mq[i];
    kl += 0.5 * (std::exp(dl) + dm * dm * std::exp(-static_cast<double>(lp[i])) - 1.0 - dl);
  }
  return mu_q.tape->record(
      Tensor<T>::scalar(static_cast<T>(kl)), {mu_q, logvar_q, mu_p, logvar_p},
      [mu_q, logvar_q, mu_p, logvar_p, n](Tape<T>& t, const Tensor<T>& go) {
        const Tensor<T>& mq = t.value(mu_q);
        const Tensor<T>& lq = t.value(logvar_q);
        const Tensor<T>& mp = t.value(mu_p);
        const Tensor<T>& lp = t.value(logvar_p);
        Tensor<T>* dmq = t.grad_sink(mu_q);
        Tensor<T>* dlq = t.grad_sink(logvar_q);
        Tensor<T>* dmp = t.grad_sink(mu_p);
        Tensor<T>* dlp = t.grad_sink(logvar_p);
        const T g = go[0];
        for (std::size_t i = 0; i < n; ++i) {
          const T inv_vp = std::exp(-lp[i]);
          const T ratio = std::exp(lq[i] - lp[i]);
          const T dm = mp[i] - mq[i];
          if (dmq) (*dmq)[i] -= g * dm * inv_vp;
          if (dmp) (*dmp)[i] += g * dm * inv_vp;
          if (dlq) (*dlq)[i] += g * T{0.5} * (ratio - T{1});
          if (dlp) (*dlp)[i] += g * T{0.5} * (T{1} - ratio - dm * dm * inv_vp);
        }
      });
}

template <typename T>
Var<T> sample_latent(Var<T> mu, Var<T> logvar, const Tensor<T>& noise) {
  const std::size_t n = mu.value().size();
  require(logvar.value().size() == n && noise.size() == n,
          "sample_latent: mu, logvar and noise lengths differ");
  Tensor<T> z(mu.shape());
  for (std::size_t i = 0; i < n; ++i)
    z[i] = mu.value()[i] + std::exp(T{0.5} * logvar.value()[i]) * noise[i];
  return mu.tape->record(std::move(z), {mu, logvar},
                         [mu, logvar, noise, n](Tape<T>& t, const Tensor<T>& go) {
                           if (Tensor<T>* dmu = t.grad_sink(mu))
                             for (std::size_t i = 0; i < n; ++i) (*dmu)[i] += go[i];
                           if (Tensor<T>* dlv = t.grad_sink(logvar)) {
                             const Tensor<T>& lv = t.value(logvar);
                             for (std::size_t i = 0; i < n; ++i)
                               (*dlv)[i] += go[i] * T{0.5} * std::exp(T{0.5} * lv[i]) * noise[i];
                           }
                         });
}

template <typename T>
Var<T> broadcast_spatial(Var<T> z, std::size_t height, std::size_t width) {
  const std::size_t n = z.value().size();
  const std::size_t np = height * width;
  Tensor<T> out(Shape{n, height, width});
  for (std::size_t c = 0; c < n; ++c)
    std::fill(out.data() + c * np, out.data() + (c + 1) * np, z.value()[c]);
  return z.tape->record(std::move(out), {z}, [z, n, np](Tape<T>& t, const Tensor<T>& go) {
    Tensor<T>* dz = t.grad_sink(z);
    if (!dz) return;
    for (std::size_t c = 0; c < n; ++c) {
      T acc{0};
      for (std::size_t i = 0; i < np; ++i) acc += go[c * np + i];
      (*dz)[c] += acc;
    }
  });
}

template <typename T>
Var<T> spatial_mean(Var<T> input) {
  const Shape& s = input.shape();
  require_chw(s, "spatial_mean");
  const std::size_t c = s[0];
  const std::size_t np = s[1] * s[2];
  Tensor<T> out(Shape{c, 1, 1});
  for (std::size_t ch = 0; ch < c; ++ch) {
    double acc = 0.0;
    for (std::size_t i = 0; i < np; ++i) acc += input.value()[ch * np + i];
    out[ch] = static_cast<T>(acc / static_cast<double>(np));
  }
  return input.tape->record(std::move(out), {input},
                            [input, c, np](Tape<T>& t, const Tensor<T>& go) {
                              Tensor<T>* din = t.grad_sink(input);
                              if (!din) return;
                              for (std::size_t ch = 0; ch < c; ++ch) {
                                const T g = go[ch] / static_cast<T>(np);
                                for (std::size_t i = 0; i < np; ++i) (*din)[ch * np + i] += g;
                              }
                            });
}

template <typename T>
Var<T> clamp(Var<T> input, std::type_identity_t<T> lo, std::type_identity_t<T> hi) {
  require(lo <= hi, "clamp: lo > hi");
  const Tensor<T>& in = input.value();
  Tensor<T> out(in.shape());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = std::clamp(in[i], lo, hi);
  if (input.tape->tracking_branches())
    for (std::size_t i = 0; i < in.size(); ++i)
      input.tape->note_branch(i * 3 + (in[i] < lo ? 0 : in[i] > hi ? 2 : 1));
  return input.tape->record(std::move(out), {input},
                            [input, lo, hi](Tape<T>& t, const Tensor<T>& go) {
                              Tensor<T>* din = t.grad_sink(input);
                              if (!din) return;
                              const Tensor<T>& x = t.value(input);
                              for (std::size_t i = 0; i < x.size(); ++i)
                                if (x[i] >= lo && x[i] <= hi) (*din)[i] += go[i];
                            });
}

template <typename T>
Var<T> add(Var<T> a, Var<T> b) {
  require(a.shape() == b.shape(),
          "add: shape mismatch " + to_string(a.shape()) + " vs " + to_string(b.shape()));
  Tensor<T> out(a.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.value()[i] + b.value()[i];
  return a.tape->record(std::move(out), {a, b}, [a, b](Tape<T>& t, const Tensor<T>& go) {
    if (Tensor<T>* da = t.grad_sink(a))
      for (std::size_t i = 0; i < go.size(); ++i) (*da)[i] += go[i];
    if (Tensor<T>* db = t.grad_sink(b))
      for (std::size_t i = 0; i < go.size(); ++i) (*db)[i] += go[i];
  });
}

template <typename T>
Var<T> mul(Var<T> a, Var<T> b) {
  require(a.shape() == b.shape(),
          "mul: shape mismatch " + to_string(a.shape()) + " vs " + to_string(b.shape()));
  Tensor<T> out(a.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.value()[i] * b.value()[i];
  return a.tape->record(std::move(out), {a, b}, [a, b](Tape<T>& t, const Tensor<T>& go) {
    const Tensor<T>& av = t.value(a);
    const Tensor<T>& bv = t.value(b);
    if (Tensor<T>* da = t.grad_sink(a))
      for (std::size_t i = 0; i < go.size(); ++i) (*da)[i] += go[i] * bv[i];
    if (Tensor<T>* db = t.grad_sink(b))
      for (std::size_t i = 0; i < go.size(); ++i) (*db)[i] += go[i] * av[i];
  });
}

template <typename T>
Var<T> scale(Var<T> a, std::type_identity_t<T> factor) {
  Tensor<T> out(a.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.value()[i] * factor;
  return a.tape->record(std::move(out), {a}, [a, factor](Tape<T>& t, const Tensor<T>& go) {
    if (Tensor<T>* da = t.grad_sink(a))
      for (std::size_t i = 0; i < go.size(); ++i) (*da)[i] += go[i] * factor;
  });
}

template <typename T>
Var<T> sum(Var<T> a) {
  double acc = 0.0;
  for (T v : a.value().values()) acc += v;
  return a.tape->record(Tensor<T>::scalar(static_cast<T>(acc)), {a},
                        [a](Tape<T>& t, const Tensor<T>& go) {
                          if (Tensor<T>* da = t.grad_sink(a))
                            for (std::size_t i = 0; i < da->size(); ++i) (*da)[i] += go[0];
                        });
}

#define RESMAP_INSTANTIATE_OPS(T)                                                   \
  template Var<T> conv2d(Var<T>, Var<T>, Var<T>, int, int);                         \
  template Var<T> upsample_nearest2x(Var<T>);                                       \
  template Var<T> pool_max2x(Var<T>);                                               \
  template Var<T> leaky_relu(Var<T>, T);                                            \
  template Var<T> concat_channels(Var<T>, Var<T>);                                  \
  template Var<T> softmax_channels(Var<T>);                                         \
  template Var<T> cross_entropy(Var<T>, std::span<const std::uint8_t>);             \
  template Var<T> kl_diag_gaussian(Var<T>, Var<T>, Var<T>, Var<T>);                 \
  template Var<T> sample_latent(Var<T>, Var<T>, const Tensor<T>&);                  \
  template Var<T> broadcast_spatial(Var<T>, std::size_t, std::size_t);              \
  template Var<T> spatial_mean(Var<T>);                                             \
  template Var<T> clamp(Var<T>, T, T);                                              \
  template Var<T> add(Var<T>, Var<T>);                                              \
  template Var<T> mul(Var<T>, Var<T>);                                              \
  template Var<T> scale(Var<T>, T);                                                 \
  template Var<T> sum(Var<T>);

RESMAP_INSTANTIATE_OPS(float)
RESMAP_INSTANTIATE_OPS(double)

#undef RESMAP_INSTANTIATE_OPS

}  // namespace resmap::tensor
