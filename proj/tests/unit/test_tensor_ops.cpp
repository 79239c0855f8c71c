#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <vector>

#include "../support/gradcheck.hpp"
#include "resmap/rng.hpp"
#include "resmap/tensor/ops.hpp"

using namespace resmap;
using namespace resmap::tensor;
using resmap::testing::gradient_check;
using resmap::testing::random_tensor;

namespace {

// Fixed random linear functional so that gradient checks of non-scalar ops
// have a scalar loss with generic (non-symmetric) output weights.
template <typename T>
Var<T> weighted_sum(Var<T> out, std::uint64_t seed) {
  Rng rng(seed);
  Tensor<T> w(out.shape());
  for (auto& v : w.values()) v = static_cast<T>(rng.uniform(-1.0, 1.0));
  return sum(mul(out, out.tape->constant(std::move(w))));
}

}  // namespace

TEST(Conv2d, IdentityKernelReproducesInput) {
  Tape<float> tape;
  Rng rng(1);
  auto x = tape.constant(random_tensor({3, 5, 4}, rng).cast<float>());
  Tensor<float> k(Shape{3, 3, 1, 1});
  for (std::size_t c = 0; c < 3; ++c) k[c * 3 + c] = 1.0f;
  auto y = conv2d(x, tape.constant(k), tape.constant(Tensor<float>(Shape{3})), 1, 0);
  EXPECT_EQ(y.value(), x.value());
}

TEST(Conv2d, SingleChannelIdentityKernel) {
  Tape<float> tape;
  Rng rng(2);
  auto x = tape.constant(random_tensor({1, 6, 6}, rng).cast<float>());
  auto y = conv2d(x, tape.constant(Tensor<float>(Shape{1, 1, 1, 1}, 1.0f)),
                  tape.constant(Tensor<float>(Shape{1})), 1, 0);
  EXPECT_EQ(y.value(), x.value());
}

TEST(Conv2d, OnesKernelOverOnesInputGivesNine) {
  Tape<float> tape;
  auto x = tape.constant(Tensor<float>(Shape{1, 5, 5}, 1.0f));
  auto y = conv2d(x, tape.constant(Tensor<float>(Shape{1, 1, 3, 3}, 1.0f)),
                  tape.constant(Tensor<float>(Shape{1})), 1, 0);
  ASSERT_EQ(y.shape(), (Shape{1, 3, 3}));
  for (float v : y.value().values()) EXPECT_EQ(v, 9.0f);
}

TEST(Conv2d, StrideAndPaddingExtents) {
  Tape<float> tape;
  auto x = tape.constant(Tensor<float>(Shape{2, 8, 8}, 1.0f));
  auto y = conv2d(x, tape.constant(Tensor<float>(Shape{4, 2, 3, 3}, 1.0f)),
                  tape.constant(Tensor<float>(Shape{4})), 1, 1);
  EXPECT_EQ(y.shape(), (Shape{4, 8, 8}));
  auto z = conv2d(x, tape.constant(Tensor<float>(Shape{4, 2, 2, 2}, 1.0f)),
                  tape.constant(Tensor<float>(Shape{4})), 2, 0);
  EXPECT_EQ(z.shape(), (Shape{4, 4, 4}));
}

TEST(Conv2d, Errors) {
  Tape<float> tape;
  auto x = tape.constant(Tensor<float>(Shape{2, 8, 8}));
  auto b = tape.constant(Tensor<float>(Shape{1}));
  EXPECT_THROW(conv2d(x, tape.constant(Tensor<float>(Shape{1, 3, 3, 3})), b, 1, 0), ShapeError);
  // (8 - 3) / 2 is not integral.
  EXPECT_THROW(conv2d(x, tape.constant(Tensor<float>(Shape{1, 2, 3, 3})), b, 2, 0), ShapeError);
  EXPECT_THROW(conv2d(x, tape.constant(Tensor<float>(Shape{1, 2, 3, 3})), b, 0, 0), ShapeError);
  EXPECT_THROW(conv2d(x, tape.constant(Tensor<float>(Shape{1, 2, 3, 3})), b, 1, -1), ShapeError);
}

TEST(Conv2d, GradientMatchesFiniteDifferences) {
  Rng rng(3);
  std::vector<Tensor<double>> in{random_tensor({2, 8, 8}, rng), random_tensor({4, 2, 3, 3}, rng),
                                 random_tensor({4}, rng)};
  auto r = gradient_check(in, [](auto&, auto& v) {
    return weighted_sum(conv2d(v[0], v[1], v[2], 1, 1), 99);
  });
  EXPECT_LT(r.max_rel_error, 1e-3) << "abs " << r.max_abs_error;

  auto strided = gradient_check(in, [](auto&, auto& v) {
    return weighted_sum(conv2d(v[0], v[1], v[2], 1, 0), 98);
  });
  EXPECT_LT(strided.max_rel_error, 1e-3);
}

TEST(Upsample, ReplicatesEachPixel) {
  Tape<float> tape;
  auto x = tape.leaf(Tensor<float>(Shape{1, 1, 1}, 3.0f));
  auto y = upsample_nearest2x(x);
  ASSERT_EQ(y.shape(), (Shape{1, 2, 2}));
  for (float v : y.value().values()) EXPECT_EQ(v, 3.0f);
  tape.backward(sum(y));
  EXPECT_EQ(tape.grad(x)[0], 4.0f);
}

TEST(Upsample, GradientMatchesFiniteDifferences) {
  Rng rng(4);
  auto r = gradient_check({random_tensor({3, 4, 4}, rng)}, [](auto&, auto& v) {
    return weighted_sum(upsample_nearest2x(v[0]), 7);
  });
  EXPECT_LT(r.max_rel_error, 1e-4);
}

TEST(PoolMax, TakesBlockMaximum) {
  Tape<float> tape;
  auto x = tape.constant(Tensor<float>(Shape{1, 2, 2}, {1, 2, 3, 4}));
  EXPECT_EQ(pool_max2x(x).value()[0], 4.0f);
}

TEST(PoolMax, TiesRouteGradientToFirstElement) {
  Tape<float> tape;
  auto x = tape.leaf(Tensor<float>(Shape{1, 4, 4}, 2.0f));
  tape.backward(sum(pool_max2x(x)));
  const auto& g = tape.grad(x);
  for (std::size_t y = 0; y < 4; ++y)
    for (std::size_t xx = 0; xx < 4; ++xx)
      EXPECT_EQ(g.at(0, y, xx), (y % 2 == 0 && xx % 2 == 0) ? 1.0f : 0.0f);
}

TEST(PoolMax, OddExtentRejected) {
  Tape<float> tape;
  EXPECT_THROW(pool_max2x(tape.constant(Tensor<float>(Shape{1, 3, 4}))), ShapeError);
}

TEST(PoolMax, GradientMatchesFiniteDifferences) {
  Rng rng(5);
  auto r = gradient_check({random_tensor({2, 6, 6}, rng)}, [](auto&, auto& v) {
    return weighted_sum(pool_max2x(v[0]), 8);
  });
  EXPECT_LT(r.max_rel_error, 1e-4);
}

TEST(LeakyRelu, Values) {
  Tape<float> tape;
  auto x = tape.constant(Tensor<float>(Shape{3}, {-1, 0, 2}));
  EXPECT_EQ(relu(x).value(), Tensor<float>(Shape{3}, {0, 0, 2}));
  EXPECT_EQ(leaky_relu(x, 0.1f).value(), Tensor<float>(Shape{3}, {-0.1f, 0, 2}));
  EXPECT_THROW(leaky_relu(x, 1.0f), ShapeError);
}

TEST(LeakyRelu, SubgradientAtZeroIsSlope) {
  Tape<float> tape;
  auto x = tape.leaf(Tensor<float>(Shape{1}, 0.0f));
  tape.backward(sum(leaky_relu(x, 0.25f)));
  EXPECT_EQ(tape.grad(x)[0], 0.25f);
}

TEST(LeakyRelu, SlopeOneLimitIsIdentity) {
  // slope is restricted to [0, 1); approach the limit from below.
  Tape<double> tape;
  Rng rng(6);
  auto x = tape.constant(random_tensor({10}, rng));
  auto y = leaky_relu(x, std::nextafter(1.0, 0.0));
  for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(y.value()[i], x.value()[i], 1e-15);
}

TEST(LeakyRelu, GradientMatchesFiniteDifferencesAwayFromZero) {
  Rng rng(7);
  Tensor<double> x = random_tensor({40}, rng);
  for (auto& v : x.values()) v = v < 0 ? v - 0.05 : v + 0.05;
  auto r = gradient_check({x}, [](auto&, auto& v) {
    return weighted_sum(leaky_relu(v[0], 0.1), 9);
  });
  EXPECT_LT(r.max_rel_error, 1e-5);
}

TEST(Concat, StacksChannels) {
  Tape<float> tape;
  auto a = tape.leaf(Tensor<float>(Shape{1, 2, 2}, 1.0f));
  auto b = tape.leaf(Tensor<float>(Shape{1, 2, 2}, 2.0f));
  auto c = concat_channels(a, b);
  ASSERT_EQ(c.shape(), (Shape{2, 2, 2}));
  EXPECT_EQ(c.value().at(0, 1, 1), 1.0f);
  EXPECT_EQ(c.value().at(1, 0, 0), 2.0f);
}

TEST(Concat, EmptyOperandIsIdentity) {
  Tape<float> tape;
  Rng rng(8);
  auto a = tape.constant(random_tensor({2, 3, 3}, rng).cast<float>());
  auto b = tape.constant(Tensor<float>(Shape{0, 3, 3}));
  EXPECT_EQ(concat_channels(a, b).value(), a.value());
}

TEST(Concat, SpatialMismatchRejected) {
  Tape<float> tape;
  EXPECT_THROW(concat_channels(tape.constant(Tensor<float>(Shape{1, 2, 2})),
                               tape.constant(Tensor<float>(Shape{1, 2, 3}))),
               ShapeError);
}

TEST(Concat, GradientSplitsByChannel) {
  Rng rng(9);
  auto r = gradient_check({random_tensor({2, 3, 3}, rng), random_tensor({3, 3, 3}, rng)},
                          [](auto&, auto& v) {
                            return weighted_sum(concat_channels(v[0], v[1]), 10);
                          });
  EXPECT_LT(r.max_rel_error, 1e-4);
}

TEST(Softmax, UniformForZeroLogits) {
  Tape<float> tape;
  auto p = softmax_channels(tape.constant(Tensor<float>(Shape{5, 2, 2})));
  for (float v : p.value().values()) EXPECT_NEAR(v, 0.2f, 1e-7f);
}

TEST(Softmax, AnalyticTwoClass) {
  Tape<double> tape;
  auto p = softmax_channels(tape.constant(Tensor<double>(Shape{2, 1, 1}, {std::log(2.0), 0.0})));
  EXPECT_NEAR(p.value()[0], 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(p.value()[1], 1.0 / 3.0, 1e-12);
}

TEST(Softmax, LargeLogitsMatchHighPrecisionOracle) {
  Rng rng(10);
  Tape<float> tape;
  Tensor<float> logits(Shape{5, 4, 4});
  for (auto& v : logits.values()) v = static_cast<float>(rng.uniform(-1e4, 1e4));
  logits[0] = 1e4f;
  logits[16] = -1e4f;
  auto p = softmax_channels(tape.constant(logits));
  for (std::size_t i = 0; i < 16; ++i) {
    long double m = logits[i];
    for (std::size_t c = 1; c < 5; ++c) m = std::max<long double>(m, logits[c * 16 + i]);
    long double z = 0;
    for (std::size_t c = 0; c < 5; ++c) z += std::exp(static_cast<long double>(logits[c * 16 + i]) - m);
    for (std::size_t c = 0; c < 5; ++c) {
      const long double expected = std::exp(static_cast<long double>(logits[c * 16 + i]) - m) / z;
      ASSERT_TRUE(std::isfinite(p.value()[c * 16 + i]));
      EXPECT_NEAR(p.value()[c * 16 + i], static_cast<double>(expected), 1e-6);
    }
  }
}

TEST(Softmax, SumsToOneProperty) {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const double mag = std::pow(10.0, rng.uniform(-2.0, 4.0));
    Tape<float> tape;
    Tensor<float> logits(Shape{5, 3, 3});
    for (auto& v : logits.values()) v = static_cast<float>(rng.uniform(-mag, mag));
    auto p = softmax_channels(tape.constant(logits));
    for (std::size_t i = 0; i < 9; ++i) {
      double s = 0.0;
      for (std::size_t c = 0; c < 5; ++c) {
        EXPECT_GE(p.value()[c * 9 + i], 0.0f);
        s += p.value()[c * 9 + i];
      }
      EXPECT_NEAR(s, 1.0, 1e-6);
    }
  }
}

TEST(Softmax, GradientMatchesFiniteDifferences) {
  Rng rng(12);
  auto r = gradient_check({random_tensor({5, 4, 4}, rng, -2, 2)}, [](auto&, auto& v) {
    return weighted_sum(softmax_channels(v[0]), 11);
  });
  EXPECT_LT(r.max_rel_error, 1e-3);
}

TEST(CrossEntropy, UniformPredictionGivesLnK) {
  Tape<float> tape;
  std::vector<std::uint8_t> target{0, 1, 2, 3, 4, 4, 3, 0, 1};
  auto ce = cross_entropy(tape.constant(Tensor<float>(Shape{5, 3, 3})), target);
  EXPECT_NEAR(ce.value()[0], std::log(5.0), 1e-6);
}

TEST(CrossEntropy, ConfidentCorrectIsZero) {
  Tape<float> tape;
  std::vector<std::uint8_t> target{0, 3, 4, 1};
  Tensor<float> logits(Shape{5, 2, 2});
  for (std::size_t i = 0; i < 4; ++i) logits[target[i] * 4 + i] = 1e4f;
  EXPECT_NEAR(cross_entropy(tape.constant(logits), target).value()[0], 0.0, 1e-6);
}

TEST(CrossEntropy, OutOfRangeClassRejected) {
  Tape<float> tape;
  std::vector<std::uint8_t> target{0, 5, 1, 1};
  EXPECT_THROW(cross_entropy(tape.constant(Tensor<float>(Shape{5, 2, 2})), target), ShapeError);
}

TEST(CrossEntropy, GradientMatchesFiniteDifferences) {
  Rng rng(13);
  std::vector<std::uint8_t> target(16 * 16);
  for (auto& t : target) t = static_cast<std::uint8_t>(rng.below(5));
  auto r = gradient_check({random_tensor({5, 16, 16}, rng, -3, 3)},
                          [&](auto&, auto& v) { return cross_entropy(v[0], target); });
  EXPECT_LT(r.max_rel_error, 1e-3);
}

TEST(KlDiagGaussian, IdenticalIsZero) {
  Tape<double> tape;
  Rng rng(14);
  auto mu = tape.constant(random_tensor({6}, rng));
  auto lv = tape.constant(random_tensor({6}, rng));
  EXPECT_NEAR(kl_diag_gaussian(mu, lv, mu, lv).value()[0], 0.0, 1e-12);
}

TEST(KlDiagGaussian, ShiftedMeanAgainstStandardNormal) {
  Tape<float> tape;
  auto kl = kl_diag_gaussian(tape.constant(Tensor<float>(Shape{1}, 1.0f)),
                             tape.constant(Tensor<float>(Shape{1})),
                             tape.constant(Tensor<float>(Shape{1})),
                             tape.constant(Tensor<float>(Shape{1})));
  EXPECT_NEAR(kl.value()[0], 0.5f, 1e-7f);
}

TEST(KlDiagGaussian, LengthMismatchRejected) {
  Tape<float> tape;
  auto a = tape.constant(Tensor<float>(Shape{2}));
  auto b = tape.constant(Tensor<float>(Shape{3}));
  EXPECT_THROW(kl_diag_gaussian(a, a, b, a), ShapeError);
}

TEST(KlDiagGaussian, MatchesMonteCarloEstimate) {
  Rng rng(15);
  constexpr std::size_t L = 3;
  Tensor<double> mq = random_tensor({L}, rng), lq = random_tensor({L}, rng),
                 mp = random_tensor({L}, rng), lp = random_tensor({L}, rng);
  Tape<double> tape;
  const double kl = kl_diag_gaussian(tape.constant(mq), tape.constant(lq), tape.constant(mp),
                                     tape.constant(lp)).value()[0];
  auto log_normal = [](double x, double mu, double logvar) {
    return -0.5 * (std::log(2.0 * std::numbers::pi) + logvar +
                   (x - mu) * (x - mu) / std::exp(logvar));
  };
  constexpr int kSamples = 1'000'000;
  double acc = 0.0;
  Rng draw(16);
  for (int s = 0; s < kSamples; ++s) {
    for (std::size_t i = 0; i < L; ++i) {
      const double x = mq[i] + std::exp(0.5 * lq[i]) * draw.normal();
      acc += log_normal(x, mq[i], lq[i]) - log_normal(x, mp[i], lp[i]);
    }
  }
  const double mc = acc / kSamples;
  EXPECT_NEAR(mc, kl, 0.01 * kl);
}

TEST(KlDiagGaussian, NonNegativeProperty) {
  Rng rng(17);
  for (int trial = 0; trial < 2000; ++trial) {
    Tape<float> tape;
    const std::size_t L = 1 + rng.below(8);
    auto r = [&] { return tape.constant(random_tensor({L}, rng, -5, 5).cast<float>()); };
    auto a = r(), b = r(), c = r(), d = r();
    EXPECT_GE(kl_diag_gaussian(a, b, c, d).value()[0], -1e-7f);
    EXPECT_GE(kl_diag_gaussian(a, b, a, b).value()[0], -1e-7f);
  }
}

TEST(KlDiagGaussian, GradientMatchesFiniteDifferences) {
  Rng rng(18);
  std::vector<Tensor<double>> in{random_tensor({6}, rng), random_tensor({6}, rng),
                                 random_tensor({6}, rng), random_tensor({6}, rng)};
  auto r = gradient_check(in, [](auto&, auto& v) {
    return kl_diag_gaussian(v[0], v[1], v[2], v[3]);
  });
  EXPECT_LT(r.max_rel_error, 1e-3);
}

TEST(SampleLatent, ZeroNoiseReturnsMean) {
  Tape<float> tape;
  auto mu = tape.constant(Tensor<float>(Shape{3}, {1, -2, 3}));
  auto lv = tape.constant(Tensor<float>(Shape{3}, {0.5f, -1, 2}));
  EXPECT_EQ(sample_latent(mu, lv, Tensor<float>(Shape{3})).value(), mu.value());
}

TEST(SampleLatent, UnitVarianceUnitNoise) {
  Tape<float> tape;
  auto mu = tape.constant(Tensor<float>(Shape{2}, {1, -2}));
  auto z = sample_latent(mu, tape.constant(Tensor<float>(Shape{2})), Tensor<float>(Shape{2}, 1.0f));
  EXPECT_EQ(z.value(), Tensor<float>(Shape{2}, {2, -1}));
}

TEST(SampleLatent, LengthMismatchRejected) {
  Tape<float> tape;
  auto mu = tape.constant(Tensor<float>(Shape{2}));
  EXPECT_THROW(sample_latent(mu, mu, Tensor<float>(Shape{3})), ShapeError);
}

TEST(SampleLatent, EmpiricalVarianceMatches) {
  const double logvar = 0.7;
  Rng rng(19);
  constexpr int n = 100'000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    Tape<double> tape;
    auto z = sample_latent(tape.constant(Tensor<double>(Shape{1}, 0.3)),
                           tape.constant(Tensor<double>(Shape{1}, logvar)),
                           Tensor<double>(Shape{1}, rng.normal()));
    s += z.value()[0];
    s2 += z.value()[0] * z.value()[0];
  }
  const double mean = s / n;
  const double var = s2 / n - mean * mean;
  EXPECT_NEAR(var, std::exp(logvar), 0.03 * std::exp(logvar));
}

TEST(SampleLatent, GradientMatchesFiniteDifferences) {
  Rng rng(20);
  Tensor<double> noise = random_tensor({4}, rng);
  auto r = gradient_check({random_tensor({4}, rng), random_tensor({4}, rng)},
                          [&](auto&, auto& v) {
                            using T = typename std::decay_t<decltype(v[0].value())>::value_type;
                            return weighted_sum(sample_latent(v[0], v[1], noise.cast<T>()), 12);
                          });
  EXPECT_LT(r.max_rel_error, 1e-3);
}

TEST(MiscOps, GradientsMatchFiniteDifferences) {
  Rng rng(21);
  auto r = gradient_check({random_tensor({3, 1, 1}, rng), random_tensor({3, 4, 4}, rng)},
                          [](auto&, auto& v) {
                            auto b = broadcast_spatial(v[0], 4, 4);
                            auto m = spatial_mean(mul(add(b, v[1]), v[1]));
                            return weighted_sum(clamp(scale(m, 2.0), -0.5, 0.5), 13);
                          });
  EXPECT_LT(r.max_rel_error, 1e-4);
}

TEST(Backward, SumGivesOnes) {
  Tape<float> tape;
  auto x = tape.leaf(Tensor<float>(Shape{4}, {1, 2, 3, 4}));
  tape.backward(sum(x));
  EXPECT_EQ(tape.grad(x), Tensor<float>(Shape{4}, 1.0f));
}

TEST(Backward, SumOfSquares) {
  Tape<float> tape;
  auto x = tape.leaf(Tensor<float>(Shape{2}, {1, 2}));
  tape.backward(sum(mul(x, x)));
  EXPECT_EQ(tape.grad(x), Tensor<float>(Shape{2}, {2, 4}));
}

TEST(Backward, NonScalarLossRejected) {
  Tape<float> tape;
  auto x = tape.leaf(Tensor<float>(Shape{2}, {1, 2}));
  EXPECT_THROW(tape.backward(mul(x, x)), ShapeError);
}

TEST(Backward, StaleTapeRejected) {
  Tape<float> tape;
  auto x = tape.leaf(Tensor<float>(Shape{2}, {1, 2}));
  auto loss = sum(x);
  tape.backward(loss);
  EXPECT_THROW(tape.backward(loss), std::logic_error);
}

TEST(Backward, UnusedLeafGetsZeroGradient) {
  Tape<float> tape;
  auto x = tape.leaf(Tensor<float>(Shape{2}, {1, 2}));
  auto unused = tape.leaf(Tensor<float>(Shape{3}, 5.0f));
  tape.backward(sum(x));
  EXPECT_EQ(tape.grad(unused), Tensor<float>(Shape{3}));
}

TEST(Backward, CompositeGraphMatchesFiniteDifferences) {
  Rng rng(22);
  std::vector<std::uint8_t> target(8 * 8);
  for (auto& t : target) t = static_cast<std::uint8_t>(rng.below(5));
  std::vector<Tensor<double>> in{random_tensor({3, 16, 16}, rng), random_tensor({5, 3, 3, 3}, rng),
                                 random_tensor({5}, rng)};
  auto r = gradient_check(in, [&](auto&, auto& v) {
    return cross_entropy(pool_max2x(relu(conv2d(v[0], v[1], v[2], 1, 1))), target);
  });
  EXPECT_LT(r.max_rel_error, 1e-3);
}

TEST(Backward, DeterministicGradients) {
  auto run = [] {
    Rng rng(23);
    Tape<float> tape;
    auto x = tape.leaf(random_tensor({3, 16, 16}, rng).cast<float>());
    auto k = tape.leaf(random_tensor({4, 3, 3, 3}, rng).cast<float>());
    auto b = tape.leaf(random_tensor({4}, rng).cast<float>());
    tape.backward(sum(pool_max2x(leaky_relu(conv2d(x, k, b, 1, 1), 0.1f))));
    return std::vector<Tensor<float>>{tape.grad(x), tape.grad(k), tape.grad(b)};
  };
  const auto a = run();
  const auto b = run();
  for (std::size_t i = 0; i < a.size(); ++i) {
    ASSERT_EQ(a[i].size(), b[i].size());
    EXPECT_EQ(0, std::memcmp(a[i].data(), b[i].data(), a[i].size() * sizeof(float)));
  }
}

TEST(BranchSignature, TracksPiecewiseChoices) {
  auto signature = [](std::vector<double> values, bool track) {
    Tape<double> tape;
    tape.track_branches(track);
    const auto x = tape.constant(Tensor<double>(Shape{1, 2, 2}, std::move(values)));
    pool_max2x(leaky_relu(x, 0.1));
    clamp(x, -1.0, 1.0);
    return tape.branch_signature();
  };
  const auto base = signature({0.5, -0.2, 0.3, 0.1}, true);
  EXPECT_EQ(signature({0.6, -0.3, 0.2, 0.1}, true), base);
  EXPECT_NE(signature({0.5, 0.2, 0.3, 0.1}, true), base);   // leaky sign
  EXPECT_NE(signature({0.2, -0.2, 0.3, 0.1}, true), base);   // pool argmax
  EXPECT_NE(signature({0.5, -0.2, 0.3, -1.5}, true), base);  // clamp and sign
  EXPECT_NE(signature({0.5, -0.2, 1.5, 0.1}, true), base);   // clamp saturation
  EXPECT_EQ(signature({0.5, -0.2, 0.3, 0.1}, false), 0u);
}
