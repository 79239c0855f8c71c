#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "resmap/errors.hpp"
#include "resmap/mapping/distribution.hpp"
#include "resmap/mapping/metrics.hpp"
#include "resmap/rng.hpp"

namespace resmap::mapping {
namespace {

LevelMap random_map(Rng& rng, std::uint32_t w = 16, std::uint32_t h = 16, int classes = kNumLevels) {
  LevelMap m(w, h);
  for (auto& v : m.levels) v = static_cast<std::uint8_t>(rng.below(static_cast<std::uint64_t>(classes)));
  return m;
}

LevelMap from_list(std::uint32_t w, std::uint32_t h, std::vector<std::uint8_t> v) {
  LevelMap m(w, h);
  m.levels = std::move(v);
  return m;
}

// Oracle IoU from explicit pixel index sets.
double oracle_iou(const LevelMap& a, const LevelMap& b, int k) {
  std::set<std::size_t> sa, sb, uni;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.levels[i] == k) sa.insert(i), uni.insert(i);
    if (b.levels[i] == k) sb.insert(i), uni.insert(i);
  }
  std::size_t inter = 0;
  for (auto i : sa) inter += sb.count(i);
  return uni.empty() ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni.size());
}

double oracle_distance(const LevelMap& a, const LevelMap& b) {
  std::set<int> present(a.levels.begin(), a.levels.end());
  present.insert(b.levels.begin(), b.levels.end());
  if (present.empty()) return 0.0;
  double sum = 0.0;
  for (int k : present) sum += oracle_iou(a, b, k);
  return 1.0 - sum / static_cast<double>(present.size());
}

double oracle_ged(const std::vector<LevelMap>& a, const std::vector<LevelMap>& b) {
  auto mean = [](const std::vector<LevelMap>& x, const std::vector<LevelMap>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t j = 0; j < y.size(); ++j) s += oracle_distance(x[i], y[j]);
    return s / static_cast<double>(x.size() * y.size());
  };
  return 2.0 * mean(a, b) - mean(a, a) - mean(b, b);
}

TEST(Aggregate, IdenticalMapsAreOneHot) {
  Rng rng(1);
  const LevelMap m = random_map(rng);
  const std::vector<LevelMap> s(7, m);
  const DistributionMap d = aggregate(s);
  EXPECT_EQ(d.samples, 7u);
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (int k = 0; k < kNumLevels; ++k) EXPECT_EQ(d.p(k, i), k == m.levels[i] ? 1.0 : 0.0);
    EXPECT_EQ(d.entropy[i], 0.0);
  }
  d.validate();
  EXPECT_EQ(mode_map(d), m);
}

TEST(Aggregate, EachClassOnceGivesUniform) {
  std::vector<LevelMap> s;
  for (int k = 0; k < kNumLevels; ++k) {
    LevelMap m(4, 3);
    for (std::size_t i = 0; i < m.size(); ++i) m.levels[i] = static_cast<std::uint8_t>((k + i) % 5);
    s.push_back(m);
  }
  const DistributionMap d = aggregate(s);
  for (std::size_t i = 0; i < d.pixel_count(); ++i) {
    for (int k = 0; k < kNumLevels; ++k) EXPECT_DOUBLE_EQ(d.p(k, i), 0.2);
    EXPECT_NEAR(d.entropy[i], std::log(5.0), 1e-12);
  }
  for (double f : coverage_fractions(d)) EXPECT_NEAR(f, 0.2, 1e-12);
}

TEST(Aggregate, MatchesRecountOnRandomFixtures) {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 1 + rng.below(12);
    std::vector<LevelMap> s;
    for (std::size_t i = 0; i < m; ++i) s.push_back(random_map(rng));
    const DistributionMap d = aggregate(s);
    for (std::size_t p = 0; p < 256; ++p) {
      std::map<int, int> counts;
      for (const auto& x : s) ++counts[x.levels[p]];
      double h = 0.0;
      for (int k = 0; k < kNumLevels; ++k) {
        const double expect = counts[k] / static_cast<double>(m);
        ASSERT_NEAR(d.p(k, p), expect, 1e-12);
        if (expect > 0) h -= expect * std::log(expect);
      }
      ASSERT_NEAR(d.entropy[p], h, 1e-9);
      ASSERT_GE(d.entropy[p], 0.0);
      ASSERT_LE(d.entropy[p], std::log(5.0) + 1e-12);
    }
    d.validate();
    // Mean of per-sample coverage equals coverage of the aggregate.
    Fractions mean{};
    for (const auto& x : s) {
      const Fractions f = coverage_fractions(x);
      for (int k = 0; k < kNumLevels; ++k) mean[k] += f[k] / static_cast<double>(m);
    }
    const Fractions agg = coverage_fractions(d);
    for (int k = 0; k < kNumLevels; ++k) ASSERT_NEAR(agg[k], mean[k], 1e-9);
  }
}

TEST(Aggregate, Errors) {
  EXPECT_THROW(aggregate(std::vector<LevelMap>{}), std::invalid_argument);
  EXPECT_THROW(aggregate(std::vector<LevelMap>{LevelMap(4, 4), LevelMap(4, 5)}), ShapeError);
  LevelMap bad(2, 2);
  bad.levels[0] = 7;
  EXPECT_THROW(aggregate(std::vector<LevelMap>{bad}), ShapeError);
}

TEST(Coverage, AllHeavyAndRandomHistogram) {
  const Fractions f = coverage_fractions(LevelMap(5, 5, 3));
  EXPECT_EQ(f, (Fractions{0, 0, 0, 1, 0}));
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const LevelMap m = random_map(rng);
    std::array<int, kNumLevels> hist{};
    for (std::size_t y = 0; y < 16; ++y)
      for (std::size_t x = 0; x < 16; ++x) ++hist[m.at(y, x)];
    const Fractions got = coverage_fractions(m);
    double sum = 0.0;
    for (int k = 0; k < kNumLevels; ++k) {
      ASSERT_NEAR(got[k], hist[k] / 256.0, 1e-9);
      sum += got[k];
    }
    ASSERT_NEAR(sum, 1.0, 1e-6);
  }
}

TEST(Iou, AnalyticFixtures) {
  Rng rng(4);
  const LevelMap m = random_map(rng);
  for (int k = 0; k < kNumLevels; ++k) EXPECT_EQ(iou(m, m, k), 1.0);
  EXPECT_EQ(iou(LevelMap(4, 4, 1), LevelMap(4, 4, 2), 1), 0.0);
  EXPECT_EQ(iou(LevelMap(4, 4, 1), LevelMap(4, 4, 2), 3), 1.0);  // both empty

  // Pred covers the left half of an 8-wide row, truth the middle half.
  LevelMap pred(8, 1), truth(8, 1);
  for (int x = 0; x < 4; ++x) pred.levels[x] = 2;
  for (int x = 2; x < 6; ++x) truth.levels[x] = 2;
  EXPECT_DOUBLE_EQ(iou(pred, truth, 2), 1.0 / 3.0);
  EXPECT_THROW(iou(pred, LevelMap(4, 2), 2), ShapeError);
}

TEST(Iou, MatchesPixelSetOracle) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int classes = 2 + static_cast<int>(rng.below(4));
    const LevelMap a = random_map(rng, 16, 16, classes);
    const LevelMap b = random_map(rng, 16, 16, classes);
    for (int k = 0; k < kNumLevels; ++k) ASSERT_NEAR(iou(a, b, k), oracle_iou(a, b, k), 1e-9);
    ASSERT_NEAR(segmentation_distance(a, b), oracle_distance(a, b), 1e-9);
  }
}

TEST(Ged, HandComputedPairTable) {
  const std::vector<LevelMap> a{from_list(2, 2, {0, 0, 1, 1}), from_list(2, 2, {0, 1, 1, 1})};
  const std::vector<LevelMap> b{from_list(2, 2, {0, 0, 0, 0}), from_list(2, 2, {1, 1, 1, 1})};
  EXPECT_NEAR(segmentation_distance(a[0], a[1]), 5.0 / 12.0, 1e-12);
  EXPECT_NEAR(segmentation_distance(a[0], b[0]), 0.75, 1e-12);
  EXPECT_NEAR(segmentation_distance(a[1], b[0]), 0.875, 1e-12);
  EXPECT_NEAR(segmentation_distance(a[0], b[1]), 0.75, 1e-12);
  EXPECT_NEAR(segmentation_distance(a[1], b[1]), 0.625, 1e-12);
  EXPECT_NEAR(segmentation_distance(b[0], b[1]), 1.0, 1e-12);
  // 2 * 3/4 - 5/24 - 1/2
  EXPECT_NEAR(ged(a, b), 19.0 / 24.0, 1e-12);
  EXPECT_NEAR(ged(b, a), 19.0 / 24.0, 1e-12);
}

TEST(Ged, IdentityConventionsAndErrors) {
  Rng rng(6);
  std::vector<LevelMap> a;
  for (int i = 0; i < 4; ++i) a.push_back(random_map(rng));
  EXPECT_NEAR(ged(a, a), 0.0, 1e-9);
  const std::vector<LevelMap> one{a[0]};
  EXPECT_EQ(ged(one, one), 0.0);
  EXPECT_THROW(ged(std::vector<LevelMap>{}, one), std::invalid_argument);
  EXPECT_THROW(ged(one, std::vector<LevelMap>{}), std::invalid_argument);
}

TEST(Ged, MatchesPairwiseOracleAndIsSymmetric) {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<LevelMap> a, b;
    const std::size_t na = 1 + rng.below(3), nb = 1 + rng.below(3);
    const int classes = 2 + static_cast<int>(rng.below(4));
    for (std::size_t i = 0; i < na; ++i) a.push_back(random_map(rng, 16, 16, classes));
    for (std::size_t i = 0; i < nb; ++i) b.push_back(random_map(rng, 16, 16, classes));
    const double g = ged(a, b);
    ASSERT_NEAR(g, oracle_ged(a, b), 1e-9);
    ASSERT_NEAR(g, ged(b, a), 1e-12);
    ASSERT_GE(g, -1e-6);
  }
}

TEST(FlagRisk, ThresholdsAndOracle) {
  Rng rng(8);
  std::vector<LevelMap> s;
  for (int i = 0; i < 6; ++i) s.push_back(random_map(rng));
  const DistributionMap d = aggregate(s);
  for (auto v : flag_risk(d, 0.0)) EXPECT_EQ(v, 1);

  std::vector<LevelMap> uniform;
  for (int k = 0; k < kNumLevels; ++k) uniform.emplace_back(3, 3, static_cast<std::uint8_t>(k));
  for (auto v : flag_risk(aggregate(uniform), 1.0)) EXPECT_EQ(v, 0);

  for (double tau : {0.1, 0.34, 0.5, 0.67, 0.9}) {
    const auto mask = flag_risk(d, tau);
    for (std::size_t p = 0; p < mask.size(); ++p) {
      int risky = 0;
      for (const auto& x : s) risky += x.levels[p] >= 3;
      ASSERT_EQ(mask[p], risky / 6.0 >= tau ? 1 : 0) << p;
    }
  }
  EXPECT_THROW(flag_risk(d, -0.1), std::invalid_argument);
  EXPECT_THROW(flag_risk(d, 1.5), std::invalid_argument);
}

TEST(DistributionRaster, RoundTripThroughF32) {
  Rng rng(9);
  std::vector<LevelMap> s;
  for (int i = 0; i < 3; ++i) s.push_back(random_map(rng, 5, 4));
  const DistributionMap d = aggregate(s);
  const Raster probs = probability_raster(d, 0.5);
  EXPECT_EQ(probs.channels, 5u);
  EXPECT_FLOAT_EQ(probs.at(1, 2, 3), static_cast<float>(d.p(3, 1 * 5 + 2)));
  const Raster ent = entropy_raster(d);
  EXPECT_EQ(ent.channels, 1u);
  const DistributionMap back = distribution_from_raster(probs, 3);
  EXPECT_EQ(back.samples, 3u);
  for (std::size_t i = 0; i < d.probabilities.size(); ++i)
    EXPECT_NEAR(back.probabilities[i], d.probabilities[i], 1e-7);
  for (std::size_t i = 0; i < d.entropy.size(); ++i) EXPECT_NEAR(back.entropy[i], d.entropy[i], 1e-6);

  Raster broken = probs;
  broken.f32[0] += 0.5f;
  EXPECT_THROW(distribution_from_raster(broken), ShapeError);
  EXPECT_THROW(distribution_from_raster(Raster::make_f32(2, 2, 3)), ShapeError);
}

TEST(Evaluate, PerfectSamplesAndJson) {
  Rng rng(10);
  TileEvaluation t;
  t.truth = random_map(rng);
  t.samples = {t.truth, t.truth};
  t.annotations = {t.truth};
  const std::vector<TileEvaluation> tiles{t};
  const MetricsReport r = evaluate(tiles);
  EXPECT_EQ(r.accuracy, 1.0);
  EXPECT_EQ(r.mean_iou, 1.0);
  EXPECT_NEAR(r.ged, 0.0, 1e-12);
  EXPECT_EQ(r.samples, 2u);
  const io::Json j = r.to_json();
  EXPECT_EQ(j.at("iou").at("ponding").get<double>(), 1.0);
  EXPECT_THROW(evaluate(std::vector<TileEvaluation>{}), std::invalid_argument);
}

TEST(Evaluate, PooledCountsMatchOracle) {
  Rng rng(11);
  std::vector<TileEvaluation> tiles(3);
  for (auto& t : tiles) {
    t.truth = random_map(rng);
    t.samples = {random_map(rng)};
    t.annotations = {random_map(rng), random_map(rng)};
  }
  const MetricsReport r = evaluate(tiles);
  std::size_t hit = 0;
  std::array<std::size_t, 5> inter{}, uni{};
  double ged_sum = 0.0;
  for (const auto& t : tiles) {
    for (std::size_t i = 0; i < 256; ++i) {
      const int p = t.samples[0].levels[i], q = t.truth.levels[i];
      hit += p == q;
      for (int k = 0; k < 5; ++k) {
        inter[k] += p == k && q == k;
        uni[k] += p == k || q == k;
      }
    }
    ged_sum += oracle_ged(t.samples, t.annotations);
  }
  EXPECT_NEAR(r.accuracy, hit / 768.0, 1e-12);
  for (int k = 0; k < 5; ++k) EXPECT_NEAR(r.iou[k], static_cast<double>(inter[k]) / uni[k], 1e-12);
  EXPECT_NEAR(r.ged, ged_sum / 3.0, 1e-9);
}

}  // namespace
}  // namespace resmap::mapping
