#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "cellless/rng.hpp"
#include "cellless/scenario.hpp"

using namespace cellless;

namespace {

Snapshot draw(const ScenarioConfig& c, std::uint64_t index) {
  auto rng = make_stream(c.master_seed, "test", index);
  return sample_vehicles(c, rng);
}

// Kolmogorov-Smirnov statistic of a sample against uniform[0, L).
double ks_uniform(std::vector<double> xs, double length) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = xs[i] / length;
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

}  // namespace

TEST(Rng, DerivedSeedsAreStableAndSeparated) {
  EXPECT_EQ(derive_seed(7, "placement", 3), derive_seed(7, "placement", 3));
  EXPECT_NE(derive_seed(7, "placement", 3), derive_seed(7, "selection", 3));
  EXPECT_NE(derive_seed(7, "placement", 3), derive_seed(7, "placement", 4));
  EXPECT_NE(derive_seed(7, "placement", 3), derive_seed(8, "placement", 3));
}

TEST(SampleVehicles, ZeroDensityGivesEmptyRoad) {
  ScenarioConfig c;
  c.density_per_m = 0.0;
  EXPECT_TRUE(draw(c, 0).empty());
}

TEST(SampleVehicles, FixedCountIsExact) {
  ScenarioConfig c;
  c.fixed_count = 200;
  for (std::uint64_t i = 0; i < 200; ++i) EXPECT_EQ(draw(c, i).size(), 200u);
}

TEST(SampleVehicles, SnapshotInvariants) {
  ScenarioConfig c;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const Snapshot s = draw(c, i);
    EXPECT_TRUE(is_sorted_snapshot(s));
    std::set<VehicleId> ids;
    for (const auto& v : s) {
      ids.insert(v.id);
      EXPECT_GE(v.position_m, 0.0);
      EXPECT_LT(v.position_m, c.road_length_m);
      EXPECT_GE(v.velocity_mps, 50.0 / 3.6);
      EXPECT_LE(v.velocity_mps, 80.0 / 3.6);
      EXPECT_FALSE(v.is_ap);
    }
    EXPECT_EQ(ids.size(), s.size());
  }
}

TEST(SampleVehicles, PoissonCountMoments) {
  ScenarioConfig c;  // lambda L = 200
  const int draws = 10000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double n = static_cast<double>(draw(c, static_cast<std::uint64_t>(i)).size());
    sum += n;
    sum_sq += n * n;
  }
  const double mean = sum / draws;
  const double var = (sum_sq - draws * mean * mean) / (draws - 1);
  EXPECT_NEAR(mean, 200.0, 3.0 * std::sqrt(200.0) / 100.0);
  EXPECT_NEAR(mean, 200.0, 0.05 * 200.0);
  EXPECT_NEAR(var, 200.0, 0.05 * 200.0);
}

TEST(SampleVehicles, PositionsPassKolmogorovSmirnov) {
  ScenarioConfig c;
  std::vector<double> pooled;
  for (std::uint64_t i = 0; i < 100; ++i) {
    for (const auto& v : draw(c, i)) pooled.push_back(v.position_m);
  }
  const double critical_1pct = 1.628 / std::sqrt(static_cast<double>(pooled.size()));
  EXPECT_LT(ks_uniform(pooled, c.road_length_m), critical_1pct);
}

TEST(SampleVehicles, RejectsInvalidConfig) {
  ScenarioConfig c;
  c.density_per_m = -0.1;
  EXPECT_THROW(draw(c, 0), ConfigError);
  c = {};
  c.road_length_m = 0.0;
  EXPECT_THROW(draw(c, 0), ConfigError);
  c = {};
  c.speed_min_kmh = 90.0;
  EXPECT_THROW(draw(c, 0), ConfigError);
}

TEST(StepMobility, ZeroStepIsIdentity) {
  ScenarioConfig c;
  const Snapshot s = draw(c, 1);
  EXPECT_EQ(step_mobility(s, 0.0, c.road_length_m), s);
}

TEST(StepMobility, ConstantVelocityAndWrap) {
  const Snapshot one{{0, 100.0, 25.0, false}};
  EXPECT_DOUBLE_EQ(step_mobility(one, 2.0, 10000.0)[0].position_m, 150.0);
  const Snapshot edge{{0, 9990.0, 20.0, false}};
  EXPECT_NEAR(step_mobility(edge, 1.0, 10000.0)[0].position_m, 10.0, 1e-9);
}

TEST(StepMobility, RejectsNegativeStep) {
  const Snapshot one{{0, 100.0, 25.0, false}};
  EXPECT_THROW(step_mobility(one, -1.0, 10000.0), std::invalid_argument);
}

TEST(StepMobility, PreservesIdsAndVelocities) {
  ScenarioConfig c;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const Snapshot s = draw(c, i);
    const Snapshot t = step_mobility(s, 37.5 * static_cast<double>(i), c.road_length_m);
    ASSERT_EQ(s.size(), t.size());
    EXPECT_TRUE(is_sorted_snapshot(t));
    std::vector<std::pair<VehicleId, double>> a, b;
    for (const auto& v : s) a.emplace_back(v.id, v.velocity_mps);
    for (const auto& v : t) b.emplace_back(v.id, v.velocity_mps);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    EXPECT_EQ(a, b);
  }
}

TEST(Ring, DistanceAndOffset) {
  EXPECT_DOUBLE_EQ(ring_distance(100.0, 9900.0, 10000.0), 200.0);
  EXPECT_DOUBLE_EQ(ring_distance(100.0, 300.0, 10000.0), 200.0);
  EXPECT_DOUBLE_EQ(ring_offset(9900.0, 100.0, 10000.0), 200.0);
  EXPECT_DOUBLE_EQ(ring_distance(0.0, 7000.0, INFINITY), 7000.0);
}
