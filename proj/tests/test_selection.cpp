#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "cellless/rng.hpp"
#include "cellless/scenario.hpp"
#include "cellless/selection.hpp"

using namespace cellless;

namespace {

Snapshot evenly_spaced(int n, double spacing, double start = 0.0) {
  Snapshot s;
  for (int i = 0; i < n; ++i) s.push_back(Vehicle{i, start + spacing * i, 20.0, false});
  return s;
}

Snapshot random_snapshot(std::uint64_t index, std::int64_t count = 200) {
  ScenarioConfig c;
  c.fixed_count = count;
  auto rng = make_stream(99, "selection-test", index);
  return sample_vehicles(c, rng);
}

std::vector<VehicleId> select(const Snapshot& s, const SelectionStrategy& st, std::uint64_t seed = 0) {
  Engine rng(seed);
  return select_aps(s, st, rng, 10000.0);
}

}  // namespace

TEST(Sequence, OnePerTenPicksTheSixth) {
  const Snapshot s = evenly_spaced(10, 100.0);
  EXPECT_EQ(select(s, SequenceSelection{0.1}), std::vector<VehicleId>{5});
}

TEST(Sequence, TrailingPartialGroup) {
  // 15 vehicles: full group -> index 5; trailing 5 >= ceil(10/2) -> its middle, index 12.
  EXPECT_EQ(select(evenly_spaced(15, 50.0), SequenceSelection{0.1}), (std::vector<VehicleId>{5, 12}));
  // 14 vehicles: trailing 4 is too small.
  EXPECT_EQ(select(evenly_spaced(14, 50.0), SequenceSelection{0.1}), std::vector<VehicleId>{5});
}

TEST(RandomSelection, BoundaryProbabilities) {
  const Snapshot s = random_snapshot(0);
  EXPECT_TRUE(select(s, RandomSelection{0.0}).empty());
  EXPECT_EQ(select(s, RandomSelection{1.0}).size(), s.size());
}

TEST(RandomSelection, EmpiricalFractionMatchesProbability) {
  const double p = 0.1;
  std::int64_t selected = 0, total = 0;
  for (std::uint64_t i = 0; i < 10000; ++i) {
    const Snapshot s = random_snapshot(i, 50);
    selected += static_cast<std::int64_t>(select(s, RandomSelection{p}, i).size());
    total += static_cast<std::int64_t>(s.size());
  }
  const double frac = static_cast<double>(selected) / static_cast<double>(total);
  EXPECT_NEAR(frac, p, 3.0 * std::sqrt(p * (1 - p) / static_cast<double>(total)));
}

TEST(RandomSelection, SharedStreamNestsApSets) {
  for (std::uint64_t i = 0; i < 50; ++i) {
    const Snapshot s = random_snapshot(i);
    const auto small = select(s, RandomSelection{0.1}, i);
    const auto large = select(s, RandomSelection{0.3}, i);
    EXPECT_TRUE(std::includes(large.begin(), large.end(), small.begin(), small.end()));
  }
}

// Brute force over every 2-subset and both anchor assignments: the greedy
// pick must attain the minimal worst-case anchor distance.
TEST(Distance, FourEvenVehiclesMatchExhaustiveAssignment) {
  const double L = 10000.0;
  const Snapshot s{{0, 1250.0, 20.0, false}, {1, 3750.0, 20.0, false}, {2, 6250.0, 20.0, false},
                   {3, 8750.0, 20.0, false}};
  const double anchors[] = {2500.0, 7500.0};
  double optimum = INFINITY;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (i == j) continue;
      optimum = std::min(optimum, std::max(ring_distance(s[i].position_m, anchors[0], L),
                                           ring_distance(s[j].position_m, anchors[1], L)));
    }
  }
  const auto got = select(s, DistanceSelection{0.5});
  ASSERT_EQ(got.size(), 2u);
  const double worst = std::max(ring_distance(find_vehicle(s, got[0])->position_m, anchors[0], L),
                                ring_distance(find_vehicle(s, got[1])->position_m, anchors[1], L));
  EXPECT_DOUBLE_EQ(worst, optimum);
  // Equidistant candidates resolve to the lower position: 1250 and 6250.
  EXPECT_EQ(got, (std::vector<VehicleId>{0, 2}));
}

// Replays the anchor scan with a full linear search per anchor.
TEST(Distance, EveryPickIsNearestAvailableAtScanTime) {
  const double L = 10000.0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    const Snapshot s = random_snapshot(i, 40 + static_cast<std::int64_t>(i % 100));
    for (double ratio : {0.05, 0.1, 0.25, 0.5}) {
      const std::size_t m = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(ratio * s.size())));
      std::vector<bool> taken(s.size(), false);
      std::vector<VehicleId> expected;
      for (std::size_t a = 0; a < m; ++a) {
        const double anchor = (a + 0.5) * L / static_cast<double>(m);
        std::size_t best = s.size();
        for (std::size_t k = 0; k < s.size(); ++k) {
          if (taken[k]) continue;
          if (best == s.size()) {
            best = k;
            continue;
          }
          const double dk = ring_distance(s[k].position_m, anchor, L);
          const double db = ring_distance(s[best].position_m, anchor, L);
          if (dk < db || (dk == db && (s[k].position_m < s[best].position_m ||
                                       (s[k].position_m == s[best].position_m && s[k].id < s[best].id)))) {
            best = k;
          }
        }
        taken[best] = true;
        expected.push_back(s[best].id);
      }
      std::sort(expected.begin(), expected.end());
      EXPECT_EQ(select(s, DistanceSelection{ratio}), expected);
    }
  }
}

TEST(Distance, NearestCountsAcrossTheSeam) {
  // Anchors at 2500 and 7500. For 2500 the vehicle at 9900 (2600 m over the
  // seam) beats the one at 5200 (2700 m).
  const Snapshot s{{0, 5200.0, 20.0, false}, {1, 7500.0, 20.0, false}, {2, 7600.0, 20.0, false},
                   {3, 9900.0, 20.0, false}};
  EXPECT_EQ(select(s, DistanceSelection{0.5}), (std::vector<VehicleId>{1, 3}));
}

TEST(DeterministicStrategies, IgnoreTheRandomStream) {
  const Snapshot s = random_snapshot(3);
  for (const SelectionStrategy& st : {SelectionStrategy{SequenceSelection{0.1}}, SelectionStrategy{DistanceSelection{0.1}}}) {
    EXPECT_EQ(select(s, st, 1), select(s, st, 2));
  }
}

TEST(DeterministicStrategies, EqualBudgetForIntegerGroupSizes) {
  for (std::uint64_t i = 0; i < 300; ++i) {
    const Snapshot s = random_snapshot(i, 20 + static_cast<std::int64_t>(i));
    for (int k : {2, 3, 4, 5, 10, 20}) {
      const double ratio = 1.0 / k;
      const auto seq = select(s, SequenceSelection{ratio}).size();
      const auto dist = select(s, DistanceSelection{ratio}).size();
      EXPECT_LE(std::abs(static_cast<long>(seq) - static_cast<long>(dist)), 1L) << "n=" << s.size() << " k=" << k;
    }
  }
}

TEST(SelectAps, EmptyInputGivesEmptySet) {
  const Snapshot none;
  EXPECT_TRUE(select(none, RandomSelection{0.5}).empty());
  EXPECT_TRUE(select(none, SequenceSelection{0.1}).empty());
  EXPECT_TRUE(select(none, DistanceSelection{0.1}).empty());
}

TEST(SelectAps, RejectsOutOfRangeParameters) {
  const Snapshot s = evenly_spaced(5, 10.0);
  EXPECT_THROW(select(s, RandomSelection{1.5}), ConfigError);
  EXPECT_THROW(select(s, SequenceSelection{0.0}), ConfigError);
  EXPECT_THROW(select(s, DistanceSelection{-0.1}), ConfigError);
  EXPECT_THROW(make_strategy("auction", 0.1), ConfigError);
}

TEST(MarkAps, FlagsExactlyTheSelection) {
  Snapshot s = evenly_spaced(10, 100.0);
  const std::vector<VehicleId> ids{2, 7};
  mark_aps(s, ids);
  for (const auto& v : s) EXPECT_EQ(v.is_ap, v.id == 2 || v.id == 7);
}
