#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <type_traits>
#include <variant>
#include <vector>

#include "cellless/rng.hpp"
#include "cellless/scenario.hpp"

namespace cellless {

// Every vehicle independently becomes an AP with this probability.
struct RandomSelection {
  double probability = 0.1;
};

// One AP out of every round(1/ratio) consecutive vehicles by position.
struct SequenceSelection {
  double ratio = 0.1;
};

// round(ratio * count) APs spread evenly over the road.
struct DistanceSelection {
  double ratio = 0.1;
};

using SelectionStrategy = std::variant<RandomSelection, SequenceSelection, DistanceSelection>;

inline std::string_view strategy_name(const SelectionStrategy& s) {
  switch (s.index()) {
    case 0: return "random";
    case 1: return "sequence";
    default: return "distance";
  }
}

// The probability (Random) or ratio (Sequence, Distance).
inline double strategy_parameter(const SelectionStrategy& s) {
  return std::visit(
      [](const auto& v) {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, RandomSelection>) {
          return v.probability;
        } else {
          return v.ratio;
        }
      },
      s);
}

inline SelectionStrategy make_strategy(std::string_view name, double parameter) {
  if (name == "random") return RandomSelection{parameter};
  if (name == "sequence") return SequenceSelection{parameter};
  if (name == "distance") return DistanceSelection{parameter};
  throw ConfigError("unknown strategy '" + std::string(name) + "' (expected random|sequence|distance)");
}

inline void validate(const SelectionStrategy& s) {
  const double x = strategy_parameter(s);
  if (std::holds_alternative<RandomSelection>(s)) {
    if (!(x >= 0.0 && x <= 1.0)) throw ConfigError("selection probability must lie in [0, 1]");
  } else if (!(x > 0.0 && x <= 1.0)) {
    throw ConfigError("selection ratio must lie in (0, 1]");
  }
}

namespace detail {

inline std::vector<VehicleId> select_sequence(std::span<const Vehicle> vehicles, double ratio) {
  const auto k = static_cast<std::size_t>(std::max(1L, std::lround(1.0 / ratio)));
  const std::size_t n = vehicles.size();
  std::vector<VehicleId> ids;
  const std::size_t full = n / k;
  for (std::size_t g = 0; g < full; ++g) ids.push_back(vehicles[g * k + k / 2].id);
  const std::size_t rest = n % k;
  if (rest > 0 && rest >= (k + 1) / 2) ids.push_back(vehicles[full * k + rest / 2].id);
  return ids;
}

// Greedy anchor matching: anchors (i + 0.5) L / m are visited left to right
// and each takes the nearest still-unselected vehicle. The nearest one on a
// ring is the first unselected vehicle found walking either way from the
// anchor's insertion point.
inline std::vector<VehicleId> select_distance(std::span<const Vehicle> vehicles, double ratio,
                                              double road_length_m) {
  const std::size_t n = vehicles.size();
  const auto m = static_cast<std::size_t>(
      std::clamp<long>(std::lround(ratio * static_cast<double>(n)), 1L, static_cast<long>(n)));
  std::vector<bool> taken(n, false);
  std::vector<VehicleId> ids;
  ids.reserve(m);

  for (std::size_t a = 0; a < m; ++a) {
    const double anchor = (static_cast<double>(a) + 0.5) * road_length_m / static_cast<double>(m);
    const auto it = std::lower_bound(vehicles.begin(), vehicles.end(), anchor,
                                     [](const Vehicle& v, double x) { return v.position_m < x; });
    const std::size_t start = static_cast<std::size_t>(it - vehicles.begin()) % n;

    std::size_t right = start;
    for (std::size_t step = 0; step < n && taken[right]; ++step) right = (right + 1) % n;
    std::size_t left = (start + n - 1) % n;
    for (std::size_t step = 0; step < n && taken[left]; ++step) left = (left + n - 1) % n;

    const auto rank = [&](std::size_t i) {
      return std::make_tuple(ring_distance(vehicles[i].position_m, anchor, road_length_m),
                             vehicles[i].position_m, vehicles[i].id);
    };
    const std::size_t pick = rank(left) < rank(right) ? left : right;
    taken[pick] = true;
    ids.push_back(vehicles[pick].id);
  }
  return ids;
}

}  // namespace detail

/// Ids of the vehicles chosen as moving APs, ascending.
///
/// `vehicles` must be a sorted snapshot. Only the Random strategy consumes
/// `rng`: one uniform per vehicle in position order, so with a shared stream
/// the AP set under a smaller probability is a subset of the set under a
/// larger one.
template <class Rng>
std::vector<VehicleId> select_aps(std::span<const Vehicle> vehicles, const SelectionStrategy& strategy, Rng& rng,
                                  double road_length_m) {
  validate(strategy);
  std::vector<VehicleId> ids;
  if (vehicles.empty()) return ids;
  if (const auto* r = std::get_if<RandomSelection>(&strategy)) {
    for (const auto& v : vehicles) {
      if (uniform01(rng) < r->probability) ids.push_back(v.id);
    }
  } else if (const auto* s = std::get_if<SequenceSelection>(&strategy)) {
    ids = detail::select_sequence(vehicles, s->ratio);
  } else {
    ids = detail::select_distance(vehicles, std::get<DistanceSelection>(strategy).ratio, road_length_m);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

// Sets is_ap on exactly the vehicles listed in `ap_ids` (sorted).
inline void mark_aps(Snapshot& vehicles, std::span<const VehicleId> ap_ids) {
  for (auto& v : vehicles) v.is_ap = std::binary_search(ap_ids.begin(), ap_ids.end(), v.id);
}

}  // namespace cellless
