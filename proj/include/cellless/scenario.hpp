#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cellless/rng.hpp"

namespace cellless {

using VehicleId = std::int32_t;

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Vehicle {
  VehicleId id = 0;
  double position_m = 0.0;
  double velocity_mps = 0.0;
  bool is_ap = false;

  friend bool operator==(const Vehicle&, const Vehicle&) = default;
};

// Vehicles sorted ascending by position, ties by id.
using Snapshot = std::vector<Vehicle>;

inline constexpr double kmh_to_mps(double kmh) noexcept { return kmh / 3.6; }

struct ScenarioConfig {
  double road_length_m = 10000.0;
  double density_per_m = 0.02;
  // Conditioned process: exactly this many uniform points when set.
  std::optional<std::int64_t> fixed_count;
  double speed_min_kmh = 50.0;
  double speed_max_kmh = 80.0;
  std::uint64_t master_seed = 1;

  void validate() const {
    if (!(road_length_m > 0.0) || !std::isfinite(road_length_m)) {
      throw ConfigError("road_length_m must be positive and finite");
    }
    if (!(density_per_m >= 0.0) || !std::isfinite(density_per_m)) {
      throw ConfigError("density_per_m must be non-negative");
    }
    if (fixed_count && *fixed_count < 0) {
      throw ConfigError("fixed_count must be non-negative");
    }
    if (!(speed_min_kmh >= 0.0) || !(speed_min_kmh <= speed_max_kmh)) {
      throw ConfigError("speed range must satisfy 0 <= speed_min_kmh <= speed_max_kmh");
    }
  }
};

// Distance along a ring of circumference `length`. An infinite length gives
// the plain distance on a line.
inline double ring_distance(double a, double b, double length) noexcept {
  const double d = std::abs(a - b);
  return std::min(d, length - d);
}

// Clockwise (increasing position) offset from `from` to `to`, in [0, length).
inline double ring_offset(double from, double to, double length) noexcept {
  double d = to - from;
  if (d < 0.0) d += length;
  return d;
}

inline void sort_snapshot(Snapshot& vehicles) {
  std::sort(vehicles.begin(), vehicles.end(), [](const Vehicle& a, const Vehicle& b) {
    if (a.position_m != b.position_m) return a.position_m < b.position_m;
    return a.id < b.id;
  });
}

inline bool is_sorted_snapshot(std::span<const Vehicle> vehicles) {
  return std::is_sorted(vehicles.begin(), vehicles.end(), [](const Vehicle& a, const Vehicle& b) {
    if (a.position_m != b.position_m) return a.position_m < b.position_m;
    return a.id < b.id;
  });
}

// Wraps x into [0, length).
inline double wrap_position(double x, double length) noexcept {
  double r = std::fmod(x, length);
  if (r < 0.0) r += length;
  if (r >= length) r = 0.0;
  return r;
}

/// Draws one road snapshot.
///
/// The count is Poisson(density * length) unless `fixed_count` is set;
/// positions are i.i.d. uniform on the road and speeds i.i.d. uniform on
/// [speed_min, speed_max]. Ids are assigned in draw order, then the list is
/// sorted by position.
template <class Rng>
Snapshot sample_vehicles(const ScenarioConfig& config, Rng& rng) {
  config.validate();
  std::int64_t count = 0;
  if (config.fixed_count) {
    count = *config.fixed_count;
  } else if (config.density_per_m > 0.0) {
    std::poisson_distribution<std::int64_t> poisson(config.density_per_m * config.road_length_m);
    count = poisson(rng);
  }

  const double v_lo = kmh_to_mps(config.speed_min_kmh);
  const double v_hi = kmh_to_mps(config.speed_max_kmh);
  Snapshot vehicles;
  vehicles.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) {
    Vehicle v;
    v.id = static_cast<VehicleId>(i);
    v.position_m = wrap_position(uniform01(rng) * config.road_length_m, config.road_length_m);
    v.velocity_mps = v_lo + (v_hi - v_lo) * uniform01(rng);
    vehicles.push_back(v);
  }
  sort_snapshot(vehicles);
  return vehicles;
}

/// Advances every vehicle at its constant velocity on the ring road.
inline Snapshot step_mobility(std::span<const Vehicle> vehicles, double dt_s, double road_length_m) {
  if (!(dt_s >= 0.0)) throw std::invalid_argument("step_mobility: dt must be non-negative");
  if (!(road_length_m > 0.0)) throw std::invalid_argument("step_mobility: road length must be positive");
  Snapshot out(vehicles.begin(), vehicles.end());
  if (dt_s == 0.0) return out;
  for (auto& v : out) {
    v.position_m = wrap_position(v.position_m + v.velocity_mps * dt_s, road_length_m);
  }
  sort_snapshot(out);
  return out;
}

inline const Vehicle* find_vehicle(std::span<const Vehicle> vehicles, VehicleId id) {
  for (const auto& v : vehicles) {
    if (v.id == id) return &v;
  }
  return nullptr;
}

}  // namespace cellless
