#pragma once

#include <cstdint>
#include <vector>

#include "cellless/channel.hpp"
#include "cellless/rng.hpp"
#include "cellless/scenario.hpp"
#include "cellless/selection.hpp"

namespace cellless {

// Sub-stream purpose tags.
namespace stream {
inline constexpr const char* placement = "placement";
inline constexpr const char* selection = "selection";
inline constexpr const char* fading = "fading";
inline constexpr const char* pair_anchor = "pair-anchor";
}  // namespace stream

// One Monte Carlo work unit: placement, AP selection and fading for a
// snapshot index, each drawn from its own sub-stream.
struct Realization {
  Snapshot vehicles;  // is_ap set
  std::vector<VehicleId> ap_ids;
  std::vector<Vehicle> aps;
  FadingDraw fading;
};

inline Realization realize(const ScenarioConfig& config, const SelectionStrategy& strategy, std::uint64_t index) {
  Realization r;
  auto placement_rng = make_stream(config.master_seed, stream::placement, index);
  r.vehicles = sample_vehicles(config, placement_rng);
  auto selection_rng = make_stream(config.master_seed, stream::selection, index);
  r.ap_ids = select_aps(r.vehicles, strategy, selection_rng, config.road_length_m);
  mark_aps(r.vehicles, r.ap_ids);
  for (const auto& v : r.vehicles) {
    if (v.is_ap) r.aps.push_back(v);
  }
  r.fading = FadingDraw(derive_seed(config.master_seed, stream::fading, index));
  return r;
}

// Channel parameters with distances measured on the scenario's ring road.
inline ChannelParams on_ring(ChannelParams params, const ScenarioConfig& config) {
  params.ring_length_m = config.road_length_m;
  return params;
}

}  // namespace cellless
