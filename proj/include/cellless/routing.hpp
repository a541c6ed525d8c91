#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cellless/channel.hpp"
#include "cellless/connectivity.hpp"
#include "cellless/parallel.hpp"
#include "cellless/realization.hpp"
#include "cellless/scenario.hpp"
#include "cellless/selection.hpp"

namespace cellless {

struct RoutingParams {
  // Unset: derived from the fading-free D2D SNR threshold.
  std::optional<double> d2d_range_m;
  double d2d_theta_db = 0.0;
  double backhaul_range_m = 1000.0;
  int core_detour_extra_hops = 2;
  // SINR a peer needs to attach to the AP tier. Unset: no gate, every peer
  // is served by its strongest AP(s) whenever an AP exists.
  std::optional<double> access_theta_db;

  double access_theta_linear() const { return access_theta_db ? db_to_linear(*access_theta_db) : 0.0; }

  void validate() const {
    if (d2d_range_m && !(*d2d_range_m > 0.0)) throw ConfigError("d2d_range_m must be positive");
    if (!(backhaul_range_m > 0.0)) throw ConfigError("backhaul_range_m must be positive");
    if (core_detour_extra_hops < 1) throw ConfigError("core_detour_extra_hops must be >= 1");
  }
};

// Largest distance at which an unfaded user-to-user link meets the SNR threshold.
inline double derived_d2d_range(const ChannelParams& channel, double theta_linear = 1.0) {
  return std::pow(channel.user_tx_power_w / (channel.noise_w * theta_linear), 1.0 / channel.pathloss_exponent);
}

inline double d2d_range(const RoutingParams& routing, const ChannelParams& channel) {
  return routing.d2d_range_m ? *routing.d2d_range_m : derived_d2d_range(channel, db_to_linear(routing.d2d_theta_db));
}

enum class PathCase { a_d2d, b_shared_ap, c_backhaul, d_core, outage };

inline std::string_view case_name(PathCase c) {
  switch (c) {
    case PathCase::a_d2d: return "a_d2d";
    case PathCase::b_shared_ap: return "b_shared_ap";
    case PathCase::c_backhaul: return "c_backhaul";
    case PathCase::d_core: return "d_core";
    default: return "outage";
  }
}

struct PathResult {
  std::optional<int> hops;
  PathCase path_case = PathCase::outage;
  // D2D hops spent by peers that reached the AP tier through relays. For
  // cases b-d, hops = base hops of the case + access_relay_hops.
  int access_relay_hops = 0;

  static PathResult outage() { return {}; }
  bool connected() const noexcept { return hops.has_value(); }
};

inline int base_hops(PathCase c, const RoutingParams& routing) {
  switch (c) {
    case PathCase::b_shared_ap: return 2;
    case PathCase::c_backhaul: return 3;
    case PathCase::d_core: return 3 + routing.core_detour_extra_hops;
    default: return 0;
  }
}

// Indices of the vehicles within `range` (ring distance) of vehicles[i],
// excluding i. `vehicles` must be sorted by position.
inline std::vector<std::size_t> disk_neighbors(std::span<const Vehicle> vehicles, std::size_t i, double range,
                                               double length) {
  const std::size_t n = vehicles.size();
  std::vector<std::size_t> out;
  std::size_t j = (i + 1) % n;
  for (std::size_t step = 1; step < n; ++step, j = (j + 1) % n) {
    if (ring_offset(vehicles[i].position_m, vehicles[j].position_m, length) > range) break;
    out.push_back(j);
  }
  std::size_t k = (i + n - 1) % n;
  for (std::size_t step = 1; step < n; ++step, k = (k + n - 1) % n) {
    if (ring_offset(vehicles[k].position_m, vehicles[i].position_m, length) > range) break;
    if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
  }
  return out;
}

namespace detail {

// Greedy farthest-progress forwarding in one ring direction. Offsets are
// measured from the source in that direction; every relay candidate lies
// strictly between source and destination.
inline std::optional<int> greedy_one_way(std::span<const Vehicle> vehicles, const Vehicle& src, const Vehicle& dst,
                                         double range, double length, bool clockwise) {
  const auto offset = [&](const Vehicle& v) {
    return clockwise ? ring_offset(src.position_m, v.position_m, length)
                     : ring_offset(v.position_m, src.position_m, length);
  };
  const double target = offset(dst);
  std::vector<double> relays;
  for (const auto& v : vehicles) {
    if (v.id == src.id || v.id == dst.id) continue;
    const double o = offset(v);
    if (o > 0.0 && o < target) relays.push_back(o);
  }
  std::sort(relays.begin(), relays.end());

  double here = 0.0;
  int hops = 0;
  std::size_t next = 0;
  while (target - here > range) {
    std::optional<double> best;
    while (next < relays.size() && relays[next] <= here + range) best = relays[next++];
    if (!best || *best <= here) return std::nullopt;
    here = *best;
    ++hops;
  }
  return hops + 1;
}

}  // namespace detail

/// Multi-hop D2D route between two vehicles on the ring.
///
/// Links exist between vehicles within `range_m` (ring distance). Each hop
/// forwards to the farthest vehicle in range that still lies before the
/// destination; both ring directions are tried and the shorter route wins,
/// which makes the hop count equal to the breadth-first shortest path of
/// the disk graph.
inline PathResult d2d_path(std::span<const Vehicle> vehicles, VehicleId src_id, VehicleId dst_id, double range_m,
                           double road_length_m) {
  const Vehicle* src = find_vehicle(vehicles, src_id);
  const Vehicle* dst = find_vehicle(vehicles, dst_id);
  if (src == nullptr || dst == nullptr || src_id == dst_id) return PathResult::outage();
  if (ring_distance(src->position_m, dst->position_m, road_length_m) <= range_m) return {1, PathCase::a_d2d};

  const auto cw = detail::greedy_one_way(vehicles, *src, *dst, range_m, road_length_m, true);
  const auto ccw = detail::greedy_one_way(vehicles, *src, *dst, range_m, road_length_m, false);
  if (!cw && !ccw) return PathResult::outage();
  const int hops = std::min(cw.value_or(INT32_MAX), ccw.value_or(INT32_MAX));
  return {hops, PathCase::a_d2d};
}

// Downlink attachment of one vehicle. A vehicle that hosts an AP is served
// by itself.
struct Attachment {
  bool attached = false;
  std::vector<VehicleId> serving;
};

inline Attachment attach(const Vehicle& peer, std::span<const Vehicle> aps, AccessMode mode,
                         const FadingDraw& fading, const ChannelParams& channel, double theta_linear,
                         int coop_k = 2) {
  if (std::any_of(aps.begin(), aps.end(), [&](const Vehicle& a) { return a.id == peer.id; })) {
    return {true, {peer.id}};
  }
  Association a = sinr_coop(peer, aps, fading, channel, coop_size(mode, coop_k));
  if (!a.has_server() || a.sinr < theta_linear) return {};
  return {true, std::move(a.serving)};
}

// How a peer enters the AP tier: `hops` from the peer up to its serving
// APs, 1 for direct access.
struct TierAccess {
  int hops = 1;
  std::vector<VehicleId> serving;
};

/// Cheapest entry into the AP tier for `peer`.
///
/// Direct attachment costs one hop. Otherwise the peer relays over D2D
/// links: reaching an AP vehicle after k hops costs k, reaching a user that
/// can attach costs k + 1. Ties go to the vehicle found first in
/// breadth-first order. Empty when no AP is reachable.
inline std::optional<TierAccess> reach_ap_tier(std::span<const Vehicle> vehicles, std::size_t peer_index,
                                               std::span<const Vehicle> aps, AccessMode mode,
                                               const FadingDraw& fading, const ChannelParams& channel,
                                               double theta_linear, double d2d_range_m, int coop_k = 2) {
  {
    Attachment a = attach(vehicles[peer_index], aps, mode, fading, channel, theta_linear, coop_k);
    if (a.attached) return TierAccess{1, std::move(a.serving)};
  }
  if (aps.empty()) return std::nullopt;

  const std::size_t n = vehicles.size();
  std::vector<int> level(n, -1);
  level[peer_index] = 0;
  std::vector<std::size_t> frontier{peer_index};
  std::optional<TierAccess> best;
  for (int k = 1; !frontier.empty(); ++k) {
    if (best && best->hops <= k) break;
    std::vector<std::size_t> next;
    for (std::size_t i : frontier) {
      for (std::size_t j : disk_neighbors(vehicles, i, d2d_range_m, channel.ring_length_m)) {
        if (level[j] >= 0) continue;
        level[j] = k;
        next.push_back(j);
        const Vehicle& v = vehicles[j];
        if (v.is_ap) {
          if (!best || k < best->hops) best = TierAccess{k, {v.id}};
        } else if (!best || k + 1 < best->hops) {
          Attachment a = attach(v, aps, mode, fading, channel, theta_linear, coop_k);
          if (a.attached) best = TierAccess{k + 1, std::move(a.serving)};
        }
      }
    }
    frontier = std::move(next);
  }
  return best;
}

/// Route through the moving-AP tier.
///
/// Each peer enters the tier directly (SINR at or above the access gate, if
/// one is configured) or over D2D relays. A shared serving
/// AP then gives case b, serving sets within backhaul range of each other
/// case c, otherwise traffic detours through the core network (case d).
/// Direct access on both sides gives 2, 3 and 3 + core_detour_extra_hops
/// hops; relays add their D2D hops. Only when a peer cannot reach the tier
/// at all does the route fall back to plain D2D.
///
/// `vehicles` must be a sorted snapshot with is_ap matching `ap_ids`.
inline PathResult ap_path(std::span<const Vehicle> vehicles, std::span<const VehicleId> ap_ids, VehicleId src_id,
                          VehicleId dst_id, AccessMode mode, const FadingDraw& fading, const ChannelParams& channel,
                          const RoutingParams& routing, int coop_k = 2) {
  const auto index_of = [&](VehicleId id) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < vehicles.size(); ++i) {
      if (vehicles[i].id == id) return i;
    }
    return std::nullopt;
  };
  const auto src = index_of(src_id);
  const auto dst = index_of(dst_id);
  if (!src || !dst || src_id == dst_id) return PathResult::outage();

  std::vector<Vehicle> aps;
  for (const auto& v : vehicles) {
    if (std::find(ap_ids.begin(), ap_ids.end(), v.id) != ap_ids.end()) aps.push_back(v);
  }
  const double theta = routing.access_theta_linear();
  const double range = d2d_range(routing, channel);
  const auto a = reach_ap_tier(vehicles, *src, aps, mode, fading, channel, theta, range, coop_k);
  const auto b = a ? reach_ap_tier(vehicles, *dst, aps, mode, fading, channel, theta, range, coop_k)
                   : std::nullopt;
  if (!a || !b) return d2d_path(vehicles, src_id, dst_id, range, channel.ring_length_m);

  PathCase c = PathCase::d_core;
  for (VehicleId x : a->serving) {
    if (std::find(b->serving.begin(), b->serving.end(), x) != b->serving.end()) c = PathCase::b_shared_ap;
  }
  if (c != PathCase::b_shared_ap) {
    double gap = INFINITY;
    for (VehicleId x : a->serving) {
      for (VehicleId y : b->serving) {
        gap = std::min(gap, ring_distance(find_vehicle(vehicles, x)->position_m,
                                          find_vehicle(vehicles, y)->position_m, channel.ring_length_m));
      }
    }
    if (gap <= routing.backhaul_range_m) c = PathCase::c_backhaul;
  }
  PathResult r;
  r.path_case = c;
  r.access_relay_hops = a->hops + b->hops - 2;
  r.hops = base_hops(c, routing) + r.access_relay_hops;
  return r;
}

enum class HopScheme { d2d_only, ap_noncoop, ap_coop };

inline std::string_view scheme_name(HopScheme s) {
  switch (s) {
    case HopScheme::d2d_only: return "d2d_only";
    case HopScheme::ap_noncoop: return "ap_noncoop";
    default: return "ap_coop";
  }
}

inline HopScheme parse_scheme(std::string_view s) {
  if (s == "d2d_only") return HopScheme::d2d_only;
  if (s == "ap_noncoop") return HopScheme::ap_noncoop;
  if (s == "ap_coop") return HopScheme::ap_coop;
  throw ConfigError("unknown scheme '" + std::string(s) + "' (expected d2d_only|ap_noncoop|ap_coop)");
}

struct HopRow {
  HopScheme scheme = HopScheme::d2d_only;
  double target_distance_m = 0.0;
  double mean_hops = 0.0;  // over connected pairs; NaN when none
  double std_error = 0.0;
  double outage_fraction = 0.0;
  std::int64_t n_pairs = 0;
};

// Attempts at finding a peer pair whose separation is within 10% of target.
inline constexpr int kPairAttempts = 64;

/// Peers for a target separation: the non-AP vehicles nearest to a uniform
/// anchor x and to x + d. Anchors are redrawn while the realized ring
/// separation misses d by more than 10%.
template <class Rng>
std::optional<std::pair<VehicleId, VehicleId>> draw_peer_pair(std::span<const Vehicle> vehicles,
                                                              double target_distance_m, double road_length_m,
                                                              Rng& rng) {
  std::vector<const Vehicle*> users;
  for (const auto& v : vehicles) {
    if (!v.is_ap) users.push_back(&v);
  }
  if (users.size() < 2) return std::nullopt;
  const auto nearest = [&](double x) {
    const Vehicle* best = users.front();
    double best_d = ring_distance(best->position_m, x, road_length_m);
    for (const Vehicle* u : users) {
      const double d = ring_distance(u->position_m, x, road_length_m);
      if (d < best_d) {
        best = u;
        best_d = d;
      }
    }
    return best;
  };
  for (int attempt = 0; attempt < kPairAttempts; ++attempt) {
    const double x = uniform01(rng) * road_length_m;
    const Vehicle* a = nearest(x);
    const Vehicle* b = nearest(wrap_position(x + target_distance_m, road_length_m));
    if (a == b) continue;
    const double sep = ring_distance(a->position_m, b->position_m, road_length_m);
    if (std::abs(sep - target_distance_m) <= 0.1 * target_distance_m) return std::make_pair(a->id, b->id);
  }
  return std::nullopt;
}

/// Mean hop count versus peer separation for each scheme.
///
/// Pair j of every grid point and scheme uses snapshot j (placement,
/// selection, fading), so schemes are compared on common random numbers.
/// Pairs without a route count toward `outage_fraction` only. Rows are
/// ordered by scheme, then distance.
inline std::vector<HopRow> avg_hops_vs_distance(const ScenarioConfig& config, const SelectionStrategy& strategy,
                                                std::span<const HopScheme> schemes,
                                                std::span<const double> distance_grid_m, std::size_t n_pairs,
                                                const ChannelParams& channel_in, const RoutingParams& routing,
                                                unsigned workers = 0, int coop_k = 2) {
  config.validate();
  channel_in.validate();
  routing.validate();
  validate(strategy);
  for (double d : distance_grid_m) {
    if (!(d > 0.0) || !(d < config.road_length_m / 2.0)) {
      throw ConfigError("distance grid values must lie in (0, road_length/2)");
    }
  }
  const ChannelParams channel = on_ring(channel_in, config);
  const double range = d2d_range(routing, channel);
  const std::size_t n_grid = distance_grid_m.size();

  // Per pair: hop count per (grid, scheme); -1 outage, -2 no valid pair.
  const auto per_pair = parallel_map(n_pairs, workers, [&](std::size_t j) {
    std::vector<int> hops(n_grid * schemes.size(), -2);
    const Realization r = realize(config, strategy, j);
    for (std::size_t g = 0; g < n_grid; ++g) {
      auto rng = make_stream(config.master_seed, stream::pair_anchor, j * n_grid + g);
      const auto peers = draw_peer_pair(r.vehicles, distance_grid_m[g], config.road_length_m, rng);
      if (!peers) continue;
      for (std::size_t s = 0; s < schemes.size(); ++s) {
        PathResult p;
        switch (schemes[s]) {
          case HopScheme::d2d_only:
            p = d2d_path(r.vehicles, peers->first, peers->second, range, config.road_length_m);
            break;
          case HopScheme::ap_noncoop:
            p = ap_path(r.vehicles, r.ap_ids, peers->first, peers->second, AccessMode::noncoop, r.fading, channel,
                        routing, coop_k);
            break;
          case HopScheme::ap_coop:
            p = ap_path(r.vehicles, r.ap_ids, peers->first, peers->second, AccessMode::coop, r.fading, channel,
                        routing, coop_k);
            break;
        }
        hops[s * n_grid + g] = p.hops.value_or(-1);
      }
    }
    return hops;
  });

  std::vector<HopRow> rows;
  for (std::size_t s = 0; s < schemes.size(); ++s) {
    for (std::size_t g = 0; g < n_grid; ++g) {
      std::int64_t valid = 0, connected = 0, sum = 0, sum_sq = 0;
      for (const auto& pair : per_pair) {
        const int h = pair[s * n_grid + g];
        if (h == -2) continue;
        ++valid;
        if (h < 0) continue;
        ++connected;
        sum += h;
        sum_sq += static_cast<std::int64_t>(h) * h;
      }
      HopRow row;
      row.scheme = schemes[s];
      row.target_distance_m = distance_grid_m[g];
      row.n_pairs = valid;
      row.outage_fraction = valid > 0 ? static_cast<double>(valid - connected) / static_cast<double>(valid) : 0.0;
      if (connected > 0) {
        const double n = static_cast<double>(connected);
        row.mean_hops = static_cast<double>(sum) / n;
        const double var = connected > 1 ? (static_cast<double>(sum_sq) - n * row.mean_hops * row.mean_hops) / (n - 1.0)
                                         : 0.0;
        row.std_error = std::sqrt(std::max(var, 0.0) / n);
      } else {
        row.mean_hops = NAN;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace cellless
