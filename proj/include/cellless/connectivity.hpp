#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cellless/channel.hpp"
#include "cellless/parallel.hpp"
#include "cellless/realization.hpp"
#include "cellless/scenario.hpp"
#include "cellless/selection.hpp"

namespace cellless {

enum class AccessMode { noncoop, coop };

inline std::string_view mode_name(AccessMode m) { return m == AccessMode::coop ? "coop" : "noncoop"; }

inline AccessMode parse_mode(std::string_view s) {
  if (s == "coop") return AccessMode::coop;
  if (s == "noncoop") return AccessMode::noncoop;
  throw ConfigError("unknown mode '" + std::string(s) + "' (expected coop|noncoop)");
}

// Bernoulli tally: connected users over evaluated users.
struct Tally {
  std::int64_t successes = 0;
  std::int64_t trials = 0;

  Tally& operator+=(const Tally& o) {
    successes += o.successes;
    trials += o.trials;
    return *this;
  }
  friend bool operator==(const Tally&, const Tally&) = default;
};

struct ConnectivityEstimate {
  double probability = 0.0;
  double std_error = 0.0;
  std::int64_t n_samples = 0;
  AccessMode mode = AccessMode::noncoop;
  double theta_db = 0.0;
  SelectionStrategy strategy = RandomSelection{};
};

inline ConnectivityEstimate to_estimate(const Tally& t, AccessMode mode, double theta_db,
                                        const SelectionStrategy& strategy) {
  ConnectivityEstimate e;
  e.n_samples = t.trials;
  e.probability = t.trials > 0 ? static_cast<double>(t.successes) / static_cast<double>(t.trials) : 0.0;
  e.std_error = t.trials > 0 ? std::sqrt(e.probability * (1.0 - e.probability) / static_cast<double>(t.trials)) : 0.0;
  e.mode = mode;
  e.theta_db = theta_db;
  e.strategy = strategy;
  return e;
}

inline int coop_size(AccessMode mode, int coop_k) { return mode == AccessMode::coop ? coop_k : 1; }

/// SINR of every non-AP vehicle, in snapshot order.
inline std::vector<double> user_sinrs(std::span<const Vehicle> vehicles, std::span<const VehicleId> ap_ids,
                                      AccessMode mode, const FadingDraw& fading, const ChannelParams& params,
                                      int coop_k = 2) {
  std::vector<Vehicle> aps;
  for (const auto& v : vehicles) {
    if (std::binary_search(ap_ids.begin(), ap_ids.end(), v.id)) aps.push_back(v);
  }
  std::vector<double> out;
  out.reserve(vehicles.size() - aps.size());
  for (const auto& v : vehicles) {
    if (std::binary_search(ap_ids.begin(), ap_ids.end(), v.id)) continue;
    out.push_back(sinr_coop(v, aps, fading, params, coop_size(mode, coop_k)).sinr);
  }
  return out;
}

/// Per-snapshot tally of users whose downlink SINR reaches `theta_linear`.
///
/// `ap_ids` must be sorted. Users are the vehicles not in `ap_ids`; with no
/// AP every user fails.
inline Tally snapshot_connectivity(std::span<const Vehicle> vehicles, std::span<const VehicleId> ap_ids,
                                   double theta_linear, AccessMode mode, const FadingDraw& fading,
                                   const ChannelParams& params, int coop_k = 2) {
  Tally t;
  for (double s : user_sinrs(vehicles, ap_ids, mode, fading, params, coop_k)) {
    ++t.trials;
    if (!ap_ids.empty() && s >= theta_linear) ++t.successes;
  }
  return t;
}

/// Tallies for a grid of thresholds and modes over `n_snapshots` fresh
/// snapshots. Result is indexed [mode][theta]. All thresholds and modes see
/// the same placements, selections and fading.
inline std::vector<std::vector<Tally>> connectivity_tallies(const ScenarioConfig& config,
                                                            const SelectionStrategy& strategy,
                                                            std::span<const double> thetas_db,
                                                            std::span<const AccessMode> modes,
                                                            std::size_t n_snapshots, const ChannelParams& channel,
                                                            unsigned workers = 0, int coop_k = 2) {
  config.validate();
  channel.validate();
  validate(strategy);
  if (n_snapshots < 1) throw ConfigError("n_snapshots must be >= 1");
  const ChannelParams params = on_ring(channel, config);
  std::vector<double> thresholds;
  for (double t : thetas_db) thresholds.push_back(db_to_linear(t));

  const auto per_snapshot = parallel_map(n_snapshots, workers, [&](std::size_t i) {
    const Realization r = realize(config, strategy, i);
    std::vector<std::vector<Tally>> tallies(modes.size(), std::vector<Tally>(thresholds.size()));
    for (std::size_t m = 0; m < modes.size(); ++m) {
      const auto sinrs = user_sinrs(r.vehicles, r.ap_ids, modes[m], r.fading, params, coop_k);
      for (std::size_t t = 0; t < thresholds.size(); ++t) {
        Tally& tally = tallies[m][t];
        tally.trials = static_cast<std::int64_t>(sinrs.size());
        if (r.ap_ids.empty()) continue;
        for (double s : sinrs) tally.successes += s >= thresholds[t] ? 1 : 0;
      }
    }
    return tallies;
  });

  std::vector<std::vector<Tally>> total(modes.size(), std::vector<Tally>(thresholds.size()));
  for (const auto& snap : per_snapshot) {
    for (std::size_t m = 0; m < modes.size(); ++m) {
      for (std::size_t t = 0; t < thresholds.size(); ++t) total[m][t] += snap[m][t];
    }
  }
  return total;
}

/// Pooled Monte Carlo estimate of the probability that a user reaches the
/// moving-AP tier at SINR threshold `theta_db`.
inline ConnectivityEstimate estimate_connectivity(const ScenarioConfig& config, const SelectionStrategy& strategy,
                                                  double theta_db, AccessMode mode, std::size_t n_snapshots,
                                                  const ChannelParams& channel, unsigned workers = 0,
                                                  int coop_k = 2) {
  const double thetas[] = {theta_db};
  const AccessMode modes[] = {mode};
  const auto t = connectivity_tallies(config, strategy, thetas, modes, n_snapshots, channel, workers, coop_k);
  return to_estimate(t[0][0], mode, theta_db, strategy);
}

}  // namespace cellless
