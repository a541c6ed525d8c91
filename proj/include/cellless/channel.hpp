#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "cellless/rng.hpp"
#include "cellless/scenario.hpp"

namespace cellless {

struct ChannelParams {
  double pathloss_exponent = 4.0;
  double noise_w = 1e-10;  // -100 dBW
  double ap_tx_power_w = 2.0;
  double user_tx_power_w = 0.2;
  double min_distance_m = 1.0;
  // Circumference used for transmitter-receiver distances; infinity means
  // an open line.
  double ring_length_m = std::numeric_limits<double>::infinity();

  void validate() const {
    if (!(noise_w > 0.0)) throw ConfigError("noise_w must be positive");
    if (!(ap_tx_power_w > 0.0)) throw ConfigError("ap_tx_power_w must be positive");
    if (!(user_tx_power_w > 0.0)) throw ConfigError("user_tx_power_w must be positive");
    if (!(pathloss_exponent >= 2.0)) throw ConfigError("pathloss_exponent must be >= 2");
    if (!(min_distance_m > 0.0)) throw ConfigError("min_distance_m must be positive");
    if (!(ring_length_m > 0.0)) throw ConfigError("ring_length_m must be positive");
  }
};

inline double dbw_to_watts(double x_dbw) { return std::pow(10.0, x_dbw / 10.0); }
inline double watts_to_dbw(double w) { return 10.0 * std::log10(w); }
inline double db_to_linear(double x_db) { return std::pow(10.0, x_db / 10.0); }

inline double received_power(double p_tx_w, double distance_m, double h, const ChannelParams& params) {
  const double d = std::max(distance_m, params.min_distance_m);
  return p_tx_w * h * std::pow(d, -params.pathloss_exponent);
}

/// Power gains of independent Rayleigh-faded links.
///
/// The gain of link (tx, rx) is Exponential(1), generated on demand by
/// hashing (seed, tx, rx), so a draw behaves as an immutable map over every
/// ordered pair without materializing it. Individual links can be pinned
/// with `set`, and `constant` yields a fading-free draw.
class FadingDraw {
 public:
  FadingDraw() = default;
  explicit FadingDraw(std::uint64_t seed) : seed_(seed) {}

  static FadingDraw constant(double h) {
    FadingDraw f;
    f.constant_ = h;
    return f;
  }

  void set(VehicleId tx, VehicleId rx, double h) { overrides_[key(tx, rx)] = h; }

  double gain(VehicleId tx, VehicleId rx) const {
    if (!overrides_.empty()) {
      if (auto it = overrides_.find(key(tx, rx)); it != overrides_.end()) return it->second;
    }
    if (constant_) return *constant_;
    const double u = bits_to_unit(splitmix64(seed_ ^ splitmix64(key(tx, rx))));
    return -std::log1p(-u);
  }

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  static std::uint64_t key(VehicleId tx, VehicleId rx) noexcept {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(tx)) << 32) |
           static_cast<std::uint32_t>(rx);
  }

  std::uint64_t seed_ = 0;
  std::optional<double> constant_;
  std::unordered_map<std::uint64_t, double> overrides_;
};

// Outcome of downlink association. `serving` is empty when no AP exists;
// sinr is then 0.
struct Association {
  std::vector<VehicleId> serving;
  double sinr = 0.0;

  bool has_server() const noexcept { return !serving.empty(); }
};

// Received power at `user` from each AP, in AP order.
inline std::vector<double> ap_powers(const Vehicle& user, std::span<const Vehicle> aps,
                                     const FadingDraw& fading, const ChannelParams& params) {
  std::vector<double> s(aps.size());
  for (std::size_t i = 0; i < aps.size(); ++i) {
    const double d = ring_distance(user.position_m, aps[i].position_m, params.ring_length_m);
    s[i] = received_power(params.ap_tx_power_w, d, fading.gain(aps[i].id, user.id), params);
  }
  return s;
}

/// Joint transmission from the k strongest APs; all remaining APs interfere.
///
/// Serving order is by received power, ties to the lower AP id. With k = 1
/// this is single-AP association.
inline Association sinr_coop(const Vehicle& user, std::span<const Vehicle> aps, const FadingDraw& fading,
                             const ChannelParams& params, int k = 2) {
  Association out;
  if (aps.empty() || k < 1) return out;
  const auto s = ap_powers(user, aps, fading, params);
  std::vector<std::size_t> order(aps.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto stronger = [&](std::size_t a, std::size_t b) {
    if (s[a] != s[b]) return s[a] > s[b];
    return aps[a].id < aps[b].id;
  };
  const std::size_t n_serve = std::min<std::size_t>(static_cast<std::size_t>(k), aps.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_serve), order.end(),
                    stronger);

  double signal = 0.0;
  for (std::size_t i = 0; i < n_serve; ++i) {
    signal += s[order[i]];
    out.serving.push_back(aps[order[i]].id);
  }
  double interference = 0.0;
  for (std::size_t i = n_serve; i < order.size(); ++i) interference += s[order[i]];
  out.sinr = signal / (interference + params.noise_w);
  return out;
}

inline Association sinr_noncoop(const Vehicle& user, std::span<const Vehicle> aps, const FadingDraw& fading,
                                const ChannelParams& params) {
  return sinr_coop(user, aps, fading, params, 1);
}

// P[SINR >= theta] for a lone AP at `distance_m` without interferers.
inline double analytic_conn_single_ap(double distance_m, double theta_linear, const ChannelParams& params) {
  const double d = std::max(distance_m, params.min_distance_m);
  return std::exp(-theta_linear * params.noise_w * std::pow(d, params.pathloss_exponent) / params.ap_tx_power_w);
}

}  // namespace cellless
