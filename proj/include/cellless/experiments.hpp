#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cellless/channel.hpp"
#include "cellless/connectivity.hpp"
#include "cellless/routing.hpp"
#include "cellless/scenario.hpp"
#include "cellless/selection.hpp"

namespace cellless {

inline constexpr std::string_view kToolVersion = "0.1.0";

using json = nlohmann::ordered_json;

inline std::vector<double> default_p_grid() { return {0.02, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5}; }

inline std::vector<double> default_theta_grid_db() {
  std::vector<double> g;
  for (int t = -10; t <= 20; t += 2) g.push_back(t);
  return g;
}

inline std::vector<double> default_distance_grid_m() {
  std::vector<double> g;
  for (int d = 100; d <= 3000; d += 100) g.push_back(d);
  return g;
}

/// Fully resolved experiment configuration. Defaults describe the reference
/// scenario: 10 km road, 0.02 vehicles/m, 50-80 km/h, alpha = 4, 2 W APs,
/// -100 dBW noise.
struct ExperimentConfig {
  ScenarioConfig scenario;
  ChannelParams channel;
  RoutingParams routing;
  std::size_t n_snapshots = 2000;
  std::size_t n_pairs = 2000;
  unsigned workers = 0;  // execution detail; not echoed
  int coop_k = 2;

  // Single-point runs (connectivity, hops, gen) and the fig6 AP selection.
  SelectionStrategy strategy = RandomSelection{0.1};
  double theta_db = 0.0;
  AccessMode mode = AccessMode::coop;
  HopScheme scheme = HopScheme::ap_coop;

  std::vector<double> p_grid = default_p_grid();
  std::vector<double> theta_grid_db = default_theta_grid_db();
  std::vector<double> distance_grid_m = default_distance_grid_m();

  double fig5_ratio = 0.1;
  std::int64_t fig5_fixed_count = 200;

  // gen: which snapshot to dump and how far to advance it.
  std::uint64_t snapshot_index = 0;
  double gen_time_s = 0.0;

  void validate() const {
    scenario.validate();
    channel.validate();
    routing.validate();
    cellless::validate(strategy);
    if (n_snapshots < 1) throw ConfigError("n_snapshots must be >= 1");
    if (n_pairs < 1) throw ConfigError("n_pairs must be >= 1");
    if (coop_k < 1) throw ConfigError("coop_k must be >= 1");
    for (double p : p_grid) {
      if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("p_grid values must lie in [0, 1]");
    }
    if (!(fig5_ratio > 0.0 && fig5_ratio <= 1.0)) throw ConfigError("fig5.ratio must lie in (0, 1]");
    if (fig5_fixed_count < 0) throw ConfigError("fig5.fixed_count must be non-negative");
    if (!(gen_time_s >= 0.0)) throw ConfigError("gen.time_s must be non-negative");
  }
};

namespace detail {

inline void reject_unknown(const json& obj, std::string_view section, std::initializer_list<std::string_view> known) {
  if (!obj.is_object()) throw ConfigError("config section '" + std::string(section) + "' must be an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (auto k : known) ok = ok || key == k;
    if (!ok) throw ConfigError("unknown config key '" + std::string(section) + "." + key + "'");
  }
}

template <class T>
void read(const json& obj, const char* key, T& out) {
  if (auto it = obj.find(key); it != obj.end() && !it->is_null()) out = it->get<T>();
}

template <class T>
void read(const json& obj, const char* key, std::optional<T>& out) {
  if (auto it = obj.find(key); it != obj.end()) {
    if (it->is_null()) {
      out.reset();
    } else {
      out = it->get<T>();
    }
  }
}

inline json strategy_json(const SelectionStrategy& s) {
  return json{{"name", std::string(strategy_name(s))}, {"param", strategy_parameter(s)}};
}

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace detail

/// Reads a configuration document. Missing keys keep their defaults;
/// unknown keys and ill-typed values raise ConfigError.
inline ExperimentConfig parse_config(const json& doc) {
  using detail::read;
  ExperimentConfig c;
  try {
    detail::reject_unknown(doc, "<root>",
                           {"scenario", "channel", "routing", "n_snapshots", "n_pairs", "workers", "coop_k",
                            "strategy", "theta_db", "mode", "scheme", "grids", "fig5", "gen"});
    if (auto it = doc.find("scenario"); it != doc.end()) {
      detail::reject_unknown(*it, "scenario",
                             {"road_length_m", "density_per_m", "fixed_count", "speed_min_kmh", "speed_max_kmh",
                              "master_seed"});
      read(*it, "road_length_m", c.scenario.road_length_m);
      read(*it, "density_per_m", c.scenario.density_per_m);
      read(*it, "fixed_count", c.scenario.fixed_count);
      read(*it, "speed_min_kmh", c.scenario.speed_min_kmh);
      read(*it, "speed_max_kmh", c.scenario.speed_max_kmh);
      read(*it, "master_seed", c.scenario.master_seed);
    }
    if (auto it = doc.find("channel"); it != doc.end()) {
      detail::reject_unknown(*it, "channel",
                             {"pathloss_exponent", "noise_w", "ap_tx_power_w", "user_tx_power_w", "min_distance_m"});
      read(*it, "pathloss_exponent", c.channel.pathloss_exponent);
      read(*it, "noise_w", c.channel.noise_w);
      read(*it, "ap_tx_power_w", c.channel.ap_tx_power_w);
      read(*it, "user_tx_power_w", c.channel.user_tx_power_w);
      read(*it, "min_distance_m", c.channel.min_distance_m);
    }
    if (auto it = doc.find("routing"); it != doc.end()) {
      detail::reject_unknown(*it, "routing",
                             {"d2d_range_m", "d2d_theta_db", "backhaul_range_m", "core_detour_extra_hops",
                              "access_theta_db"});
      read(*it, "d2d_range_m", c.routing.d2d_range_m);
      read(*it, "d2d_theta_db", c.routing.d2d_theta_db);
      read(*it, "backhaul_range_m", c.routing.backhaul_range_m);
      read(*it, "core_detour_extra_hops", c.routing.core_detour_extra_hops);
      read(*it, "access_theta_db", c.routing.access_theta_db);
    }
    read(doc, "n_snapshots", c.n_snapshots);
    read(doc, "n_pairs", c.n_pairs);
    read(doc, "workers", c.workers);
    read(doc, "coop_k", c.coop_k);
    if (auto it = doc.find("strategy"); it != doc.end()) {
      detail::reject_unknown(*it, "strategy", {"name", "param"});
      std::string name(strategy_name(c.strategy));
      double param = strategy_parameter(c.strategy);
      read(*it, "name", name);
      read(*it, "param", param);
      c.strategy = make_strategy(name, param);
    }
    read(doc, "theta_db", c.theta_db);
    if (auto it = doc.find("mode"); it != doc.end()) c.mode = parse_mode(it->get<std::string>());
    if (auto it = doc.find("scheme"); it != doc.end()) c.scheme = parse_scheme(it->get<std::string>());
    if (auto it = doc.find("grids"); it != doc.end()) {
      detail::reject_unknown(*it, "grids", {"p", "theta_db", "distance_m"});
      read(*it, "p", c.p_grid);
      read(*it, "theta_db", c.theta_grid_db);
      read(*it, "distance_m", c.distance_grid_m);
    }
    if (auto it = doc.find("fig5"); it != doc.end()) {
      detail::reject_unknown(*it, "fig5", {"ratio", "fixed_count"});
      read(*it, "ratio", c.fig5_ratio);
      read(*it, "fixed_count", c.fig5_fixed_count);
    }
    if (auto it = doc.find("gen"); it != doc.end()) {
      detail::reject_unknown(*it, "gen", {"snapshot_index", "time_s"});
      read(*it, "snapshot_index", c.snapshot_index);
      read(*it, "time_s", c.gen_time_s);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  c.validate();
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

// Echo of every setting that influences results.
inline json to_json(const ExperimentConfig& c) {
  json j;
  j["scenario"] = {{"road_length_m", c.scenario.road_length_m},
                   {"density_per_m", c.scenario.density_per_m},
                   {"fixed_count", detail::optional_json(c.scenario.fixed_count)},
                   {"speed_min_kmh", c.scenario.speed_min_kmh},
                   {"speed_max_kmh", c.scenario.speed_max_kmh},
                   {"master_seed", c.scenario.master_seed}};
  j["channel"] = {{"pathloss_exponent", c.channel.pathloss_exponent},
                  {"noise_w", c.channel.noise_w},
                  {"ap_tx_power_w", c.channel.ap_tx_power_w},
                  {"user_tx_power_w", c.channel.user_tx_power_w},
                  {"min_distance_m", c.channel.min_distance_m}};
  j["routing"] = {{"d2d_range_m", detail::optional_json(c.routing.d2d_range_m)},
                  {"d2d_theta_db", c.routing.d2d_theta_db},
                  {"backhaul_range_m", c.routing.backhaul_range_m},
                  {"core_detour_extra_hops", c.routing.core_detour_extra_hops},
                  {"access_theta_db", detail::optional_json(c.routing.access_theta_db)}};
  j["n_snapshots"] = c.n_snapshots;
  j["n_pairs"] = c.n_pairs;
  j["coop_k"] = c.coop_k;
  j["strategy"] = detail::strategy_json(c.strategy);
  j["theta_db"] = c.theta_db;
  j["mode"] = std::string(mode_name(c.mode));
  j["scheme"] = std::string(scheme_name(c.scheme));
  j["grids"] = {{"p", c.p_grid}, {"theta_db", c.theta_grid_db}, {"distance_m", c.distance_grid_m}};
  j["fig5"] = {{"ratio", c.fig5_ratio}, {"fixed_count", c.fig5_fixed_count}};
  j["gen"] = {{"snapshot_index", c.snapshot_index}, {"time_s", c.gen_time_s}};
  return j;
}

/// Table of results plus provenance metadata.
struct ExperimentResult {
  std::string experiment_id;
  std::vector<std::string> columns;
  std::vector<json> rows;  // each an array aligned with `columns`
  json metadata;

  // Column index by name; throws std::out_of_range when absent.
  std::size_t column(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) return i;
    }
    throw std::out_of_range("no column " + std::string(name));
  }
};

inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

inline std::string format_cell(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_float()) return format_number(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  if (v.is_null()) return "nan";
  return v.dump();
}

// UTF-8, header row, '.' decimal separator, LF line endings.
inline std::string to_csv(const ExperimentResult& r) {
  std::ostringstream out;
  for (std::size_t i = 0; i < r.columns.size(); ++i) out << (i ? "," : "") << r.columns[i];
  out << '\n';
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_cell(row[i]);
    out << '\n';
  }
  return out.str();
}

inline json to_json(const ExperimentResult& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json obj;
    for (std::size_t i = 0; i < r.columns.size(); ++i) {
      const json& v = row[i];
      obj[r.columns[i]] = v.is_number_float() && !std::isfinite(v.get<double>()) ? json(nullptr) : v;
    }
    rows.push_back(std::move(obj));
  }
  return json{{"experiment", r.experiment_id}, {"metadata", r.metadata}, {"rows", std::move(rows)}};
}

inline const std::vector<std::string>& connectivity_columns() {
  static const std::vector<std::string> cols{"strategy", "mode",      "theta_db",  "param_p",
                                             "probability", "std_error", "n_samples", "seed"};
  return cols;
}

inline const std::vector<std::string>& hops_columns() {
  static const std::vector<std::string> cols{"scheme",    "target_distance_m", "mean_hops", "std_error",
                                             "outage_fraction", "n_pairs",    "seed"};
  return cols;
}

inline const std::vector<std::string>& snapshot_columns() {
  static const std::vector<std::string> cols{"id", "position_m", "velocity_mps", "is_ap"};
  return cols;
}

namespace detail {

inline ExperimentResult make_result(std::string id, std::vector<std::string> columns, const ExperimentConfig& c) {
  ExperimentResult r;
  r.experiment_id = std::move(id);
  r.columns = std::move(columns);
  r.metadata = json{{"experiment", r.experiment_id},
                    {"master_seed", c.scenario.master_seed},
                    {"n_snapshots", c.n_snapshots},
                    {"n_pairs", c.n_pairs},
                    {"tool_version", std::string(kToolVersion)},
                    {"config", to_json(c)}};
  return r;
}

inline json connectivity_row(const ConnectivityEstimate& e, std::uint64_t seed) {
  return json::array({std::string(strategy_name(e.strategy)), std::string(mode_name(e.mode)), e.theta_db,
                      strategy_parameter(e.strategy), e.probability, e.std_error, e.n_samples, seed});
}

inline json hop_row(const HopRow& h, std::uint64_t seed) {
  return json::array({std::string(scheme_name(h.scheme)), h.target_distance_m, h.mean_hops, h.std_error,
                      h.outage_fraction, h.n_pairs, seed});
}

}  // namespace detail

/// Connectivity for the configured strategy, mode and threshold.
inline ExperimentResult run_connectivity(const ExperimentConfig& c) {
  c.validate();
  auto r = detail::make_result("connectivity", connectivity_columns(), c);
  const auto e = estimate_connectivity(c.scenario, c.strategy, c.theta_db, c.mode, c.n_snapshots, c.channel,
                                       c.workers, c.coop_k);
  r.rows.push_back(detail::connectivity_row(e, c.scenario.master_seed));
  return r;
}

/// Connectivity versus selection probability (Random strategy), both modes.
/// Rows: mode-major, then p.
inline ExperimentResult run_fig4(const ExperimentConfig& c) {
  c.validate();
  auto r = detail::make_result("fig4", connectivity_columns(), c);
  const AccessMode modes[] = {AccessMode::noncoop, AccessMode::coop};
  const double thetas[] = {c.theta_db};
  std::vector<std::vector<std::vector<Tally>>> per_p;
  for (double p : c.p_grid) {
    per_p.push_back(connectivity_tallies(c.scenario, RandomSelection{p}, thetas, modes, c.n_snapshots, c.channel,
                                         c.workers, c.coop_k));
  }
  for (std::size_t m = 0; m < 2; ++m) {
    for (std::size_t i = 0; i < c.p_grid.size(); ++i) {
      const auto e = to_estimate(per_p[i][m][0], modes[m], c.theta_db, RandomSelection{c.p_grid[i]});
      r.rows.push_back(detail::connectivity_row(e, c.scenario.master_seed));
    }
  }
  return r;
}

/// Connectivity versus SINR threshold for the three strategies and both
/// modes at a fixed vehicle count. Rows: strategy, mode, then theta.
inline ExperimentResult run_fig5(const ExperimentConfig& c) {
  c.validate();
  auto r = detail::make_result("fig5", connectivity_columns(), c);
  ScenarioConfig scenario = c.scenario;
  scenario.fixed_count = c.fig5_fixed_count;
  const AccessMode modes[] = {AccessMode::noncoop, AccessMode::coop};
  const SelectionStrategy strategies[] = {RandomSelection{c.fig5_ratio}, SequenceSelection{c.fig5_ratio},
                                          DistanceSelection{c.fig5_ratio}};
  for (const auto& s : strategies) {
    const auto t = connectivity_tallies(scenario, s, c.theta_grid_db, modes, c.n_snapshots, c.channel, c.workers,
                                        c.coop_k);
    for (std::size_t m = 0; m < 2; ++m) {
      for (std::size_t i = 0; i < c.theta_grid_db.size(); ++i) {
        r.rows.push_back(
            detail::connectivity_row(to_estimate(t[m][i], modes[m], c.theta_grid_db[i], s), scenario.master_seed));
      }
    }
  }
  return r;
}

/// Mean hops versus distance for the configured scheme.
inline ExperimentResult run_hops(const ExperimentConfig& c) {
  c.validate();
  auto r = detail::make_result("hops", hops_columns(), c);
  const HopScheme schemes[] = {c.scheme};
  for (const auto& h : avg_hops_vs_distance(c.scenario, c.strategy, schemes, c.distance_grid_m, c.n_pairs, c.channel,
                                            c.routing, c.workers, c.coop_k)) {
    r.rows.push_back(detail::hop_row(h, c.scenario.master_seed));
  }
  return r;
}

/// Mean hops versus distance for all three schemes. Rows: scheme, then distance.
inline ExperimentResult run_fig6(const ExperimentConfig& c) {
  c.validate();
  auto r = detail::make_result("fig6", hops_columns(), c);
  const HopScheme schemes[] = {HopScheme::d2d_only, HopScheme::ap_noncoop, HopScheme::ap_coop};
  for (const auto& h : avg_hops_vs_distance(c.scenario, c.strategy, schemes, c.distance_grid_m, c.n_pairs, c.channel,
                                            c.routing, c.workers, c.coop_k)) {
    r.rows.push_back(detail::hop_row(h, c.scenario.master_seed));
  }
  return r;
}

/// One snapshot (with the configured AP selection applied), optionally
/// advanced by gen_time_s seconds.
inline ExperimentResult run_gen(const ExperimentConfig& c) {
  c.validate();
  auto r = detail::make_result("gen", snapshot_columns(), c);
  const Realization real = realize(c.scenario, c.strategy, c.snapshot_index);
  const Snapshot moved = step_mobility(real.vehicles, c.gen_time_s, c.scenario.road_length_m);
  for (const auto& v : moved) {
    r.rows.push_back(json::array({v.id, v.position_m, v.velocity_mps, v.is_ap ? 1 : 0}));
  }
  return r;
}

}  // namespace cellless
