// Copyright 2026 The hetee Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "hetee/common.hpp"

namespace hetee {

// Links shorter than this are clamped before the path-loss evaluation.
inline constexpr double kMinLinkDistanceM = 1.0;

// Number of subareas used by the non-uniform user distribution (4 x 2 grid).
inline constexpr int kNumSubareas = 8;

struct Position {
  double x = 0.0;
  double y = 0.0;
};

inline double distance_m(const Position& a, const Position& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

enum class UserDistribution { kUniform, kSubareaPoisson };

// One network drop's generation parameters. Rates, capacities and powers that
// define the optimization problem are carried along so a serialized drop is
// self-contained.
struct ScenarioConfig {
  double area_side_m = 1000.0;
  int num_sbs = 10;                     // J
  int num_users = 100;                  // K (uniform mode)
  double user_mean_per_subarea = 12.5;  // Poisson mode, per subarea
  UserDistribution user_distribution = UserDistribution::kUniform;

  double tx_power_dbm = 40.0;    // radiated power, MBS and SBS alike
  double bandwidth_hz = 1e6;
  double pilot_overhead = 0.0095;  // T'/T, per-user pilot fraction
  int mbs_capacity = 100;          // S_0
  int sbs_channels = 50;           // S_j
  double mbs_power_w = 40.0;       // consumed power while ON
  double sbs_power_w = 1.0;

  double mbs_path_loss_exp = 3.76;
  double sbs_path_loss_exp = 4.0;
  double ref_loss_db = 38.5;       // loss at 1 m
  double shadowing_std_db = 8.0;
  double noise_dbm_per_hz = -174.0;

  int interferer_count = 6;             // co-pilot macrocells on a ring
  double interferer_distance_m = 1800.0;

  std::uint64_t rng_seed = 1;

  void validate() const {
    if (!(area_side_m > 0.0)) throw std::invalid_argument("area_side_m must be > 0");
    if (num_sbs < 0) throw std::invalid_argument("num_sbs must be >= 0");
    if (num_users < 0) throw std::invalid_argument("num_users must be >= 0");
    if (!(user_mean_per_subarea >= 0.0))
      throw std::invalid_argument("user_mean_per_subarea must be >= 0");
    if (!(pilot_overhead > 0.0 && pilot_overhead < 1.0))
      throw std::invalid_argument("pilot_overhead must lie in (0,1)");
    if (mbs_capacity < 1) throw std::invalid_argument("mbs_capacity must be >= 1");
    if (sbs_channels < 1) throw std::invalid_argument("sbs_channels must be >= 1");
    if (!(mbs_power_w > 0.0 && sbs_power_w > 0.0))
      throw std::invalid_argument("BS powers must be > 0");
    if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("bandwidth_hz must be > 0");
    if (interferer_count < 0) throw std::invalid_argument("interferer_count must be >= 0");
    if (!(interferer_distance_m > 0.0))
      throw std::invalid_argument("interferer_distance_m must be > 0");
  }
};

// Geometry and large-scale channel state of one drop.
//
// beta_* hold linear power gains; gamma_sbs holds the linear SINR of each
// (user, SBS) link. The MBS SINR is derived from the betas on demand.
struct Scenario {
  ScenarioConfig config;
  Position mbs_position;
  std::vector<Position> sbs_positions;   // [J]
  std::vector<Position> user_positions;  // [K]
  std::vector<double> beta_mbs;                        // [K]
  std::vector<std::vector<double>> beta_interf;        // [K][L]
  std::vector<std::vector<double>> gamma_sbs;          // [K][J]

  int num_users() const { return static_cast<int>(user_positions.size()); }
  int num_sbs() const { return static_cast<int>(sbs_positions.size()); }
};

// Log-distance path loss in dB at distance d (clamped at 1 m).
inline double path_loss_db(const ScenarioConfig& cfg, double d_m, bool macro_tier) {
  const double d = std::max(d_m, kMinLinkDistanceM);
  const double alpha = macro_tier ? cfg.mbs_path_loss_exp : cfg.sbs_path_loss_exp;
  return cfg.ref_loss_db + 10.0 * alpha * std::log10(d);
}

// Linear power gain of a link given its path loss and a shadowing draw in dB.
inline double link_gain(const ScenarioConfig& cfg, double d_m, double shadow_db,
                        bool macro_tier) {
  return db_to_linear(-(path_loss_db(cfg, d_m, macro_tier) + shadow_db));
}

// SINR of a user at an SBS. The SBS band is split into sbs_channels FDMA
// channels and each served user occupies one, so thermal noise is integrated
// over a single channel. SBS links are noise limited.
inline double sbs_sinr_from_link(const ScenarioConfig& cfg, double d_m, double shadow_db) {
  const double rx_w = dbm_to_watt(cfg.tx_power_dbm) * link_gain(cfg, d_m, shadow_db, false);
  const double noise_w =
      dbm_to_watt(cfg.noise_dbm_per_hz) * (cfg.bandwidth_hz / cfg.sbs_channels);
  return rx_w / noise_w;
}

// Positions of the co-pilot macrocells: a ring around the area center.
inline std::vector<Position> interferer_positions(const ScenarioConfig& cfg) {
  std::vector<Position> out;
  out.reserve(cfg.interferer_count);
  const double cx = cfg.area_side_m / 2.0, cy = cfg.area_side_m / 2.0;
  for (int l = 0; l < cfg.interferer_count; ++l) {
    const double ang = 2.0 * M_PI * l / std::max(cfg.interferer_count, 1);
    out.push_back({cx + cfg.interferer_distance_m * std::cos(ang),
                   cy + cfg.interferer_distance_m * std::sin(ang)});
  }
  return out;
}

// Draws one network drop. The draw order is part of the format contract:
//   1. SBS positions (x, y per SBS),
//   2. user counts (Poisson mode only) then user positions,
//   3. per user: MBS shadowing, interferer shadowing (in ring order),
//      SBS shadowing (in SBS order).
// Identical config (including seed) therefore reproduces the drop bit for bit.
inline Scenario generate_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.rng_seed);
  std::uniform_real_distribution<double> coord(0.0, cfg.area_side_m);
  std::normal_distribution<double> shadow(0.0, 1.0);

  Scenario sc;
  sc.config = cfg;
  sc.mbs_position = {cfg.area_side_m / 2.0, cfg.area_side_m / 2.0};

  sc.sbs_positions.resize(cfg.num_sbs);
  for (auto& p : sc.sbs_positions) {
    p.x = coord(rng);
    p.y = coord(rng);
  }

  if (cfg.user_distribution == UserDistribution::kUniform) {
    sc.user_positions.resize(cfg.num_users);
    for (auto& p : sc.user_positions) {
      p.x = coord(rng);
      p.y = coord(rng);
    }
  } else {
    // 4 x 2 grid of subareas, row-major.
    std::poisson_distribution<int> pois(cfg.user_mean_per_subarea);
    const double w = cfg.area_side_m / 4.0, h = cfg.area_side_m / 2.0;
    std::vector<int> counts(kNumSubareas);
    for (auto& c : counts) c = pois(rng);
    for (int s = 0; s < kNumSubareas; ++s) {
      const double x0 = (s % 4) * w, y0 = (s / 4) * h;
      std::uniform_real_distribution<double> ux(x0, x0 + w), uy(y0, y0 + h);
      for (int i = 0; i < counts[s]; ++i) sc.user_positions.push_back({ux(rng), uy(rng)});
    }
  }

  const auto interferers = interferer_positions(cfg);
  const int K = sc.num_users(), J = sc.num_sbs(), L = cfg.interferer_count;
  const double sigma = cfg.shadowing_std_db;
  sc.beta_mbs.resize(K);
  sc.beta_interf.assign(K, std::vector<double>(L));
  sc.gamma_sbs.assign(K, std::vector<double>(J));
  for (int k = 0; k < K; ++k) {
    sc.beta_mbs[k] = link_gain(cfg, distance_m(sc.user_positions[k], sc.mbs_position),
                               sigma * shadow(rng), true);
    for (int l = 0; l < L; ++l)
      sc.beta_interf[k][l] = link_gain(
          cfg, distance_m(sc.user_positions[k], interferers[l]), sigma * shadow(rng), true);
    for (int j = 0; j < J; ++j)
      sc.gamma_sbs[k][j] = sbs_sinr_from_link(
          cfg, distance_m(sc.user_positions[k], sc.sbs_positions[j]), sigma * shadow(rng));
  }
  return sc;
}

// Pilot-contamination-limited SINR of user k at the MBS: the squared gain to
// the serving MBS over the summed squared gains to the co-pilot macrocells.
inline double mbs_sinr(const Scenario& sc, int k) {
  if (k < 0 || k >= sc.num_users()) throw std::out_of_range("mbs_sinr: user index");
  if (sc.beta_interf.empty() || sc.beta_interf[k].empty())
    throw std::invalid_argument(
        "mbs_sinr: no co-pilot interferers configured; the MBS SINR is "
        "interference limited and undefined without them");
  const double b0 = sc.beta_mbs[k];
  double denom = 0.0;
  for (double b : sc.beta_interf[k]) denom += b * b;
  return b0 * b0 / denom;
}

inline double sbs_sinr(const Scenario& sc, int k, int j) {
  if (k < 0 || k >= sc.num_users()) throw std::out_of_range("sbs_sinr: user index");
  if (j < 0 || j >= sc.num_sbs()) throw std::out_of_range("sbs_sinr: SBS index");
  return sc.gamma_sbs[k][j];
}

}  // namespace hetee
