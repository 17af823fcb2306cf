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

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "hetee/common.hpp"
#include "hetee/scenario.hpp"

namespace hetee {

// Problem data shared by every solver: per-user MBS rates, per-(user, SBS)
// channel rates, BS capacities and powers.
//
// rate_mbs[k] is the unattenuated spectral efficiency of user k at the MBS;
// the pilot-overhead attenuation is a function of the MBS load and applied by
// mbs_user_rate. rate_sbs[k][j] is already divided by the SBS channel count,
// i.e. it is the per-user rate when served on one of S_j channels.
struct Instance {
  int num_users = 0;  // K
  int num_sbs = 0;    // J
  std::vector<double> rate_mbs;                  // [K]
  std::vector<std::vector<double>> rate_sbs;     // [K][J]
  double pilot_overhead = 0.0;                   // T'/T
  std::vector<int> capacities;                   // [J+1], index 0 = MBS
  std::vector<double> powers;                    // [J+1], index 0 = MBS
  // Set when pilot overhead can saturate the MBS at a feasible load, i.e.
  // pilot_overhead * min(K, S_0) >= 1. Rates are clamped at zero in that
  // regime rather than going negative.
  bool pilot_saturation_possible = false;

  int mbs_capacity() const { return capacities[0]; }
  int max_mbs_load() const { return std::min(num_users, capacities[0]); }
};

// User association matrix and SBS on/off vector.
// x[k][0] is the MBS column; x[k][j] for j >= 1 maps to SBS j-1 in y.
struct Assignment {
  std::vector<std::vector<std::uint8_t>> x;  // [K][J+1]
  std::vector<std::uint8_t> y;               // [J]

  static Assignment zeros(int num_users, int num_sbs) {
    Assignment a;
    a.x.assign(num_users, std::vector<std::uint8_t>(num_sbs + 1, 0));
    a.y.assign(num_sbs, 0);
    return a;
  }

  int mbs_load() const {
    int m = 0;
    for (const auto& row : x) m += row[0];
    return m;
  }
  int on_count() const {
    int n = 0;
    for (auto v : y) n += v;
    return n;
  }
};

struct FeasibilityReport {
  bool ok = true;
  std::string message;  // empty when ok
};

inline Instance build_instance(const Scenario& sc) {
  const int K = sc.num_users(), J = sc.num_sbs();
  Instance inst;
  inst.num_users = K;
  inst.num_sbs = J;
  inst.pilot_overhead = sc.config.pilot_overhead;
  inst.rate_mbs.resize(K);
  inst.rate_sbs.assign(K, std::vector<double>(J));
  for (int k = 0; k < K; ++k) {
    inst.rate_mbs[k] = shannon_rate(mbs_sinr(sc, k));
    for (int j = 0; j < J; ++j)
      inst.rate_sbs[k][j] = shannon_rate(sc.gamma_sbs[k][j]) / sc.config.sbs_channels;
  }
  inst.capacities.resize(J + 1);
  inst.powers.resize(J + 1);
  inst.capacities[0] = sc.config.mbs_capacity;
  inst.powers[0] = sc.config.mbs_power_w;
  for (int j = 1; j <= J; ++j) {
    inst.capacities[j] = sc.config.sbs_channels;
    inst.powers[j] = sc.config.sbs_power_w;
  }
  inst.pilot_saturation_possible = inst.pilot_overhead * inst.max_mbs_load() >= 1.0;
  return inst;
}

// Rate of user k on the MBS when the MBS serves mbs_load users in total.
// The pilot overhead grows linearly with the load; the rate is floored at
// zero once the slot is fully consumed by pilots.
inline double mbs_user_rate(const Instance& inst, int mbs_load, int k) {
  if (mbs_load < 0 || mbs_load > inst.capacities[0])
    throw std::out_of_range("mbs_user_rate: load outside [0, S_0]");
  if (k < 0 || k >= inst.num_users) throw std::out_of_range("mbs_user_rate: user index");
  const double factor = 1.0 - mbs_load * inst.pilot_overhead;
  return std::max(factor, 0.0) * inst.rate_mbs[k];
}

inline FeasibilityReport check_feasible(const Instance& inst, const Assignment& a) {
  const int K = inst.num_users, J = inst.num_sbs;
  FeasibilityReport rep;
  auto fail = [&rep](const std::string& msg) {
    rep.ok = false;
    rep.message = msg;
    return rep;
  };
  if (static_cast<int>(a.x.size()) != K || static_cast<int>(a.y.size()) != J)
    return fail("assignment dimensions do not match the instance");
  for (int k = 0; k < K; ++k)
    if (static_cast<int>(a.x[k].size()) != J + 1)
      return fail("assignment row " + std::to_string(k) + " has wrong arity");

  for (int k = 0; k < K; ++k) {
    int row = 0;
    for (int j = 0; j <= J; ++j) {
      if (a.x[k][j] != 0 && a.x[k][j] != 1)
        return fail("x[" + std::to_string(k) + "][" + std::to_string(j) + "] is not binary");
      row += a.x[k][j];
    }
    if (row > 1)
      return fail("user " + std::to_string(k) + " is connected to more than one BS");
  }
  for (int j = 0; j <= J; ++j) {
    int col = 0;
    for (int k = 0; k < K; ++k) col += a.x[k][j];
    if (col > inst.capacities[j])
      return fail("BS " + std::to_string(j) + " load " + std::to_string(col) +
                  " exceeds capacity " + std::to_string(inst.capacities[j]));
  }
  for (int j = 1; j <= J; ++j) {
    if (a.y[j - 1] != 0 && a.y[j - 1] != 1)
      return fail("y[" + std::to_string(j - 1) + "] is not binary");
    if (a.y[j - 1] == 0)
      for (int k = 0; k < K; ++k)
        if (a.x[k][j])
          return fail("user " + std::to_string(k) + " is connected to OFF SBS " +
                      std::to_string(j));
  }
  return rep;
}

struct ObjectiveValue {
  double sum_rate = 0.0;  // bit/s/Hz
  double power = 0.0;     // watts
  double ee = 0.0;        // bit/s/Hz per watt
};

// Sum rate, consumed power and energy efficiency of a feasible assignment.
inline ObjectiveValue eval_objective(const Instance& inst, const Assignment& a) {
  const auto rep = check_feasible(inst, a);
  if (!rep.ok) throw FeasibilityError("eval_objective: " + rep.message);

  const int K = inst.num_users, J = inst.num_sbs;
  const int load = a.mbs_load();
  ObjectiveValue val;
  for (int k = 0; k < K; ++k) {
    if (a.x[k][0]) val.sum_rate += mbs_user_rate(inst, load, k);
    for (int j = 1; j <= J; ++j)
      if (a.x[k][j]) val.sum_rate += inst.rate_sbs[k][j - 1];
  }
  val.power = inst.powers[0];
  for (int j = 1; j <= J; ++j)
    if (a.y[j - 1]) val.power += inst.powers[j];
  val.ee = val.sum_rate / val.power;
  return val;
}

}  // namespace hetee
