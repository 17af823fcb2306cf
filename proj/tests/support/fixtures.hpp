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

#include <random>
#include <vector>

#include "hetee/instance.hpp"

namespace hetee::testing {

// Two users, one SBS. MBS rates (2, 1), SBS rates (0.08, 0.04), pilot
// overhead 0.1, powers (10, 2). The optimum puts both users on the MBS with
// the SBS off: sum rate 0.8 * 3 = 2.4, EE 0.24.
inline Instance reference_instance() {
  Instance inst;
  inst.num_users = 2;
  inst.num_sbs = 1;
  inst.rate_mbs = {2.0, 1.0};
  inst.rate_sbs = {{0.08}, {0.04}};
  inst.pilot_overhead = 0.1;
  inst.capacities = {100, 50};
  inst.powers = {10.0, 2.0};
  return inst;
}

// Random small instance with scarce capacities; exercises nontrivial ON/OFF
// and association tradeoffs.
inline Instance random_instance(std::mt19937_64& rng, int max_users = 8, int max_sbs = 3) {
  std::uniform_int_distribution<int> ku(1, max_users), ju(0, max_sbs);
  std::uniform_real_distribution<double> r0(0.2, 3.0), cs(0.0, 0.8), pw(0.3, 2.0);
  Instance inst;
  inst.num_users = ku(rng);
  inst.num_sbs = ju(rng);
  const int K = inst.num_users, J = inst.num_sbs;
  inst.rate_mbs.resize(K);
  inst.rate_sbs.assign(K, std::vector<double>(J));
  for (int k = 0; k < K; ++k) {
    inst.rate_mbs[k] = r0(rng);
    for (int j = 0; j < J; ++j) inst.rate_sbs[k][j] = cs(rng);
  }
  std::uniform_int_distribution<int> cap0(1, std::max(2, K)), capj(1, 3);
  inst.capacities.resize(J + 1);
  inst.powers.resize(J + 1);
  inst.capacities[0] = cap0(rng);
  inst.powers[0] = 5.0 + 10.0 * std::generate_canonical<double, 53>(rng);
  for (int j = 1; j <= J; ++j) {
    inst.capacities[j] = capj(rng);
    inst.powers[j] = pw(rng);
  }
  std::uniform_real_distribution<double> ov(0.01, 0.9 / std::max(1, std::min(K, inst.capacities[0])));
  inst.pilot_overhead = ov(rng);
  return inst;
}

}  // namespace hetee::testing
