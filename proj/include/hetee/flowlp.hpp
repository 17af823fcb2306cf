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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <vector>

#include "hetee/common.hpp"
#include "hetee/instance.hpp"

namespace hetee {

// Absolute tolerance for cost comparisons inside the flow solver.
inline constexpr double kCostEps = 1e-12;

// The user-to-BS association LP:
//   max sum_{k,b} w[k][b] x[k][b]
//   s.t. sum_b x[k][b] <= 1            (one BS per user)
//        sum_k x[k][b] <= cap[b]       (BS capacity)
//        sum_k x[k][0]  = q0           (optional exact MBS load)
//        0 <= x <= 1.
// The constraint matrix is an assignment/transportation structure, so the LP
// optimum is integral and is computed here as a min-cost flow.
struct AssignmentLP {
  std::vector<std::vector<double>> weights;  // [K][J+1]
  std::vector<int> col_capacity;             // [J+1]
  std::optional<int> mbs_exact_load;         // equality on column 0
};

struct AssignmentSolution {
  std::vector<std::vector<std::uint8_t>> x;  // [K][J+1], exactly binary
  double objective = 0.0;
};

// Residual-arc flow network (kept around for debugging and tests).
struct FlowNetwork {
  struct Arc {
    int head = 0;       // target node
    double residual = 0.0;
    double cost = 0.0;
    int partner = 0;    // index of the reverse arc
    bool forward = false;
  };
  int num_nodes = 0;
  std::vector<std::vector<int>> adjacency;  // node -> arc indices
  std::vector<Arc> arcs;

  int add_arc(int tail, int head, double capacity, double cost) {
    const int a = static_cast<int>(arcs.size());
    arcs.push_back({head, capacity, cost, a + 1, true});
    arcs.push_back({tail, 0.0, -cost, a, false});
    adjacency[tail].push_back(a);
    adjacency[head].push_back(a + 1);
    return a;
  }

  double flow_on(int arc_index) const { return arcs[arc_index + 1].residual; }

  // Plain-text edge list: "tail head capacity cost flow" per forward arc.
  void dump_edge_list(std::ostream& os) const {
    for (int n = 0; n < num_nodes; ++n)
      for (int a : adjacency[n]) {
        const Arc& arc = arcs[a];
        if (!arc.forward) continue;
        os << n << ' ' << arc.head << ' ' << (arc.residual + arcs[a + 1].residual) << ' '
           << arc.cost << ' ' << arcs[a + 1].residual << '\n';
      }
  }
};

// Generalized form used internally: per-pair upper bounds and real capacities,
// which the relaxed-dual solvers need (fractional y and fractional load).
struct FlowProblem {
  int num_users = 0;
  int num_cols = 0;                          // J+1, column 0 = MBS
  std::vector<std::vector<double>> weights;  // [K][B]
  std::vector<std::vector<double>> upper;    // [K][B], in [0,1]
  std::vector<double> col_capacity;          // [B]
  std::optional<double> exact_col0_load;
};

struct FlowDuals {
  // Multipliers of the per-pair bounds x[k][b] <= upper[k][b]; lambda[k][0]
  // is unused (the MBS column has no coupling constraint).
  std::vector<std::vector<double>> lambda;
  // Multiplier of the exact-load equality (0 when the equality is absent).
  double mu = 0.0;
};

struct FlowResult {
  std::vector<std::vector<double>> x;  // [K][B]
  double objective = 0.0;
  FlowDuals duals;
  FlowNetwork network;
};

namespace detail {

// Successive shortest paths with potentials. Nodes: source, K users, B
// columns, sink. When an exact column-0 load is requested, the column-0
// drain arc is dropped and the load is routed in a first phase that targets
// the column-0 node; optional profitable flow is routed in a second phase.
class FlowSolver {
 public:
  explicit FlowSolver(const FlowProblem& p) : p_(p) {
    const int K = p.num_users, B = p.num_cols;
    source_ = 0;
    user0_ = 1;
    col0_ = 1 + K;
    sink_ = 1 + K + B;
    net_.num_nodes = sink_ + 1;
    net_.adjacency.resize(net_.num_nodes);
    pair_arc_.assign(K, std::vector<int>(B, -1));

    for (int k = 0; k < K; ++k) net_.add_arc(source_, user0_ + k, 1.0, 0.0);
    for (int k = 0; k < K; ++k)
      for (int b = 0; b < B; ++b) {
        const double ub = std::min(p.upper[k][b], 1.0);
        if (ub <= 0.0) continue;
        pair_arc_[k][b] = net_.add_arc(user0_ + k, col0_ + b, ub, -p.weights[k][b]);
      }
    for (int b = 0; b < B; ++b) {
      if (b == 0 && p.exact_col0_load) continue;
      if (p.col_capacity[b] > 0.0)
        net_.add_arc(col0_ + b, sink_, p.col_capacity[b], 0.0);
    }
  }

  FlowResult solve() {
    init_potentials();
    if (p_.exact_col0_load) route_exact_load(*p_.exact_col0_load);
    route_profitable();
    return extract();
  }

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  // The arc-free graph is a DAG (source -> users -> columns -> sink), so one
  // topological relaxation yields valid initial potentials even with
  // negative arc costs.
  void init_potentials() {
    pot_.assign(net_.num_nodes, kInf);
    pot_[source_] = 0.0;
    auto relax_from = [this](int node) {
      if (pot_[node] == kInf) return;
      for (int a : net_.adjacency[node]) {
        const auto& arc = net_.arcs[a];
        if (!arc.forward || arc.residual <= 0.0) continue;
        pot_[arc.head] = std::min(pot_[arc.head], pot_[node] + arc.cost);
      }
    };
    relax_from(source_);
    for (int k = 0; k < p_.num_users; ++k) relax_from(user0_ + k);
    for (int b = 0; b < p_.num_cols; ++b) relax_from(col0_ + b);
    // Unreached nodes keep +inf until connected; Dijkstra tolerates it.
  }

  // Dijkstra on reduced costs (dense scan; the graphs are small).
  // Fills dist_ and parent arc indices.
  void shortest_paths() {
    const int n = net_.num_nodes;
    dist_.assign(n, kInf);
    parent_arc_.assign(n, -1);
    std::vector<char> done(n, 0);
    dist_[source_] = 0.0;
    for (;;) {
      int u = -1;
      double best = kInf;
      for (int v = 0; v < n; ++v)
        if (!done[v] && dist_[v] < best) best = dist_[v], u = v;
      if (u < 0) break;
      done[u] = 1;
      for (int a : net_.adjacency[u]) {
        const auto& arc = net_.arcs[a];
        if (arc.residual <= 0.0 || pot_[arc.head] == kInf || pot_[u] == kInf) continue;
        const double rc = std::max(0.0, arc.cost + pot_[u] - pot_[arc.head]);
        if (dist_[u] + rc < dist_[arc.head] - 1e-15) {
          dist_[arc.head] = dist_[u] + rc;
          parent_arc_[arc.head] = a;
        }
      }
    }
  }

  void apply_potentials(int target) {
    const double cap = dist_[target];
    for (int v = 0; v < net_.num_nodes; ++v) {
      if (pot_[v] == kInf) {
        // Newly reached nodes adopt a consistent potential.
        if (dist_[v] < kInf) pot_[v] = dist_[v];
        continue;
      }
      pot_[v] += std::min(dist_[v], cap);
    }
  }

  double augment(int target, double limit) {
    double delta = limit;
    for (int v = target; v != source_; v = tail_of(parent_arc_[v]))
      delta = std::min(delta, net_.arcs[parent_arc_[v]].residual);
    for (int v = target; v != source_; v = tail_of(parent_arc_[v])) {
      auto& arc = net_.arcs[parent_arc_[v]];
      arc.residual -= delta;
      net_.arcs[arc.partner].residual += delta;
    }
    return delta;
  }

  int tail_of(int arc_index) const { return net_.arcs[net_.arcs[arc_index].partner].head; }

  void route_exact_load(double q0) {
    const int K = p_.num_users;
    if (q0 < -kCostEps || q0 > std::min<double>(K, p_.col_capacity[0]) + kCostEps)
      throw InfeasibleError("exact MBS load outside [0, min(K, S_0)]");
    double remaining = q0;
    while (remaining > kCostEps) {
      shortest_paths();
      if (dist_[col0_] == kInf)
        throw InfeasibleError("exact MBS load cannot be routed");
      apply_potentials(col0_);
      remaining -= augment(col0_, remaining);
    }
  }

  void route_profitable() {
    for (;;) {
      shortest_paths();
      if (dist_[sink_] == kInf) break;
      // True path cost; potentials only reshape edge costs inside a path.
      const double true_cost = dist_[sink_] + pot_[sink_] - pot_[source_];
      if (true_cost >= -kCostEps) break;
      apply_potentials(sink_);
      augment(sink_, kInf);
    }
  }

  FlowResult extract() {
    const int K = p_.num_users, B = p_.num_cols;
    FlowResult res;
    res.x.assign(K, std::vector<double>(B, 0.0));
    res.duals.lambda.assign(K, std::vector<double>(B, 0.0));
    for (int k = 0; k < K; ++k)
      for (int b = 0; b < B; ++b) {
        if (pair_arc_[k][b] < 0) continue;
        const double f = net_.flow_on(pair_arc_[k][b]);
        res.x[k][b] = f;
        res.objective += f * p_.weights[k][b];
      }
    // Capacity-constraint multipliers from the optimality potentials:
    // lambda[k][b] = [w - (pi_user - pi_col)]^+ is zero on slack arcs and
    // equals the reduced profit on saturated ones.
    for (int k = 0; k < K; ++k)
      for (int b = 1; b < B; ++b) {
        if (pair_arc_[k][b] < 0) {
          // Bound is zero (e.g. an OFF SBS): charge the full reduced profit
          // of the user, which is the marginal value of relaxing the bound.
          const double uk = user_dual(k);
          res.duals.lambda[k][b] = std::max(0.0, p_.weights[k][b] - uk);
          continue;
        }
        if (pot_[user0_ + k] == kInf || pot_[col0_ + b] == kInf) continue;
        res.duals.lambda[k][b] =
            std::max(0.0, p_.weights[k][b] - (pot_[user0_ + k] - pot_[col0_ + b]));
      }
    if (p_.exact_col0_load && pot_[col0_] != kInf)
      res.duals.mu = pot_[source_] - pot_[col0_];
    res.network = std::move(net_);
    return res;
  }

  double user_dual(int k) const {
    if (pot_[user0_ + k] == kInf) return 0.0;
    return std::max(0.0, pot_[user0_ + k] - pot_[source_]);
  }

  const FlowProblem& p_;
  FlowNetwork net_;
  std::vector<std::vector<int>> pair_arc_;
  std::vector<double> pot_, dist_;
  std::vector<int> parent_arc_;
  int source_ = 0, user0_ = 0, col0_ = 0, sink_ = 0;
};

}  // namespace detail

inline FlowResult solve_flow_problem(const FlowProblem& p) {
  return detail::FlowSolver(p).solve();
}

// Solves the association LP. All data is integral, so the flow solution is
// exactly binary; this is asserted rather than rounded.
inline AssignmentSolution solve_assignment_lp(const AssignmentLP& lp) {
  const int K = static_cast<int>(lp.weights.size());
  const int B = static_cast<int>(lp.col_capacity.size());
  FlowProblem p;
  p.num_users = K;
  p.num_cols = B;
  p.weights = lp.weights;
  p.upper.assign(K, std::vector<double>(B, 1.0));
  p.col_capacity.assign(lp.col_capacity.begin(), lp.col_capacity.end());
  if (lp.mbs_exact_load) {
    if (*lp.mbs_exact_load > std::min(K, lp.col_capacity[0]) || *lp.mbs_exact_load < 0)
      throw InfeasibleError("mbs_exact_load exceeds min(K, S_0)");
    p.exact_col0_load = static_cast<double>(*lp.mbs_exact_load);
  }
  const FlowResult res = solve_flow_problem(p);

  AssignmentSolution sol;
  sol.objective = res.objective;
  sol.x.assign(K, std::vector<std::uint8_t>(B, 0));
  for (int k = 0; k < K; ++k)
    for (int b = 0; b < B; ++b) {
      const double v = res.x[k][b];
      if (v != 0.0 && v != 1.0)
        throw std::logic_error("assignment LP produced a fractional value");
      sol.x[k][b] = static_cast<std::uint8_t>(v);
    }
  return sol;
}

namespace detail {

// Association value for a fixed MBS load m (pilot-clamped weights).
inline double p3_value_at_load(const Instance& inst,
                               const std::vector<std::uint8_t>& y, int m,
                               AssignmentSolution* out = nullptr) {
  const int K = inst.num_users, J = inst.num_sbs;
  AssignmentLP lp;
  lp.weights.assign(K, std::vector<double>(J + 1, 0.0));
  lp.col_capacity.resize(J + 1);
  lp.col_capacity[0] = inst.capacities[0];
  const double factor = std::max(0.0, 1.0 - m * inst.pilot_overhead);
  for (int k = 0; k < K; ++k) {
    lp.weights[k][0] = factor * inst.rate_mbs[k];
    for (int j = 1; j <= J; ++j) lp.weights[k][j] = inst.rate_sbs[k][j - 1];
  }
  for (int j = 1; j <= J; ++j) lp.col_capacity[j] = y[j - 1] ? inst.capacities[j] : 0;
  lp.mbs_exact_load = m;
  AssignmentSolution sol = solve_assignment_lp(lp);
  const double value = sol.objective;
  if (out) *out = std::move(sol);
  return value;
}

}  // namespace detail

// Optimal association for fixed ON/OFF states: the best MBS load is searched
// over the integer grid. The association value is concave in the load while
// the pilot factor is nonnegative (and non-increasing once the factor clamps
// to zero), so large instances use a slope bisection instead of the full
// scan; both paths return an exact optimum.
inline Assignment solve_p3(const Instance& inst, const std::vector<std::uint8_t>& y,
                           double* numerator = nullptr) {
  const int m_max = inst.max_mbs_load();
  // Last load with a nonnegative pilot factor.
  const int m_clamp =
      std::min<int>(m_max, static_cast<int>(std::floor(1.0 / inst.pilot_overhead)));

  std::map<int, double> value_cache;
  auto value = [&](int m) {
    auto it = value_cache.find(m);
    if (it != value_cache.end()) return it->second;
    const double v = detail::p3_value_at_load(inst, y, m);
    value_cache.emplace(m, v);
    return v;
  };

  int best_m = 0;
  if (m_max <= 32) {
    double best = -std::numeric_limits<double>::infinity();
    for (int m = 0; m <= m_max; ++m)
      if (value(m) > best + kCostEps) best = value(m), best_m = m;
  } else {
    int lo = 0, hi = m_clamp;
    while (lo < hi) {
      const int mid = lo + (hi - lo) / 2;
      if (value(mid + 1) >= value(mid)) lo = mid + 1;
      else hi = mid;
    }
    best_m = lo;
    // Past the clamp point the value is non-increasing; one probe suffices.
    if (m_clamp < m_max && value(m_clamp + 1) > value(best_m)) best_m = m_clamp + 1;
    // The load curve can carry small convex bumps in its decreasing tail, so
    // back the bisection with a coarse sweep plus local hill climbs.
    const int step = std::max(1, m_max / 8);
    for (int m = 0; m <= m_max; m += step) {
      int cur = m;
      while (cur + 1 <= m_max && value(cur + 1) > value(cur)) ++cur;
      while (cur - 1 >= 0 && value(cur - 1) > value(cur)) --cur;
      if (value(cur) > value(best_m) + kCostEps) best_m = cur;
    }
  }

  AssignmentSolution sol;
  const double best_value = detail::p3_value_at_load(inst, y, best_m, &sol);
  if (numerator) *numerator = best_value;

  Assignment a;
  a.x = std::move(sol.x);
  a.y.assign(y.begin(), y.end());
  return a;
}

}  // namespace hetee
