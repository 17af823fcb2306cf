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
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "hetee/flowlp.hpp"
#include "hetee/instance.hpp"

namespace hetee {

// Centralized solver: a three-level decomposition. The inner level prices the
// coupling (x <= y) and exact-load constraints, the middle level ascends the
// MBS load along the equality multiplier, the outer level ascends the relaxed
// ON/OFF vector along the summed coupling multipliers. Binary candidates are
// extracted on the way and the best one is kept.
struct CentralizedConfig {
  enum class DualMode { kExact, kSubgradient };

  double tol_inner = 1e-4;  // max multiplier change
  double tol_q0 = 0.05;
  double tol_y = 1e-3;      // infinity norm
  int max_iter_inner = 2000;
  int max_iter_q0 = 200;
  int max_iter_outer = 100;
  double tau0 = 0.5;        // step size scale
  double tau_h = 50.0;      // diminishing horizon: tau_t = tau0 / (1 + t/h)
  bool constant_step = false;
  // kExact solves the priced subproblem to optimality in one flow solve and
  // reads the multipliers off the optimal potentials; kSubgradient runs the
  // multiplier iteration itself.
  DualMode dual_mode = DualMode::kExact;
  double y_init = 1.0;
  std::optional<double> q0_init;  // default: half the feasible MBS load
};

struct DualState {
  std::vector<std::vector<double>> lambda;  // [K][J], multipliers of x <= y
  double mu = 0.0;                          // multiplier of the load equality
  double q0 = 0.0;
  std::vector<double> y_relaxed;            // [J] in [0,1]
  double tau = 0.0;                         // last step size used
  long inner_iterations = 0;
  long q0_iterations = 0;
  int outer_iterations = 0;
  bool inner_converged = true;
  bool q0_converged = true;
  bool outer_converged = false;

  static DualState init(const Instance& inst, const CentralizedConfig& cfg) {
    DualState st;
    st.lambda.assign(inst.num_users, std::vector<double>(inst.num_sbs, 0.0));
    st.y_relaxed.assign(inst.num_sbs, std::clamp(cfg.y_init, 0.0, 1.0));
    st.q0 = cfg.q0_init.value_or(inst.max_mbs_load() / 2.0);
    st.tau = cfg.tau0;
    return st;
  }
};

struct SolverReport {
  Assignment assignment;
  ObjectiveValue objective;
  int outer_iterations = 0;
  long q0_iterations = 0;
  long inner_iterations = 0;
  bool converged = true;
  struct TraceRow {
    int outer_iter = 0;
    double q0 = 0.0;
    double mu = 0.0;
    std::vector<double> y;
    double best_ee = 0.0;
  };
  std::vector<TraceRow> trace;
};

struct InnerResult {
  std::vector<std::vector<double>> x;  // [K][J+1]; fractional only off-grid
  double value = 0.0;                  // priced subproblem optimum
  bool converged = true;
  int iterations = 0;
};

inline double diminishing_tau(const CentralizedConfig& cfg, long t) {
  return cfg.constant_step ? cfg.tau0 : cfg.tau0 / (1.0 + t / cfg.tau_h);
}

// One multiplier iteration: project onto the nonnegative orthant for the
// coupling constraint, plain step for the equality.
inline double lambda_step(double lambda, double tau, double x, double y) {
  return std::max(0.0, lambda + tau * (x - y));
}
inline double mu_step(double mu, double tau, double q0, double mbs_mass) {
  return mu + tau * (mbs_mass - q0);
}

namespace detail {

inline double pilot_factor(const Instance& inst, double q0) {
  return std::max(0.0, 1.0 - q0 * inst.pilot_overhead);
}

// Exact solve of the load-constrained association problem for relaxed y:
// per-pair bounds x_kj <= y_j and the exact column-0 mass q0. Multipliers
// are recovered from the optimal flow potentials.
inline FlowResult solve_p4_exact(const Instance& inst, const std::vector<double>& y_relaxed,
                                 double q0) {
  const int K = inst.num_users, J = inst.num_sbs;
  FlowProblem p;
  p.num_users = K;
  p.num_cols = J + 1;
  p.weights.assign(K, std::vector<double>(J + 1, 0.0));
  p.upper.assign(K, std::vector<double>(J + 1, 1.0));
  const double factor = pilot_factor(inst, q0);
  for (int k = 0; k < K; ++k) {
    p.weights[k][0] = factor * inst.rate_mbs[k];
    for (int j = 1; j <= J; ++j) {
      p.weights[k][j] = inst.rate_sbs[k][j - 1];
      p.upper[k][j] = std::clamp(y_relaxed[j - 1], 0.0, 1.0);
    }
  }
  p.col_capacity.assign(inst.capacities.begin(), inst.capacities.end());
  p.exact_col0_load = q0;
  return solve_flow_problem(p);
}

// The priced association subproblem: coupling and load constraints moved to
// the objective via (lambda, mu), leaving a plain capacity LP.
inline AssignmentSolution solve_p5(const Instance& inst, const DualState& st, double q0) {
  const int K = inst.num_users, J = inst.num_sbs;
  AssignmentLP lp;
  lp.weights.assign(K, std::vector<double>(J + 1, 0.0));
  const double factor = pilot_factor(inst, q0);
  for (int k = 0; k < K; ++k) {
    lp.weights[k][0] = factor * inst.rate_mbs[k] - st.mu;
    for (int j = 1; j <= J; ++j)
      lp.weights[k][j] = inst.rate_sbs[k][j - 1] - st.lambda[k][j - 1];
  }
  lp.col_capacity.assign(inst.capacities.begin(), inst.capacities.end());
  return solve_assignment_lp(lp);
}

}  // namespace detail

// Dual value g(lambda, mu) at the current multipliers: the priced subproblem
// optimum plus the constant terms. Used by tests to certify strong duality.
inline double dual_function_value(const Instance& inst, const DualState& st, double q0) {
  const auto sol = detail::solve_p5(inst, st, q0);
  double value = sol.objective + st.mu * q0;
  for (int k = 0; k < inst.num_users; ++k)
    for (int j = 1; j <= inst.num_sbs; ++j)
      value += st.lambda[k][j - 1] * st.y_relaxed[j - 1];
  return value;
}

// Inner level: finds multipliers (lambda, mu) for the load-constrained
// association problem at (y_relaxed, q0), plus a primal iterate.
//
// kSubgradient iterates the multiplier update until the change falls under
// tol_inner; kExact performs one exact solve and reads the converged
// multipliers directly (its fixed point).
inline InnerResult inner_dual_loop(const Instance& inst, const std::vector<double>& y_relaxed,
                                   double q0, DualState& st, const CentralizedConfig& cfg) {
  const int K = inst.num_users, J = inst.num_sbs;
  InnerResult res;

  if (cfg.dual_mode == CentralizedConfig::DualMode::kExact) {
    FlowResult p4 = detail::solve_p4_exact(inst, y_relaxed, q0);
    for (int k = 0; k < K; ++k)
      for (int j = 1; j <= J; ++j) st.lambda[k][j - 1] = p4.duals.lambda[k][j];
    st.mu = p4.duals.mu;
    res.x = std::move(p4.x);
    res.value = p4.objective;
    res.iterations = 1;
    st.inner_iterations += 1;
    return res;
  }

  bool converged = false;
  int t = 0;
  AssignmentSolution sol;
  for (; t < cfg.max_iter_inner; ++t) {
    sol = detail::solve_p5(inst, st, q0);
    const double tau = diminishing_tau(cfg, t);
    st.tau = tau;
    double change = 0.0;
    for (int k = 0; k < K; ++k)
      for (int j = 1; j <= J; ++j) {
        const double next =
            lambda_step(st.lambda[k][j - 1], tau, sol.x[k][j], y_relaxed[j - 1]);
        change = std::max(change, std::abs(next - st.lambda[k][j - 1]));
        st.lambda[k][j - 1] = next;
      }
    double mass = 0.0;
    for (int k = 0; k < K; ++k) mass += sol.x[k][0];
    const double next_mu = mu_step(st.mu, tau, q0, mass);
    change = std::max(change, std::abs(next_mu - st.mu));
    st.mu = next_mu;
    if (change < cfg.tol_inner) {
      converged = true;
      ++t;
      break;
    }
  }
  res.converged = converged;
  res.iterations = t;
  st.inner_iterations += t;
  if (!converged) st.inner_converged = false;
  res.x.assign(K, std::vector<double>(J + 1, 0.0));
  for (int k = 0; k < K; ++k)
    for (int j = 0; j <= J; ++j) res.x[k][j] = sol.x[k][j];
  res.value = sol.objective;
  return res;
}

// Middle level: projected ascent of the MBS load along the equality
// multiplier, q0 <- clamp(q0 + tau * mu).
inline double q0_loop(const Instance& inst, const std::vector<double>& y_relaxed,
                      DualState& st, const CentralizedConfig& cfg,
                      const std::function<void(const InnerResult&, double)>& on_iterate = {}) {
  const double hi = static_cast<double>(inst.max_mbs_load());
  bool converged = false;
  for (int t = 0; t < cfg.max_iter_q0; ++t) {
    const InnerResult inner = inner_dual_loop(inst, y_relaxed, st.q0, st, cfg);
    if (on_iterate) on_iterate(inner, st.q0);
    const double tau = diminishing_tau(cfg, t);
    const double next = std::clamp(st.q0 + tau * st.mu, 0.0, hi);
    ++st.q0_iterations;
    if (std::abs(next - st.q0) < cfg.tol_q0) {
      st.q0 = next;
      converged = true;
      break;
    }
    st.q0 = next;
  }
  if (!converged) st.q0_converged = false;
  return st.q0;
}

namespace detail {

// Binary ON/OFF extraction: an SBS is ON exactly when some user is fully
// assigned to it.
inline std::vector<std::uint8_t> extract_y(const std::vector<std::vector<double>>& x,
                                           int num_sbs) {
  std::vector<std::uint8_t> y(num_sbs, 0);
  for (const auto& row : x)
    for (int j = 1; j <= num_sbs; ++j)
      if (row[j] >= 1.0 - 1e-9) y[j - 1] = 1;
  return y;
}

class CandidateTracker {
 public:
  explicit CandidateTracker(const Instance& inst) : inst_(inst) {}

  // Evaluates the binary candidate (memoized by pattern) and keeps the best.
  void consider(const std::vector<std::uint8_t>& y) {
    auto it = seen_.find(y);
    double ee;
    if (it != seen_.end()) {
      ee = it->second;
    } else {
      const Assignment a = solve_p3(inst_, y);
      ee = eval_objective(inst_, a).ee;
      seen_.emplace(y, ee);
    }
    if (!best_ || ee > best_ee_ + 1e-15) {
      best_ = y;
      best_ee_ = ee;
    }
  }

  bool empty() const { return !best_.has_value(); }
  const std::vector<std::uint8_t>& best_y() const { return *best_; }
  double best_ee() const { return best_ee_; }

 private:
  const Instance& inst_;
  std::map<std::vector<std::uint8_t>, double> seen_;
  std::optional<std::vector<std::uint8_t>> best_;
  double best_ee_ = -1.0;
};

}  // namespace detail

// Outer level: projected ascent of the relaxed ON/OFF vector along
// nu_j = sum_k lambda_kj, with binary extraction and best-candidate tracking.
inline SolverReport outer_y_loop(const Instance& inst,
                                 const CentralizedConfig& cfg = {}) {
  const int K = inst.num_users, J = inst.num_sbs;
  DualState st = DualState::init(inst, cfg);
  detail::CandidateTracker cands(inst);
  SolverReport rep;

  // Degenerate but legal corner: no SBS at all.
  cands.consider(std::vector<std::uint8_t>(J, 0));
  if (J > 0) cands.consider(std::vector<std::uint8_t>(J, 1));

  bool converged = J == 0;
  int t = 0;
  for (; t < cfg.max_iter_outer && !converged; ++t) {
    auto harvest = [&](const InnerResult& inner, double) {
      cands.consider(detail::extract_y(inner.x, J));
    };
    q0_loop(inst, st.y_relaxed, st, cfg, harvest);

    // Probe the integer neighbours of the converged load.
    for (const double q : {std::floor(st.q0), std::ceil(st.q0)}) {
      if (q < 0 || q > inst.max_mbs_load()) continue;
      const FlowResult p4 = detail::solve_p4_exact(inst, st.y_relaxed, q);
      cands.consider(detail::extract_y(p4.x, J));
    }

    std::vector<double> nu(J, 0.0);
    for (int k = 0; k < K; ++k)
      for (int j = 0; j < J; ++j) nu[j] += st.lambda[k][j];
    const double tau = diminishing_tau(cfg, t);
    double delta = 0.0;
    for (int j = 0; j < J; ++j) {
      const double next = std::clamp(st.y_relaxed[j] + tau * nu[j], 0.0, 1.0);
      delta = std::max(delta, std::abs(next - st.y_relaxed[j]));
      st.y_relaxed[j] = next;
    }
    converged = delta < cfg.tol_y;

    SolverReport::TraceRow row;
    row.outer_iter = t;
    row.q0 = st.q0;
    row.mu = st.mu;
    row.y = st.y_relaxed;
    row.best_ee = cands.best_ee();
    rep.trace.push_back(std::move(row));
  }
  st.outer_iterations = t;
  st.outer_converged = converged;

  if (J == 0) {
    // Still optimize the MBS load.
    q0_loop(inst, st.y_relaxed, st, cfg);
    cands.consider({});
  }

  rep.assignment = solve_p3(inst, cands.best_y());
  rep.objective = eval_objective(inst, rep.assignment);
  rep.outer_iterations = st.outer_iterations;
  rep.q0_iterations = st.q0_iterations;
  rep.inner_iterations = st.inner_iterations;
  rep.converged = st.outer_converged && st.q0_converged && st.inner_converged;
  return rep;
}

// Ground-truth mode: enumerate every ON/OFF vector and associate optimally.
// Exponential in the SBS count, hence the guard.
inline SolverReport solve_exact_small(const Instance& inst) {
  const int J = inst.num_sbs;
  if (J > 14)
    throw std::invalid_argument("solve_exact_small: too many SBSs for enumeration");
  SolverReport rep;
  double best = -1.0;
  std::vector<std::uint8_t> best_y(J, 0);
  for (std::uint32_t mask = 0; mask < (1u << J); ++mask) {
    std::vector<std::uint8_t> y(J);
    for (int j = 0; j < J; ++j) y[j] = (mask >> j) & 1;
    const Assignment a = solve_p3(inst, y);
    const double ee = eval_objective(inst, a).ee;
    if (ee > best + 1e-15) {
      best = ee;
      best_y = y;
    }
  }
  rep.assignment = solve_p3(inst, best_y);
  rep.objective = eval_objective(inst, rep.assignment);
  rep.outer_iterations = 1 << J;
  rep.converged = true;
  return rep;
}

}  // namespace hetee
