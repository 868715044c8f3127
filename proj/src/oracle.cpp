// Copyright 2026 The rmdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rmdp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rmdp/error.hpp"
#include "rmdp/robust_bellman.hpp"
#include "rmdp/ssp.hpp"

namespace rmdp {

ReturnEvaluator::ReturnEvaluator(const MdpInstance& mdp, const Policy& policy)
    : mdp_(&mdp), policy_(&policy) {
  check_shapes(mdp, policy);
  system_.resize(mdp.num_states() * mdp.num_states());
  rhs_.resize(mdp.num_states());
}

double ReturnEvaluator::operator()(const Tensor3& kernel) {
  const MdpInstance& mdp = *mdp_;
  const std::size_t S = mdp.num_states();
  const std::size_t A = mdp.num_actions();
  const double gamma = mdp.discount();
  std::fill(system_.begin(), system_.end(), 0.0);
  std::fill(rhs_.begin(), rhs_.end(), 0.0);
  for (std::size_t s = 0; s < S; ++s) {
    double* row = system_.data() + s * S;
    row[s] = 1.0;
    for (std::size_t a = 0; a < A; ++a) {
      const double pi = (*policy_)(s, a);
      if (pi == 0.0) continue;
      const auto P = kernel.row(s, a);
      const auto r = mdp.rewards().row(s, a);
      for (std::size_t t = 0; t < S; ++t) {
        const double p = pi * P[t];
        row[t] -= gamma * p;
        rhs_[s] += p * r[t];
      }
    }
  }
  // Gaussian elimination with partial pivoting; I - gamma P_pi is strictly
  // diagonally dominant by rows, so pivots stay away from zero.
  for (std::size_t k = 0; k < S; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < S; ++i) {
      if (std::abs(system_[i * S + k]) > std::abs(system_[piv * S + k])) piv = i;
    }
    if (piv != k) {
      for (std::size_t j = 0; j < S; ++j) std::swap(system_[k * S + j], system_[piv * S + j]);
      std::swap(rhs_[k], rhs_[piv]);
    }
    const double d = system_[k * S + k];
    for (std::size_t i = k + 1; i < S; ++i) {
      const double f = system_[i * S + k] / d;
      if (f == 0.0) continue;
      for (std::size_t j = k; j < S; ++j) system_[i * S + j] -= f * system_[k * S + j];
      rhs_[i] -= f * rhs_[k];
    }
  }
  for (std::size_t k = S; k-- > 0;) {
    double acc = rhs_[k];
    for (std::size_t j = k + 1; j < S; ++j) acc -= system_[k * S + j] * rhs_[j];
    rhs_[k] = acc / system_[k * S + k];
  }
  return dot(mdp.initial_dist(), rhs_);
}

namespace {

constexpr double kInvPhi = 0.6180339887498949;

std::size_t grid_size(std::size_t points, std::size_t dims, std::size_t budget, std::string_view what) {
  std::size_t total = 1;
  for (std::size_t j = 0; j < dims; ++j) {
    if (total > budget / points) {
      throw BudgetExceeded(std::string(what) + " grid exceeds the budget of " + std::to_string(budget));
    }
    total *= points;
  }
  return total;
}

// Golden-section search of g over [a, b]; returns the best point seen and
// the final bracket width.
template <class G>
std::pair<double, double> golden_section(G&& g, double a, double b, double width, double* best_val) {
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = g(c);
  double fd = g(d);
  while (b - a > width) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = g(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = g(d);
    }
  }
  const double mid = 0.5 * (a + b);
  const double fm = g(mid);
  double x = mid;
  double fx = fm;
  if (fc < fx) {
    x = c;
    fx = fc;
  }
  if (fd < fx) {
    x = d;
    fx = fd;
  }
  *best_val = fx;
  return {x, b - a};
}

}  // namespace

OracleReport minimize_over_params(const ParamSet& params,
                                  const std::function<double(const Tensor3&)>& f,
                                  const OracleOptions& options) {
  OracleReport report;
  Tensor3 kernel(params.num_states(), params.num_actions(), params.num_states());
  if (params.kind() == ParamSet::Kind::kFinite) {
    const auto& kernels = params.finite_kernels();
    if (kernels.size() > options.grid_budget) throw BudgetExceeded("finite set exceeds the grid budget");
    report.value = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < kernels.size(); ++k) {
      const double val = f(kernels[k].probs());
      if (val < report.value) {
        report.value = val;
        report.argmin_vertex = k;
      }
    }
    report.argmin_params = {static_cast<double>(*report.argmin_vertex)};
    report.evaluations = kernels.size();
    return report;
  }

  const auto& ps = params.parameters();
  const std::size_t d = ps.size();
  const std::size_t n = params.grid_resolution();
  const std::size_t total = grid_size(n, d, options.grid_budget, "parameter");
  auto eval = [&](std::span<const double> x) {
    ++report.evaluations;
    params.fill_kernel(x, kernel);
    return f(kernel);
  };

  std::vector<std::size_t> idx(d, 0);
  std::vector<double> x(d);
  auto coord = [&](std::size_t j, std::size_t i) {
    return ps[j].low + (ps[j].high - ps[j].low) * static_cast<double>(i) / static_cast<double>(n - 1);
  };
  std::vector<double> best_x(d);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < total; ++g) {
    for (std::size_t j = 0; j < d; ++j) x[j] = coord(j, idx[j]);
    const double val = eval(x);
    if (val < best) {
      best = val;
      best_x = x;
    }
    for (std::size_t j = d; j-- > 0;) {
      if (++idx[j] < n) break;
      idx[j] = 0;
    }
  }

  double width = 0.0;
  for (std::size_t pass = 0; pass < options.max_passes && d > 0; ++pass) {
    bool improved = false;
    width = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double h = (ps[j].high - ps[j].low) / static_cast<double>(n - 1);
      const double a = std::max(ps[j].low, best_x[j] - h);
      const double b = std::min(ps[j].high, best_x[j] + h);
      if (!(b > a)) continue;
      std::vector<double> trial = best_x;
      auto line = [&](double t) {
        trial[j] = t;
        return eval(trial);
      };
      double val = 0.0;
      const auto [t, w] = golden_section(line, a, b, options.refine_width, &val);
      width = std::max(width, w);
      if (val < best) {
        improved = improved || best - val > 1e-14 * (1.0 + std::abs(best));
        best = val;
        best_x[j] = t;
      }
    }
    if (!improved) break;
  }
  report.value = best;
  report.argmin_params = std::move(best_x);
  report.refinement_width = width;
  return report;
}

OracleReport worst_case_oracle(const MdpInstance& mdp, const ParamSet& params,
                               const Policy& policy, const OracleOptions& options) {
  if (params.num_states() != mdp.num_states() || params.num_actions() != mdp.num_actions()) {
    throw InvalidInput("parameter set shape does not match the MDP");
  }
  ReturnEvaluator eval(mdp, policy);
  return minimize_over_params(params, [&](const Tensor3& P) { return eval(P); }, options);
}

std::vector<std::size_t> action_relevant_states(const MdpInstance& mdp, const ParamSet& params) {
  const std::size_t S = mdp.num_states();
  const std::size_t A = mdp.num_actions();
  std::vector<std::size_t> out;
  if (A == 1) return out;
  const auto probes = params.probe_kernels();
  for (std::size_t s = 0; s < S; ++s) {
    bool relevant = false;
    for (std::size_t a = 1; a < A && !relevant; ++a) {
      relevant = sup_norm_diff(mdp.rewards().row(s, a), mdp.rewards().row(s, 0)) > kStochasticTol;
      for (const auto& P : probes) {
        if (relevant) break;
        relevant = sup_norm_diff(P.row(s, a), P.row(s, 0)) > kStochasticTol;
      }
    }
    if (relevant) out.push_back(s);
  }
  return out;
}

namespace {

// Compositions of k into A parts with the first part varying slowest,
// ascending.
void compositions(std::size_t k, std::size_t A, std::vector<std::size_t>& prefix,
                  std::vector<std::vector<std::size_t>>& out) {
  if (prefix.size() + 1 == A) {
    prefix.push_back(k);
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (std::size_t c = 0; c <= k; ++c) {
    prefix.push_back(c);
    compositions(k - c, A, prefix, out);
    prefix.pop_back();
  }
}

// Irrelevant states play the first action.
Matrix base_policy(std::size_t S, std::size_t A) {
  Matrix pi(S, A);
  for (std::size_t s = 0; s < S; ++s) pi(s, 0) = 1.0;
  return pi;
}

struct Move {
  std::size_t state;
  std::size_t to;
  std::size_t from;
};

}  // namespace

std::size_t default_policy_grid(std::size_t coordinates) {
  if (coordinates <= 1) return 101;
  if (coordinates == 2) return 21;
  if (coordinates <= 4) return 9;
  return 3;
}

OracleReport max_min_oracle(const MdpInstance& mdp, const ParamSet& params,
                            std::size_t policy_grid_resolution, const OracleOptions& options) {
  if (policy_grid_resolution < 2) throw InvalidInput("policy grid needs at least 2 points");
  const std::size_t S = mdp.num_states();
  const std::size_t A = mdp.num_actions();
  const auto states = action_relevant_states(mdp, params);
  const std::size_t n = states.size();
  const std::size_t k = policy_grid_resolution - 1;

  // Each relevant state ranges over the simplex lattice with spacing 1/k.
  std::vector<std::vector<std::size_t>> lattice;
  {
    std::vector<std::size_t> prefix;
    compositions(k, A, prefix, lattice);
  }
  const std::size_t total = grid_size(lattice.size(), n, options.policy_budget, "policy");

  std::size_t evaluations = 0;
  auto inner = [&](Matrix pi_probs) {
    Policy pi(std::move(pi_probs));
    OracleReport r = worst_case_oracle(mdp, params, pi, options);
    evaluations += r.evaluations;
    r.policy = std::move(pi);
    return r;
  };

  std::vector<std::size_t> idx(n, 0);
  OracleReport best;
  best.value = -std::numeric_limits<double>::infinity();
  Matrix best_pi = base_policy(S, A);
  for (std::size_t g = 0; g < total; ++g) {
    Matrix pi = base_policy(S, A);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t a = 0; a < A; ++a) {
        pi(states[j], a) = static_cast<double>(lattice[idx[j]][a]) / static_cast<double>(k);
      }
    }
    OracleReport r = inner(pi);
    if (r.value > best.value) {
      best = std::move(r);
      best_pi = std::move(pi);
    }
    for (std::size_t j = n; j-- > 0;) {
      if (++idx[j] < lattice.size()) break;
      idx[j] = 0;
    }
  }

  // Pattern search over mass transfers between two actions of one state.
  // When affordable, every combination of at most one transfer per state is
  // tried, which follows ridges that single transfers cannot.
  std::vector<Move> single;
  for (std::size_t s : states) {
    for (std::size_t to = 0; to < A; ++to) {
      for (std::size_t from = 0; from < A; ++from) {
        if (to != from) single.push_back({s, to, from});
      }
    }
  }
  std::vector<std::vector<Move>> patterns;
  const std::size_t per_state = A * (A - 1) + 1;
  std::size_t combos = 1;
  for (std::size_t j = 0; j < n && combos <= 729; ++j) combos *= per_state;
  if (n > 0 && combos <= 729) {
    for (std::size_t code = 1; code < combos; ++code) {
      std::vector<Move> pattern;
      std::size_t c = code;
      for (std::size_t j = 0; j < n; ++j, c /= per_state) {
        const std::size_t m = c % per_state;
        if (m > 0) pattern.push_back(single[j * (per_state - 1) + m - 1]);
      }
      patterns.push_back(std::move(pattern));
    }
  } else {
    for (const auto& m : single) patterns.push_back({m});
  }

  double step = n > 0 ? 1.0 / static_cast<double>(k) : 0.0;
  while (n > 0 && step >= options.refine_width) {
    bool moved = false;
    for (const auto& pattern : patterns) {
      Matrix trial = best_pi;
      bool feasible = true;
      for (const auto& m : pattern) {
        if (trial(m.state, m.from) < step * (1.0 - 1e-12)) {
          feasible = false;
          break;
        }
        trial(m.state, m.from) = std::max(0.0, trial(m.state, m.from) - step);
        trial(m.state, m.to) += step;
      }
      if (!feasible) continue;
      OracleReport r = inner(trial);
      if (r.value > best.value + 1e-13 * (1.0 + std::abs(best.value))) {
        best = std::move(r);
        best_pi = std::move(trial);
        moved = true;
        break;
      }
    }
    if (!moved) step *= 0.5;
  }
  best.refinement_width = std::max(best.refinement_width, step);
  best.evaluations = evaluations;
  return best;
}

OracleReport verify_tractability(const MdpInstance& mdp, const UncertaintySet& set,
                                 const ParamSet& params, const Policy& policy,
                                 TractabilityMode mode, const OracleOptions& options) {
  const auto op = mode == TractabilityMode::kS ? RobustOperator::kPolicyS : RobustOperator::kPolicySa;
  const auto fp = fixed_point(op, mdp, set, &policy);
  const double fast = weighted_value(mdp.initial_dist(), fp.value.values);
  OracleReport report = worst_case_oracle(mdp, params, policy, options);
  const double diff = report.value - fast;
  report.comparisons.push_back({mode == TractabilityMode::kS ? "robust_s_vs_oracle" : "robust_sa_vs_oracle",
                                fast, report.value, diff, kOracleTol, std::abs(diff) <= kOracleTol});

  // Feasibility: some kernel of the set must have the fixed point as its
  // value. The candidate is a common minimizer of the one-step objective.
  const std::size_t S = mdp.num_states();
  const std::size_t A = mdp.num_actions();
  const double gamma = mdp.discount();
  Tensor3 V(S, A, S);
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t a = 0; a < A; ++a) {
      const double w = mode == TractabilityMode::kS ? policy(s, a) : 1.0;
      for (std::size_t t = 0; t < S; ++t) V(s, a, t) = w * (mdp.reward(s, a, t) + gamma * fp.value[t]);
    }
  }
  const SspChecker checker(set);
  const auto verdict = checker.check(mode == TractabilityMode::kS ? SspMode::kStrongS : SspMode::kStrongSa, V);
  double distance = std::numeric_limits<double>::infinity();
  if (verdict.holds) {
    distance = sup_norm_diff(evaluate_exact(mdp, policy, *verdict.certificate).values, fp.value.values);
  } else if (checker.enumerated()) {
    for (const auto& P : checker.vertices()) {
      distance = std::min(distance, sup_norm_diff(evaluate_exact(mdp, policy, P).values, fp.value.values));
    }
  }
  report.comparisons.push_back({"fixed_point_feasible", 0.0, distance, distance, 1e-6, distance <= 1e-6});
  return report;
}

DualityReport duality_gap(const MdpInstance& mdp, const ParamSet& params,
                          std::size_t policy_grid_resolution, const OracleOptions& options) {
  DualityReport out;
  out.maxmin = max_min_oracle(mdp, params, policy_grid_resolution, options);
  const OracleReport minmax = minimize_over_params(
      params,
      [&](const Tensor3& P) {
        const MdpSolution sol = solve_mdp_exact(mdp, TransitionKernel(P));
        return weighted_value(mdp.initial_dist(), sol.value.values);
      },
      options);
  out.minmax = minmax.value;
  out.minmax_params = minmax.argmin_params;
  out.gap = out.minmax - out.maxmin.value;
  return out;
}

ValueVector nonstationary_adversary_dp(const MdpInstance& mdp, const UncertaintySet& set,
                                       const Policy& policy, std::size_t horizon) {
  if (horizon == 0) throw InvalidInput("horizon must be at least 1");
  std::vector<double> v(mdp.num_states(), 0.0);
  for (std::size_t t = 0; t < horizon; ++t) v = apply_T_pi(mdp, set, policy, v);
  ValueVector out;
  out.values = std::move(v);
  out.kind = ValueKind::kFiniteHorizon;
  return out;
}

DominanceReport policy_dominance_check(const MdpInstance& mdp, const ParamSet& params,
                                       const std::vector<std::vector<double>>& initial_dists,
                                       std::size_t policy_grid_resolution, const Policy* candidate,
                                       const OracleOptions& options) {
  const std::size_t n = initial_dists.size();
  if (n == 0) throw InvalidInput("dominance check needs at least one initial distribution");
  DominanceReport report;
  report.initial_dists = initial_dists;
  std::vector<MdpInstance> starts;
  for (const auto& mu : initial_dists) starts.push_back(mdp.with_initial_dist(mu));
  for (const auto& m : starts) report.optimal.push_back(max_min_oracle(m, params, policy_grid_resolution, options));

  report.cross = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      report.cross(i, j) = i == j ? report.optimal[i].value
                                  : worst_case_oracle(starts[j], params, *report.optimal[i].policy, options).value;
    }
  }
  auto optimal_everywhere = [&](auto value_at) {
    for (std::size_t j = 0; j < n; ++j) {
      if (value_at(j) < report.optimal[j].value - kOracleTol) return false;
    }
    return true;
  };
  if (candidate != nullptr) {
    for (const auto& m : starts) report.candidate_values.push_back(worst_case_oracle(m, params, *candidate, options).value);
    report.common_optimal = optimal_everywhere([&](std::size_t j) { return report.candidate_values[j]; });
  }
  for (std::size_t i = 0; i < n && !report.common_optimal; ++i) {
    report.common_optimal = optimal_everywhere([&](std::size_t j) { return report.cross(i, j); });
  }
  return report;
}

}  // namespace rmdp
