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

#include "rmdp/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <sstream>

#include "rmdp/error.hpp"
#include "rmdp/robust_bellman.hpp"

namespace rmdp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double round12(double x) {
  if (!std::isfinite(x)) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

std::string fmt12(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

// Rounds every floating number in a JSON tree to 12 significant digits.
Json rounded(const Json& j) {
  if (j.is_number_float()) return round12(j.get<double>());
  if (j.is_array()) {
    Json out = Json::array();
    for (const auto& x : j) out.push_back(rounded(x));
    return out;
  }
  if (j.is_object()) {
    Json out = Json::object();
    for (const auto& [k, v] : j.items()) out[k] = rounded(v);
    return out;
  }
  return j;
}

Json matrix_json(const Matrix& m) {
  Json out = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) out.push_back(std::vector<double>(m.row(i).begin(), m.row(i).end()));
  return out;
}

Json tensor_json(const Tensor3& t) {
  Json out = Json::array();
  for (std::size_t i = 0; i < t.dim0(); ++i) {
    Json slab = Json::array();
    for (std::size_t j = 0; j < t.dim1(); ++j) slab.push_back(std::vector<double>(t.row(i, j).begin(), t.row(i, j).end()));
    out.push_back(std::move(slab));
  }
  return out;
}

Json objective_json(const ObjectiveTensor& obj) {
  return std::visit(
      [](const auto& o) -> Json {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, Tensor3>) {
          return {{"V", tensor_json(o)}};
        } else if constexpr (std::is_same_v<T, ValueObjective>) {
          return {{"v", o.v}};
        } else {
          return {{"policy", matrix_json(o.policy.probs())}, {"v", o.v}};
        }
      },
      obj);
}

Json params_json(const ParamSet& params, std::span<const double> values) {
  Json out = Json::object();
  if (params.kind() == ParamSet::Kind::kFinite) return out;
  for (std::size_t k = 0; k < values.size() && k < params.num_parameters(); ++k) {
    out[params.parameters()[k].name] = values[k];
  }
  return out;
}

Json oracle_json(const ParamSet& params, const OracleReport& r) {
  Json out = {{"argmin_params", params_json(params, r.argmin_params)},
              {"refinement_width", r.refinement_width},
              {"evaluations", r.evaluations}};
  if (r.argmin_vertex) out["argmin_vertex"] = *r.argmin_vertex;
  if (r.policy) out["policy"] = matrix_json(r.policy->probs());
  return out;
}

ResultRow checked(std::string quantity, double value, double expected, double tolerance, Json detail = {}) {
  ResultRow row{std::move(quantity), value, expected, tolerance, std::abs(value - expected) <= tolerance,
                std::move(detail)};
  return row;
}

ResultRow observed(std::string quantity, double value, Json detail = {}) {
  ResultRow row;
  row.quantity = std::move(quantity);
  row.value = value;
  row.detail = std::move(detail);
  return row;
}

FixedPointOptions fp_options(const CommandOptions& o) { return {o.tol, o.max_iter}; }

OracleOptions oracle_options(const CommandOptions&) { return {}; }

ParamSet oracle_params(const NamedInstance& inst, const CommandOptions& o) {
  ParamSet p = inst.oracle_params();
  if (o.grid) p.set_grid_resolution(*o.grid);
  return p;
}

std::size_t policy_grid(const MdpInstance& mdp, const ParamSet& params, const CommandOptions& o) {
  if (o.policy_grid) return *o.policy_grid;
  return default_policy_grid(action_relevant_states(mdp, params).size() * (mdp.num_actions() - 1));
}

MdpInstance start_at(const MdpInstance& mdp, long state) {
  if (state < 0) return mdp;
  if (static_cast<std::size_t>(state) >= mdp.num_states()) {
    throw InvalidInput("start state " + std::to_string(state) + " out of range");
  }
  std::vector<double> mu(mdp.num_states(), 0.0);
  mu[static_cast<std::size_t>(state)] = 1.0;
  return mdp.with_initial_dist(std::move(mu));
}

void check_policy(const MdpInstance& mdp, const Policy& policy) { check_shapes(mdp, policy); }

double robust_value(RobustOperator op, const MdpInstance& mdp, const UncertaintySet& set, const Policy* pi,
                    const CommandOptions& o) {
  return weighted_value(mdp.initial_dist(), fixed_point(op, mdp, set, pi, fp_options(o)).value.values);
}

// Best deterministic mu^T u^pi by enumeration of all A^S policies.
double best_deterministic(const MdpInstance& mdp, const UncertaintySet& set, const CommandOptions& o) {
  const std::size_t S = mdp.num_states();
  const std::size_t A = mdp.num_actions();
  constexpr std::size_t kCap = 100'000;
  std::size_t total = 1;
  for (std::size_t s = 0; s < S; ++s) {
    if (total > kCap / A) throw BudgetExceeded("too many deterministic policies to enumerate");
    total *= A;
  }
  std::vector<std::size_t> actions(S, 0);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < total; ++k) {
    const Policy pi = Policy::deterministic(actions, A);
    best = std::max(best, robust_value(RobustOperator::kPolicyS, mdp, set, &pi, o));
    for (std::size_t s = S; s-- > 0;) {
      if (++actions[s] < A) break;
      actions[s] = 0;
    }
  }
  return best;
}

// Splits "name[arg]" into name and arg; arg is empty without brackets.
std::pair<std::string, std::string> split_bracket(const std::string& q) {
  const auto open = q.find('[');
  if (open == std::string::npos) return {q, ""};
  if (q.back() != ']') throw InvalidInput("malformed quantity: " + q);
  return {q.substr(0, open), q.substr(open + 1, q.size() - open - 2)};
}

std::size_t parse_index(const std::string& text, const std::string& quantity) {
  std::size_t pos = 0;
  unsigned long v = 0;
  try {
    v = std::stoul(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != text.size()) throw InvalidInput("bad index in quantity: " + quantity);
  return v;
}

}  // namespace

bool RunReport::all_pass() const {
  for (const auto& r : results) {
    if (r.pass && !*r.pass) return false;
  }
  return true;
}

NamedInstance resolve_instance(const std::string& ref) {
  if (std::filesystem::is_regular_file(ref)) return load_instance_file(ref);
  for (const auto& name : instance_names()) {
    if (name == ref) return load_instance(name);
  }
  throw InvalidInput("no instance file or built-in instance named " + ref);
}

double evaluate_quantity(const NamedInstance& inst, const std::string& quantity, const CommandOptions& o,
                         QuantityCache& cache) {
  std::string q = quantity;
  long start = -1;
  if (const auto at = q.rfind("@mu="); at != std::string::npos) {
    start = static_cast<long>(parse_index(q.substr(at + 4), quantity));
    q = q.substr(0, at);
  }
  const MdpInstance mdp = start_at(inst.mdp, start);
  const auto [name, arg] = split_bracket(q);

  auto maxmin = [&]() -> const OracleReport& {
    auto it = cache.maxmin.find(start);
    if (it == cache.maxmin.end()) {
      const ParamSet params = oracle_params(inst, o);
      it = cache.maxmin.emplace(start, max_min_oracle(mdp, params, policy_grid(mdp, params, o), oracle_options(o)))
               .first;
    }
    return it->second;
  };
  auto inline_policy = [&] {
    if (arg.empty()) throw InvalidInput("quantity needs an inline policy: " + quantity);
    Policy pi = parse_inline_policy(arg);
    check_policy(mdp, pi);
    return pi;
  };

  if (name == "maxmin" && arg.empty()) return maxmin().value;
  if (name == "maxmin.policy") {
    const auto comma = arg.find(',');
    if (comma == std::string::npos) throw InvalidInput("maxmin.policy needs [s,a]: " + quantity);
    const std::size_t s = parse_index(arg.substr(0, comma), quantity);
    const std::size_t a = parse_index(arg.substr(comma + 1), quantity);
    if (s >= mdp.num_states() || a >= mdp.num_actions()) throw InvalidInput("index out of range: " + quantity);
    return (*maxmin().policy)(s, a);
  }
  if (name == "maxmin.param") {
    const ParamSet params = inst.oracle_params();
    for (std::size_t k = 0; k < params.num_parameters(); ++k) {
      if (params.parameters()[k].name == arg) return maxmin().argmin_params.at(k);
    }
    throw InvalidInput("unknown parameter in quantity: " + quantity);
  }
  if (name == "worst_case") {
    return worst_case_oracle(mdp, oracle_params(inst, o), inline_policy(), oracle_options(o)).value;
  }
  if (name == "robust_s") {
    const Policy pi = inline_policy();
    return robust_value(RobustOperator::kPolicyS, mdp, inst.set, &pi, o);
  }
  if (name == "robust_sa") {
    const Policy pi = inline_policy();
    return robust_value(RobustOperator::kPolicySa, mdp, inst.set, &pi, o);
  }
  if (name == "robust_opt" && arg.empty()) return robust_value(RobustOperator::kOptimal, mdp, inst.set, nullptr, o);
  if (name == "det_gap" && arg.empty()) {
    return robust_value(RobustOperator::kOptimal, mdp, inst.set, nullptr, o) - best_deterministic(mdp, inst.set, o);
  }
  if (name.rfind("ssp.", 0) == 0 && arg.empty()) {
    const auto mode = parse_ssp_mode(name.substr(4));
    if (!mode) throw InvalidInput("unknown SSP mode in quantity: " + quantity);
    return falsify_ssp(inst.set, *mode, o.samples, o.seed).holds ? 1.0 : 0.0;
  }
  if (name == "is_s_rectangular" && arg.empty()) return is_s_rectangular(inst.set) ? 1.0 : 0.0;
  if (name == "is_sa_rectangular" && arg.empty()) return is_sa_rectangular(inst.set) ? 1.0 : 0.0;
  throw InvalidInput("unknown quantity: " + quantity);
}

std::optional<EvalMode> parse_eval_mode(std::string_view name) {
  if (name == "exact") return EvalMode::kExact;
  if (name == "robust-s") return EvalMode::kRobustS;
  if (name == "robust-sa") return EvalMode::kRobustSa;
  if (name == "oracle") return EvalMode::kOracle;
  return std::nullopt;
}

std::optional<SolveMethod> parse_solve_method(std::string_view name) {
  if (name == "dp") return SolveMethod::kDp;
  if (name == "oracle") return SolveMethod::kOracle;
  return std::nullopt;
}

std::optional<Theorem> parse_theorem(std::string_view name) {
  if (name == "tractability_s") return Theorem::kTractabilityS;
  if (name == "tractability_sa") return Theorem::kTractabilitySa;
  if (name == "duality") return Theorem::kDuality;
  if (name == "nonstationary") return Theorem::kNonstationary;
  if (name == "dominance") return Theorem::kDominance;
  return std::nullopt;
}

RunReport cmd_evaluate(const NamedInstance& inst, const Policy& policy, EvalMode mode, const CommandOptions& o,
                       std::size_t kernel_index) {
  const auto start = Clock::now();
  check_policy(inst.mdp, policy);
  RunReport report;
  report.command = "evaluate";
  const char* mode_names[] = {"exact", "robust-s", "robust-sa", "oracle"};
  report.inputs = {{"instance", inst.name},
                   {"mode", mode_names[static_cast<int>(mode)]},
                   {"policy", matrix_json(policy.probs())},
                   {"tol", o.tol}};
  const auto mu = inst.mdp.initial_dist();
  switch (mode) {
    case EvalMode::kExact: {
      const auto vertices = enumerate_vertices(inst.set);
      if (kernel_index >= vertices.size()) throw InvalidInput("kernel index out of range");
      const ValueVector v = evaluate_exact(inst.mdp, policy, vertices[kernel_index]);
      report.inputs["kernel_index"] = kernel_index;
      report.results.push_back(observed("value", weighted_value(mu, v.values), {{"per_state", v.values}}));
      break;
    }
    case EvalMode::kRobustS:
    case EvalMode::kRobustSa: {
      const auto op = mode == EvalMode::kRobustS ? RobustOperator::kPolicyS : RobustOperator::kPolicySa;
      const FixedPointReport fp = fixed_point(op, inst.mdp, inst.set, &policy, fp_options(o));
      report.results.push_back(observed("value", weighted_value(mu, fp.value.values),
                                        {{"per_state", fp.value.values},
                                         {"iterations", fp.iterations},
                                         {"final_residual", fp.final_residual},
                                         {"tolerance_target", fp.tolerance_target}}));
      break;
    }
    case EvalMode::kOracle: {
      const ParamSet params = oracle_params(inst, o);
      const OracleReport r = worst_case_oracle(inst.mdp, params, policy, oracle_options(o));
      Json detail = oracle_json(params, r);
      const TransitionKernel worst = r.argmin_vertex ? params.finite_kernels()[*r.argmin_vertex]
                                                     : params.kernel_at(r.argmin_params);
      detail["per_state"] = evaluate_exact(inst.mdp, policy, worst).values;
      report.results.push_back(observed("value", r.value, std::move(detail)));
      break;
    }
  }
  report.wall_time = seconds_since(start);
  return report;
}

RunReport cmd_solve(const NamedInstance& inst, SolveMethod method, const CommandOptions& o) {
  const auto start = Clock::now();
  RunReport report;
  report.command = "solve";
  report.inputs = {{"instance", inst.name}, {"method", method == SolveMethod::kDp ? "dp" : "oracle"}, {"tol", o.tol}};
  if (method == SolveMethod::kDp) {
    const FixedPointReport fp = fixed_point(RobustOperator::kOptimal, inst.mdp, inst.set, nullptr, fp_options(o));
    const Policy pi = extract_greedy_policy(inst.mdp, inst.set, fp.value.values, o.tol);
    report.results.push_back(observed("value", weighted_value(inst.mdp.initial_dist(), fp.value.values),
                                      {{"per_state", fp.value.values},
                                       {"policy", matrix_json(pi.probs())},
                                       {"deterministic", pi.is_deterministic()},
                                       {"iterations", fp.iterations},
                                       {"final_residual", fp.final_residual},
                                       {"tolerance_target", fp.tolerance_target}}));
  } else {
    const ParamSet params = oracle_params(inst, o);
    const std::size_t grid = policy_grid(inst.mdp, params, o);
    report.inputs["policy_grid"] = grid;
    const OracleReport r = max_min_oracle(inst.mdp, params, grid, oracle_options(o));
    Json detail = oracle_json(params, r);
    detail["deterministic"] = r.policy->is_deterministic();
    report.results.push_back(observed("value", r.value, std::move(detail)));
  }
  report.wall_time = seconds_since(start);
  return report;
}

RunReport cmd_check_ssp(const NamedInstance& inst, SspMode mode, const CommandOptions& o) {
  const auto start = Clock::now();
  RunReport report;
  report.command = "check-ssp";
  report.inputs = {{"instance", inst.name}, {"mode", std::string(to_string(mode))}, {"samples", o.samples},
                   {"seed", o.seed}};
  const SspVerdict v = falsify_ssp(inst.set, mode, o.samples, o.seed);
  Json detail = {{"structural", v.structural}, {"samples_checked", v.samples_checked}};
  if (v.witness) detail["witness"] = objective_json(*v.witness);
  const std::string quantity = "ssp." + std::string(to_string(mode));
  ResultRow row = observed(quantity, v.holds ? 1.0 : 0.0, std::move(detail));
  for (const auto& e : inst.expected) {
    if (e.quantity == quantity) {
      row = checked(quantity, row.value, e.value, e.tolerance, std::move(row.detail));
    }
  }
  report.results.push_back(std::move(row));
  report.wall_time = seconds_since(start);
  return report;
}

RunReport cmd_verify_theorem(const NamedInstance& inst, Theorem theorem, const Policy* policy,
                             const CommandOptions& o) {
  const auto start = Clock::now();
  const Policy uniform = Policy::uniform(inst.mdp.num_states(), inst.mdp.num_actions());
  const Policy& pi = policy ? *policy : uniform;
  check_policy(inst.mdp, pi);
  const char* names[] = {"tractability_s", "tractability_sa", "duality", "nonstationary", "dominance"};
  RunReport report;
  report.command = "verify-theorem";
  report.inputs = {{"instance", inst.name}, {"theorem", names[static_cast<int>(theorem)]}};
  const ParamSet params = oracle_params(inst, o);
  switch (theorem) {
    case Theorem::kTractabilityS:
    case Theorem::kTractabilitySa: {
      report.inputs["policy"] = matrix_json(pi.probs());
      const auto mode = theorem == Theorem::kTractabilityS ? TractabilityMode::kS : TractabilityMode::kSa;
      const OracleReport r = verify_tractability(inst.mdp, inst.set, params, pi, mode, oracle_options(o));
      for (const auto& c : r.comparisons) {
        report.results.push_back(checked(c.quantity, c.fast, c.oracle, c.tolerance, {{"difference", c.difference}}));
      }
      report.extra = oracle_json(params, r);
      break;
    }
    case Theorem::kDuality: {
      const std::size_t grid = policy_grid(inst.mdp, params, o);
      report.inputs["policy_grid"] = grid;
      const DualityReport d = duality_gap(inst.mdp, params, grid, oracle_options(o));
      report.results.push_back(observed("maxmin", d.maxmin.value, oracle_json(params, d.maxmin)));
      report.results.push_back(observed("minmax", d.minmax, {{"argmin_params", params_json(params, d.minmax_params)}}));
      report.results.push_back(checked("duality_gap", d.gap, 0.0, 1e-4));
      break;
    }
    case Theorem::kNonstationary: {
      report.inputs["policy"] = matrix_json(pi.probs());
      report.inputs["horizon"] = o.horizon;
      const ValueVector finite = nonstationary_adversary_dp(inst.mdp, inst.set, pi, o.horizon);
      const FixedPointReport fp = fixed_point(RobustOperator::kPolicyS, inst.mdp, inst.set, &pi, fp_options(o));
      const double gamma = inst.mdp.discount();
      const double bound = gamma >= 1.0 ? std::numeric_limits<double>::infinity()
                                        : std::pow(gamma, static_cast<double>(o.horizon)) *
                                              inst.mdp.max_abs_reward() / (1.0 - gamma);
      // The fixed point itself is only accurate to its tolerance.
      const double slack = 2.0 * o.tol;
      report.results.push_back(checked("horizon_gap", sup_norm_diff(finite.values, fp.value.values), 0.0,
                                       bound + slack,
                                       {{"finite_horizon", finite.values}, {"stationary", fp.value.values}}));
      break;
    }
    case Theorem::kDominance: {
      std::vector<std::vector<double>> dists;
      for (std::size_t s = 0; s < inst.mdp.num_states(); ++s) {
        std::vector<double> mu(inst.mdp.num_states(), 0.0);
        mu[s] = 1.0;
        dists.push_back(std::move(mu));
      }
      const std::size_t grid = policy_grid(inst.mdp, params, o);
      report.inputs["policy_grid"] = grid;
      const DominanceReport d = policy_dominance_check(inst.mdp, params, dists, grid, policy, oracle_options(o));
      Json optimal = Json::array();
      for (const auto& r : d.optimal) optimal.push_back(oracle_json(params, r));
      report.results.push_back(observed("common_optimal", d.common_optimal ? 1.0 : 0.0,
                                        {{"cross", matrix_json(d.cross)}, {"optimal", std::move(optimal)}}));
      if (policy) report.results.back().detail["candidate_values"] = d.candidate_values;
      break;
    }
  }
  report.wall_time = seconds_since(start);
  return report;
}

RunReport cmd_reproduce(const std::vector<std::string>& names, const CommandOptions& o) {
  const auto start = Clock::now();
  RunReport report;
  report.command = "reproduce";
  report.inputs = {{"instances", names}, {"seed", o.seed}, {"samples", o.samples}};
  for (const auto& name : names) {
    const NamedInstance inst = resolve_instance(name);
    QuantityCache cache;
    for (const auto& e : inst.expected) {
      const double v = evaluate_quantity(inst, e.quantity, o, cache);
      report.results.push_back(checked(inst.name + ":" + e.quantity, v, e.value, e.tolerance,
                                       e.provenance.empty() ? Json() : Json{{"provenance", e.provenance}}));
    }
  }
  report.wall_time = seconds_since(start);
  return report;
}

Json report_to_json(const RunReport& report) {
  Json results = Json::array();
  for (const auto& r : report.results) {
    Json row = {{"quantity", r.quantity}, {"value", r.value}};
    if (r.expected) {
      row["expected"] = *r.expected;
      row["tolerance"] = *r.tolerance;
      row["pass"] = *r.pass;
    }
    if (!r.detail.is_null()) row["detail"] = r.detail;
    results.push_back(std::move(row));
  }
  Json out = {{"command", report.command},
              {"inputs", report.inputs},
              {"results", std::move(results)},
              {"wall_time", report.wall_time},
              {"pass", report.all_pass()}};
  if (!report.extra.is_null()) out["extra"] = report.extra;
  return rounded(out);
}

std::string format_report(const RunReport& report, bool json) {
  if (json) return report_to_json(report).dump(2) + "\n";
  std::size_t width = 8;
  for (const auto& r : report.results) width = std::max(width, r.quantity.size());
  std::ostringstream out;
  out << report.command << "  " << report.inputs.dump() << "\n";
  char line[512];
  std::snprintf(line, sizeof line, "%-*s  %20s  %20s  %10s  %s\n", static_cast<int>(width), "quantity", "value",
                "expected", "tolerance", "pass");
  out << line;
  for (const auto& r : report.results) {
    std::snprintf(line, sizeof line, "%-*s  %20s  %20s  %10s  %s\n", static_cast<int>(width), r.quantity.c_str(),
                  fmt12(r.value).c_str(), r.expected ? fmt12(*r.expected).c_str() : "-",
                  r.tolerance ? fmt12(*r.tolerance).c_str() : "-", r.pass ? (*r.pass ? "PASS" : "FAIL") : "-");
    out << line;
  }
  for (const auto& r : report.results) {
    if (!r.detail.is_null()) out << "  " << r.quantity << ": " << rounded(r.detail).dump() << "\n";
  }
  out << "wall time " << fmt12(report.wall_time) << " s\n";
  return out.str();
}

}  // namespace rmdp
