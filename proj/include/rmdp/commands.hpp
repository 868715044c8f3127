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

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rmdp/instances.hpp"
#include "rmdp/json_io.hpp"
#include "rmdp/oracle.hpp"
#include "rmdp/ssp.hpp"

namespace rmdp {

struct ResultRow {
  std::string quantity;
  double value = 0.0;
  /// expected, tolerance and pass are present together or not at all.
  std::optional<double> expected;
  std::optional<double> tolerance;
  std::optional<bool> pass;
  Json detail;
};

struct RunReport {
  std::string command;
  Json inputs;
  std::vector<ResultRow> results;
  Json extra;
  double wall_time = 0.0;

  bool all_pass() const;
  /// 0 when every checked row passes, 1 otherwise.
  int exit_code() const { return all_pass() ? 0 : 1; }
};

struct CommandOptions {
  double tol = 1e-8;
  std::size_t max_iter = 1'000'000;
  std::uint64_t seed = 0;
  std::size_t samples = 1000;
  /// Kernel grid points per parameter for the oracles.
  std::optional<std::size_t> grid;
  /// Policy grid points per coordinate; default_policy_grid when absent.
  std::optional<std::size_t> policy_grid;
  std::size_t horizon = 20;
};

/// A path to an instance file, or the name of a built-in instance.
NamedInstance resolve_instance(const std::string& ref);

/// Memoizes max-min searches across quantities of one instance, keyed by
/// the start state (-1 for the instance's own distribution).
struct QuantityCache {
  std::map<long, OracleReport> maxmin;
};

/// Evaluates one quantity string:
///   maxmin, maxmin.policy[s,a], maxmin.param[name], robust_opt, det_gap,
///   worst_case[pi], robust_s[pi], robust_sa[pi], ssp.<mode>,
///   is_s_rectangular, is_sa_rectangular
/// where pi is an inline policy and any quantity may end in @mu=<state> to
/// start from that state instead of the instance's distribution.
double evaluate_quantity(const NamedInstance& instance, const std::string& quantity,
                         const CommandOptions& options, QuantityCache& cache);

enum class EvalMode { kExact, kRobustS, kRobustSa, kOracle };
std::optional<EvalMode> parse_eval_mode(std::string_view name);

enum class SolveMethod { kDp, kOracle };
std::optional<SolveMethod> parse_solve_method(std::string_view name);

enum class Theorem { kTractabilityS, kTractabilitySa, kDuality, kNonstationary, kDominance };
std::optional<Theorem> parse_theorem(std::string_view name);

/// `kernel_index` picks the vertex evaluated in exact mode.
RunReport cmd_evaluate(const NamedInstance& instance, const Policy& policy, EvalMode mode,
                       const CommandOptions& options, std::size_t kernel_index = 0);
RunReport cmd_solve(const NamedInstance& instance, SolveMethod method, const CommandOptions& options);
RunReport cmd_check_ssp(const NamedInstance& instance, SspMode mode, const CommandOptions& options);
/// `policy` defaults to the uniform policy where one is needed.
RunReport cmd_verify_theorem(const NamedInstance& instance, Theorem theorem, const Policy* policy,
                             const CommandOptions& options);
/// Checks every expected value of the named instances (built-in names or
/// instance files).
RunReport cmd_reproduce(const std::vector<std::string>& names, const CommandOptions& options);

Json report_to_json(const RunReport& report);
/// JSON or a plain table; numbers carry 12 significant digits.
std::string format_report(const RunReport& report, bool json);

}  // namespace rmdp
