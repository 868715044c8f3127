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

// Command-line front end: evaluate, solve, check-ssp, verify-theorem and
// reproduce. Exit codes: 0 pass, 1 failed check, 2 bad input, 3 budget.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rmdp/commands.hpp"
#include "rmdp/error.hpp"

namespace {

struct Args {
  std::string instance;
  std::string policy_path;
  std::string policy_inline;
  std::string mode;
  std::string method = "dp";
  std::string theorem;
  std::vector<std::string> names;
  bool all = false;
  bool json = false;
  std::string out;
  std::size_t kernel = 0;
  std::size_t grid = 0;
  std::size_t policy_grid = 0;
  rmdp::CommandOptions options;
};

std::optional<rmdp::Policy> read_policy(const Args& a) {
  if (!a.policy_path.empty() && !a.policy_inline.empty()) {
    throw rmdp::InvalidInput("give --policy or --policy-inline, not both");
  }
  if (!a.policy_path.empty()) return rmdp::load_policy_file(a.policy_path);
  if (!a.policy_inline.empty()) return rmdp::parse_inline_policy(a.policy_inline);
  return std::nullopt;
}

rmdp::Policy require_policy(const Args& a, const rmdp::NamedInstance& inst) {
  if (auto p = read_policy(a)) return *p;
  return rmdp::Policy::uniform(inst.mdp.num_states(), inst.mdp.num_actions());
}

template <typename T>
T parse_or_throw(std::optional<T> v, const std::string& what, const std::string& text) {
  if (!v) throw rmdp::InvalidInput("unknown " + what + ": " + text);
  return *v;
}

void add_common(CLI::App* cmd, Args& a) {
  cmd->add_flag("--json", a.json, "Print the report as JSON");
  cmd->add_option("--out", a.out, "Write the report to this file instead of stdout");
  cmd->add_option("--seed", a.options.seed, "Random seed");
  cmd->add_option("--grid", a.grid, "Kernel grid points per parameter for the oracles");
  cmd->add_option("--policy-grid", a.policy_grid, "Policy grid points per coordinate");
  cmd->add_option("--max-iter", a.options.max_iter, "Value iteration limit");
  cmd->add_option("--tol", a.options.tol, "Value iteration tolerance");
}

void add_instance(CLI::App* cmd, Args& a) {
  cmd->add_option("instance", a.instance, "Instance JSON file or built-in instance name")->required();
}

void add_policy(CLI::App* cmd, Args& a) {
  cmd->add_option("--policy", a.policy_path, "Policy JSON file");
  cmd->add_option("--policy-inline", a.policy_inline, "Policy rows like 1,0/0.5,0.5");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust MDP evaluation, solving and verification"};
  app.require_subcommand(1);
  Args a;

  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a policy");
  add_instance(evaluate, a);
  add_policy(evaluate, a);
  evaluate->add_option("--mode", a.mode, "exact, robust-s, robust-sa or oracle")->required();
  evaluate->add_option("--kernel", a.kernel, "Vertex index evaluated in exact mode");
  add_common(evaluate, a);

  auto* solve = app.add_subcommand("solve", "Compute an optimal robust policy");
  add_instance(solve, a);
  solve->add_option("--method", a.method, "dp (robust value iteration) or oracle (max-min search)");
  add_common(solve, a);

  auto* ssp = app.add_subcommand("check-ssp", "Check a simultaneous solvability property by sampling");
  add_instance(ssp, a);
  ssp->add_option("--mode", a.mode, "strong_s, strong_sa, weak_s or weak_sa")->required();
  ssp->add_option("--samples", a.options.samples, "Number of sampled objectives");
  add_common(ssp, a);

  auto* verify = app.add_subcommand("verify-theorem", "Compare fast methods against the oracles");
  add_instance(verify, a);
  add_policy(verify, a);
  verify->add_option("theorem", a.theorem, "tractability_s, tractability_sa, duality, nonstationary or dominance")
      ->required();
  verify->add_option("--horizon", a.options.horizon, "Horizon for the nonstationary check");
  add_common(verify, a);

  auto* reproduce = app.add_subcommand("reproduce", "Check the expected values of built-in instances");
  reproduce->add_option("--name", a.names, "Built-in instance name or instance file (repeatable)");
  reproduce->add_flag("--all", a.all, "Every built-in instance");
  reproduce->add_option("--samples", a.options.samples, "Samples for SSP quantities");
  add_common(reproduce, a);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (a.grid) a.options.grid = a.grid;
    if (a.policy_grid) a.options.policy_grid = a.policy_grid;
    rmdp::RunReport report;
    if (*evaluate) {
      const auto inst = rmdp::resolve_instance(a.instance);
      const auto mode = parse_or_throw(rmdp::parse_eval_mode(a.mode), "mode", a.mode);
      report = rmdp::cmd_evaluate(inst, require_policy(a, inst), mode, a.options, a.kernel);
    } else if (*solve) {
      const auto inst = rmdp::resolve_instance(a.instance);
      const auto method = parse_or_throw(rmdp::parse_solve_method(a.method), "method", a.method);
      report = rmdp::cmd_solve(inst, method, a.options);
    } else if (*ssp) {
      const auto inst = rmdp::resolve_instance(a.instance);
      const auto mode = parse_or_throw(rmdp::parse_ssp_mode(a.mode), "SSP mode", a.mode);
      report = rmdp::cmd_check_ssp(inst, mode, a.options);
    } else if (*verify) {
      const auto inst = rmdp::resolve_instance(a.instance);
      const auto theorem = parse_or_throw(rmdp::parse_theorem(a.theorem), "theorem", a.theorem);
      const auto policy = read_policy(a);
      report = rmdp::cmd_verify_theorem(inst, theorem, policy ? &*policy : nullptr, a.options);
    } else {
      if (a.all == !a.names.empty()) throw rmdp::InvalidInput("reproduce needs exactly one of --all or --name");
      report = rmdp::cmd_reproduce(a.all ? rmdp::instance_names() : a.names, a.options);
    }

    const std::string text = rmdp::format_report(report, a.json);
    if (a.out.empty()) {
      std::cout << text;
    } else {
      std::ofstream f(a.out);
      if (!f) throw rmdp::InvalidInput("cannot write " + a.out);
      f << text;
    }
    return report.exit_code();
  } catch (const rmdp::InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const rmdp::BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
