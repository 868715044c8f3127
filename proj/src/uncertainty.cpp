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

#include "rmdp/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rmdp/error.hpp"
#include "rmdp/lp.hpp"

namespace rmdp {

std::string_view to_string(SetVariant variant) {
  switch (variant) {
    case SetVariant::kExplicitFinite: return "explicit_finite";
    case SetVariant::kSRectangular: return "s_rectangular";
    case SetVariant::kSaRectangular: return "sa_rectangular";
    case SetVariant::kFactorModel: return "factor_model";
    case SetVariant::kPartitioned: return "partitioned";
    case SetVariant::kCoeffFactor: return "coeff_factor";
    case SetVariant::kSaCoeffFactor: return "sa_coeff_factor";
  }
  return "unknown";
}

std::optional<SetVariant> parse_set_variant(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(SetVariant::kSaCoeffFactor); ++i) {
    auto v = static_cast<SetVariant>(i);
    if (to_string(v) == name) return v;
  }
  return std::nullopt;
}

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::size_t saturating_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a) {
    return std::numeric_limits<std::size_t>::max();
  }
  return a * b;
}

void check_block(const Matrix& block, std::size_t S, std::size_t A, const std::string& what) {
  if (block.rows() != A || block.cols() != S) throw InvalidInput(what + ": block must be A x S");
  for (std::size_t a = 0; a < A; ++a) check_distribution(block.row(a), what);
}

void check_dist(const Distribution& d, std::size_t n, const std::string& what) {
  if (d.size() != n) throw InvalidInput(what + ": wrong length");
  check_distribution(d, what);
}

void check_factor_sets(const std::vector<std::vector<Distribution>>& factors, std::size_t S) {
  if (factors.empty()) throw InvalidInput("factor model needs at least one factor");
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (factors[i].empty()) throw InvalidInput("factor " + std::to_string(i) + " has no vertices");
    for (const auto& w : factors[i]) check_dist(w, S, "factor " + std::to_string(i));
  }
}

void check_coefficients(const Tensor3& u, std::size_t rows, std::size_t A, std::size_t r) {
  if (u.dim0() != rows || u.dim1() != A || u.dim2() != r) {
    throw InvalidInput("factor coefficients have the wrong shape");
  }
  for (std::size_t s = 0; s < rows; ++s) {
    for (std::size_t a = 0; a < A; ++a) check_distribution(u.row(s, a), "factor coefficients");
  }
}

std::vector<double> flatten(const Matrix& m) { return {m.flat().begin(), m.flat().end()}; }

std::vector<std::size_t> sorted_unique(std::vector<std::size_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// Calls fn(choice) for every combination of vertex indices over `comps`,
// with every other component held at vertex 0. Mixed-radix order, first
// listed component slowest.
template <class Fn>
void for_each_choice(const UncertaintySet& set, std::span<const std::size_t> comps, Fn&& fn) {
  std::vector<std::size_t> choice(set.num_components(), 0);
  for (;;) {
    fn(std::as_const(choice));
    std::size_t k = comps.size();
    while (k > 0) {
      const std::size_t c = comps[k - 1];
      if (++choice[c] < set.component_vertices(c).size()) break;
      choice[c] = 0;
      --k;
    }
    if (k == 0) return;
  }
}

std::size_t choice_count(const UncertaintySet& set, std::span<const std::size_t> comps) {
  std::size_t n = 1;
  for (std::size_t c : comps) n = saturating_mul(n, set.component_vertices(c).size());
  return n;
}

void assemble_choice(const UncertaintySet& set, std::span<const std::size_t> choice, Tensor3& out) {
  std::vector<std::span<const double>> points(set.num_components());
  for (std::size_t c = 0; c < points.size(); ++c) points[c] = set.component_vertices(c)[choice[c]];
  set.assemble(points, out);
}

void check_cap(std::size_t count, std::size_t cap, std::string_view what) {
  if (count > cap) {
    throw BudgetExceeded(std::string(what) + " needs " + std::to_string(count) +
                         " kernels, above the cap of " + std::to_string(cap));
  }
}

}  // namespace

UncertaintySet::UncertaintySet(std::size_t num_states, std::size_t num_actions, Model model)
    : num_states_(num_states), num_actions_(num_actions), model_(std::move(model)) {
  if (num_states_ == 0 || num_actions_ == 0) throw InvalidInput("empty state or action space");
  const std::size_t S = num_states_;
  const std::size_t A = num_actions_;
  std::visit(
      Overloaded{
          [&](const ExplicitFinite& m) {
            if (m.kernels.empty()) throw InvalidInput("explicit set has no kernels");
            for (const auto& k : m.kernels) {
              if (k.num_states() != S || k.num_actions() != A) {
                throw InvalidInput("explicit set kernel has the wrong shape");
              }
            }
          },
          [&](const SRectangular& m) {
            if (m.per_state.size() != S) throw InvalidInput("s-rectangular set needs one list per state");
            for (std::size_t s = 0; s < S; ++s) {
              if (m.per_state[s].empty()) throw InvalidInput("empty per-state vertex list");
              for (const auto& b : m.per_state[s]) check_block(b, S, A, "state block");
            }
          },
          [&](const SaRectangular& m) {
            if (m.per_state_action.size() != S) throw InvalidInput("sa-rectangular set needs S lists");
            for (const auto& per_a : m.per_state_action) {
              if (per_a.size() != A) throw InvalidInput("sa-rectangular set needs A lists per state");
              for (const auto& list : per_a) {
                if (list.empty()) throw InvalidInput("empty per-pair vertex list");
                for (const auto& d : list) check_dist(d, S, "pair distribution");
              }
            }
          },
          [&](const FactorModel& m) {
            check_factor_sets(m.factor_sets, S);
            check_coefficients(m.coefficients, S, A, m.factor_sets.size());
          },
          [&](const Partitioned& m) {
            std::vector<int> seen(S, 0);
            for (std::size_t s : m.s1_states) {
              if (s >= S) throw InvalidInput("partition state out of range");
              ++seen[s];
            }
            for (std::size_t s : m.s2_states) {
              if (s >= S) throw InvalidInput("partition state out of range");
              ++seen[s];
            }
            if (std::any_of(seen.begin(), seen.end(), [](int c) { return c != 1; })) {
              throw InvalidInput("partition must cover every state exactly once");
            }
            if (m.s_part.per_state.size() != m.s1_states.size()) {
              throw InvalidInput("s-part must list vertices for every state of the first group");
            }
            for (const auto& list : m.s_part.per_state) {
              if (list.empty()) throw InvalidInput("empty per-state vertex list");
              for (const auto& b : list) check_block(b, S, A, "state block");
            }
            check_factor_sets(m.factor_part.factor_sets, S);
            check_coefficients(m.factor_part.coefficients, m.s2_states.size(), A,
                               m.factor_part.factor_sets.size());
          },
          [&](const CoeffFactor& m) {
            check_factor_sets(m.factor_sets, S);
            const std::size_t r = m.factor_sets.size();
            if (m.coeff_sets.size() != S) throw InvalidInput("coefficient sets needed for every state");
            for (const auto& list : m.coeff_sets) {
              if (list.empty()) throw InvalidInput("empty coefficient vertex list");
              for (const auto& u : list) {
                if (u.rows() != A || u.cols() != r) throw InvalidInput("coefficient block must be A x r");
                for (std::size_t a = 0; a < A; ++a) check_distribution(u.row(a), "coefficients");
              }
            }
          },
          [&](const SaCoeffFactor& m) {
            check_factor_sets(m.factor_sets, S);
            const std::size_t r = m.factor_sets.size();
            if (m.coeff_sets.size() != S) throw InvalidInput("coefficient sets needed for every state");
            for (const auto& per_a : m.coeff_sets) {
              if (per_a.size() != A) throw InvalidInput("coefficient sets needed for every action");
              for (const auto& list : per_a) {
                if (list.empty()) throw InvalidInput("empty coefficient vertex list");
                for (const auto& u : list) check_dist(u, r, "coefficients");
              }
            }
          },
      },
      model_);
  build_components();
}

UncertaintySet UncertaintySet::singleton(const TransitionKernel& kernel) {
  return UncertaintySet(kernel.num_states(), kernel.num_actions(), ExplicitFinite{{kernel}});
}

void UncertaintySet::build_components() {
  const std::size_t S = num_states_;
  const std::size_t A = num_actions_;
  state_deps_.assign(S, {});
  pair_deps_.assign(S * A, {});

  auto add_factor_deps = [&](std::size_t s, const Tensor3& u, std::size_t row, std::size_t offset) {
    for (std::size_t a = 0; a < A; ++a) {
      for (std::size_t i = 0; i < u.dim2(); ++i) {
        if (u(row, a, i) > 0.0) {
          state_deps_[s].push_back(offset + i);
          pair_deps_[s * A + a].push_back(offset + i);
        }
      }
    }
  };

  std::visit(
      Overloaded{
          [&](const ExplicitFinite& m) {
            std::vector<std::vector<double>> list;
            for (const auto& k : m.kernels) list.emplace_back(k.probs().flat().begin(), k.probs().flat().end());
            components_.push_back(std::move(list));
            for (std::size_t s = 0; s < S; ++s) state_deps_[s] = {0};
            for (auto& d : pair_deps_) d = {0};
          },
          [&](const SRectangular& m) {
            for (std::size_t s = 0; s < S; ++s) {
              std::vector<std::vector<double>> list;
              for (const auto& b : m.per_state[s]) list.push_back(flatten(b));
              components_.push_back(std::move(list));
              state_deps_[s] = {s};
              for (std::size_t a = 0; a < A; ++a) pair_deps_[s * A + a] = {s};
            }
          },
          [&](const SaRectangular& m) {
            for (std::size_t s = 0; s < S; ++s) {
              for (std::size_t a = 0; a < A; ++a) {
                components_.push_back(m.per_state_action[s][a]);
                state_deps_[s].push_back(s * A + a);
                pair_deps_[s * A + a] = {s * A + a};
              }
            }
          },
          [&](const FactorModel& m) {
            for (const auto& f : m.factor_sets) components_.push_back(f);
            for (std::size_t s = 0; s < S; ++s) add_factor_deps(s, m.coefficients, s, 0);
          },
          [&](const Partitioned& m) {
            const std::size_t n1 = m.s1_states.size();
            for (std::size_t k = 0; k < n1; ++k) {
              std::vector<std::vector<double>> list;
              for (const auto& b : m.s_part.per_state[k]) list.push_back(flatten(b));
              components_.push_back(std::move(list));
              const std::size_t s = m.s1_states[k];
              state_deps_[s] = {k};
              for (std::size_t a = 0; a < A; ++a) pair_deps_[s * A + a] = {k};
            }
            for (const auto& f : m.factor_part.factor_sets) components_.push_back(f);
            for (std::size_t k = 0; k < m.s2_states.size(); ++k) {
              add_factor_deps(m.s2_states[k], m.factor_part.coefficients, k, n1);
            }
          },
          [&](const CoeffFactor& m) {
            const std::size_t r = m.factor_sets.size();
            for (const auto& f : m.factor_sets) components_.push_back(f);
            for (std::size_t s = 0; s < S; ++s) {
              std::vector<std::vector<double>> list;
              for (const auto& u : m.coeff_sets[s]) list.push_back(flatten(u));
              components_.push_back(std::move(list));
              state_deps_[s].push_back(r + s);
              for (std::size_t a = 0; a < A; ++a) {
                pair_deps_[s * A + a].push_back(r + s);
                for (const auto& u : m.coeff_sets[s]) {
                  for (std::size_t i = 0; i < r; ++i) {
                    if (u(a, i) > 0.0) {
                      state_deps_[s].push_back(i);
                      pair_deps_[s * A + a].push_back(i);
                    }
                  }
                }
              }
            }
          },
          [&](const SaCoeffFactor& m) {
            const std::size_t r = m.factor_sets.size();
            for (const auto& f : m.factor_sets) components_.push_back(f);
            for (std::size_t s = 0; s < S; ++s) {
              for (std::size_t a = 0; a < A; ++a) {
                components_.push_back(m.coeff_sets[s][a]);
                const std::size_t c = r + s * A + a;
                state_deps_[s].push_back(c);
                pair_deps_[s * A + a].push_back(c);
                for (const auto& u : m.coeff_sets[s][a]) {
                  for (std::size_t i = 0; i < r; ++i) {
                    if (u[i] > 0.0) {
                      state_deps_[s].push_back(i);
                      pair_deps_[s * A + a].push_back(i);
                    }
                  }
                }
              }
            }
          },
      },
      model_);
  for (auto& d : state_deps_) d = sorted_unique(std::move(d));
  for (auto& d : pair_deps_) d = sorted_unique(std::move(d));
}

void UncertaintySet::assemble(std::span<const std::span<const double>> points, Tensor3& out) const {
  const std::size_t S = num_states_;
  const std::size_t A = num_actions_;
  if (out.dim0() != S || out.dim1() != A || out.dim2() != S) out = Tensor3(S, A, S);

  auto mix_factors = [&](std::span<double> row, auto coeff, std::size_t r, std::size_t offset) {
    std::fill(row.begin(), row.end(), 0.0);
    for (std::size_t i = 0; i < r; ++i) {
      const double u = coeff(i);
      if (u == 0.0) continue;
      const auto w = points[offset + i];
      for (std::size_t t = 0; t < S; ++t) row[t] += u * w[t];
    }
  };

  std::visit(
      Overloaded{
          [&](const ExplicitFinite&) { std::copy(points[0].begin(), points[0].end(), out.flat().begin()); },
          [&](const SRectangular&) {
            for (std::size_t s = 0; s < S; ++s) std::copy(points[s].begin(), points[s].end(), out.slab(s).begin());
          },
          [&](const SaRectangular&) {
            for (std::size_t s = 0; s < S; ++s) {
              for (std::size_t a = 0; a < A; ++a) {
                const auto p = points[s * A + a];
                std::copy(p.begin(), p.end(), out.row(s, a).begin());
              }
            }
          },
          [&](const FactorModel& m) {
            const std::size_t r = m.factor_sets.size();
            for (std::size_t s = 0; s < S; ++s) {
              for (std::size_t a = 0; a < A; ++a) {
                mix_factors(out.row(s, a), [&](std::size_t i) { return m.coefficients(s, a, i); }, r, 0);
              }
            }
          },
          [&](const Partitioned& m) {
            const std::size_t n1 = m.s1_states.size();
            for (std::size_t k = 0; k < n1; ++k) {
              std::copy(points[k].begin(), points[k].end(), out.slab(m.s1_states[k]).begin());
            }
            const std::size_t r = m.factor_part.factor_sets.size();
            for (std::size_t k = 0; k < m.s2_states.size(); ++k) {
              for (std::size_t a = 0; a < A; ++a) {
                mix_factors(out.row(m.s2_states[k], a),
                            [&](std::size_t i) { return m.factor_part.coefficients(k, a, i); }, r, n1);
              }
            }
          },
          [&](const CoeffFactor& m) {
            const std::size_t r = m.factor_sets.size();
            for (std::size_t s = 0; s < S; ++s) {
              const auto u = points[r + s];
              for (std::size_t a = 0; a < A; ++a) {
                mix_factors(out.row(s, a), [&](std::size_t i) { return u[a * r + i]; }, r, 0);
              }
            }
          },
          [&](const SaCoeffFactor& m) {
            const std::size_t r = m.factor_sets.size();
            for (std::size_t s = 0; s < S; ++s) {
              for (std::size_t a = 0; a < A; ++a) {
                const auto u = points[r + s * A + a];
                mix_factors(out.row(s, a), [&](std::size_t i) { return u[i]; }, r, 0);
              }
            }
          },
      },
      model_);
}

std::size_t UncertaintySet::vertex_count() const {
  std::size_t n = 1;
  for (const auto& c : components_) n = saturating_mul(n, c.size());
  return n;
}

std::vector<TransitionKernel> enumerate_vertices(const UncertaintySet& set, std::size_t cap) {
  check_cap(set.vertex_count(), cap, "vertex enumeration");
  std::vector<std::size_t> all(set.num_components());
  for (std::size_t c = 0; c < all.size(); ++c) all[c] = c;
  std::vector<TransitionKernel> out;
  out.reserve(set.vertex_count());
  Tensor3 buffer(set.num_states(), set.num_actions(), set.num_states());
  for_each_choice(set, all, [&](std::span<const std::size_t> choice) {
    assemble_choice(set, choice, buffer);
    out.emplace_back(buffer);
  });
  return out;
}

std::vector<Matrix> marginal_s(const UncertaintySet& set, std::size_t s, std::size_t cap) {
  if (s >= set.num_states()) throw InvalidInput("state index out of range");
  const auto comps = set.state_components(s);
  check_cap(choice_count(set, comps), cap, "state marginal");
  const std::size_t S = set.num_states();
  const std::size_t A = set.num_actions();
  std::vector<Matrix> out;
  Tensor3 buffer(S, A, S);
  for_each_choice(set, comps, [&](std::span<const std::size_t> choice) {
    assemble_choice(set, choice, buffer);
    const auto block = buffer.slab(s);
    for (const auto& m : out) {
      if (sup_norm_diff(m.flat(), block) <= kDedupTol) return;
    }
    Matrix m(A, S);
    std::copy(block.begin(), block.end(), m.flat().begin());
    out.push_back(std::move(m));
  });
  return out;
}

std::vector<Distribution> marginal_sa(const UncertaintySet& set, std::size_t s, std::size_t a,
                                      std::size_t cap) {
  if (s >= set.num_states() || a >= set.num_actions()) throw InvalidInput("index out of range");
  const auto comps = set.pair_components(s, a);
  check_cap(choice_count(set, comps), cap, "pair marginal");
  const std::size_t S = set.num_states();
  std::vector<Distribution> out;
  Tensor3 buffer(S, set.num_actions(), S);
  for_each_choice(set, comps, [&](std::span<const std::size_t> choice) {
    assemble_choice(set, choice, buffer);
    const auto row = buffer.row(s, a);
    for (const auto& d : out) {
      if (sup_norm_diff(d, row) <= kDedupTol) return;
    }
    out.emplace_back(row.begin(), row.end());
  });
  return out;
}

UncertaintySet s_extension(const UncertaintySet& set, std::size_t cap) {
  SRectangular ext;
  for (std::size_t s = 0; s < set.num_states(); ++s) ext.per_state.push_back(marginal_s(set, s, cap));
  return UncertaintySet(set.num_states(), set.num_actions(), std::move(ext));
}

UncertaintySet sa_extension(const UncertaintySet& set, std::size_t cap) {
  SaRectangular ext;
  for (std::size_t s = 0; s < set.num_states(); ++s) {
    std::vector<std::vector<Distribution>> per_a;
    for (std::size_t a = 0; a < set.num_actions(); ++a) per_a.push_back(marginal_sa(set, s, a, cap));
    ext.per_state_action.push_back(std::move(per_a));
  }
  return UncertaintySet(set.num_states(), set.num_actions(), std::move(ext));
}

namespace {

double min_dot(const std::vector<Distribution>& list, std::span<const double> w) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& d : list) best = std::min(best, dot(d, w));
  return best;
}

// min over the factor's vertices of <w, sum_a coeff(a) M_a>.
template <class Coeff>
double min_factor_against(const std::vector<Distribution>& factor, const Matrix& M, Coeff coeff) {
  const std::size_t A = M.rows();
  const std::size_t S = M.cols();
  std::vector<double> g(S, 0.0);
  bool any = false;
  for (std::size_t a = 0; a < A; ++a) {
    const double u = coeff(a);
    if (u == 0.0) continue;
    any = true;
    for (std::size_t t = 0; t < S; ++t) g[t] += u * M(a, t);
  }
  return any ? min_dot(factor, g) : 0.0;
}

double factor_model_min_s(const Tensor3& u, std::size_t row, const std::vector<std::vector<Distribution>>& factors,
                          const Matrix& M) {
  double total = 0.0;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    total += min_factor_against(factors[i], M, [&](std::size_t a) { return u(row, a, i); });
  }
  return total;
}

double factor_model_min_sa(const Tensor3& u, std::size_t row, std::size_t a,
                           const std::vector<std::vector<Distribution>>& factors, std::span<const double> w) {
  double total = 0.0;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const double c = u(row, a, i);
    if (c != 0.0) total += c * min_dot(factors[i], w);
  }
  return total;
}

double block_min(const std::vector<Matrix>& blocks, const Matrix& M) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& b : blocks) best = std::min(best, dot(b.flat(), M.flat()));
  return best;
}

double block_min_row(const std::vector<Matrix>& blocks, std::size_t a, std::span<const double> w) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& b : blocks) best = std::min(best, dot(b.row(a), w));
  return best;
}

std::size_t position_of(const std::vector<std::size_t>& states, std::size_t s) {
  return static_cast<std::size_t>(std::find(states.begin(), states.end(), s) - states.begin());
}

void check_objective(const UncertaintySet& set, std::size_t s, const Matrix& M) {
  if (s >= set.num_states()) throw InvalidInput("state index out of range");
  if (M.rows() != set.num_actions() || M.cols() != set.num_states()) {
    throw InvalidInput("state objective must be A x S");
  }
}

void check_objective(const UncertaintySet& set, std::size_t s, std::size_t a, std::span<const double> w) {
  if (s >= set.num_states() || a >= set.num_actions()) throw InvalidInput("index out of range");
  if (w.size() != set.num_states()) throw InvalidInput("pair objective must have length S");
}

}  // namespace

double min_value_s(const UncertaintySet& set, std::size_t s, const Matrix& M) {
  check_objective(set, s, M);
  const std::size_t A = set.num_actions();
  return std::visit(
      Overloaded{
          [&](const ExplicitFinite& m) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& k : m.kernels) best = std::min(best, dot(k.block(s), M.flat()));
            return best;
          },
          [&](const SRectangular& m) { return block_min(m.per_state[s], M); },
          [&](const SaRectangular& m) {
            double total = 0.0;
            for (std::size_t a = 0; a < A; ++a) total += min_dot(m.per_state_action[s][a], M.row(a));
            return total;
          },
          [&](const FactorModel& m) { return factor_model_min_s(m.coefficients, s, m.factor_sets, M); },
          [&](const Partitioned& m) {
            const std::size_t k1 = position_of(m.s1_states, s);
            if (k1 < m.s1_states.size()) return block_min(m.s_part.per_state[k1], M);
            return factor_model_min_s(m.factor_part.coefficients, position_of(m.s2_states, s),
                                      m.factor_part.factor_sets, M);
          },
          [&](const CoeffFactor& m) {
            // Given the coefficient vertex the objective separates over
            // factors; the minimum is then taken over coefficient vertices.
            const std::size_t r = m.factor_sets.size();
            double best = std::numeric_limits<double>::infinity();
            for (const auto& u : m.coeff_sets[s]) {
              double total = 0.0;
              for (std::size_t i = 0; i < r; ++i) {
                total += min_factor_against(m.factor_sets[i], M, [&](std::size_t a) { return u(a, i); });
              }
              best = std::min(best, total);
            }
            return best;
          },
          [&](const SaCoeffFactor& m) {
            // Factors are shared across actions: enumerate the factor
            // vertices that matter for this state, then each action picks
            // its best coefficient vertex.
            const std::size_t r = m.factor_sets.size();
            std::vector<std::size_t> used;
            for (std::size_t c : set.state_components(s)) {
              if (c < r) used.push_back(c);
            }
            check_cap(choice_count(set, used), kDefaultEnumerationCap, "shared-factor minimization");
            // h[i][k][a] = <w^i_k, M_a>
            std::vector<std::vector<std::vector<double>>> h(r);
            for (std::size_t i : used) {
              for (const auto& w : m.factor_sets[i]) {
                std::vector<double> per_a(A);
                for (std::size_t a = 0; a < A; ++a) per_a[a] = dot(w, M.row(a));
                h[i].push_back(std::move(per_a));
              }
            }
            double best = std::numeric_limits<double>::infinity();
            for_each_choice(set, used, [&](std::span<const std::size_t> choice) {
              double total = 0.0;
              for (std::size_t a = 0; a < A; ++a) {
                double best_a = std::numeric_limits<double>::infinity();
                for (const auto& u : m.coeff_sets[s][a]) {
                  double val = 0.0;
                  for (std::size_t i : used) val += u[i] * h[i][choice[i]][a];
                  best_a = std::min(best_a, val);
                }
                total += best_a;
              }
              best = std::min(best, total);
            });
            return best;
          },
      },
      set.model());
}

double min_value_sa(const UncertaintySet& set, std::size_t s, std::size_t a, std::span<const double> w) {
  check_objective(set, s, a, w);
  return std::visit(
      Overloaded{
          [&](const ExplicitFinite& m) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& k : m.kernels) best = std::min(best, dot(k.row(s, a), w));
            return best;
          },
          [&](const SRectangular& m) { return block_min_row(m.per_state[s], a, w); },
          [&](const SaRectangular& m) { return min_dot(m.per_state_action[s][a], w); },
          [&](const FactorModel& m) { return factor_model_min_sa(m.coefficients, s, a, m.factor_sets, w); },
          [&](const Partitioned& m) {
            const std::size_t k1 = position_of(m.s1_states, s);
            if (k1 < m.s1_states.size()) return block_min_row(m.s_part.per_state[k1], a, w);
            return factor_model_min_sa(m.factor_part.coefficients, position_of(m.s2_states, s), a,
                                       m.factor_part.factor_sets, w);
          },
          [&](const CoeffFactor& m) {
            // Factors first (coefficients are nonnegative), then coefficients.
            const std::size_t r = m.factor_sets.size();
            std::vector<double> g(r);
            for (std::size_t i = 0; i < r; ++i) g[i] = min_dot(m.factor_sets[i], w);
            double best = std::numeric_limits<double>::infinity();
            for (const auto& u : m.coeff_sets[s]) best = std::min(best, dot(u.row(a), g));
            return best;
          },
          [&](const SaCoeffFactor& m) {
            const std::size_t r = m.factor_sets.size();
            std::vector<double> g(r);
            for (std::size_t i = 0; i < r; ++i) g[i] = min_dot(m.factor_sets[i], w);
            return min_dot(m.coeff_sets[s][a], g);
          },
      },
      set.model());
}

namespace {

template <class Objective>
LinearMin enumerate_argmin(const UncertaintySet& set, double constructive, std::size_t cap,
                           Objective objective) {
  LinearMin out;
  out.value = constructive;
  if (set.variant() == SetVariant::kExplicitFinite) {
    check_cap(set.vertex_count(), cap, "explicit set minimization");
  } else if (set.vertex_count() > cap) {
    return out;
  }
  const auto kernels = enumerate_vertices(set, cap);
  std::vector<double> vals(kernels.size());
  for (std::size_t k = 0; k < kernels.size(); ++k) vals[k] = objective(kernels[k]);
  const double lo = *std::min_element(vals.begin(), vals.end());
  for (std::size_t k = 0; k < vals.size(); ++k) {
    if (vals[k] <= lo + kArgminTieTol) out.argmin.push_back(k);
  }
  out.enumerated = true;
  return out;
}

}  // namespace

LinearMin min_linear_s(const UncertaintySet& set, std::size_t s, const Matrix& M, std::size_t cap) {
  const double v = min_value_s(set, s, M);
  return enumerate_argmin(set, v, cap,
                          [&](const TransitionKernel& k) { return dot(k.block(s), M.flat()); });
}

LinearMin min_linear_sa(const UncertaintySet& set, std::size_t s, std::size_t a,
                        std::span<const double> w, std::size_t cap) {
  const double v = min_value_sa(set, s, a, w);
  return enumerate_argmin(set, v, cap, [&](const TransitionKernel& k) { return dot(k.row(s, a), w); });
}

namespace {

std::vector<std::vector<double>> flat_kernels(const std::vector<TransitionKernel>& kernels) {
  std::vector<std::vector<double>> out;
  for (const auto& k : kernels) {
    std::vector<double> flat(k.probs().flat().begin(), k.probs().flat().end());
    bool dup = false;
    for (const auto& o : out) {
      if (sup_norm_diff(o, flat) <= kDedupTol) {
        dup = true;
        break;
      }
    }
    if (!dup) out.push_back(std::move(flat));
  }
  return out;
}

bool same_hull(const UncertaintySet& set, const UncertaintySet& extension, std::size_t cap) {
  const auto inner = flat_kernels(enumerate_vertices(set, cap));
  const auto outer = flat_kernels(enumerate_vertices(extension, cap));
  for (const auto& e : outer) {
    if (!in_convex_hull(e, inner)) return false;
  }
  for (const auto& v : inner) {
    if (!in_convex_hull(v, outer)) return false;
  }
  return true;
}

}  // namespace

bool is_s_rectangular(const UncertaintySet& set, std::size_t cap) {
  if (set.variant() == SetVariant::kSRectangular || set.variant() == SetVariant::kSaRectangular) {
    return true;
  }
  return same_hull(set, s_extension(set, cap), cap);
}

bool is_sa_rectangular(const UncertaintySet& set, std::size_t cap) {
  if (set.variant() == SetVariant::kSaRectangular) return true;
  return same_hull(set, sa_extension(set, cap), cap);
}

bool hull_contains(const UncertaintySet& set, const TransitionKernel& kernel, std::size_t cap) {
  if (kernel.num_states() != set.num_states() || kernel.num_actions() != set.num_actions()) {
    throw InvalidInput("kernel shape does not match the set");
  }
  return in_convex_hull(kernel.probs().flat(), flat_kernels(enumerate_vertices(set, cap)));
}

}  // namespace rmdp
