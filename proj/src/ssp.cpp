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

#include "rmdp/ssp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "rmdp/error.hpp"

namespace rmdp {

std::string_view to_string(SspMode mode) {
  switch (mode) {
    case SspMode::kStrongS: return "strong_s";
    case SspMode::kStrongSa: return "strong_sa";
    case SspMode::kWeakS: return "weak_s";
    case SspMode::kWeakSa: return "weak_sa";
  }
  return "unknown";
}

std::optional<SspMode> parse_ssp_mode(std::string_view name) {
  for (auto m : {SspMode::kStrongS, SspMode::kStrongSa, SspMode::kWeakS, SspMode::kWeakSa}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

bool structurally_guaranteed(SetVariant variant, SspMode mode) {
  using V = SetVariant;
  switch (mode) {
    case SspMode::kStrongS: return variant == V::kSRectangular || variant == V::kSaRectangular;
    case SspMode::kStrongSa: return variant == V::kSaRectangular;
    case SspMode::kWeakS:
      return variant == V::kSRectangular || variant == V::kSaRectangular ||
             variant == V::kFactorModel || variant == V::kPartitioned ||
             variant == V::kCoeffFactor || variant == V::kSaCoeffFactor;
    case SspMode::kWeakSa:
      return variant == V::kSaRectangular || variant == V::kFactorModel ||
             variant == V::kSaCoeffFactor;
  }
  return false;
}

namespace {

bool per_pair(SspMode mode) { return mode == SspMode::kStrongSa || mode == SspMode::kWeakSa; }

// Validates that the objective form matches the mode and its shapes match
// the set.
void check_objective(const UncertaintySet& set, SspMode mode, const ObjectiveTensor& objective) {
  const std::size_t S = set.num_states();
  const std::size_t A = set.num_actions();
  switch (mode) {
    case SspMode::kStrongS:
    case SspMode::kStrongSa: {
      const auto* V = std::get_if<Tensor3>(&objective);
      if (V == nullptr) throw InvalidInput("strong properties need a full objective tensor");
      if (V->dim0() != S || V->dim1() != A || V->dim2() != S) {
        throw InvalidInput("objective tensor must be S x A x S");
      }
      return;
    }
    case SspMode::kWeakS: {
      const auto* o = std::get_if<PolicyValueObjective>(&objective);
      if (o == nullptr) throw InvalidInput("weak_s needs a (policy, value) objective");
      if (o->v.size() != S || o->policy.num_states() != S || o->policy.num_actions() != A) {
        throw InvalidInput("weak_s objective has the wrong shape");
      }
      return;
    }
    case SspMode::kWeakSa: {
      const auto* o = std::get_if<ValueObjective>(&objective);
      if (o == nullptr) throw InvalidInput("weak_sa needs a value objective");
      if (o->v.size() != S) throw InvalidInput("weak_sa objective has the wrong length");
      return;
    }
  }
}

// Coefficient matrix M (A x S) of the state-s objective <P_s, M>.
Matrix state_objective(const ObjectiveTensor& objective, std::size_t s, std::size_t A,
                       std::size_t S) {
  Matrix M(A, S);
  if (const auto* V = std::get_if<Tensor3>(&objective)) {
    const auto slab = V->slab(s);
    std::copy(slab.begin(), slab.end(), M.flat().begin());
  } else {
    const auto& o = std::get<PolicyValueObjective>(objective);
    for (std::size_t a = 0; a < A; ++a) {
      for (std::size_t t = 0; t < S; ++t) M(a, t) = o.policy(s, a) * o.v[t];
    }
  }
  return M;
}

std::span<const double> pair_objective(const ObjectiveTensor& objective, std::size_t s,
                                       std::size_t a) {
  if (const auto* V = std::get_if<Tensor3>(&objective)) return V->row(s, a);
  return std::get<ValueObjective>(objective).v;
}

std::span<const double> shared_values(const ObjectiveTensor& objective) {
  if (const auto* o = std::get_if<ValueObjective>(&objective)) return o->v;
  return std::get<PolicyValueObjective>(objective).v;
}

bool within_tie(double value, double minimum) { return value <= minimum + kArgminTieTol; }

std::size_t argmin_dot(const std::vector<std::vector<double>>& list, std::span<const double> w) {
  std::size_t best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < list.size(); ++k) {
    const double val = dot(list[k], w);
    if (val < best_val) {
      best_val = val;
      best = k;
    }
  }
  return best;
}

}  // namespace

SspChecker::SspChecker(const UncertaintySet& set, std::size_t cap) : set_(&set) {
  if (set.vertex_count() <= cap) {
    vertices_ = enumerate_vertices(set, cap);
    enumerated_ = true;
  }
}

SspVerdict SspChecker::check(SspMode mode, const ObjectiveTensor& objective) const {
  check_objective(*set_, mode, objective);
  SspVerdict verdict = enumerated_ ? check_by_vertices(mode, objective)
                                   : check_constructive(mode, objective);
  verdict.structural = structurally_guaranteed(set_->variant(), mode);
  if (!verdict.holds) verdict.witness = objective;
  return verdict;
}

SspVerdict SspChecker::check_by_vertices(SspMode mode, const ObjectiveTensor& objective) const {
  const std::size_t S = set_->num_states();
  const std::size_t A = set_->num_actions();
  const std::size_t n = vertices_.size();
  const bool pairs = per_pair(mode);
  const std::size_t coords = pairs ? S * A : S;

  SspVerdict verdict;
  std::vector<double> vals(n);
  std::vector<std::size_t> common;
  for (std::size_t c = 0; c < coords; ++c) {
    if (pairs) {
      const std::size_t s = c / A;
      const std::size_t a = c % A;
      const auto w = pair_objective(objective, s, a);
      for (std::size_t k = 0; k < n; ++k) vals[k] = dot(vertices_[k].row(s, a), w);
    } else {
      const Matrix M = state_objective(objective, c, A, S);
      for (std::size_t k = 0; k < n; ++k) vals[k] = dot(vertices_[k].block(c), M.flat());
    }
    const double lo = *std::min_element(vals.begin(), vals.end());
    std::vector<std::size_t> argmins;
    for (std::size_t k = 0; k < n; ++k) {
      if (within_tie(vals[k], lo)) argmins.push_back(k);
    }
    if (c == 0) {
      common = argmins;
    } else {
      std::vector<std::size_t> next;
      std::set_intersection(common.begin(), common.end(), argmins.begin(), argmins.end(),
                            std::back_inserter(next));
      common = std::move(next);
    }
    verdict.per_coordinate_argmins.push_back(std::move(argmins));
  }
  verdict.holds = !common.empty();
  if (verdict.holds) verdict.certificate = vertices_[common.front()];
  return verdict;
}

SspVerdict SspChecker::check_constructive(SspMode mode, const ObjectiveTensor& objective) const {
  const UncertaintySet& set = *set_;
  if (!structurally_guaranteed(set.variant(), mode)) {
    throw BudgetExceeded("vertex count " + std::to_string(set.vertex_count()) +
                         " exceeds the cap and no constructive certificate exists for " +
                         std::string(to_string(set.variant())) + " / " +
                         std::string(to_string(mode)));
  }
  const std::size_t S = set.num_states();
  const std::size_t A = set.num_actions();
  std::vector<std::size_t> choice(set.num_components(), 0);

  // Local choices: each component picks the vertex minimizing its own share
  // of the objective. For the guaranteed pairs the objective separates this
  // way, so the assembled kernel is a simultaneous minimizer.
  auto pick_block = [&](std::size_t comp, std::size_t s) {
    const Matrix M = state_objective(objective, s, A, S);
    choice[comp] = argmin_dot(set.component_vertices(comp), M.flat());
  };
  auto pick_factors = [&](const std::vector<std::vector<Distribution>>& factors, std::size_t offset) {
    const auto v = shared_values(objective);
    std::vector<double> g(factors.size());
    for (std::size_t i = 0; i < factors.size(); ++i) {
      choice[offset + i] = argmin_dot(set.component_vertices(offset + i), v);
      g[i] = dot(factors[i][choice[offset + i]], v);
    }
    return g;
  };
  auto policy_weight = [&](std::size_t s, std::size_t a) {
    if (const auto* o = std::get_if<PolicyValueObjective>(&objective)) return o->policy(s, a);
    return 1.0;
  };

  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, SRectangular>) {
          for (std::size_t s = 0; s < S; ++s) pick_block(s, s);
        } else if constexpr (std::is_same_v<T, SaRectangular>) {
          for (std::size_t s = 0; s < S; ++s) {
            const Matrix M = per_pair(mode) ? Matrix() : state_objective(objective, s, A, S);
            for (std::size_t a = 0; a < A; ++a) {
              const auto w = per_pair(mode) ? pair_objective(objective, s, a) : M.row(a);
              choice[s * A + a] = argmin_dot(set.component_vertices(s * A + a), w);
            }
          }
        } else if constexpr (std::is_same_v<T, FactorModel>) {
          pick_factors(m.factor_sets, 0);
        } else if constexpr (std::is_same_v<T, Partitioned>) {
          for (std::size_t k = 0; k < m.s1_states.size(); ++k) pick_block(k, m.s1_states[k]);
          pick_factors(m.factor_part.factor_sets, m.s1_states.size());
        } else if constexpr (std::is_same_v<T, CoeffFactor>) {
          const std::size_t r = m.factor_sets.size();
          const auto g = pick_factors(m.factor_sets, 0);
          for (std::size_t s = 0; s < S; ++s) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < m.coeff_sets[s].size(); ++k) {
              const Matrix& u = m.coeff_sets[s][k];
              double val = 0.0;
              for (std::size_t a = 0; a < A; ++a) val += policy_weight(s, a) * dot(u.row(a), g);
              if (val < best) {
                best = val;
                choice[r + s] = k;
              }
            }
          }
        } else if constexpr (std::is_same_v<T, SaCoeffFactor>) {
          const std::size_t r = m.factor_sets.size();
          const auto g = pick_factors(m.factor_sets, 0);
          for (std::size_t s = 0; s < S; ++s) {
            for (std::size_t a = 0; a < A; ++a) {
              choice[r + s * A + a] = argmin_dot(set.component_vertices(r + s * A + a), g);
            }
          }
        }
      },
      set.model());

  std::vector<std::span<const double>> points(choice.size());
  for (std::size_t c = 0; c < choice.size(); ++c) points[c] = set.component_vertices(c)[choice[c]];
  Tensor3 buffer(S, A, S);
  set.assemble(points, buffer);
  TransitionKernel kernel(std::move(buffer));

  for (std::size_t s = 0; s < S; ++s) {
    if (per_pair(mode)) {
      for (std::size_t a = 0; a < A; ++a) {
        const auto w = pair_objective(objective, s, a);
        if (!within_tie(dot(kernel.row(s, a), w), min_value_sa(set, s, a, w))) {
          throw VerificationError("constructive certificate misses a pair minimum");
        }
      }
    } else {
      const Matrix M = state_objective(objective, s, A, S);
      if (!within_tie(dot(kernel.block(s), M.flat()), min_value_s(set, s, M))) {
        throw VerificationError("constructive certificate misses a state minimum");
      }
    }
  }
  SspVerdict verdict;
  verdict.holds = true;
  verdict.certificate = std::move(kernel);
  return verdict;
}

SspVerdict check_strong_ssp_s(const UncertaintySet& set, const Tensor3& V) {
  return SspChecker(set).check(SspMode::kStrongS, V);
}

SspVerdict check_strong_ssp_sa(const UncertaintySet& set, const Tensor3& V) {
  return SspChecker(set).check(SspMode::kStrongSa, V);
}

SspVerdict check_weak_ssp_s(const UncertaintySet& set, const Policy& policy,
                            std::span<const double> v) {
  return SspChecker(set).check(SspMode::kWeakS,
                               PolicyValueObjective{policy, std::vector<double>(v.begin(), v.end())});
}

SspVerdict check_weak_ssp_sa(const UncertaintySet& set, std::span<const double> v) {
  return SspChecker(set).check(SspMode::kWeakSa, ValueObjective{std::vector<double>(v.begin(), v.end())});
}

ObjectiveTensor sample_objective(std::size_t num_states, std::size_t num_actions, SspMode mode,
                                 std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> entry(-1.0, 1.0);
  const std::size_t S = num_states;
  const std::size_t A = num_actions;
  auto values = [&] {
    std::vector<double> v(S);
    for (double& x : v) x = entry(rng);
    return v;
  };
  switch (mode) {
    case SspMode::kStrongS:
    case SspMode::kStrongSa: {
      Tensor3 V(S, A, S);
      for (double& x : V.flat()) x = entry(rng);
      return V;
    }
    case SspMode::kWeakSa: return ValueObjective{values()};
    case SspMode::kWeakS: {
      // Normalized unit exponentials are uniform on the simplex.
      std::exponential_distribution<double> expo(1.0);
      Matrix pi(S, A);
      for (std::size_t s = 0; s < S; ++s) {
        double total = 0.0;
        for (std::size_t a = 0; a < A; ++a) total += pi(s, a) = expo(rng);
        for (std::size_t a = 0; a < A; ++a) pi(s, a) /= total;
        // Guard the row sum against rounding before validation.
        double sum = 0.0;
        for (std::size_t a = 0; a + 1 < A; ++a) sum += pi(s, a);
        pi(s, A - 1) = std::max(0.0, 1.0 - sum);
      }
      return PolicyValueObjective{Policy(std::move(pi)), values()};
    }
  }
  throw InvalidInput("unknown SSP mode");
}

SspVerdict falsify_ssp(const UncertaintySet& set, SspMode mode, std::size_t num_samples,
                       std::uint64_t seed) {
  if (num_samples == 0) throw InvalidInput("falsification needs at least one sample");
  const SspChecker checker(set);
  for (std::size_t i = 0; i < num_samples; ++i) {
    SspVerdict v = checker.check(
        mode, sample_objective(set.num_states(), set.num_actions(), mode, seed, i));
    if (!v.holds) {
      v.samples_checked = i + 1;
      return v;
    }
  }
  SspVerdict verdict;
  verdict.holds = true;
  verdict.samples_checked = num_samples;
  verdict.structural = structurally_guaranteed(set.variant(), mode);
  return verdict;
}

}  // namespace rmdp
