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
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "rmdp/mdp.hpp"
#include "rmdp/tensor.hpp"

namespace rmdp {

using Distribution = std::vector<double>;

/// Default ceiling on the number of kernels any enumeration may produce.
inline constexpr std::size_t kDefaultEnumerationCap = 1'000'000;
/// Absolute tolerance on objective values when collecting argmin sets.
inline constexpr double kArgminTieTol = 1e-9;
/// Sup-norm tolerance under which two marginal vertices are the same point.
inline constexpr double kDedupTol = 1e-12;

// Every set is stored by the vertices of its convex pieces. The convex hull
// of the enumerated kernels is the convex set the model describes (or, for
// ExplicitFinite, the hull of the finite set).

/// A finite list of kernels.
struct ExplicitFinite {
  std::vector<TransitionKernel> kernels;
};

/// Product over states of per-state vertex lists. Each block is an
/// actions x states row-stochastic matrix.
struct SRectangular {
  std::vector<std::vector<Matrix>> per_state;
};

/// Product over (state, action) of vertex lists of next-state distributions.
struct SaRectangular {
  std::vector<std::vector<std::vector<Distribution>>> per_state_action;  // [s][a][vertex]
};

/// P[s][a] = sum_i u[s][a][i] w^i with fixed coefficients and each factor
/// w^i ranging over the hull of its own vertex list.
struct FactorModel {
  Tensor3 coefficients;                            // u[s][a][i]
  std::vector<std::vector<Distribution>> factor_sets;  // [i][vertex]
};

/// States split in two groups chosen independently: an s-rectangular part
/// and a factor part. `s_part.per_state` is aligned with `s1_states`, the
/// first index of `factor_part.coefficients` with `s2_states`.
struct Partitioned {
  std::vector<std::size_t> s1_states;
  SRectangular s_part;
  std::vector<std::size_t> s2_states;
  FactorModel factor_part;
};

/// Factors and per-state coefficient blocks both vary. Each coefficient
/// vertex for state s is an actions x factors matrix with rows in the
/// simplex over factors.
struct CoeffFactor {
  std::vector<std::vector<Distribution>> factor_sets;  // [i][vertex]
  std::vector<std::vector<Matrix>> coeff_sets;         // [s][vertex]
};

/// Factors vary; coefficients vary independently per (state, action).
struct SaCoeffFactor {
  std::vector<std::vector<Distribution>> factor_sets;            // [i][vertex]
  std::vector<std::vector<std::vector<Distribution>>> coeff_sets;  // [s][a][vertex]
};

enum class SetVariant {
  kExplicitFinite,
  kSRectangular,
  kSaRectangular,
  kFactorModel,
  kPartitioned,
  kCoeffFactor,
  kSaCoeffFactor,
};

std::string_view to_string(SetVariant variant);
std::optional<SetVariant> parse_set_variant(std::string_view name);

class UncertaintySet {
 public:
  using Model = std::variant<ExplicitFinite, SRectangular, SaRectangular, FactorModel,
                             Partitioned, CoeffFactor, SaCoeffFactor>;

  UncertaintySet(std::size_t num_states, std::size_t num_actions, Model model);

  static UncertaintySet singleton(const TransitionKernel& kernel);

  std::size_t num_states() const { return num_states_; }
  std::size_t num_actions() const { return num_actions_; }
  SetVariant variant() const { return static_cast<SetVariant>(model_.index()); }
  const Model& model() const { return model_; }

  // Component view. Every model is a product of finite vertex lists
  // ("components"); a choice of one point per component maps to a kernel
  // through `assemble`. The map is multi-affine in the component points.

  std::size_t num_components() const { return components_.size(); }
  const std::vector<std::vector<double>>& component_vertices(std::size_t c) const {
    return components_[c];
  }
  /// Components that influence transitions out of state s.
  std::span<const std::size_t> state_components(std::size_t s) const { return state_deps_[s]; }
  /// Components that influence transitions out of (s, a).
  std::span<const std::size_t> pair_components(std::size_t s, std::size_t a) const {
    return pair_deps_[s * num_actions_ + a];
  }
  /// Writes the kernel for one point per component into `out` (S x A x S).
  void assemble(std::span<const std::span<const double>> points, Tensor3& out) const;

  /// Number of kernels enumerate_vertices produces, saturating at SIZE_MAX.
  std::size_t vertex_count() const;

 private:
  void build_components();

  std::size_t num_states_;
  std::size_t num_actions_;
  Model model_;
  std::vector<std::vector<std::vector<double>>> components_;
  std::vector<std::vector<std::size_t>> state_deps_;
  std::vector<std::vector<std::size_t>> pair_deps_;
};

/// All kernels formed by combining one vertex per component, in mixed-radix
/// order with component 0 varying slowest. Throws BudgetExceeded above `cap`.
std::vector<TransitionKernel> enumerate_vertices(const UncertaintySet& set,
                                                 std::size_t cap = kDefaultEnumerationCap);

/// Per-state marginal: distinct actions x states blocks P_s over the set.
std::vector<Matrix> marginal_s(const UncertaintySet& set, std::size_t s,
                               std::size_t cap = kDefaultEnumerationCap);
/// Per-pair marginal: distinct next-state distributions P_sa over the set.
std::vector<Distribution> marginal_sa(const UncertaintySet& set, std::size_t s, std::size_t a,
                                      std::size_t cap = kDefaultEnumerationCap);

/// Smallest s-rectangular (resp. sa-rectangular) set containing `set`.
UncertaintySet s_extension(const UncertaintySet& set, std::size_t cap = kDefaultEnumerationCap);
UncertaintySet sa_extension(const UncertaintySet& set, std::size_t cap = kDefaultEnumerationCap);

/// min over the set of <P_s, M> (M is actions x states), computed by the
/// model's constructive minimizer without full enumeration.
double min_value_s(const UncertaintySet& set, std::size_t s, const Matrix& M);
/// min over the set of <P_sa, w>, constructive.
double min_value_sa(const UncertaintySet& set, std::size_t s, std::size_t a,
                    std::span<const double> w);

struct LinearMin {
  double value = 0.0;
  /// Indices into enumerate_vertices(set) within kArgminTieTol of the
  /// minimum. Empty when `enumerated` is false.
  std::vector<std::size_t> argmin;
  bool enumerated = false;
};

/// Linear minimization over transitions out of one state. The value comes
/// from the constructive minimizer; the argmin list from enumeration when
/// the vertex count is within `cap`. ExplicitFinite sets above the cap
/// throw BudgetExceeded.
LinearMin min_linear_s(const UncertaintySet& set, std::size_t s, const Matrix& M,
                       std::size_t cap = kDefaultEnumerationCap);
LinearMin min_linear_sa(const UncertaintySet& set, std::size_t s, std::size_t a,
                        std::span<const double> w, std::size_t cap = kDefaultEnumerationCap);

/// Whether the convex hull of the set equals the hull of its s-rectangular
/// (resp. sa-rectangular) extension. Decided by LP hull membership.
bool is_s_rectangular(const UncertaintySet& set, std::size_t cap = kDefaultEnumerationCap);
bool is_sa_rectangular(const UncertaintySet& set, std::size_t cap = kDefaultEnumerationCap);

/// True iff `kernel` is (within 1e-9) a convex combination of the set's
/// enumerated vertices.
bool hull_contains(const UncertaintySet& set, const TransitionKernel& kernel,
                   std::size_t cap = kDefaultEnumerationCap);

}  // namespace rmdp
