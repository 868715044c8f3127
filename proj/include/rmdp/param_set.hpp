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
#include <span>
#include <string>
#include <vector>

#include "rmdp/mdp.hpp"
#include "rmdp/tensor.hpp"
#include "rmdp/uncertainty.hpp"

namespace rmdp {

struct Parameter {
  std::string name;
  double low = 0.0;
  double high = 1.0;
};

/// A set of kernels described by named scalar parameters on a box, or by a
/// finite list. Three forms:
///   affine  P(x) = base + sum_j x_j coeff_j;
///   convex  each component of an UncertaintySet ranges over the hull of its
///           vertices, parametrized by stick-breaking weights;
///   finite  a list of kernels, searched exhaustively.
class ParamSet {
 public:
  enum class Kind { kAffine, kConvex, kFinite };

  /// Checks that every corner of the box gives a valid kernel.
  static ParamSet affine(std::vector<Parameter> parameters, Tensor3 base,
                         std::vector<Tensor3> coefficients);
  /// Convex hull semantics for every component of `set`.
  static ParamSet convex(const UncertaintySet& set);
  static ParamSet finite(std::vector<TransitionKernel> kernels);
  /// Finite for ExplicitFinite sets, convex otherwise.
  static ParamSet from_set(const UncertaintySet& set);

  Kind kind() const { return kind_; }
  std::size_t num_states() const { return num_states_; }
  std::size_t num_actions() const { return num_actions_; }
  const std::vector<Parameter>& parameters() const { return parameters_; }
  std::size_t num_parameters() const { return parameters_.size(); }

  std::size_t grid_resolution() const { return grid_resolution_; }
  void set_grid_resolution(std::size_t points);

  const std::vector<TransitionKernel>& finite_kernels() const { return kernels_; }
  const Tensor3& affine_base() const { return base_; }
  const std::vector<Tensor3>& affine_coefficients() const { return coefficients_; }

  /// Validated kernel at a parameter vector inside the box.
  TransitionKernel kernel_at(std::span<const double> params) const;
  /// Unvalidated fill of `out`; the hot path of the oracles.
  void fill_kernel(std::span<const double> params, Tensor3& out) const;

  /// Kernels at every corner of the box (or the finite list). Any property
  /// that is multilinear in the parameters is decided on these.
  std::vector<TransitionKernel> probe_kernels(std::size_t max_corners = 1u << 16) const;

 private:
  ParamSet() = default;

  Kind kind_ = Kind::kFinite;
  std::size_t num_states_ = 0;
  std::size_t num_actions_ = 0;
  std::vector<Parameter> parameters_;
  std::size_t grid_resolution_ = 101;
  std::vector<TransitionKernel> kernels_;
  Tensor3 base_;
  std::vector<Tensor3> coefficients_;
  std::vector<UncertaintySet> convex_set_;  // zero or one element
  std::vector<std::size_t> component_offsets_;
};

}  // namespace rmdp
