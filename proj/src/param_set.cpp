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

#include "rmdp/param_set.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rmdp/error.hpp"

namespace rmdp {

ParamSet ParamSet::affine(std::vector<Parameter> parameters, Tensor3 base,
                          std::vector<Tensor3> coefficients) {
  if (parameters.size() != coefficients.size()) {
    throw InvalidInput("one coefficient tensor per parameter required");
  }
  for (const auto& p : parameters) {
    if (!(p.low <= p.high) || !std::isfinite(p.low) || !std::isfinite(p.high)) {
      throw InvalidInput("parameter " + p.name + " has an invalid interval");
    }
  }
  for (const auto& c : coefficients) {
    if (c.dim0() != base.dim0() || c.dim1() != base.dim1() || c.dim2() != base.dim2()) {
      throw InvalidInput("coefficient tensor shape differs from the base");
    }
  }
  ParamSet out;
  out.kind_ = Kind::kAffine;
  out.num_states_ = base.dim0();
  out.num_actions_ = base.dim1();
  out.parameters_ = std::move(parameters);
  out.base_ = std::move(base);
  out.coefficients_ = std::move(coefficients);
  // Valid at every corner implies valid on the box: each entry is affine.
  out.probe_kernels();
  return out;
}

ParamSet ParamSet::convex(const UncertaintySet& set) {
  ParamSet out;
  out.kind_ = Kind::kConvex;
  out.num_states_ = set.num_states();
  out.num_actions_ = set.num_actions();
  for (std::size_t c = 0; c < set.num_components(); ++c) {
    out.component_offsets_.push_back(out.parameters_.size());
    const std::size_t k = set.component_vertices(c).size();
    for (std::size_t j = 0; j + 1 < k; ++j) {
      out.parameters_.push_back({"c" + std::to_string(c) + "_" + std::to_string(j), 0.0, 1.0});
    }
  }
  out.component_offsets_.push_back(out.parameters_.size());
  out.convex_set_.push_back(set);
  return out;
}

ParamSet ParamSet::finite(std::vector<TransitionKernel> kernels) {
  if (kernels.empty()) throw InvalidInput("finite parameter set needs at least one kernel");
  ParamSet out;
  out.kind_ = Kind::kFinite;
  out.num_states_ = kernels.front().num_states();
  out.num_actions_ = kernels.front().num_actions();
  for (const auto& k : kernels) {
    if (k.num_states() != out.num_states_ || k.num_actions() != out.num_actions_) {
      throw InvalidInput("finite parameter set kernels differ in shape");
    }
  }
  out.kernels_ = std::move(kernels);
  return out;
}

ParamSet ParamSet::from_set(const UncertaintySet& set) {
  if (set.variant() == SetVariant::kExplicitFinite) {
    return finite(std::get<ExplicitFinite>(set.model()).kernels);
  }
  return convex(set);
}

void ParamSet::set_grid_resolution(std::size_t points) {
  if (points < 2) throw InvalidInput("grid resolution must be at least 2");
  grid_resolution_ = points;
}

void ParamSet::fill_kernel(std::span<const double> params, Tensor3& out) const {
  const std::size_t S = num_states_;
  const std::size_t A = num_actions_;
  if (out.dim0() != S || out.dim1() != A || out.dim2() != S) out = Tensor3(S, A, S);
  switch (kind_) {
    case Kind::kFinite: {
      const auto idx = static_cast<std::size_t>(params.empty() ? 0.0 : params[0]);
      const auto src = kernels_.at(idx).probs().flat();
      std::copy(src.begin(), src.end(), out.flat().begin());
      return;
    }
    case Kind::kAffine: {
      auto dst = out.flat();
      const auto base = base_.flat();
      std::copy(base.begin(), base.end(), dst.begin());
      for (std::size_t j = 0; j < coefficients_.size(); ++j) {
        const double x = params[j];
        if (x == 0.0) continue;
        const auto c = coefficients_[j].flat();
        for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += x * c[k];
      }
      return;
    }
    case Kind::kConvex: {
      const UncertaintySet& set = convex_set_.front();
      thread_local std::vector<std::vector<double>> points;
      thread_local std::vector<std::span<const double>> views;
      points.resize(set.num_components());
      views.resize(set.num_components());
      for (std::size_t c = 0; c < set.num_components(); ++c) {
        const auto& verts = set.component_vertices(c);
        auto& pt = points[c];
        pt.assign(verts.front().size(), 0.0);
        // Stick-breaking: weight_j = t_j prod_{i<j} (1 - t_i), last takes
        // the remainder.
        double remaining = 1.0;
        const std::size_t off = component_offsets_[c];
        for (std::size_t j = 0; j < verts.size(); ++j) {
          const double w = j + 1 < verts.size() ? remaining * params[off + j] : remaining;
          remaining -= w;
          if (w == 0.0) continue;
          for (std::size_t t = 0; t < pt.size(); ++t) pt[t] += w * verts[j][t];
        }
        views[c] = pt;
      }
      set.assemble(views, out);
      return;
    }
  }
}

TransitionKernel ParamSet::kernel_at(std::span<const double> params) const {
  if (kind_ == Kind::kFinite) {
    if (params.size() != 1 || params[0] < 0.0 || params[0] >= static_cast<double>(kernels_.size())) {
      throw InvalidInput("finite parameter set is indexed by one kernel index");
    }
    return kernels_[static_cast<std::size_t>(params[0])];
  }
  if (params.size() != parameters_.size()) throw InvalidInput("wrong number of parameters");
  for (std::size_t j = 0; j < params.size(); ++j) {
    if (!(params[j] >= parameters_[j].low - 1e-12 && params[j] <= parameters_[j].high + 1e-12)) {
      throw InvalidInput("parameter " + parameters_[j].name + " is outside its interval");
    }
  }
  Tensor3 out;
  fill_kernel(params, out);
  // Clean rounding noise before validation.
  for (double& x : out.flat()) {
    if (x < 0.0 && x > -kStochasticTol) x = 0.0;
  }
  return TransitionKernel(std::move(out));
}

std::vector<TransitionKernel> ParamSet::probe_kernels(std::size_t max_corners) const {
  if (kind_ == Kind::kFinite) return kernels_;
  const std::size_t d = parameters_.size();
  if (d >= 63 || (std::size_t{1} << d) > max_corners) {
    throw BudgetExceeded("too many parameter corners to probe");
  }
  std::vector<TransitionKernel> out;
  std::vector<double> x(d);
  for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
    for (std::size_t j = 0; j < d; ++j) {
      x[j] = (mask >> j) & 1 ? parameters_[j].high : parameters_[j].low;
    }
    out.push_back(kernel_at(x));
  }
  return out;
}

}  // namespace rmdp
