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
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "rmdp/mdp.hpp"
#include "rmdp/uncertainty.hpp"

namespace rmdp {

enum class SspMode { kStrongS, kStrongSa, kWeakS, kWeakSa };

std::string_view to_string(SspMode mode);
std::optional<SspMode> parse_ssp_mode(std::string_view name);

/// Objective V[s'] shared by every state-action pair.
struct ValueObjective {
  std::vector<double> v;
};

/// Objective pi[s][a] V[s'] at each state.
struct PolicyValueObjective {
  Policy policy;
  std::vector<double> v;
};

/// Full tensor V[s][a][s'] for the strong properties, or one of the two
/// reduced forms for the weak ones.
using ObjectiveTensor = std::variant<Tensor3, ValueObjective, PolicyValueObjective>;

struct SspVerdict {
  bool holds = false;
  /// A kernel minimizing every coordinate simultaneously.
  std::optional<TransitionKernel> certificate;
  /// A falsifying objective, from a failed check or a sampling search.
  std::optional<ObjectiveTensor> witness;
  /// Per state (s modes) or per pair s * A + a (sa modes): indices into
  /// enumerate_vertices(set) within kArgminTieTol of the minimum. Empty
  /// when the verdict came from the constructive path.
  std::vector<std::vector<std::size_t>> per_coordinate_argmins;
  std::size_t samples_checked = 0;
  /// True when the (variant, mode) pair is guaranteed to hold by structure.
  bool structural = false;
};

/// Whether the family always satisfies the property for its model class.
bool structurally_guaranteed(SetVariant variant, SspMode mode);

/// Decides the property for one objective. The set's vertices are
/// enumerated once at construction; above the cap, checks fall back to a
/// constructive certificate for structured models and throw
/// BudgetExceeded otherwise.
class SspChecker {
 public:
  explicit SspChecker(const UncertaintySet& set, std::size_t cap = kDefaultEnumerationCap);

  SspVerdict check(SspMode mode, const ObjectiveTensor& objective) const;

  bool enumerated() const { return enumerated_; }
  const std::vector<TransitionKernel>& vertices() const { return vertices_; }

 private:
  SspVerdict check_by_vertices(SspMode mode, const ObjectiveTensor& objective) const;
  SspVerdict check_constructive(SspMode mode, const ObjectiveTensor& objective) const;

  const UncertaintySet* set_;
  bool enumerated_ = false;
  std::vector<TransitionKernel> vertices_;
};

SspVerdict check_strong_ssp_s(const UncertaintySet& set, const Tensor3& V);
SspVerdict check_strong_ssp_sa(const UncertaintySet& set, const Tensor3& V);
SspVerdict check_weak_ssp_s(const UncertaintySet& set, const Policy& policy,
                            std::span<const double> v);
SspVerdict check_weak_ssp_sa(const UncertaintySet& set, std::span<const double> v);

/// Draws `num_samples` objectives (entries uniform on [-1, 1], policies
/// uniform on the simplex) from per-sample seeds derived from `seed` and
/// returns the lowest-index falsifying sample. A "holds" result is sampling
/// evidence unless `structural` is set.
SspVerdict falsify_ssp(const UncertaintySet& set, SspMode mode, std::size_t num_samples,
                       std::uint64_t seed);

/// The objective drawn for sample `index` of falsify_ssp.
ObjectiveTensor sample_objective(std::size_t num_states, std::size_t num_actions, SspMode mode,
                                 std::uint64_t seed, std::size_t index);

}  // namespace rmdp
