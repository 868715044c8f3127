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

#include <string>
#include <string_view>

#include <json.hpp>

#include "rmdp/instances.hpp"
#include "rmdp/mdp.hpp"
#include "rmdp/param_set.hpp"
#include "rmdp/uncertainty.hpp"

namespace rmdp {

using Json = nlohmann::json;

/// Parses one affine kernel entry such as "0.25 + 0.5*p - 1*q". Terms are
/// numbers, parameter names, or products of one number and one name.
struct AffineExpr {
  double constant = 0.0;
  std::vector<double> coefficients;  // one per parameter
};
AffineExpr parse_affine(std::string_view text, const std::vector<Parameter>& parameters);
std::string format_affine(double constant, std::span<const double> coefficients,
                          const std::vector<Parameter>& parameters);

/// Strict parsers: unknown fields, missing fields and shape mismatches
/// throw InvalidInput.
NamedInstance instance_from_json(const Json& j);
NamedInstance parse_instance(std::string_view text);
NamedInstance load_instance_file(const std::string& path);

Json instance_to_json(const NamedInstance& instance);

/// Accepts a bare S x A array or {"policy": [...]}.
Policy policy_from_json(const Json& j);
Json policy_to_json(const Policy& policy);
Policy load_policy_file(const std::string& path);

/// "1,0/0.5,0.5": one row per state separated by '/'.
Policy parse_inline_policy(std::string_view text);
std::string format_inline_policy(const Policy& policy);

}  // namespace rmdp
