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

#include "rmdp/json_io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "rmdp/error.hpp"

namespace rmdp {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw InvalidInput("instance JSON: " + msg); }

void check_keys(const Json& j, std::string_view where, std::initializer_list<std::string_view> required,
                std::initializer_list<std::string_view> optional = {}) {
  if (!j.is_object()) fail(std::string(where) + " must be an object");
  for (auto key : required) {
    if (!j.contains(std::string(key))) fail(std::string(where) + " is missing \"" + std::string(key) + "\"");
  }
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (auto k : required) known = known || k == key;
    for (auto k : optional) known = known || k == key;
    if (!known) fail(std::string(where) + " has unknown field \"" + key + "\"");
  }
}

double number(const Json& j, std::string_view what) {
  if (!j.is_number()) fail(std::string(what) + " must be a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) fail(std::string(what) + " must be finite");
  return x;
}

std::size_t count(const Json& j, std::string_view what) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
    fail(std::string(what) + " must be a nonnegative integer");
  }
  return j.get<std::size_t>();
}

std::vector<double> vec(const Json& j, std::size_t n, std::string_view what) {
  if (!j.is_array() || j.size() != n) fail(std::string(what) + " must be an array of length " + std::to_string(n));
  std::vector<double> out;
  out.reserve(n);
  for (const auto& x : j) out.push_back(number(x, what));
  return out;
}

const Json& arr(const Json& j, std::size_t n, std::string_view what) {
  if (!j.is_array() || j.size() != n) fail(std::string(what) + " must be an array of length " + std::to_string(n));
  return j;
}

const Json& nonempty(const Json& j, std::string_view what) {
  if (!j.is_array() || j.empty()) fail(std::string(what) + " must be a nonempty array");
  return j;
}

Matrix matrix(const Json& j, std::size_t rows, std::size_t cols, std::string_view what) {
  arr(j, rows, what);
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const auto row = vec(j[i], cols, what);
    std::copy(row.begin(), row.end(), m.row(i).begin());
  }
  return m;
}

Tensor3 tensor(const Json& j, std::size_t n0, std::size_t n1, std::size_t n2, std::string_view what) {
  arr(j, n0, what);
  Tensor3 t(n0, n1, n2);
  for (std::size_t i = 0; i < n0; ++i) {
    const Matrix m = matrix(j[i], n1, n2, what);
    std::copy(m.flat().begin(), m.flat().end(), t.slab(i).begin());
  }
  return t;
}

Json to_json(const Matrix& m) {
  Json out = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) out.push_back(Json(std::vector<double>(m.row(i).begin(), m.row(i).end())));
  return out;
}

Json to_json(const Tensor3& t) {
  Json out = Json::array();
  for (std::size_t i = 0; i < t.dim0(); ++i) {
    Json slab = Json::array();
    for (std::size_t j = 0; j < t.dim1(); ++j) slab.push_back(Json(std::vector<double>(t.row(i, j).begin(), t.row(i, j).end())));
    out.push_back(std::move(slab));
  }
  return out;
}

std::vector<std::vector<Distribution>> factor_sets(const Json& j, std::size_t S) {
  std::vector<std::vector<Distribution>> out;
  for (const auto& f : nonempty(j, "factor_sets")) {
    std::vector<Distribution> verts;
    for (const auto& w : nonempty(f, "factor vertex list")) verts.push_back(vec(w, S, "factor vertex"));
    out.push_back(std::move(verts));
  }
  return out;
}

std::vector<std::size_t> index_list(const Json& j, std::string_view what) {
  if (!j.is_array()) fail(std::string(what) + " must be an array");
  std::vector<std::size_t> out;
  for (const auto& x : j) out.push_back(count(x, what));
  return out;
}

std::vector<Matrix> block_list(const Json& j, std::size_t A, std::size_t S) {
  std::vector<Matrix> out;
  for (const auto& b : nonempty(j, "per-state vertex list")) out.push_back(matrix(b, A, S, "state block"));
  return out;
}

UncertaintySet::Model structured_model(const Json& j, SetVariant variant, std::size_t S, std::size_t A) {
  switch (variant) {
    case SetVariant::kExplicitFinite: {
      ExplicitFinite m;
      for (const auto& k : nonempty(j.at("kernels"), "kernels")) m.kernels.emplace_back(tensor(k, S, A, S, "kernel"));
      return m;
    }
    case SetVariant::kSRectangular: {
      SRectangular m;
      for (const auto& list : arr(j.at("per_state"), S, "per_state")) m.per_state.push_back(block_list(list, A, S));
      return m;
    }
    case SetVariant::kSaRectangular: {
      SaRectangular m;
      for (const auto& per_a : arr(j.at("per_state_action"), S, "per_state_action")) {
        std::vector<std::vector<Distribution>> lists;
        for (const auto& list : arr(per_a, A, "per_state_action row")) {
          std::vector<Distribution> verts;
          for (const auto& d : nonempty(list, "pair vertex list")) verts.push_back(vec(d, S, "pair vertex"));
          lists.push_back(std::move(verts));
        }
        m.per_state_action.push_back(std::move(lists));
      }
      return m;
    }
    case SetVariant::kFactorModel: {
      auto sets = factor_sets(j.at("factor_sets"), S);
      return FactorModel{tensor(j.at("coefficients"), S, A, sets.size(), "coefficients"), std::move(sets)};
    }
    case SetVariant::kPartitioned: {
      Partitioned m;
      m.s1_states = index_list(j.at("s1_states"), "s1_states");
      m.s2_states = index_list(j.at("s2_states"), "s2_states");
      for (const auto& list : arr(j.at("s_part"), m.s1_states.size(), "s_part")) {
        m.s_part.per_state.push_back(block_list(list, A, S));
      }
      auto sets = factor_sets(j.at("factor_sets"), S);
      m.factor_part = FactorModel{tensor(j.at("coefficients"), m.s2_states.size(), A, sets.size(), "coefficients"),
                                  std::move(sets)};
      return m;
    }
    case SetVariant::kCoeffFactor: {
      CoeffFactor m;
      m.factor_sets = factor_sets(j.at("factor_sets"), S);
      const std::size_t r = m.factor_sets.size();
      for (const auto& list : arr(j.at("coeff_sets"), S, "coeff_sets")) {
        std::vector<Matrix> verts;
        for (const auto& u : nonempty(list, "coefficient vertex list")) verts.push_back(matrix(u, A, r, "coefficients"));
        m.coeff_sets.push_back(std::move(verts));
      }
      return m;
    }
    case SetVariant::kSaCoeffFactor: {
      SaCoeffFactor m;
      m.factor_sets = factor_sets(j.at("factor_sets"), S);
      const std::size_t r = m.factor_sets.size();
      for (const auto& per_a : arr(j.at("coeff_sets"), S, "coeff_sets")) {
        std::vector<std::vector<Distribution>> lists;
        for (const auto& list : arr(per_a, A, "coeff_sets row")) {
          std::vector<Distribution> verts;
          for (const auto& u : nonempty(list, "coefficient vertex list")) verts.push_back(vec(u, r, "coefficients"));
          lists.push_back(std::move(verts));
        }
        m.coeff_sets.push_back(std::move(lists));
      }
      return m;
    }
  }
  fail("unknown variant");
}

void check_variant_keys(const Json& j, SetVariant variant) {
  const std::initializer_list<std::string_view> opt = {"parametric"};
  switch (variant) {
    case SetVariant::kExplicitFinite: return check_keys(j, "uncertainty", {"variant", "kernels"}, opt);
    case SetVariant::kSRectangular: return check_keys(j, "uncertainty", {"variant", "per_state"}, opt);
    case SetVariant::kSaRectangular: return check_keys(j, "uncertainty", {"variant", "per_state_action"}, opt);
    case SetVariant::kFactorModel:
      return check_keys(j, "uncertainty", {"variant", "coefficients", "factor_sets"}, opt);
    case SetVariant::kPartitioned:
      return check_keys(j, "uncertainty",
                        {"variant", "s1_states", "s_part", "s2_states", "coefficients", "factor_sets"}, opt);
    case SetVariant::kCoeffFactor:
    case SetVariant::kSaCoeffFactor:
      return check_keys(j, "uncertainty", {"variant", "factor_sets", "coeff_sets"}, opt);
  }
}

ParamSet parametric(const Json& j, std::size_t S, std::size_t A) {
  check_keys(j, "parametric", {"parameters", "kernel_template"});
  std::vector<Parameter> params;
  std::set<std::string> names;
  for (const auto& p : arr(j.at("parameters"), j.at("parameters").size(), "parameters")) {
    check_keys(p, "parameter", {"name", "low", "high"});
    if (!p.at("name").is_string()) fail("parameter name must be a string");
    Parameter par{p.at("name").get<std::string>(), number(p.at("low"), "low"), number(p.at("high"), "high")};
    if (par.name.empty() || !(std::isalpha(static_cast<unsigned char>(par.name[0])) || par.name[0] == '_')) {
      fail("parameter name must start with a letter");
    }
    if (!names.insert(par.name).second) fail("duplicate parameter name " + par.name);
    params.push_back(std::move(par));
  }
  Tensor3 base(S, A, S);
  std::vector<Tensor3> coeffs(params.size(), Tensor3(S, A, S));
  const Json& tmpl = arr(j.at("kernel_template"), S, "kernel_template");
  for (std::size_t s = 0; s < S; ++s) {
    const Json& per_a = arr(tmpl[s], A, "kernel_template");
    for (std::size_t a = 0; a < A; ++a) {
      const Json& row = arr(per_a[a], S, "kernel_template");
      for (std::size_t t = 0; t < S; ++t) {
        AffineExpr e;
        if (row[t].is_number()) {
          e.constant = number(row[t], "kernel entry");
          e.coefficients.assign(params.size(), 0.0);
        } else if (row[t].is_string()) {
          e = parse_affine(row[t].get<std::string>(), params);
        } else {
          fail("kernel entries must be numbers or affine expressions");
        }
        base(s, a, t) = e.constant;
        for (std::size_t k = 0; k < params.size(); ++k) coeffs[k](s, a, t) = e.coefficients[k];
      }
    }
  }
  return ParamSet::affine(std::move(params), std::move(base), std::move(coeffs));
}

Json parametric_to_json(const ParamSet& params) {
  if (params.kind() != ParamSet::Kind::kAffine) return Json();
  const std::size_t S = params.num_states();
  const std::size_t A = params.num_actions();
  Json out;
  out["parameters"] = Json::array();
  for (const auto& p : params.parameters()) out["parameters"].push_back({{"name", p.name}, {"low", p.low}, {"high", p.high}});
  Json tmpl = Json::array();
  std::vector<double> c(params.num_parameters());
  for (std::size_t s = 0; s < S; ++s) {
    Json per_a = Json::array();
    for (std::size_t a = 0; a < A; ++a) {
      Json row = Json::array();
      for (std::size_t t = 0; t < S; ++t) {
        for (std::size_t k = 0; k < c.size(); ++k) c[k] = params.affine_coefficients()[k](s, a, t);
        row.push_back(format_affine(params.affine_base()(s, a, t), c, params.parameters()));
      }
      per_a.push_back(std::move(row));
    }
    tmpl.push_back(std::move(per_a));
  }
  out["kernel_template"] = std::move(tmpl);
  return out;
}

// The hull of the images of the box corners equals the image of the box.
UncertaintySet corner_hull(const ParamSet& params) {
  std::vector<TransitionKernel> unique;
  for (auto& k : params.probe_kernels()) {
    bool dup = false;
    for (const auto& u : unique) dup = dup || sup_norm_diff(u.probs().flat(), k.probs().flat()) <= kDedupTol;
    if (!dup) unique.push_back(std::move(k));
  }
  return UncertaintySet(params.num_states(), params.num_actions(), ExplicitFinite{std::move(unique)});
}

}  // namespace

AffineExpr parse_affine(std::string_view text, const std::vector<Parameter>& parameters) {
  AffineExpr out;
  out.coefficients.assign(parameters.size(), 0.0);
  const std::string s(text);
  std::size_t i = 0;
  auto skip = [&] {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  };
  auto bad = [&](const std::string& why) -> void { fail("affine expression \"" + s + "\": " + why); };
  auto read_name = [&]() -> std::size_t {
    const std::size_t start = i;
    while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
    const std::string name = s.substr(start, i - start);
    for (std::size_t k = 0; k < parameters.size(); ++k) {
      if (parameters[k].name == name) return k;
    }
    bad("unknown parameter " + name);
    return 0;
  };
  auto read_number = [&]() -> double {
    const char* begin = s.c_str() + i;
    char* end = nullptr;
    const double x = std::strtod(begin, &end);
    if (end == begin) bad("expected a number");
    i += static_cast<std::size_t>(end - begin);
    if (!std::isfinite(x)) bad("number out of range");
    return x;
  };
  bool first = true;
  for (;;) {
    skip();
    if (i >= s.size()) {
      if (first) bad("empty");
      break;
    }
    double sign = 1.0;
    if (!first) {
      if (s[i] != '+' && s[i] != '-') bad("expected + or -");
      sign = s[i] == '-' ? -1.0 : 1.0;
      ++i;
      skip();
    }
    while (i < s.size() && (s[i] == '+' || s[i] == '-')) {
      if (s[i] == '-') sign = -sign;
      ++i;
      skip();
    }
    if (i >= s.size()) bad("dangling operator");
    first = false;
    if (std::isalpha(static_cast<unsigned char>(s[i])) || s[i] == '_') {
      const std::size_t k = read_name();
      double c = 1.0;
      skip();
      if (i < s.size() && s[i] == '*') {
        ++i;
        skip();
        c = read_number();
      }
      out.coefficients[k] += sign * c;
    } else {
      const double c = read_number();
      skip();
      if (i < s.size() && s[i] == '*') {
        ++i;
        skip();
        out.coefficients[read_name()] += sign * c;
      } else {
        out.constant += sign * c;
      }
    }
  }
  return out;
}

std::string format_affine(double constant, std::span<const double> coefficients,
                          const std::vector<Parameter>& parameters) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", constant);
  std::string out = buf;
  for (std::size_t k = 0; k < coefficients.size(); ++k) {
    if (coefficients[k] == 0.0) continue;
    std::snprintf(buf, sizeof buf, "%.17g", coefficients[k]);
    out += " + ";
    out += buf;
    out += "*" + parameters[k].name;
  }
  return out;
}

NamedInstance instance_from_json(const Json& j) {
  check_keys(j, "instance", {"name", "num_states", "num_actions", "gamma", "mu", "rewards", "uncertainty"},
             {"expected", "provenance"});
  if (!j.at("name").is_string()) fail("name must be a string");
  const std::size_t S = count(j.at("num_states"), "num_states");
  const std::size_t A = count(j.at("num_actions"), "num_actions");
  if (S == 0 || A == 0) fail("num_states and num_actions must be positive");
  MdpInstance mdp(tensor(j.at("rewards"), S, A, S, "rewards"), number(j.at("gamma"), "gamma"),
                  vec(j.at("mu"), S, "mu"));

  const Json& u = j.at("uncertainty");
  if (!u.is_object() || !u.contains("variant") || !u.at("variant").is_string()) {
    fail("uncertainty needs a string \"variant\"");
  }
  const std::string variant = u.at("variant").get<std::string>();
  std::optional<ParamSet> params;
  std::optional<UncertaintySet> set;
  if (variant == "parametric") {
    check_keys(u, "uncertainty", {"variant", "parameters", "kernel_template"});
    Json inner = {{"parameters", u.at("parameters")}, {"kernel_template", u.at("kernel_template")}};
    params = parametric(inner, S, A);
    set = corner_hull(*params);
  } else {
    const auto v = parse_set_variant(variant);
    if (!v) fail("unknown variant \"" + variant + "\"");
    check_variant_keys(u, *v);
    set = UncertaintySet(S, A, structured_model(u, *v, S, A));
    if (u.contains("parametric")) params = parametric(u.at("parametric"), S, A);
  }

  NamedInstance inst{j.at("name").get<std::string>(), std::move(mdp), std::move(*set), std::move(params), "", {}};
  if (j.contains("provenance")) {
    if (!j.at("provenance").is_string()) fail("provenance must be a string");
    inst.provenance = j.at("provenance").get<std::string>();
  }
  if (j.contains("expected")) {
    if (!j.at("expected").is_array()) fail("expected must be an array");
    for (const auto& e : j.at("expected")) {
      check_keys(e, "expected entry", {"quantity", "value", "tolerance"}, {"provenance"});
      if (!e.at("quantity").is_string()) fail("quantity must be a string");
      ExpectedValue ev{e.at("quantity").get<std::string>(), number(e.at("value"), "value"),
                       number(e.at("tolerance"), "tolerance"), ""};
      if (ev.tolerance < 0.0) fail("tolerance must be nonnegative");
      if (e.contains("provenance")) {
        if (!e.at("provenance").is_string()) fail("provenance must be a string");
        ev.provenance = e.at("provenance").get<std::string>();
      }
      inst.expected.push_back(std::move(ev));
    }
  }
  return inst;
}

NamedInstance parse_instance(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(e.what());
  }
  try {
    return instance_from_json(j);
  } catch (const Json::exception& e) {
    fail(e.what());
  }
}

NamedInstance load_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str());
}

Json instance_to_json(const NamedInstance& inst) {
  const std::size_t S = inst.mdp.num_states();
  Json j;
  j["name"] = inst.name;
  j["num_states"] = S;
  j["num_actions"] = inst.mdp.num_actions();
  j["gamma"] = inst.mdp.discount();
  j["mu"] = std::vector<double>(inst.mdp.initial_dist().begin(), inst.mdp.initial_dist().end());
  j["rewards"] = to_json(inst.mdp.rewards());

  Json u;
  u["variant"] = std::string(to_string(inst.set.variant()));
  auto dists = [](const std::vector<Distribution>& list) { return Json(list); };
  auto factors = [&](const std::vector<std::vector<Distribution>>& sets) {
    Json out = Json::array();
    for (const auto& f : sets) out.push_back(dists(f));
    return out;
  };
  auto blocks = [](const std::vector<Matrix>& list) {
    Json out = Json::array();
    for (const auto& b : list) out.push_back(to_json(b));
    return out;
  };
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ExplicitFinite>) {
          u["kernels"] = Json::array();
          for (const auto& k : m.kernels) u["kernels"].push_back(to_json(k.probs()));
        } else if constexpr (std::is_same_v<T, SRectangular>) {
          u["per_state"] = Json::array();
          for (const auto& list : m.per_state) u["per_state"].push_back(blocks(list));
        } else if constexpr (std::is_same_v<T, SaRectangular>) {
          u["per_state_action"] = Json::array();
          for (const auto& per_a : m.per_state_action) {
            Json row = Json::array();
            for (const auto& list : per_a) row.push_back(dists(list));
            u["per_state_action"].push_back(std::move(row));
          }
        } else if constexpr (std::is_same_v<T, FactorModel>) {
          u["coefficients"] = to_json(m.coefficients);
          u["factor_sets"] = factors(m.factor_sets);
        } else if constexpr (std::is_same_v<T, Partitioned>) {
          u["s1_states"] = m.s1_states;
          u["s2_states"] = m.s2_states;
          u["s_part"] = Json::array();
          for (const auto& list : m.s_part.per_state) u["s_part"].push_back(blocks(list));
          u["coefficients"] = to_json(m.factor_part.coefficients);
          u["factor_sets"] = factors(m.factor_part.factor_sets);
        } else if constexpr (std::is_same_v<T, CoeffFactor>) {
          u["factor_sets"] = factors(m.factor_sets);
          u["coeff_sets"] = Json::array();
          for (const auto& list : m.coeff_sets) u["coeff_sets"].push_back(blocks(list));
        } else if constexpr (std::is_same_v<T, SaCoeffFactor>) {
          u["factor_sets"] = factors(m.factor_sets);
          u["coeff_sets"] = Json::array();
          for (const auto& per_a : m.coeff_sets) {
            Json row = Json::array();
            for (const auto& list : per_a) row.push_back(dists(list));
            u["coeff_sets"].push_back(std::move(row));
          }
        }
      },
      inst.set.model());
  if (inst.params && inst.params->kind() == ParamSet::Kind::kAffine) u["parametric"] = parametric_to_json(*inst.params);
  j["uncertainty"] = std::move(u);
  if (!inst.provenance.empty()) j["provenance"] = inst.provenance;
  j["expected"] = Json::array();
  for (const auto& e : inst.expected) {
    Json ej = {{"quantity", e.quantity}, {"value", e.value}, {"tolerance", e.tolerance}};
    if (!e.provenance.empty()) ej["provenance"] = e.provenance;
    j["expected"].push_back(std::move(ej));
  }
  return j;
}

Policy policy_from_json(const Json& j) {
  const Json* m = &j;
  if (j.is_object()) {
    check_keys(j, "policy file", {"policy"});
    m = &j.at("policy");
  }
  const Json& rows = nonempty(*m, "policy");
  const std::size_t A = nonempty(rows[0], "policy row").size();
  return Policy(matrix(rows, rows.size(), A, "policy row"));
}

Json policy_to_json(const Policy& policy) { return Json{{"policy", to_json(policy.probs())}}; }

Policy load_policy_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  try {
    return policy_from_json(Json::parse(in));
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("policy JSON: ") + e.what());
  }
}

Policy parse_inline_policy(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::string s(text);
  std::stringstream states(s);
  std::string row;
  while (std::getline(states, row, '/')) {
    std::vector<double> probs;
    std::stringstream entries(row);
    std::string entry;
    while (std::getline(entries, entry, ',')) {
      char* end = nullptr;
      const double x = std::strtod(entry.c_str(), &end);
      while (end && *end && std::isspace(static_cast<unsigned char>(*end))) ++end;
      if (entry.empty() || end == entry.c_str() || (end && *end)) {
        throw InvalidInput("inline policy: cannot parse \"" + entry + "\"");
      }
      probs.push_back(x);
    }
    if (probs.empty()) throw InvalidInput("inline policy: empty state row");
    if (!rows.empty() && probs.size() != rows.front().size()) {
      throw InvalidInput("inline policy: rows differ in length");
    }
    rows.push_back(std::move(probs));
  }
  if (rows.empty()) throw InvalidInput("inline policy is empty");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
  return Policy(std::move(m));
}

std::string format_inline_policy(const Policy& policy) {
  std::string out;
  char buf[64];
  for (std::size_t s = 0; s < policy.num_states(); ++s) {
    if (s > 0) out += '/';
    for (std::size_t a = 0; a < policy.num_actions(); ++a) {
      if (a > 0) out += ',';
      std::snprintf(buf, sizeof buf, "%.17g", policy(s, a));
      out += buf;
    }
  }
  return out;
}

}  // namespace rmdp
