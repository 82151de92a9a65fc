// Copyright 2026 The qpv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// JSON forms of processes, strategies, PMPV ensembles, POVMs and results.
// Output is canonical: keys sorted, floats printed with 17 significant digits.

#ifndef QPV_IO_HPP
#define QPV_IO_HPP

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "qpv/meas_verify.hpp"
#include "qpv/oracle.hpp"

namespace qpv::io {

using json = nlohmann::json;

//=============================================================================
// Canonical writer
//=============================================================================

namespace detail {

inline void write_number(std::string& out, double v) {
  if (!std::isfinite(v)) {
    out += "null";
    return;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
  out += buf;
}

inline void write(std::string& out, const json& j, int level) {
  const auto pad = [&](int l) { out.append(static_cast<std::size_t>(2 * l), ' '); };
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // std::map order: sorted
        if (!first) out += ",\n";
        first = false;
        pad(level + 1);
        out += json(it.key()).dump();
        out += ": ";
        write(out, it.value(), level + 1);
      }
      out += "\n";
      pad(level);
      out += "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      bool scalar = true;
      for (const auto& e : j) scalar = scalar && !e.is_structured();
      if (scalar) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          write(out, j[i], level + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        pad(level + 1);
        write(out, j[i], level + 1);
      }
      out += "\n";
      pad(level);
      out += "]";
      return;
    }
    case json::value_t::number_float:
      write_number(out, j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

}  // namespace detail

inline std::string canonical(const json& j) {
  std::string out;
  detail::write(out, j, 0);
  out += "\n";
  return out;
}

inline json parse_text(const std::string& text, const std::string& what = "document") {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(what, std::string("invalid JSON: ") + e.what());
  }
}

inline json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str(), path);
}

//=============================================================================
// Field helpers
//=============================================================================

inline const json& need(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ParseError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(path.empty() ? key : path + "." + key, "missing field");
  return *it;
}

inline std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

inline std::string index(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

inline double get_double(const json& j, const std::string& path) {
  if (!j.is_number()) throw ParseError(path, "expected a number");
  return j.get<double>();
}

inline std::size_t get_size(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    throw ParseError(path, "expected a non-negative integer");
  }
  return j.get<std::size_t>();
}

inline std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ParseError(path, "expected a string");
  return j.get<std::string>();
}

inline Dims get_dims(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ParseError(path, "expected a non-empty list of dimensions");
  Dims d;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::size_t x = get_size(j[i], index(path, i));
    if (x == 0) throw ParseError(index(path, i), "dimension must be positive");
    d.push_back(x);
  }
  return d;
}

//=============================================================================
// Complex arrays
//=============================================================================

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx get_complex(const json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw ParseError(path, "expected a complex number [re, im]");
}

inline json vector_json(const CVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(to_json(v(i)));
  return a;
}

inline CVector get_vector(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ParseError(path, "expected a list of complex amplitudes");
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = get_complex(j[i], index(path, i));
  }
  return v;
}

inline json matrix_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline CMatrix get_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ParseError(path, "expected a matrix (list of rows)");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array()) throw ParseError(index(path, r), "expected a row");
    if (r == 0) cols = j[r].size();
    if (j[r].size() != cols || cols == 0) throw ParseError(index(path, r), "ragged matrix row");
  }
  CMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          get_complex(j[r][c], index(index(path, r), c));
    }
  }
  return m;
}

//=============================================================================
// Named kets
//=============================================================================

inline CVector named_ket(const std::string& name) {
  const double r = 1.0 / std::sqrt(2.0);
  const cplx i(0.0, 1.0);
  CVector v(2);
  if (name == "0") {
    v << 1, 0;
  } else if (name == "1") {
    v << 0, 1;
  } else if (name == "+") {
    v << r, r;
  } else if (name == "-" || name == "−") {
    v << r, -r;
  } else if (name == "top") {
    v << r, i * r;
  } else if (name == "bot") {
    v << i * r, r;
  } else {
    throw DomainError("unknown named ket '" + name + "'");
  }
  return v;
}

inline const std::vector<std::string>& ket_names() {
  static const std::vector<std::string> k = {"0", "1", "+", "-", "top", "bot"};
  return k;
}

namespace detail {

// Names of single-qubit kets whose product density equals rho, if any.
inline std::optional<std::vector<std::string>> as_named_product(const Operator& rho) {
  std::size_t n = 0;
  while ((std::size_t{1} << n) < rho.dim()) ++n;
  if ((std::size_t{1} << n) != rho.dim() || n == 0 || n > 4) return std::nullopt;
  std::vector<std::string> names;
  // Peel qubit by qubit: the reduced state of qubit q must be a named ket.
  CMatrix rest = rho.matrix();
  for (std::size_t q = 0; q < n; ++q) {
    const std::size_t m = n - q;
    const Operator cur(rest, qubit_dims(m));
    const Operator first = partial_trace(cur, {0});
    std::optional<std::string> hit;
    for (const auto& nm : ket_names()) {
      const CVector k = named_ket(nm);
      if (max_abs(first.matrix() - k * k.adjoint()) <= tol::structural) {
        hit = nm;
        break;
      }
    }
    if (!hit) return std::nullopt;
    names.push_back(*hit);
    if (m == 1) break;
    std::vector<std::size_t> keep;
    for (std::size_t k = 1; k < m; ++k) keep.push_back(k);
    rest = partial_trace(cur, keep).matrix();
  }
  CVector prod = CVector::Ones(1);
  for (const auto& nm : names) prod = kron(prod, named_ket(nm));
  if (max_abs(rho.matrix() - prod * prod.adjoint()) > tol::structural) return std::nullopt;
  return names;
}

}  // namespace detail

/// State spec: named ket, list of named kets (product), {"vector": ...} or
/// {"matrix": ...}.
inline Operator get_state(const json& j, const Dims* dims, const std::string& path) {
  try {
    if (j.is_string()) {
      const CVector v = named_ket(j.get<std::string>());
      return Operator(v * v.adjoint(), Dims{2}, {Flag::yes, Flag::unknown, Flag::unknown});
    }
    if (j.is_array() && !j.empty() && j[0].is_string()) {
      CVector v = CVector::Ones(1);
      for (std::size_t i = 0; i < j.size(); ++i) {
        v = kron(v, named_ket(get_string(j[i], index(path, i))));
      }
      return Operator(v * v.adjoint(), qubit_dims(j.size()), {Flag::yes, Flag::unknown, Flag::unknown});
    }
    if (j.is_object() && j.contains("vector")) {
      const CVector v = get_vector(j["vector"], join(path, "vector"));
      const Dims d = dims ? *dims : Dims{static_cast<std::size_t>(v.size())};
      const PureState s = PureState::normalized(v, d);
      return s.density();
    }
    if (j.is_object() && j.contains("matrix")) {
      const CMatrix m = get_matrix(j["matrix"], join(path, "matrix"));
      const Dims d = dims ? *dims : Dims{static_cast<std::size_t>(m.rows())};
      return Operator(m, d);
    }
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(path, e.what());
  }
  throw ParseError(path, "expected a named ket, list of named kets, {vector} or {matrix}");
}

inline json state_json(const Operator& rho) {
  if (auto names = detail::as_named_product(rho)) {
    if (names->size() == 1) return names->front();
    return json(*names);
  }
  return json{{"matrix", matrix_json(rho.matrix())}};
}

//=============================================================================
// Processes
//=============================================================================

inline json noise_json(const NoiseSpec& spec) {
  struct {
    json operator()(const Depolarizing& n) const { return {{"model", "depolarizing"}, {"p", n.p}}; }
    json operator()(const UnitaryOverrotation& n) const {
      return {{"model", "overrotation"}, {"axis", n.axis.str()}, {"angle", n.angle}};
    }
    json operator()(const AmplitudeDamping& n) const {
      return {{"model", "amplitude_damping"}, {"gamma", n.gamma}};
    }
    json operator()(const LossyFilter& n) const {
      return {{"model", "lossy_filter"}, {"K", matrix_json(n.k)}};
    }
  } v;
  return std::visit(v, spec);
}

inline NoiseSpec get_noise(const json& j, const std::string& path) {
  const std::string model = get_string(need(j, "model", path), join(path, "model"));
  if (model == "depolarizing") return Depolarizing{get_double(need(j, "p", path), join(path, "p"))};
  if (model == "overrotation") {
    const std::string ax = get_string(need(j, "axis", path), join(path, "axis"));
    try {
      return UnitaryOverrotation{PauliString::parse(ax),
                                 get_double(need(j, "angle", path), join(path, "angle"))};
    } catch (const DomainError& e) {
      throw ParseError(join(path, "axis"), e.what());
    }
  }
  if (model == "amplitude_damping") {
    return AmplitudeDamping{get_double(need(j, "gamma", path), join(path, "gamma"))};
  }
  if (model == "lossy_filter") return LossyFilter{get_matrix(need(j, "K", path), join(path, "K"))};
  throw ParseError(join(path, "model"), "unknown noise model '" + model + "'");
}

inline CliffordCircuit get_circuit(const json& j, const std::string& path) {
  const std::size_t n = get_size(need(j, "n", path), join(path, "n"));
  CliffordCircuit c(n);
  const json& gates = need(j, "gates", path);
  if (!gates.is_array()) throw ParseError(join(path, "gates"), "expected a list");
  for (std::size_t i = 0; i < gates.size(); ++i) {
    const std::string gp = index(join(path, "gates"), i);
    const std::string name = get_string(need(gates[i], "gate", gp), join(gp, "gate"));
    const json& qs = need(gates[i], "qubits", gp);
    if (!qs.is_array() || qs.empty() || qs.size() > 2) {
      throw ParseError(join(gp, "qubits"), "expected one or two qubit indices");
    }
    try {
      const GateKind k = parse_gate_kind(name);
      const std::size_t q0 = get_size(qs[0], join(gp, "qubits[0]"));
      const std::size_t q1 = qs.size() > 1 ? get_size(qs[1], join(gp, "qubits[1]")) : 0;
      c.add(k, q0, q1);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(gp, e.what());
    }
  }
  return c;
}

inline json circuit_json(const CliffordCircuit& c) {
  json gates = json::array();
  for (const auto& g : c.gates()) {
    json q = json::array({g.q0});
    if (g.two_qubit()) q.push_back(g.q1);
    gates.push_back({{"gate", gate_name(g.kind)}, {"qubits", q}});
  }
  return {{"n", c.num_qubits()}, {"gates", gates}};
}

inline json process_json(const QuantumProcess& e) {
  json mats = json::array();
  for (const auto& k : e.kraus_ops()) mats.push_back(matrix_json(k));
  json j{{"kind", e.kind() == QuantumProcess::Kind::unitary ? "unitary" : "kraus"},
         {"matrices", mats},
         {"dims", e.dims_in()}};
  if (e.dims_out() != e.dims_in()) j["dims_out"] = e.dims_out();
  return j;
}

/// {"kind", "matrices", "dims"[, "dims_out"]}, {"gate": "H"}, {"canned": name}
/// or {"circuit": {...}}, each optionally with "noise".
inline QuantumProcess get_process(const json& j, const std::string& path = "process") {
  if (!j.is_object()) throw ParseError(path, "expected an object");
  std::optional<QuantumProcess> base;
  try {
    if (j.contains("canned")) {
      base = canned_target(get_string(j["canned"], join(path, "canned")));
    } else if (j.contains("gate")) {
      const GateKind k = parse_gate_kind(get_string(j["gate"], join(path, "gate")));
      CliffordCircuit c(k == GateKind::CNOT || k == GateKind::CZ ? 2 : 1);
      c.add(k, 0, 1);
      base = QuantumProcess::unitary(circuit_unitary(c));
    } else if (j.contains("circuit")) {
      base = QuantumProcess::unitary(circuit_unitary(get_circuit(j["circuit"], join(path, "circuit"))));
    } else {
      const std::string kind = get_string(need(j, "kind", path), join(path, "kind"));
      const json& mats = need(j, "matrices", path);
      if (!mats.is_array() || mats.empty()) throw ParseError(join(path, "matrices"), "expected a list");
      std::vector<CMatrix> ops;
      for (std::size_t i = 0; i < mats.size(); ++i) {
        ops.push_back(get_matrix(mats[i], index(join(path, "matrices"), i)));
      }
      const Dims din = j.contains("dims") ? get_dims(j["dims"], join(path, "dims"))
                                          : Dims{static_cast<std::size_t>(ops[0].cols())};
      const Dims dout = j.contains("dims_out") ? get_dims(j["dims_out"], join(path, "dims_out")) : din;
      if (kind == "unitary") {
        if (ops.size() != 1) throw ParseError(join(path, "matrices"), "unitary needs one matrix");
        base = QuantumProcess::unitary(Operator(ops[0], din));
      } else if (kind == "kraus") {
        base = QuantumProcess::kraus(std::move(ops), din, dout);
      } else {
        throw ParseError(join(path, "kind"), "expected 'unitary' or 'kraus'");
      }
    }
    if (j.contains("noise")) return make_noise(*base, get_noise(j["noise"], join(path, "noise")));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(path, e.what());
  }
  return *base;
}

//=============================================================================
// Strategies
//=============================================================================

inline json basis_json(const QubitBasis& b) {
  if (b.label != 'A') return std::string(1, b.label);
  return {{"axis", json::array({b.axis[0], b.axis[1], b.axis[2]})}};
}

inline QubitBasis get_basis(const json& j, const std::string& path) {
  try {
    if (j.is_string()) {
      const std::string s = j.get<std::string>();
      if (s.size() != 1) throw ParseError(path, "expected one of I, X, Y, Z");
      return QubitBasis::pauli(s[0]);
    }
    const json& ax = need(j, "axis", path);
    if (!ax.is_array() || ax.size() != 3) throw ParseError(join(path, "axis"), "expected 3 numbers");
    return QubitBasis::along({get_double(ax[0], join(path, "axis[0]")),
                              get_double(ax[1], join(path, "axis[1]")),
                              get_double(ax[2], join(path, "axis[2]"))});
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(path, e.what());
  }
}

inline json local_json(const LocalSettings& ls) {
  json bases = json::array();
  for (const auto& b : ls.bases) bases.push_back(basis_json(b));
  json checks = json::array();
  for (const auto& c : ls.checks) {
    checks.push_back({{"qubits", c.qubits}, {"monomials", c.monomials}, {"sign", c.sign}});
  }
  return {{"bases", bases}, {"checks", checks}};
}

inline LocalSettings get_local(const json& j, const std::string& path) {
  LocalSettings ls;
  const json& bases = need(j, "bases", path);
  if (!bases.is_array()) throw ParseError(join(path, "bases"), "expected a list");
  for (std::size_t i = 0; i < bases.size(); ++i) {
    ls.bases.push_back(get_basis(bases[i], index(join(path, "bases"), i)));
  }
  const json& checks = need(j, "checks", path);
  if (!checks.is_array()) throw ParseError(join(path, "checks"), "expected a list");
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const std::string cp = index(join(path, "checks"), i);
    ParityCheck pc;
    const json& qs = need(checks[i], "qubits", cp);
    if (!qs.is_array()) throw ParseError(join(cp, "qubits"), "expected a list");
    for (std::size_t k = 0; k < qs.size(); ++k) pc.qubits.push_back(get_size(qs[k], index(join(cp, "qubits"), k)));
    if (checks[i].contains("monomials")) {
      const json& ms = checks[i]["monomials"];
      if (!ms.is_array()) throw ParseError(join(cp, "monomials"), "expected a list");
      for (std::size_t k = 0; k < ms.size(); ++k) {
        if (!ms[k].is_array()) throw ParseError(index(join(cp, "monomials"), k), "expected a list");
        std::vector<std::size_t> mono;
        for (std::size_t u = 0; u < ms[k].size(); ++u) {
          mono.push_back(get_size(ms[k][u], index(index(join(cp, "monomials"), k), u)));
        }
        pc.monomials.push_back(std::move(mono));
      }
    }
    if (checks[i].contains("sign")) {
      const json& s = checks[i]["sign"];
      if (!s.is_number_integer() || (s.get<int>() != 1 && s.get<int>() != -1)) {
        throw ParseError(join(cp, "sign"), "expected +1 or -1");
      }
      pc.sign = s.get<int>();
    }
    ls.checks.push_back(std::move(pc));
  }
  return ls;
}

inline json strategy_json(const AAPVStrategy& s) {
  json tests = json::array();
  for (const auto& [p, t] : s.tests()) {
    json jt{{"p", p}};
    if (t.pauli()) {
      jt["pauli"] = t.pauli()->str();
    } else if (t.form() == Test::Form::local) {
      jt["local"] = local_json(*t.local());
    } else {
      json br = json::array();
      for (const auto& b : t.branches()) {
        br.push_back({{"ancilla", matrix_json(b.ancilla.matrix())},
                      {"system", matrix_json(b.system.matrix())}});
      }
      jt["one_way"] = {{"n_ancilla", t.one_way_ancilla_qubits()}, {"branches", br}};
    }
    tests.push_back(std::move(jt));
  }
  return {{"label", s.label()},
          {"n_ancilla", s.n_ancilla()},
          {"n_system", s.n_system()},
          {"target", {{"dims", s.target().dims()}, {"state", vector_json(s.target().amplitudes())}}},
          {"tests", tests}};
}

inline PureState get_target(const json& j, const std::string& path) {
  try {
    if (j.contains("canned")) return choi_pure_state(canned_target(get_string(j["canned"], join(path, "canned"))));
    if (j.contains("circuit")) {
      return choi_pure_state(
          QuantumProcess::unitary(circuit_unitary(get_circuit(j["circuit"], join(path, "circuit")))));
    }
    if (j.contains("process")) return choi_pure_state(get_process(j["process"], join(path, "process")));
    const CVector v = get_vector(need(j, "state", path), join(path, "state"));
    const Dims d = j.contains("dims") ? get_dims(j["dims"], join(path, "dims"))
                                      : Dims{static_cast<std::size_t>(v.size())};
    return PureState::normalized(v, d);
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(path, e.what());
  }
}

inline AAPVStrategy get_strategy(const json& j, const std::string& path = "strategy") {
  if (!j.is_object()) throw ParseError(path, "expected an object");
  const std::size_t na = get_size(need(j, "n_ancilla", path), join(path, "n_ancilla"));
  const std::size_t ns = get_size(need(j, "n_system", path), join(path, "n_system"));
  const PureState target = get_target(need(j, "target", path), join(path, "target"));
  const std::string label = j.contains("label") ? get_string(j["label"], join(path, "label")) : "";
  const json& tests = need(j, "tests", path);
  if (!tests.is_array()) throw ParseError(join(path, "tests"), "expected a list");
  std::vector<WeightedTest> wt;
  for (std::size_t i = 0; i < tests.size(); ++i) {
    const std::string tp = index(join(path, "tests"), i);
    const double p = get_double(need(tests[i], "p", tp), join(tp, "p"));
    try {
      if (tests[i].contains("pauli")) {
        wt.push_back({p, Test::from_pauli(PauliString::parse(get_string(tests[i]["pauli"], join(tp, "pauli"))))});
      } else if (tests[i].contains("local")) {
        wt.push_back({p, Test::from_local(get_local(tests[i]["local"], join(tp, "local")))});
      } else if (tests[i].contains("one_way")) {
        const json& ow = tests[i]["one_way"];
        const std::string op = join(tp, "one_way");
        const std::size_t nwa = get_size(need(ow, "n_ancilla", op), join(op, "n_ancilla"));
        const json& br = need(ow, "branches", op);
        if (!br.is_array()) throw ParseError(join(op, "branches"), "expected a list");
        std::vector<OneWayBranch> branches;
        for (std::size_t b = 0; b < br.size(); ++b) {
          const std::string bp = index(join(op, "branches"), b);
          const CMatrix a = get_matrix(need(br[b], "ancilla", bp), join(bp, "ancilla"));
          const CMatrix sm = get_matrix(need(br[b], "system", bp), join(bp, "system"));
          branches.push_back({Operator(a, qubit_dims(nwa)),
                              Operator(sm, qubit_dims(na + ns - nwa))});
        }
        wt.push_back({p, Test::from_one_way(std::move(branches), nwa)});
      } else {
        throw ParseError(tp, "expected one of 'pauli', 'local', 'one_way'");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(tp, e.what());
    }
  }
  try {
    return AAPVStrategy(std::move(wt), target, na, ns, label);
  } catch (const Error& e) {
    throw ParseError(path, e.what());
  }
}

//=============================================================================
// PMPV
//=============================================================================

inline json pmpv_json(const PMPVStrategy& x) {
  json entries = json::array();
  for (const auto& e : x.entries()) {
    entries.push_back({{"p", e.p},
                       {"input", state_json(e.input)},
                       {"pass_effect", matrix_json(e.effect.matrix())}});
  }
  json j{{"d", x.d()}, {"entries", entries}};
  if (x.target()) {
    j["target"] = {{"dims", x.target()->dims()}, {"state", vector_json(x.target()->amplitudes())}};
  }
  return j;
}

inline PMPVStrategy get_pmpv(const json& j, const std::string& path = "pmpv") {
  const std::size_t d = get_size(need(j, "d", path), join(path, "d"));
  const json& entries = need(j, "entries", path);
  if (!entries.is_array() || entries.empty()) throw ParseError(join(path, "entries"), "expected a list");
  std::vector<PMPVEntry> out;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string ep = index(join(path, "entries"), i);
    const double p = get_double(need(entries[i], "p", ep), join(ep, "p"));
    Operator rho = get_state(need(entries[i], "input", ep), nullptr, join(ep, "input"));
    if (rho.dim() != d) throw ParseError(join(ep, "input"), "dimension differs from d");
    const CMatrix n = get_matrix(need(entries[i], "pass_effect", ep), join(ep, "pass_effect"));
    Dims din = rho.dims();
    if (din.size() == 1 && (d & (d - 1)) == 0) {
      std::size_t q = 0;
      while ((std::size_t{1} << q) < d) ++q;
      din = qubit_dims(q);
    }
    std::size_t qo = 0;
    while ((std::size_t{1} << qo) < static_cast<std::size_t>(n.rows())) ++qo;
    const Dims dout = (std::size_t{1} << qo) == static_cast<std::size_t>(n.rows())
                          ? qubit_dims(qo)
                          : Dims{static_cast<std::size_t>(n.rows())};
    try {
      out.push_back({p, Operator(rho.matrix(), din), Operator(n, dout)});
    } catch (const Error& e) {
      throw ParseError(ep, e.what());
    }
  }
  std::optional<PureState> target;
  if (j.contains("target")) target = get_target(j["target"], join(path, "target"));
  try {
    return PMPVStrategy(std::move(out), std::move(target));
  } catch (const Error& e) {
    throw ParseError(path, e.what());
  }
}

//=============================================================================
// Measurements
//=============================================================================

inline MeasurementModel get_povm(const json& j, const std::string& path = "povm") {
  const json& effects = j.is_object() ? need(j, "effects", path) : j;
  const std::string ep = j.is_object() ? join(path, "effects") : path;
  if (!effects.is_array() || effects.empty()) throw ParseError(ep, "expected a list of effects");
  std::vector<Operator> ops;
  try {
    for (std::size_t i = 0; i < effects.size(); ++i) ops.emplace_back(get_matrix(effects[i], index(ep, i)));
    return MeasurementModel(std::move(ops));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(ep, e.what());
  }
}

inline json povm_json(const MeasurementModel& m) {
  json effects = json::array();
  for (const auto& e : m.effects()) effects.push_back(matrix_json(e.matrix()));
  return {{"effects", effects}};
}

/// "computational" or {"basis": [vector, ...]}.
inline ProjectiveTarget get_projective_target(const json& j, std::size_t d,
                                              const std::string& path = "target") {
  try {
    if (j.is_string()) {
      if (j.get<std::string>() != "computational") throw ParseError(path, "unknown named basis");
      return ProjectiveTarget::computational(Dims{d});
    }
    const json& b = need(j, "basis", path);
    if (!b.is_array()) throw ParseError(join(path, "basis"), "expected a list");
    std::vector<PureState> basis;
    for (std::size_t i = 0; i < b.size(); ++i) {
      const CVector v = get_vector(b[i], index(join(path, "basis"), i));
      basis.push_back(PureState::normalized(v, Dims{static_cast<std::size_t>(v.size())}));
    }
    return ProjectiveTarget(std::move(basis));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(path, e.what());
  }
}

//=============================================================================
// Results
//=============================================================================

inline json run_json(const RunResult& r) {
  return {{"rounds_executed", r.rounds_executed},
          {"passes", r.passes},
          {"fails", r.fails},
          {"postselected_rounds", r.postselected_rounds},
          {"accepted", r.accepted},
          {"empirical_pass_rate", r.empirical_pass_rate()}};
}

inline RunResult get_run(const json& j, const std::string& path) {
  RunResult r;
  r.rounds_executed = get_size(need(j, "rounds_executed", path), join(path, "rounds_executed"));
  r.passes = get_size(need(j, "passes", path), join(path, "passes"));
  r.fails = get_size(need(j, "fails", path), join(path, "fails"));
  if (j.contains("postselected_rounds")) {
    r.postselected_rounds = get_size(j["postselected_rounds"], join(path, "postselected_rounds"));
  }
  if (r.passes + r.fails != r.rounds_executed) {
    throw ParseError(join(path, "rounds_executed"), "passes + fails differs from rounds_executed");
  }
  r.accepted = r.fails == 0;
  return r;
}

inline json report_json(const WorstCaseReport& r) {
  json j{{"epsilon", r.epsilon},
         {"analytic", r.analytic},
         {"subspace_max", r.subspace_max},
         {"random_search_max", r.random_search_max},
         {"degenerate", r.degenerate},
         {"maximizer", matrix_json(r.maximizer.matrix())}};
  j["tp_constrained_max"] = r.tp_constrained_max ? json(*r.tp_constrained_max) : json(nullptr);
  return j;
}

}  // namespace qpv::io

#endif  // QPV_IO_HPP
