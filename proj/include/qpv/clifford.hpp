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

#ifndef QPV_CLIFFORD_HPP
#define QPV_CLIFFORD_HPP

#include <string>
#include <vector>

#include "qpv/pauli.hpp"

namespace qpv {

enum class GateKind { H, S, CNOT, CZ, X, Y, Z };

struct Gate {
  GateKind kind;
  std::size_t q0;
  std::size_t q1 = 0;  // target for two-qubit gates

  bool two_qubit() const { return kind == GateKind::CNOT || kind == GateKind::CZ; }
};

inline std::string gate_name(GateKind k) {
  switch (k) {
    case GateKind::H: return "H";
    case GateKind::S: return "S";
    case GateKind::CNOT: return "CNOT";
    case GateKind::CZ: return "CZ";
    case GateKind::X: return "X";
    case GateKind::Y: return "Y";
    case GateKind::Z: return "Z";
  }
  return "?";
}

inline GateKind parse_gate_kind(const std::string& name) {
  if (name == "H") return GateKind::H;
  if (name == "S") return GateKind::S;
  if (name == "CNOT" || name == "CX") return GateKind::CNOT;
  if (name == "CZ") return GateKind::CZ;
  if (name == "X") return GateKind::X;
  if (name == "Y") return GateKind::Y;
  if (name == "Z") return GateKind::Z;
  throw DomainError("unknown Clifford gate '" + name + "'");
}

// Gates applied left to right: the circuit unitary is G_m ... G_2 G_1.
class CliffordCircuit {
 public:
  CliffordCircuit() = default;
  explicit CliffordCircuit(std::size_t n) : n_(n) {}

  CliffordCircuit& add(GateKind kind, std::size_t q0, std::size_t q1 = 0) {
    Gate g{kind, q0, q1};
    if (q0 >= n_ || (g.two_qubit() && (q1 >= n_ || q1 == q0))) {
      throw DimensionError("gate " + gate_name(kind) + " has invalid qubit index");
    }
    gates_.push_back(g);
    return *this;
  }
  CliffordCircuit& h(std::size_t q) { return add(GateKind::H, q); }
  CliffordCircuit& s(std::size_t q) { return add(GateKind::S, q); }
  CliffordCircuit& cnot(std::size_t c, std::size_t t) { return add(GateKind::CNOT, c, t); }
  CliffordCircuit& cz(std::size_t a, std::size_t b) { return add(GateKind::CZ, a, b); }

  std::size_t num_qubits() const noexcept { return n_; }
  const std::vector<Gate>& gates() const noexcept { return gates_; }

 private:
  std::size_t n_ = 0;
  std::vector<Gate> gates_;
};

namespace detail {

inline void flip_sign(PauliString& p) { p.set_phase(p.phase() + 2); }

// Heisenberg update P -> G P G^dagger for a single gate, acting on qubits
// shifted by `offset`.
inline void conjugate_gate(PauliString& p, const Gate& g, std::size_t offset) {
  const std::size_t a = g.q0 + offset;
  const std::size_t b = g.q1 + offset;
  switch (g.kind) {
    case GateKind::H: {
      const bool x = p.x(a), z = p.z(a);
      if (x && z) flip_sign(p);
      p.set(a, z, x);
      break;
    }
    case GateKind::S: {
      const bool x = p.x(a), z = p.z(a);
      if (x && z) flip_sign(p);
      p.set(a, x, z ^ x);
      break;
    }
    case GateKind::CNOT: {
      const bool xc = p.x(a), zc = p.z(a), xt = p.x(b), zt = p.z(b);
      if (xc && zt && (xt == zc)) flip_sign(p);
      p.set(b, xt ^ xc, zt);
      p.set(a, xc, zc ^ zt);
      break;
    }
    case GateKind::CZ: {
      conjugate_gate(p, Gate{GateKind::H, g.q1}, offset);
      conjugate_gate(p, Gate{GateKind::CNOT, g.q0, g.q1}, offset);
      conjugate_gate(p, Gate{GateKind::H, g.q1}, offset);
      break;
    }
    case GateKind::X:
      if (p.z(a)) flip_sign(p);
      break;
    case GateKind::Z:
      if (p.x(a)) flip_sign(p);
      break;
    case GateKind::Y:
      if (p.x(a) != p.z(a)) flip_sign(p);
      break;
  }
}

inline CMatrix gate_matrix_1q(GateKind k) {
  const double r = 1.0 / std::sqrt(2.0);
  CMatrix m(2, 2);
  switch (k) {
    case GateKind::H: m << r, r, r, -r; break;
    case GateKind::S: m << 1, 0, 0, cplx(0, 1); break;
    case GateKind::X: m = pauli_matrix::X(); break;
    case GateKind::Y: m = pauli_matrix::Y(); break;
    case GateKind::Z: m = pauli_matrix::Z(); break;
    default: throw DomainError("not a single-qubit gate");
  }
  return m;
}

// Left-multiplies the columns of `m` (an n-qubit operator) by gate `g`.
inline void apply_gate_rows(CMatrix& m, const Gate& g, std::size_t n) {
  const std::size_t D = std::size_t{1} << n;
  const auto bit = [n](std::size_t q) { return std::size_t{1} << (n - 1 - q); };
  if (!g.two_qubit()) {
    const CMatrix u = gate_matrix_1q(g.kind);
    const std::size_t mask = bit(g.q0);
    for (std::size_t r = 0; r < D; ++r) {
      if (r & mask) continue;
      const auto r0 = static_cast<Eigen::Index>(r), r1 = static_cast<Eigen::Index>(r | mask);
      const Eigen::RowVectorXcd a = m.row(r0), b = m.row(r1);
      m.row(r0) = u(0, 0) * a + u(0, 1) * b;
      m.row(r1) = u(1, 0) * a + u(1, 1) * b;
    }
    return;
  }
  const std::size_t cm = bit(g.q0), tm = bit(g.q1);
  for (std::size_t r = 0; r < D; ++r) {
    if (!(r & cm)) continue;
    if (g.kind == GateKind::CNOT) {
      if (r & tm) continue;
      m.row(static_cast<Eigen::Index>(r)).swap(m.row(static_cast<Eigen::Index>(r | tm)));
    } else if (r & tm) {
      m.row(static_cast<Eigen::Index>(r)) *= -1.0;
    }
  }
}

}  // namespace detail

/// C P C^dagger computed symbolically on the tableau representation.
inline PauliString clifford_conjugate(const CliffordCircuit& c, const PauliString& p) {
  if (p.num_qubits() != c.num_qubits()) {
    throw DimensionError("clifford_conjugate: circuit has " + std::to_string(c.num_qubits()) +
                         " qubits, Pauli string has " + std::to_string(p.num_qubits()));
  }
  PauliString out = p;
  for (const auto& g : c.gates()) detail::conjugate_gate(out, g, 0);
  return out;
}

/// Dense unitary of the circuit.
inline Operator circuit_unitary(const CliffordCircuit& c) {
  const std::size_t n = c.num_qubits();
  const std::size_t D = std::size_t{1} << n;
  check_dim(D, "circuit unitary");
  CMatrix u = CMatrix::Identity(static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(D));
  for (const auto& g : c.gates()) detail::apply_gate_rows(u, g, n);
  return Operator(std::move(u), qubit_dims(n), {Flag::unknown, Flag::yes, Flag::unknown});
}

/// Stabilizer generators of the Choi state (I (x) C)|psi> with
/// |psi> = (|00> + |11>)^{(x) n}. Qubits 0..n-1 are the ancilla, n..2n-1 the
/// system; ancilla i is paired with system i. Generators come in the order
/// X_{a_i}X_{s_i}, Z_{a_i}Z_{s_i} per pair, each propagated through C.
inline StabilizerGroup choi_stabilizers(const CliffordCircuit& c) {
  const std::size_t n = c.num_qubits();
  if (n == 0) throw DomainError("choi_stabilizers: empty circuit register");
  check_dim(std::size_t{1} << (2 * n), "Choi state");
  std::vector<PauliString> gens;
  for (std::size_t i = 0; i < n; ++i) {
    PauliString xx(2 * n), zz(2 * n);
    xx.set(i, true, false);
    xx.set(n + i, true, false);
    zz.set(i, false, true);
    zz.set(n + i, false, true);
    gens.push_back(xx);
    gens.push_back(zz);
  }
  for (auto& gen : gens) {
    for (const auto& g : c.gates()) detail::conjugate_gate(gen, g, n);
  }
  return StabilizerGroup(2 * n, std::move(gens));
}

}  // namespace qpv

#endif  // QPV_CLIFFORD_HPP
