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

#ifndef QPV_CHANNELS_HPP
#define QPV_CHANNELS_HPP

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qpv/pauli.hpp"

namespace qpv {

//=============================================================================
// QuantumProcess
//=============================================================================

// A completely positive, trace-nonincreasing map in unitary or Kraus form.
// Kraus operators map the input space (dims_in) to the output space
// (dims_out) and satisfy sum_j K_j^dagger K_j <= 1 within 1e-10.
class QuantumProcess {
 public:
  enum class Kind { unitary, kraus };

  QuantumProcess() = default;

  static QuantumProcess unitary(const Operator& u) {
    if (max_abs(u.matrix().adjoint() * u.matrix() -
                CMatrix::Identity(u.matrix().rows(), u.matrix().cols())) > tol::numeric) {
      throw DomainError("unitary process: U^dagger U differs from identity");
    }
    QuantumProcess p;
    p.kind_ = Kind::unitary;
    p.dims_in_ = u.dims();
    p.dims_out_ = u.dims();
    p.kraus_ = {u.matrix()};
    return p;
  }

  static QuantumProcess kraus(std::vector<CMatrix> ops, Dims dims_in, Dims dims_out) {
    if (ops.empty()) throw DomainError("Kraus process needs at least one operator");
    const auto din = static_cast<Eigen::Index>(product(dims_in));
    const auto dout = static_cast<Eigen::Index>(product(dims_out));
    check_dim(static_cast<std::size_t>(din * dout), "Choi matrix");
    CMatrix sum = CMatrix::Zero(din, din);
    for (const auto& k : ops) {
      if (k.rows() != dout || k.cols() != din) {
        throw DimensionError("Kraus operator shape does not match dims");
      }
      sum += k.adjoint() * k;
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (sum + sum.adjoint()),
                                              Eigen::EigenvaluesOnly);
    if (es.eigenvalues().maxCoeff() > 1.0 + tol::numeric) {
      throw DomainError("Kraus operators are trace increasing (sum K^dagger K > 1)");
    }
    QuantumProcess p;
    p.kind_ = Kind::kraus;
    p.dims_in_ = std::move(dims_in);
    p.dims_out_ = std::move(dims_out);
    p.kraus_ = std::move(ops);
    return p;
  }

  static QuantumProcess kraus(std::vector<CMatrix> ops, const Dims& dims) {
    return kraus(std::move(ops), dims, dims);
  }

  static QuantumProcess identity(const Dims& dims) {
    return unitary(Operator::identity(dims));
  }

  Kind kind() const noexcept { return kind_; }
  const Dims& dims_in() const noexcept { return dims_in_; }
  const Dims& dims_out() const noexcept { return dims_out_; }
  std::size_t d_in() const { return product(dims_in_); }
  std::size_t d_out() const { return product(dims_out_); }

  /// Kraus list; a unitary process yields {U}.
  const std::vector<CMatrix>& kraus_ops() const noexcept { return kraus_; }

  CMatrix kraus_sum() const {
    const auto din = static_cast<Eigen::Index>(d_in());
    CMatrix sum = CMatrix::Zero(din, din);
    for (const auto& k : kraus_) sum += k.adjoint() * k;
    return sum;
  }

  bool is_trace_preserving(double tolerance = tol::numeric) const {
    if (kind_ == Kind::unitary) return true;
    const auto din = static_cast<Eigen::Index>(d_in());
    return max_abs(kraus_sum() - CMatrix::Identity(din, din)) <= tolerance;
  }

  /// Applies `after` to the output of this process.
  QuantumProcess then(const QuantumProcess& after) const {
    if (after.dims_in_ != dims_out_) throw DimensionError("process composition: dims differ");
    if (kind_ == Kind::unitary && after.kind_ == Kind::unitary) {
      return unitary(Operator(after.kraus_[0] * kraus_[0], dims_out_));
    }
    std::vector<CMatrix> ops;
    ops.reserve(kraus_.size() * after.kraus_.size());
    for (const auto& a : after.kraus_) {
      for (const auto& k : kraus_) ops.push_back(a * k);
    }
    return kraus(std::move(ops), dims_in_, after.dims_out_);
  }

 private:
  Kind kind_ = Kind::kraus;
  Dims dims_in_;
  Dims dims_out_;
  std::vector<CMatrix> kraus_;
};

//=============================================================================
// Choi-Jamiolkowski
//=============================================================================

/// Unnormalized Choi matrix sum_{k,l} |k><l| (x) E(|k><l|) on in (x) out.
/// Built as sum_j |K_j>><<K_j| with |K>> = sum_k |k> (x) K|k>.
inline Operator choi_matrix(const QuantumProcess& e) {
  const auto din = static_cast<Eigen::Index>(e.d_in());
  const auto dout = static_cast<Eigen::Index>(e.d_out());
  check_dim(static_cast<std::size_t>(din * dout), "Choi matrix");
  CMatrix ups = CMatrix::Zero(din * dout, din * dout);
  for (const auto& k : e.kraus_ops()) {
    CVector v(din * dout);
    for (Eigen::Index col = 0; col < din; ++col) v.segment(col * dout, dout) = k.col(col);
    ups += v * v.adjoint();
  }
  Dims dims = e.dims_in();
  dims.insert(dims.end(), e.dims_out().begin(), e.dims_out().end());
  return Operator(std::move(ups), std::move(dims), {Flag::yes, Flag::unknown, Flag::unknown});
}

/// Choi matrix normalized to unit trace (the postselected Choi state).
inline Operator choi_state(const QuantumProcess& e) {
  const Operator ups = choi_matrix(e);
  const double tr = ups.trace().real();
  if (tr <= tol::structural) throw DomainError("choi_state: process has zero trace");
  return Operator(ups.matrix() / tr, ups.dims(), {Flag::yes, Flag::unknown, Flag::unknown});
}

/// Normalized Choi vector for processes with a single Kraus operator.
inline PureState choi_pure_state(const QuantumProcess& e) {
  if (e.kraus_ops().size() != 1) {
    throw DomainError("choi_pure_state: process has more than one Kraus operator");
  }
  const auto din = static_cast<Eigen::Index>(e.d_in());
  const auto dout = static_cast<Eigen::Index>(e.d_out());
  const CMatrix& k = e.kraus_ops()[0];
  CVector v(din * dout);
  for (Eigen::Index col = 0; col < din; ++col) v.segment(col * dout, dout) = k.col(col);
  Dims dims = e.dims_in();
  dims.insert(dims.end(), e.dims_out().begin(), e.dims_out().end());
  return PureState::normalized(v, std::move(dims));
}

/// Sum_j K_j rho K_j^dagger (unnormalized for trace-decreasing processes).
inline Operator apply(const QuantumProcess& e, const Operator& rho) {
  if (rho.dim() != e.d_in()) throw DimensionError("apply: input dimension mismatch");
  const auto dout = static_cast<Eigen::Index>(e.d_out());
  CMatrix out = CMatrix::Zero(dout, dout);
  for (const auto& k : e.kraus_ops()) out += k * rho.matrix() * k.adjoint();
  OperatorFlags f;
  if (rho.is_hermitian()) {
    out = 0.5 * (out + out.adjoint());
    f.hermitian = Flag::yes;
  }
  return Operator(std::move(out), e.dims_out(), f);
}

struct PostselectedOutput {
  Operator state;
  double success_probability;
};

/// Output conditioned on the process producing one.
inline PostselectedOutput apply_postselected(const QuantumProcess& e, const Operator& rho) {
  const Operator out = apply(e, rho);
  const double p = out.trace().real();
  if (p <= tol::structural) throw DomainError("apply_postselected: zero success probability");
  return {Operator(out.matrix() / p, out.dims(), out.flags()), p};
}

/// Tr_A[(rho^T (x) 1) Upsilon], the inverse Choi map. `ups` must carry the
/// split dims_in ++ dims_out; `n_in` is the number of input subsystems.
inline Operator apply_choi(const Operator& ups, std::size_t n_in, const Operator& rho) {
  Dims din(ups.dims().begin(), ups.dims().begin() + static_cast<std::ptrdiff_t>(n_in));
  Dims dout(ups.dims().begin() + static_cast<std::ptrdiff_t>(n_in), ups.dims().end());
  if (product(din) != rho.dim()) throw DimensionError("apply_choi: input dimension mismatch");
  const Operator lhs = kron(transpose(rho), Operator::identity(dout));
  const Operator prod(lhs.matrix() * ups.matrix(), ups.dims());
  std::vector<std::size_t> keep;
  for (std::size_t k = n_in; k < ups.dims().size(); ++k) keep.push_back(k);
  return partial_trace(prod, keep);
}

//=============================================================================
// Fidelities
//=============================================================================

/// Tr(rho_E rho_target) for a target with pure Choi state.
inline double entanglement_fidelity(const QuantumProcess& e, const QuantumProcess& target) {
  if (e.dims_in() != target.dims_in() || e.dims_out() != target.dims_out()) {
    throw DimensionError("entanglement_fidelity: process dims differ");
  }
  PureState phi;
  if (target.kraus_ops().size() == 1) {
    phi = choi_pure_state(target);
  } else {
    const auto spec = eig_hermitian(choi_state(target), true);
    if (spec.values.size() > 1 && spec.values[1] > tol::rank) {
      throw DomainError("entanglement_fidelity: target Choi state is not pure");
    }
    phi = PureState::normalized(spec.vectors->col(0), choi_matrix(target).dims());
  }
  const Operator rho = choi_state(e);
  const CVector& v = phi.amplitudes();
  return v.dot(rho.matrix() * v).real();
}

/// (d F_e + 1) / (d + 1).
inline double average_gate_fidelity(double f_e, std::size_t d) {
  if (!(f_e >= -tol::structural && f_e <= 1.0 + tol::structural)) {
    throw DomainError("average_gate_fidelity: F_e must lie in [0,1]");
  }
  if (d < 2) throw DomainError("average_gate_fidelity: d must be >= 2");
  const double dd = static_cast<double>(d);
  return (dd * f_e + 1.0) / (dd + 1.0);
}

//=============================================================================
// Noise models
//=============================================================================

struct Depolarizing {
  double p;
};
/// exp(-i angle P / 2) applied after the target, P a Hermitian Pauli string.
struct UnitaryOverrotation {
  PauliString axis;
  double angle;
};
/// Independent amplitude damping on every qubit.
struct AmplitudeDamping {
  double gamma;
};
/// A filter K (||K|| <= 1) applied after the target.
struct LossyFilter {
  CMatrix k;
};

using NoiseSpec = std::variant<Depolarizing, UnitaryOverrotation, AmplitudeDamping, LossyFilter>;

inline std::string noise_label(const NoiseSpec& spec) {
  struct {
    std::string operator()(const Depolarizing& n) const {
      return "depolarizing(" + std::to_string(n.p) + ")";
    }
    std::string operator()(const UnitaryOverrotation& n) const {
      return "overrotation(" + n.axis.str() + "," + std::to_string(n.angle) + ")";
    }
    std::string operator()(const AmplitudeDamping& n) const {
      return "amplitude_damping(" + std::to_string(n.gamma) + ")";
    }
    std::string operator()(const LossyFilter&) const { return "lossy_filter"; }
  } v;
  return std::visit(v, spec);
}

/// The noise channel alone, on output dims `dims`.
inline QuantumProcess noise_channel(const NoiseSpec& spec, const Dims& dims) {
  const std::size_t d = product(dims);
  const auto D = static_cast<Eigen::Index>(d);
  if (const auto* dep = std::get_if<Depolarizing>(&spec)) {
    if (!(dep->p >= 0.0 && dep->p <= 1.0)) throw DomainError("depolarizing p must lie in [0,1]");
    // (1-p) rho + p Tr(rho) 1/d via K_ij = sqrt(p/d) |i><j|.
    std::vector<CMatrix> ops;
    if (dep->p < 1.0) ops.push_back(std::sqrt(1.0 - dep->p) * CMatrix::Identity(D, D));
    if (dep->p > 0.0) {
      const double a = std::sqrt(dep->p / static_cast<double>(d));
      for (Eigen::Index i = 0; i < D; ++i) {
        for (Eigen::Index j = 0; j < D; ++j) {
          CMatrix k = CMatrix::Zero(D, D);
          k(i, j) = a;
          ops.push_back(std::move(k));
        }
      }
    }
    return QuantumProcess::kraus(std::move(ops), dims);
  }
  if (const auto* rot = std::get_if<UnitaryOverrotation>(&spec)) {
    if (!rot->axis.is_hermitian()) throw DomainError("overrotation axis must be Hermitian");
    const Operator P = pauli_to_matrix(rot->axis);
    if (P.dim() != d) throw DimensionError("overrotation axis acts on the wrong dimension");
    const CMatrix r = std::cos(rot->angle / 2) * CMatrix::Identity(D, D) -
                      cplx(0, std::sin(rot->angle / 2)) * P.matrix();
    return QuantumProcess::unitary(Operator(r, dims));
  }
  if (const auto* ad = std::get_if<AmplitudeDamping>(&spec)) {
    if (!(ad->gamma >= 0.0 && ad->gamma <= 1.0)) {
      throw DomainError("amplitude damping gamma must lie in [0,1]");
    }
    for (auto x : dims) {
      if (x != 2) throw DimensionError("amplitude damping acts on qubits only");
    }
    CMatrix k0(2, 2), k1(2, 2);
    k0 << 1, 0, 0, std::sqrt(1.0 - ad->gamma);
    k1 << 0, std::sqrt(ad->gamma), 0, 0;
    std::vector<CMatrix> ops{CMatrix::Identity(1, 1)};
    for (std::size_t q = 0; q < dims.size(); ++q) {
      std::vector<CMatrix> next;
      for (const auto& o : ops) {
        for (const CMatrix* k : {&k0, &k1}) {
          next.push_back(kron(Operator(o, Dims{static_cast<std::size_t>(o.rows())}),
                              Operator(*k, Dims{2}))
                             .matrix());
        }
      }
      ops = std::move(next);
    }
    return QuantumProcess::kraus(std::move(ops), dims);
  }
  const auto& lf = std::get<LossyFilter>(spec);
  if (lf.k.rows() != D || lf.k.cols() != D) throw DimensionError("lossy filter has wrong size");
  return QuantumProcess::kraus({lf.k}, dims);
}

/// Noise applied after `target`.
inline QuantumProcess make_noise(const QuantumProcess& target, const NoiseSpec& spec) {
  return target.then(noise_channel(spec, target.dims_out()));
}

/// Kraus decomposition of a PSD Choi matrix on in (x) out; throws if the
/// resulting map would be trace increasing.
inline QuantumProcess process_from_choi(const Operator& ups, const Dims& dims_in,
                                        const Dims& dims_out) {
  const auto din = static_cast<Eigen::Index>(product(dims_in));
  const auto dout = static_cast<Eigen::Index>(product(dims_out));
  if (static_cast<Eigen::Index>(ups.dim()) != din * dout) {
    throw DimensionError("process_from_choi: Choi dimension mismatch");
  }
  const auto spec = eig_hermitian(ups, true);
  std::vector<CMatrix> ops;
  for (std::size_t j = 0; j < spec.values.size(); ++j) {
    const double lam = spec.values[j];
    if (lam < -tol::numeric) throw DomainError("process_from_choi: Choi matrix is not PSD");
    if (lam <= tol::numeric) continue;
    const CVector v = std::sqrt(lam) * spec.vectors->col(static_cast<Eigen::Index>(j));
    CMatrix k(dout, din);
    for (Eigen::Index col = 0; col < din; ++col) k.col(col) = v.segment(col * dout, dout);
    ops.push_back(std::move(k));
  }
  if (ops.empty()) throw DomainError("process_from_choi: zero Choi matrix");
  return QuantumProcess::kraus(std::move(ops), dims_in, dims_out);
}

}  // namespace qpv

#endif  // QPV_CHANNELS_HPP
