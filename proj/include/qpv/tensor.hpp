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

#ifndef QPV_TENSOR_HPP
#define QPV_TENSOR_HPP

#include <algorithm>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "qpv/core.hpp"

namespace qpv {

/// Tri-state structural flag carried by an Operator.
enum class Flag : std::uint8_t { unknown, yes, no };

struct OperatorFlags {
  Flag hermitian = Flag::unknown;
  Flag unitary = Flag::unknown;
  Flag projector = Flag::unknown;
};

//=============================================================================
// Operator
//=============================================================================

// Dense square matrix on a declared tensor product of subsystems. Flags set
// to `yes` are verified on construction: hermitian to 1e-12, projector
// idempotence to 1e-10, unitarity to 1e-10.
class Operator {
 public:
  Operator() = default;

  Operator(CMatrix m, Dims dims, OperatorFlags flags = {})
      : m_(std::move(m)), dims_(std::move(dims)), flags_(flags) {
    if (m_.rows() != m_.cols()) {
      throw DimensionError("operator matrix must be square");
    }
    if (product(dims_) != static_cast<std::size_t>(m_.rows())) {
      throw DimensionError("product of subsystem dims (" +
                           std::to_string(product(dims_)) +
                           ") differs from matrix dimension " +
                           std::to_string(m_.rows()));
    }
    check_dim(dim());
    if (flags_.projector == Flag::yes) flags_.hermitian = Flag::yes;
    if (flags_.hermitian == Flag::yes && hermiticity_error() > tol::structural) {
      throw DomainError("operator flagged hermitian is not");
    }
    if (flags_.projector == Flag::yes &&
        max_abs(m_ * m_ - m_) > tol::numeric) {
      throw DomainError("operator flagged projector is not idempotent");
    }
    if (flags_.unitary == Flag::yes &&
        max_abs(m_.adjoint() * m_ - CMatrix::Identity(m_.rows(), m_.cols())) >
            tol::numeric) {
      throw DomainError("operator flagged unitary is not");
    }
  }

  /// Single-subsystem convenience.
  explicit Operator(CMatrix m, OperatorFlags flags = {})
      : Operator(m, Dims{static_cast<std::size_t>(m.rows())}, flags) {}

  static Operator identity(const Dims& dims) {
    const auto d = static_cast<Eigen::Index>(product(dims));
    return Operator(CMatrix::Identity(d, d), dims,
                    {Flag::yes, Flag::yes, Flag::yes});
  }

  static Operator zero(const Dims& dims) {
    const auto d = static_cast<Eigen::Index>(product(dims));
    return Operator(CMatrix::Zero(d, d), dims,
                    {Flag::yes, Flag::no, Flag::yes});
  }

  const CMatrix& matrix() const noexcept { return m_; }
  const Dims& dims() const noexcept { return dims_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  const OperatorFlags& flags() const noexcept { return flags_; }

  cplx operator()(Eigen::Index r, Eigen::Index c) const { return m_(r, c); }

  cplx trace() const { return m_.trace(); }

  double hermiticity_error() const { return max_abs(m_ - m_.adjoint()); }

  /// Hermitian either by flag or by a numerical check at `tolerance`.
  bool is_hermitian(double tolerance = tol::structural) const {
    if (flags_.hermitian == Flag::yes) return true;
    return hermiticity_error() <= tolerance;
  }

  Operator with_flags(OperatorFlags flags) const {
    return Operator(m_, dims_, flags);
  }

  Operator adjoint() const {
    OperatorFlags f = flags_;
    return Operator(m_.adjoint(), dims_, f);
  }

  friend Operator operator*(const Operator& a, const Operator& b) {
    if (a.dims_ != b.dims_) throw DimensionError("operator product: dims differ");
    return Operator(a.m_ * b.m_, a.dims_);
  }
  friend Operator operator+(const Operator& a, const Operator& b) {
    if (a.dims_ != b.dims_) throw DimensionError("operator sum: dims differ");
    OperatorFlags f;
    if (a.flags_.hermitian == Flag::yes && b.flags_.hermitian == Flag::yes) {
      f.hermitian = Flag::yes;
    }
    return Operator(a.m_ + b.m_, a.dims_, f);
  }
  friend Operator operator-(const Operator& a, const Operator& b) {
    if (a.dims_ != b.dims_) throw DimensionError("operator difference: dims differ");
    return Operator(a.m_ - b.m_, a.dims_);
  }
  friend Operator operator*(double s, const Operator& a) {
    OperatorFlags f;
    f.hermitian = a.flags_.hermitian;
    return Operator(s * a.m_, a.dims_, f);
  }

 private:
  CMatrix m_;
  Dims dims_;
  OperatorFlags flags_{};
};

//=============================================================================
// PureState
//=============================================================================

class PureState {
 public:
  PureState() = default;

  PureState(CVector amplitudes, Dims dims)
      : amp_(std::move(amplitudes)), dims_(std::move(dims)) {
    if (product(dims_) != static_cast<std::size_t>(amp_.size())) {
      throw DimensionError("state length differs from product of dims");
    }
    check_dim(static_cast<std::size_t>(amp_.size()), "state");
    if (std::abs(amp_.norm() - 1.0) > tol::structural) {
      throw DomainError("state vector is not normalized");
    }
  }

  /// Rescales `v` to unit norm; rejects the zero vector.
  static PureState normalized(const CVector& v, Dims dims) {
    const double n = v.norm();
    if (n < tol::structural) throw DomainError("cannot normalize zero vector");
    if (std::abs(n - 1.0) <= 1e-14) return PureState(v, std::move(dims));  // keep stored digits
    return PureState(v / n, std::move(dims));
  }

  static PureState basis(std::size_t index, Dims dims) {
    CVector v = CVector::Zero(static_cast<Eigen::Index>(product(dims)));
    if (index >= static_cast<std::size_t>(v.size())) {
      throw DimensionError("basis index out of range");
    }
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return PureState(std::move(v), std::move(dims));
  }

  const CVector& amplitudes() const noexcept { return amp_; }
  const Dims& dims() const noexcept { return dims_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(amp_.size()); }

  /// |psi><psi| as a rank-one projector.
  Operator density() const {
    return Operator(amp_ * amp_.adjoint(), dims_,
                    {Flag::yes, Flag::unknown, Flag::yes});
  }

 private:
  CVector amp_;
  Dims dims_;
};

struct Spectrum {
  std::vector<double> values;            // descending
  std::optional<CMatrix> vectors;        // columns match `values`
};

//=============================================================================
// Tensor-product algebra
//=============================================================================

namespace detail {

inline Dims concat(const Dims& a, const Dims& b) {
  Dims out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

// Row-major strides: index = sum_k digit_k * stride_k, last subsystem fastest.
inline std::vector<std::size_t> strides(const Dims& dims) {
  std::vector<std::size_t> s(dims.size(), 1);
  for (std::size_t k = dims.size(); k-- > 1;) s[k - 1] = s[k] * dims[k];
  return s;
}

inline std::vector<bool> subsystem_mask(const Dims& dims,
                                        std::span<const std::size_t> which) {
  std::vector<bool> mask(dims.size(), false);
  for (auto k : which) {
    if (k >= dims.size()) {
      throw DimensionError("subsystem index " + std::to_string(k) +
                           " out of range for " + std::to_string(dims.size()) +
                           " subsystems");
    }
    if (mask[k]) throw DimensionError("repeated subsystem index");
    mask[k] = true;
  }
  return mask;
}

inline Flag both(Flag a, Flag b) {
  return (a == Flag::yes && b == Flag::yes) ? Flag::yes : Flag::unknown;
}

}  // namespace detail

inline Operator kron(const Operator& a, const Operator& b) {
  check_dim(a.dim() * b.dim());
  const auto& A = a.matrix();
  const auto& B = b.matrix();
  CMatrix out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    }
  }
  OperatorFlags f{detail::both(a.flags().hermitian, b.flags().hermitian),
                  detail::both(a.flags().unitary, b.flags().unitary),
                  detail::both(a.flags().projector, b.flags().projector)};
  return Operator(std::move(out), detail::concat(a.dims(), b.dims()), f);
}

inline CVector kron(const CVector& a, const CVector& b) {
  CVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

inline PureState kron(const PureState& a, const PureState& b) {
  return PureState(kron(a.amplitudes(), b.amplitudes()),
                   detail::concat(a.dims(), b.dims()));
}

/// Traces out every subsystem not listed in `keep`; kept subsystems retain
/// their original relative order.
inline Operator partial_trace(const Operator& op,
                              std::span<const std::size_t> keep) {
  const Dims& dims = op.dims();
  const auto mask = detail::subsystem_mask(dims, keep);
  const auto st = detail::strides(dims);

  Dims kept_dims;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (mask[k]) kept_dims.push_back(dims[k]);
  }
  const std::size_t D = op.dim();

  // Split every full index into (kept index, traced index).
  std::vector<std::size_t> kept_idx(D), traced_idx(D);
  for (std::size_t r = 0; r < D; ++r) {
    std::size_t ki = 0, ti = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) {
      const std::size_t digit = (r / st[k]) % dims[k];
      if (mask[k]) {
        ki = ki * dims[k] + digit;
      } else {
        ti = ti * dims[k] + digit;
      }
    }
    kept_idx[r] = ki;
    traced_idx[r] = ti;
  }

  const auto Dk = static_cast<Eigen::Index>(product(kept_dims));
  CMatrix out = CMatrix::Zero(Dk, Dk);
  const auto& M = op.matrix();
  for (std::size_t r = 0; r < D; ++r) {
    for (std::size_t c = 0; c < D; ++c) {
      if (traced_idx[r] != traced_idx[c]) continue;
      out(static_cast<Eigen::Index>(kept_idx[r]),
          static_cast<Eigen::Index>(kept_idx[c])) +=
          M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
  }
  if (kept_dims.empty()) kept_dims.push_back(1);
  OperatorFlags f;
  f.hermitian = op.flags().hermitian == Flag::yes ? Flag::yes : Flag::unknown;
  return Operator(std::move(out), kept_dims, f);
}

inline Operator partial_trace(const Operator& op,
                              std::initializer_list<std::size_t> keep) {
  const std::vector<std::size_t> k(keep);
  return partial_trace(op, std::span<const std::size_t>(k));
}

/// Transposes the listed subsystems (swaps their row/column digits).
inline Operator partial_transpose(const Operator& op,
                                  std::span<const std::size_t> subsystems) {
  const Dims& dims = op.dims();
  const auto mask = detail::subsystem_mask(dims, subsystems);
  const auto st = detail::strides(dims);
  const std::size_t D = op.dim();
  const auto& M = op.matrix();
  CMatrix out(M.rows(), M.cols());
  for (std::size_t r = 0; r < D; ++r) {
    for (std::size_t c = 0; c < D; ++c) {
      std::size_t r2 = r, c2 = c;
      for (std::size_t k = 0; k < dims.size(); ++k) {
        if (!mask[k]) continue;
        const std::size_t dr = (r / st[k]) % dims[k];
        const std::size_t dc = (c / st[k]) % dims[k];
        r2 = r2 - dr * st[k] + dc * st[k];
        c2 = c2 - dc * st[k] + dr * st[k];
      }
      out(static_cast<Eigen::Index>(r2), static_cast<Eigen::Index>(c2)) =
          M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
  }
  OperatorFlags f;
  f.hermitian = op.flags().hermitian;
  f.projector = op.flags().projector;
  return Operator(std::move(out), dims, f);
}

inline Operator partial_transpose(const Operator& op,
                                  std::initializer_list<std::size_t> subsystems) {
  const std::vector<std::size_t> s(subsystems);
  return partial_transpose(op, std::span<const std::size_t>(s));
}

inline Operator transpose(const Operator& op) {
  OperatorFlags f;
  f.hermitian = op.flags().hermitian;
  f.projector = op.flags().projector;
  f.unitary = op.flags().unitary;
  return Operator(op.matrix().transpose(), op.dims(), f);
}

//=============================================================================
// Spectra
//=============================================================================

namespace detail {

// First entry with modulus above 1e-12 made real and positive.
inline void fix_phase(Eigen::Ref<CVector> v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > tol::structural) {
      v *= std::conj(v(i)) / std::abs(v(i));
      return;
    }
  }
}

inline bool lex_less(const CVector& a, const CVector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double dr = a(i).real() - b(i).real();
    if (std::abs(dr) > tol::structural) return dr < 0;
    const double di = a(i).imag() - b(i).imag();
    if (std::abs(di) > tol::structural) return di < 0;
  }
  return false;
}

}  // namespace detail

/// Eigendecomposition of a self-adjoint operator. Eigenvalues come back in
/// descending order; ties (within 1e-12) are ordered lexicographically on the
/// phase-fixed eigenvector entries so repeated calls give identical output.
inline Spectrum eig_hermitian(const Operator& op, bool with_vectors = false) {
  if (op.flags().hermitian == Flag::no || !op.is_hermitian(tol::structural)) {
    throw DomainError("eig_hermitian: operator is not Hermitian");
  }
  const CMatrix herm = 0.5 * (op.matrix() + op.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(
      herm, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error("eig_hermitian: eigensolver did not converge");
  }
  const auto n = herm.rows();
  Spectrum out;
  out.values.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values[static_cast<std::size_t>(i)] = solver.eigenvalues()(n - 1 - i);
  }
  if (!with_vectors) return out;

  CMatrix vecs(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    vecs.col(i) = solver.eigenvectors().col(n - 1 - i);
    detail::fix_phase(vecs.col(i));
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double va = out.values[static_cast<std::size_t>(a)];
    const double vb = out.values[static_cast<std::size_t>(b)];
    if (std::abs(va - vb) > tol::structural) return va > vb;
    return detail::lex_less(vecs.col(a), vecs.col(b));
  });
  CMatrix sorted(n, n);
  std::vector<double> sorted_vals(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    sorted.col(i) = vecs.col(order[static_cast<std::size_t>(i)]);
    sorted_vals[static_cast<std::size_t>(i)] =
        out.values[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
  }
  out.values = std::move(sorted_vals);
  out.vectors = std::move(sorted);
  return out;
}

/// Real part of Tr(A B).
inline double trace_product(const Operator& a, const Operator& b) {
  if (a.dim() != b.dim()) throw DimensionError("trace_product: dimension mismatch");
  // Tr(AB) = sum_ij A_ij B_ji
  return (a.matrix().array() * b.matrix().transpose().array()).sum().real();
}

/// Hermitian, unit trace and PSD, each within `tolerance`.
inline bool is_density_matrix(const Operator& rho, double tolerance = tol::numeric) {
  if (!rho.is_hermitian(tolerance)) return false;
  if (std::abs(rho.trace() - cplx(1.0, 0.0)) > tolerance) return false;
  const Operator herm(0.5 * (rho.matrix() + rho.matrix().adjoint()), rho.dims(),
                     {Flag::yes, Flag::unknown, Flag::unknown});
  const auto spec = eig_hermitian(herm);
  return spec.values.back() >= -tolerance;
}

/// <phi|rho|phi> for a density matrix `rho`.
inline double state_fidelity(const Operator& rho, const PureState& phi) {
  if (rho.dim() != phi.dim()) {
    throw DimensionError("state_fidelity: dimension mismatch");
  }
  if (!is_density_matrix(rho)) {
    throw DomainError("state_fidelity: rho is not a density matrix");
  }
  const CVector& v = phi.amplitudes();
  return v.dot(rho.matrix() * v).real();
}

/// Single-qubit Pauli matrices.
namespace pauli_matrix {
inline CMatrix I() { return CMatrix::Identity(2, 2); }
inline CMatrix X() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline CMatrix Y() {
  CMatrix m(2, 2);
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return m;
}
inline CMatrix Z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
}  // namespace pauli_matrix

}  // namespace qpv

#endif  // QPV_TENSOR_HPP
