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

#ifndef QPV_PMPV_HPP
#define QPV_PMPV_HPP

#include <optional>
#include <vector>

#include "qpv/strategies.hpp"

namespace qpv {

//=============================================================================
// One-way form
//=============================================================================

struct OneWayPair {
  Operator m;  // ancilla effect, weighted by its test probability
  Operator n;  // system pass effect
};

// Omega = sum_i M_i (x) N_i with {M_i} a POVM on the ancilla.
struct OneWayForm {
  std::vector<OneWayPair> pairs;
  Dims ancilla_dims;
  Dims system_dims;

  Operator reconstruct() const {
    const std::size_t D = product(ancilla_dims) * product(system_dims);
    CMatrix om = CMatrix::Zero(static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(D));
    for (const auto& p : pairs) om += kron(p.m, p.n).matrix();
    return Operator(std::move(om), detail::concat(ancilla_dims, system_dims));
  }

  /// max |sum_i M_i - 1|.
  double povm_error() const {
    const auto da = static_cast<Eigen::Index>(product(ancilla_dims));
    CMatrix s = CMatrix::Zero(da, da);
    for (const auto& p : pairs) s += p.m.matrix();
    return max_abs(s - CMatrix::Identity(da, da));
  }
};

// per_qubit: every ancilla qubit outcome is its own branch, so each M_i is a
// weighted product of pure single-qubit projectors. parity: Pauli tests only;
// branches are the +-1 eigenspaces of the ancilla part of the string.
enum class OneWayGranularity { per_qubit, parity };

namespace detail {

inline Operator herm_op(CMatrix m, const Dims& dims) {
  m = 0.5 * (m + m.adjoint());
  return Operator(std::move(m), dims, {Flag::yes, Flag::unknown, Flag::unknown});
}

inline void push_merged(std::vector<OneWayPair>& out, Operator m, Operator n) {
  const double tm = m.trace().real();
  if (tm <= tol::structural) return;
  for (auto& p : out) {
    const double tp = p.m.trace().real();
    if (max_abs(p.n.matrix() - n.matrix()) <= tol::structural &&
        max_abs(p.m.matrix() / tp - m.matrix() / tm) <= tol::structural) {
      p.m = herm_op(p.m.matrix() + m.matrix(), p.m.dims());
      return;
    }
  }
  out.push_back({std::move(m), std::move(n)});
}

// Product projector for outcome string o over the given bases.
inline CMatrix outcome_projector(const std::vector<QubitBasis>& bases, std::size_t o) {
  CMatrix p = CMatrix::Ones(1, 1);
  const std::size_t n = bases.size();
  for (std::size_t q = 0; q < n; ++q) {
    p = kron(Operator(p), Operator(bases[q].projector((o >> (n - 1 - q)) & 1u))).matrix();
  }
  return p;
}

inline void expand_local(const LocalSettings& ls, double weight, std::size_t na,
                         std::vector<OneWayPair>& out) {
  const std::size_t n = ls.num_qubits();
  const std::size_t ns = n - na;
  const std::vector<QubitBasis> anc(ls.bases.begin(), ls.bases.begin() + static_cast<std::ptrdiff_t>(na));
  const std::vector<QubitBasis> sys(ls.bases.begin() + static_cast<std::ptrdiff_t>(na), ls.bases.end());
  const std::size_t da = std::size_t{1} << na, ds = std::size_t{1} << ns;
  for (std::size_t a = 0; a < da; ++a) {
    CMatrix eff = CMatrix::Zero(static_cast<Eigen::Index>(ds), static_cast<Eigen::Index>(ds));
    for (std::size_t s = 0; s < ds; ++s) {
      if (ls.passes((a << ns) | s)) eff += outcome_projector(sys, s);
    }
    push_merged(out, herm_op(weight * outcome_projector(anc, a), qubit_dims(na)),
                herm_op(std::move(eff), qubit_dims(ns)));
  }
}

inline PauliString sub_string(const PauliString& p, std::size_t from, std::size_t count) {
  PauliString out(count);
  for (std::size_t q = 0; q < count; ++q) out.set(q, p.x(from + q), p.z(from + q));
  return out;
}

}  // namespace detail

inline OneWayForm one_way_decompose(const AAPVStrategy& s,
                                    OneWayGranularity g = OneWayGranularity::per_qubit) {
  const std::size_t na = s.n_ancilla(), ns = s.n_system();
  OneWayForm f;
  f.ancilla_dims = qubit_dims(na);
  f.system_dims = qubit_dims(ns);
  for (std::size_t i = 0; i < s.tests().size(); ++i) {
    const auto& [p, t] = s.tests()[i];
    if (t.form() == Test::Form::one_way) {
      if (t.one_way_ancilla_qubits() != na) {
        throw DomainError("test " + std::to_string(i) + " splits ancilla/system differently");
      }
      for (const auto& b : t.branches()) {
        detail::push_merged(f.pairs, detail::herm_op(p * b.ancilla.matrix(), f.ancilla_dims),
                            b.system);
      }
      continue;
    }
    if (g == OneWayGranularity::per_qubit) {
      detail::expand_local(*t.local(), p, na, f.pairs);
      continue;
    }
    if (!t.pauli()) {
      throw DomainError("test " + std::to_string(i) +
                        " is not a Pauli product; parity split unsupported");
    }
    const PauliString& ps = *t.pauli();
    const PauliString pa = detail::sub_string(ps, 0, na);
    const PauliString psys = detail::sub_string(ps, na, ns);
    for (int a : {1, -1}) {
      if (pa.is_identity() && a == -1) continue;
      const Operator ma = pa.is_identity() ? Operator::identity(f.ancilla_dims)
                                           : eigenspace_projector(pa, a);
      const Operator nsys = psys.is_identity()
                                ? (a * ps.sign() == 1 ? Operator::identity(f.system_dims)
                                                      : Operator::zero(f.system_dims))
                                : eigenspace_projector(psys, a * ps.sign());
      detail::push_merged(f.pairs, detail::herm_op(p * ma.matrix(), f.ancilla_dims), nsys);
    }
  }
  return f;
}

//=============================================================================
// PMPVStrategy
//=============================================================================

struct PMPVEntry {
  double p;
  Operator input;   // normalized density matrix
  Operator effect;  // pass effect on the output
};

// Xi = sum_i p_i rho_i^T (x) N_i. An optional target Choi state enables the
// pass condition d <phi|Xi|phi> = 1.
class PMPVStrategy {
 public:
  PMPVStrategy() = default;

  PMPVStrategy(std::vector<PMPVEntry> entries, std::optional<PureState> target = std::nullopt)
      : entries_(std::move(entries)), target_(std::move(target)) {
    if (entries_.empty()) throw StrategyMalformed("PMPV strategy has no entries");
    dims_in_ = entries_.front().input.dims();
    dims_out_ = entries_.front().effect.dims();
    double total = 0.0;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      const auto& e = entries_[i];
      const std::string tag = "entry " + std::to_string(i);
      if (!(e.p > 0.0)) throw StrategyMalformed(tag + " has non-positive probability");
      if (e.input.dims() != dims_in_ || e.effect.dims() != dims_out_) {
        throw DimensionError(tag + " has inconsistent dims");
      }
      if (!is_density_matrix(e.input)) throw StrategyMalformed(tag + " input is not a density matrix");
      if (!e.effect.is_hermitian(tol::numeric)) throw StrategyMalformed(tag + " effect is not Hermitian");
      const auto spec = eig_hermitian(detail::herm_op(e.effect.matrix(), dims_out_));
      if (spec.values.back() < -tol::numeric || spec.values.front() > 1.0 + tol::numeric) {
        throw StrategyMalformed(tag + " effect is not between 0 and 1");
      }
      total += e.p;
    }
    if (std::abs(total - 1.0) > tol::structural) {
      throw StrategyMalformed("entry probabilities sum to " + std::to_string(total));
    }
    if (target_) {
      if (target_->dim() != d() * product(dims_out_)) {
        throw DimensionError("PMPV target dimension mismatch");
      }
      const CVector& v = target_->amplitudes();
      const double pass = static_cast<double>(d()) * v.dot(xi().matrix() * v).real();
      if (std::abs(pass - 1.0) > tol::numeric) {
        throw StrategyMalformed("target passes the PMPV strategy with probability " +
                                std::to_string(pass));
      }
    }
  }

  const std::vector<PMPVEntry>& entries() const noexcept { return entries_; }
  const std::optional<PureState>& target() const noexcept { return target_; }
  std::size_t d() const { return product(dims_in_); }
  const Dims& dims_in() const noexcept { return dims_in_; }
  const Dims& dims_out() const noexcept { return dims_out_; }

  Operator xi() const {
    const auto D = static_cast<Eigen::Index>(d() * product(dims_out_));
    CMatrix x = CMatrix::Zero(D, D);
    for (const auto& e : entries_) x += e.p * kron(transpose(e.input), e.effect).matrix();
    return detail::herm_op(std::move(x), detail::concat(dims_in_, dims_out_));
  }

  /// sum_i p_i rho_i.
  Operator mean_input() const {
    const auto D = static_cast<Eigen::Index>(d());
    CMatrix m = CMatrix::Zero(D, D);
    for (const auto& e : entries_) m += e.p * e.input.matrix();
    return detail::herm_op(std::move(m), dims_in_);
  }

 private:
  std::vector<PMPVEntry> entries_;
  std::optional<PureState> target_;
  Dims dims_in_;
  Dims dims_out_;
};

/// p_i = Tr M_i / d, rho_i = M_i^T / Tr M_i, keeping N_i.
inline PMPVStrategy to_pmpv(const OneWayForm& f, std::size_t d,
                            std::optional<PureState> target = std::nullopt) {
  if (product(f.ancilla_dims) != d) throw DimensionError("to_pmpv: ancilla dimension differs from d");
  if (f.povm_error() > tol::numeric) throw DomainError("to_pmpv: ancilla effects do not form a POVM");
  std::vector<PMPVEntry> entries;
  for (const auto& pr : f.pairs) {
    const double tr = pr.m.trace().real();
    if (tr <= tol::structural) continue;
    entries.push_back({tr / static_cast<double>(d),
                       detail::herm_op(pr.m.matrix().transpose() / tr, f.ancilla_dims), pr.n});
  }
  // Renormalize the summed weights against rounding in the traces.
  double total = 0.0;
  for (const auto& e : entries) total += e.p;
  for (auto& e : entries) e.p /= total;
  return PMPVStrategy(std::move(entries), std::move(target));
}

/// Decompose and convert in one step, carrying the strategy target along.
inline PMPVStrategy to_pmpv(const AAPVStrategy& s,
                            OneWayGranularity g = OneWayGranularity::per_qubit) {
  return to_pmpv(one_way_decompose(s, g), std::size_t{1} << s.n_ancilla(), s.target());
}

inline Operator xi_matrix(const PMPVStrategy& x) { return x.xi(); }

namespace detail {

inline void check_pmpv_dims(const PMPVStrategy& x, const QuantumProcess& e) {
  if (e.dims_in() != x.dims_in() || e.dims_out() != x.dims_out()) {
    throw DimensionError("process dims do not match the PMPV strategy");
  }
}

// sum_i p_i Tr[E(rho_i) N_i], cross-checked against Tr(Xi Upsilon_E).
inline double pmpv_numerator(const PMPVStrategy& x, const QuantumProcess& e) {
  double ens = 0.0;
  for (const auto& en : x.entries()) ens += en.p * trace_product(apply(e, en.input), en.effect);
  const double choi = trace_product(x.xi(), choi_matrix(e));
  if (std::abs(ens - choi) > tol::numeric) {
    throw Error("PMPV evaluation routes disagree: " + std::to_string(ens) + " vs " +
                std::to_string(choi));
  }
  return ens;
}

}  // namespace detail

/// Per-run pass probability sum_i p_i Tr[E(rho_i) N_i] = Tr(Xi Upsilon_E) of a
/// trace-preserving process. Its worst case over F_e <= 1 - eps is what the
/// failure bound controls.
inline double failure_probability(const PMPVStrategy& x, const QuantumProcess& e) {
  detail::check_pmpv_dims(x, e);
  if (!e.is_trace_preserving()) {
    throw DomainError("process is not trace preserving; use postselected_failure_probability");
  }
  return detail::pmpv_numerator(x, e);
}

/// Conditional pass probability Tr(Xi Upsilon_E) / Tr E(rho_bar).
inline double postselected_failure_probability(const PMPVStrategy& x, const QuantumProcess& e) {
  detail::check_pmpv_dims(x, e);
  const double den = apply(e, x.mean_input()).trace().real();
  if (den <= tol::structural) throw DomainError("process produces no output on the mean input");
  return detail::pmpv_numerator(x, e) / den;
}

}  // namespace qpv

#endif  // QPV_PMPV_HPP
