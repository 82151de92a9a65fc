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

#ifndef QPV_ORACLE_HPP
#define QPV_ORACLE_HPP

#include <limits>
#include <optional>
#include <vector>

#include <Eigen/QR>

#include "qpv/rng.hpp"
#include "qpv/strategies.hpp"

namespace qpv {

struct WorstCaseReport {
  double epsilon = 0.0;
  double analytic = 1.0;
  double subspace_max = 1.0;
  double random_search_max = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> tp_constrained_max;
  Operator maximizer;
  // The complement of the target still holds an eigenvalue-1 direction.
  bool degenerate = false;
};

namespace detail {

inline void check_epsilon(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in [0,1)");
}

// Orthonormal basis of the complement of phi, as D x (D-1) columns.
inline CMatrix complement_basis(const CVector& phi) {
  const CMatrix col = phi;
  Eigen::HouseholderQR<CMatrix> qr(col);
  const CMatrix q = qr.householderQ();
  return q.rightCols(q.cols() - 1);
}

}  // namespace detail

/// 1 - epsilon nu(Omega).
inline double analytic_worst_case(const AAPVStrategy& s, double epsilon) {
  detail::check_epsilon(epsilon);
  return 1.0 - epsilon * spectral_gap(s);
}

/// Exact maximum of Tr(Omega rho) over rho = (1-eps)|phi><phi| + eps tau with
/// tau supported on the complement of phi: (1-eps) + eps lambda_max(B^dag Omega B).
inline WorstCaseReport subspace_worst_case(const AAPVStrategy& s, double epsilon) {
  detail::check_epsilon(epsilon);
  WorstCaseReport r;
  r.epsilon = epsilon;
  const Operator& om = s.matrix();
  const CVector& phi = s.target().amplitudes();
  if (max_abs(om.matrix() * phi - phi) > tol::numeric) {
    throw StrategyMalformed("target is not an eigenvector of Omega with eigenvalue 1");
  }
  const CMatrix b = detail::complement_basis(phi);
  const CMatrix comp = b.adjoint() * om.matrix() * b;
  const auto spec = eig_hermitian(
      Operator(0.5 * (comp + comp.adjoint()), Dims{static_cast<std::size_t>(comp.rows())},
               {Flag::yes, Flag::unknown, Flag::unknown}),
      true);
  const double lam = spec.values.front();
  r.degenerate = lam >= 1.0 - tol::numeric;
  r.subspace_max = (1.0 - epsilon) + epsilon * lam;
  r.analytic = analytic_worst_case(s, epsilon);
  const CVector v = b * spec.vectors->col(0);
  CMatrix rho = (1.0 - epsilon) * phi * phi.adjoint() + epsilon * v * v.adjoint();
  r.maximizer = Operator(0.5 * (rho + rho.adjoint()), om.dims(),
                         {Flag::yes, Flag::unknown, Flag::unknown});
  return r;
}

/// Lower bound on the same maximum from sampled states on the fidelity
/// boundary. `seeds` are evaluated first (one trial each); the first half of
/// the remaining trials are uniformly random complement states, the second
/// half a (1+1) evolution strategy started from the best so far.
inline double random_search_worst_case(const AAPVStrategy& s, double epsilon, std::size_t trials,
                                       std::uint64_t rng_seed,
                                       const std::vector<CVector>& seeds = {}) {
  detail::check_epsilon(epsilon);
  if (trials == 0) throw DomainError("trials must be at least 1");
  if (epsilon == 0.0) return 1.0;
  const CMatrix& om = s.matrix().matrix();
  const CVector& phi = s.target().amplitudes();
  const double base = (1.0 - epsilon) * phi.dot(om * phi).real();
  const auto project = [&](CVector v) -> std::optional<CVector> {
    v -= phi * phi.dot(v);
    const double n = v.norm();
    if (n < 1e-12) return std::nullopt;
    return CVector(v / n);
  };
  const auto value = [&](const CVector& v) { return base + epsilon * v.dot(om * v).real(); };

  double best = -std::numeric_limits<double>::infinity();
  CVector best_v;
  std::size_t t = 0;
  for (const auto& sv : seeds) {
    if (t >= trials) break;
    ++t;
    if (auto v = project(sv)) {
      const double val = value(*v);
      if (val > best) best = val, best_v = *v;
    }
  }
  const std::size_t remaining = trials - t;
  const std::size_t haar = (remaining + 1) / 2;
  for (std::size_t k = 0; k < haar; ++k, ++t) {
    KeyedRng rng(rng_seed, t);
    if (auto v = project(gaussian_vector(rng, phi.size()))) {
      const double val = value(*v);
      if (val > best) best = val, best_v = *v;
    }
  }
  double sigma = 0.3;
  for (; t < trials; ++t) {
    if (best_v.size() == 0) break;
    KeyedRng rng(rng_seed, t);
    const CVector step = gaussian_vector(rng, phi.size()) / std::sqrt(static_cast<double>(phi.size()));
    if (auto v = project(best_v + sigma * step)) {
      const double val = value(*v);
      if (val > best) {
        best = val;
        best_v = *v;
        sigma *= 2.0;
      } else {
        sigma = std::max(sigma * 0.84, 1e-8);
      }
    }
  }
  return best;
}

namespace detail {

// Choi state of a random trace-preserving map from a Haar-ish isometry with
// r Kraus operators.
inline CMatrix random_tp_choi(KeyedRng& rng, std::size_t din, std::size_t dout) {
  const std::size_t r = 1 + static_cast<std::size_t>(rng.uniform() * static_cast<double>(din * dout));
  const auto rows = static_cast<Eigen::Index>(std::min(r, din * dout) * dout);
  CMatrix g(rows, static_cast<Eigen::Index>(din));
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = rng.complex_normal();
  }
  Eigen::HouseholderQR<CMatrix> qr(g);
  const CMatrix iso = CMatrix(qr.householderQ()).leftCols(static_cast<Eigen::Index>(din));
  const auto D = static_cast<Eigen::Index>(din * dout);
  CMatrix choi = CMatrix::Zero(D, D);
  for (Eigen::Index k = 0; k * static_cast<Eigen::Index>(dout) < iso.rows(); ++k) {
    const CMatrix kr = iso.middleRows(k * static_cast<Eigen::Index>(dout),
                                      static_cast<Eigen::Index>(dout));
    CVector v(D);
    for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(din); ++c) {
      v.segment(c * static_cast<Eigen::Index>(dout), static_cast<Eigen::Index>(dout)) = kr.col(c);
    }
    choi += v * v.adjoint();
  }
  return choi / static_cast<double>(din);
}

}  // namespace detail

/// Random search restricted to Choi states of trace-preserving processes:
/// random channels mixed with the target so the fidelity is exactly 1 - eps.
/// Trial 0 uses the completely depolarizing channel. Samples whose channel is
/// already closer than 1 - eps are skipped; NaN if every sample was.
inline double tp_constrained_search(const AAPVStrategy& s, double epsilon, std::size_t trials,
                                    std::uint64_t rng_seed) {
  detail::check_epsilon(epsilon);
  if (trials == 0) throw DomainError("trials must be at least 1");
  const CVector& phi = s.target().amplitudes();
  const std::size_t din = std::size_t{1} << s.n_ancilla();
  const std::size_t dout = std::size_t{1} << s.n_system();
  const Operator rho_t = s.target().density();
  {
    std::vector<std::size_t> keep;
    for (std::size_t q = 0; q < s.n_ancilla(); ++q) keep.push_back(q);
    const Operator red = partial_trace(rho_t, keep);
    const auto da = static_cast<Eigen::Index>(din);
    if (max_abs(red.matrix() - CMatrix::Identity(da, da) / static_cast<double>(din)) > tol::numeric) {
      throw DomainError("target is not the Choi state of a trace-preserving process");
    }
  }
  if (epsilon == 0.0) return 1.0;
  const CMatrix& om = s.matrix().matrix();
  const double pass_t = phi.dot(om * phi).real();
  double best = -std::numeric_limits<double>::infinity();
  const auto D = static_cast<Eigen::Index>(din * dout);
  for (std::size_t t = 0; t < trials; ++t) {
    CMatrix choi;
    if (t == 0) {
      choi = CMatrix::Identity(D, D) / static_cast<double>(D);
    } else {
      KeyedRng rng(rng_seed, t);
      choi = detail::random_tp_choi(rng, din, dout);
    }
    const double f = phi.dot(choi * phi).real();
    if (1.0 - f < epsilon) continue;
    const double mix = epsilon / (1.0 - f);
    const double pass = (om.array() * choi.transpose().array()).sum().real();
    best = std::max(best, (1.0 - mix) * pass_t + mix * pass);
  }
  if (best == -std::numeric_limits<double>::infinity()) return std::numeric_limits<double>::quiet_NaN();
  return best;
}

/// All figures at once.
inline WorstCaseReport worst_case_report(const AAPVStrategy& s, double epsilon,
                                         std::size_t trials, std::uint64_t rng_seed,
                                         bool with_tp = true) {
  WorstCaseReport r = subspace_worst_case(s, epsilon);
  r.random_search_max = random_search_worst_case(s, epsilon, trials, rng_seed);
  if (with_tp) {
    try {
      r.tp_constrained_max = tp_constrained_search(s, epsilon, trials, rng_seed ^ 0x5bd1e995u);
    } catch (const DomainError&) {
      r.tp_constrained_max.reset();
    }
  }
  return r;
}

}  // namespace qpv

#endif  // QPV_ORACLE_HPP
