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

#ifndef QPV_MEAS_VERIFY_HPP
#define QPV_MEAS_VERIFY_HPP

#include <vector>

#include "qpv/simulator.hpp"

namespace qpv {

// POVM {M_i} with one effect per outcome.
class MeasurementModel {
 public:
  MeasurementModel() = default;

  explicit MeasurementModel(std::vector<Operator> effects) : effects_(std::move(effects)) {
    if (effects_.empty()) throw DomainError("measurement needs at least one effect");
    const Dims dims = effects_.front().dims();
    const auto d = static_cast<Eigen::Index>(effects_.front().dim());
    CMatrix sum = CMatrix::Zero(d, d);
    for (std::size_t i = 0; i < effects_.size(); ++i) {
      const auto& m = effects_[i];
      if (m.dims() != dims) throw DimensionError("effect " + std::to_string(i) + " has different dims");
      if (!m.is_hermitian(tol::numeric)) throw DomainError("effect " + std::to_string(i) + " is not Hermitian");
      const Operator h(0.5 * (m.matrix() + m.matrix().adjoint()), dims,
                       {Flag::yes, Flag::unknown, Flag::unknown});
      if (eig_hermitian(h).values.back() < -tol::numeric) {
        throw DomainError("effect " + std::to_string(i) + " is not positive semidefinite");
      }
      sum += m.matrix();
    }
    if (max_abs(sum - CMatrix::Identity(d, d)) > tol::numeric) {
      throw DomainError("effects do not sum to the identity");
    }
  }

  const std::vector<Operator>& effects() const noexcept { return effects_; }
  std::size_t num_outcomes() const noexcept { return effects_.size(); }
  std::size_t dim() const { return effects_.front().dim(); }
  const Dims& dims() const { return effects_.front().dims(); }

 private:
  std::vector<Operator> effects_;
};

// Rank-one projective measurement {|i><i|} in an orthonormal basis.
class ProjectiveTarget {
 public:
  ProjectiveTarget() = default;

  explicit ProjectiveTarget(std::vector<PureState> basis) : basis_(std::move(basis)) {
    if (basis_.empty()) throw DomainError("target basis is empty");
    const std::size_t d = basis_.front().dim();
    if (basis_.size() != d) throw DimensionError("target basis must have d vectors");
    for (std::size_t i = 0; i < d; ++i) {
      if (basis_[i].dim() != d) throw DimensionError("basis vectors differ in length");
      for (std::size_t j = 0; j < i; ++j) {
        if (std::abs(basis_[j].amplitudes().dot(basis_[i].amplitudes())) > tol::structural) {
          throw DomainError("basis vectors " + std::to_string(j) + " and " + std::to_string(i) +
                            " are not orthogonal");
        }
      }
    }
  }

  static ProjectiveTarget computational(const Dims& dims) {
    std::vector<PureState> b;
    for (std::size_t i = 0; i < product(dims); ++i) b.push_back(PureState::basis(i, dims));
    return ProjectiveTarget(std::move(b));
  }

  const std::vector<PureState>& basis() const noexcept { return basis_; }
  std::size_t dim() const { return basis_.front().dim(); }

 private:
  std::vector<PureState> basis_;
};

namespace detail {

inline void check_pair(const MeasurementModel& m, const ProjectiveTarget& p) {
  if (m.dim() != p.dim() || m.num_outcomes() != p.dim()) {
    throw DimensionError("measurement and target sizes differ");
  }
}

}  // namespace detail

/// <i|M_i|i> for each outcome i.
inline std::vector<double> per_outcome_pass_probabilities(const MeasurementModel& m,
                                                          const ProjectiveTarget& p) {
  detail::check_pair(m, p);
  std::vector<double> out;
  for (std::size_t i = 0; i < p.dim(); ++i) {
    const CVector& v = p.basis()[i].amplitudes();
    out.push_back(v.dot(m.effects()[i].matrix() * v).real());
  }
  return out;
}

/// (1/d) sum_i <i|M_i|i>.
inline double measurement_fidelity(const MeasurementModel& m, const ProjectiveTarget& p) {
  double f = 0.0;
  for (double x : per_outcome_pass_probabilities(m, p)) f += x;
  return f / static_cast<double>(p.dim());
}

/// Prepare |i> with i uniform, pass iff the outcome is i.
inline RunResult verify_measurement(const MeasurementModel& m, const ProjectiveTarget& p,
                                    std::uint64_t N, std::uint64_t rng_seed) {
  if (N == 0) throw DomainError("N must be at least 1");
  std::vector<double> pass = per_outcome_pass_probabilities(m, p);
  for (auto& x : pass) x = detail::snap(x);
  const std::vector<double> uniform(p.dim(), 1.0);
  RunResult r;
  for (std::uint64_t k = 0; k < N; ++k) {
    KeyedRng rng(rng_seed, k);
    const std::size_t i = rng.categorical(uniform);
    detail::tally(r, rng.bernoulli(pass[i]));
  }
  r.postselected_rounds = r.rounds_executed;
  return r;
}

/// ceil(ln(1/delta) / ln(1/(1-epsilon))).
inline std::uint64_t plan_measurement_samples(double epsilon, double delta) {
  return plan_samples(epsilon, delta, 1.0).N;
}

/// M_i = (1-eps)|i><i| + eps|i+1><i+1| (indices mod d): fidelity exactly
/// 1 - eps with every outcome passing at 1 - eps.
inline MeasurementModel damped_model(const ProjectiveTarget& p, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw DomainError("epsilon must lie in [0,1]");
  const std::size_t d = p.dim();
  if (d < 2) throw DomainError("damped model needs d >= 2");
  const Dims dims = p.basis().front().dims();
  std::vector<Operator> eff;
  for (std::size_t i = 0; i < d; ++i) {
    const CVector& a = p.basis()[i].amplitudes();
    const CVector& b = p.basis()[(i + 1) % d].amplitudes();
    CMatrix m = (1.0 - epsilon) * a * a.adjoint() + epsilon * b * b.adjoint();
    eff.emplace_back(0.5 * (m + m.adjoint()), dims, OperatorFlags{Flag::yes, Flag::unknown, Flag::unknown});
  }
  return MeasurementModel(std::move(eff));
}

/// Outcome i as a trace-decreasing process with Kraus operator sqrt(M_i), for
/// routing through the postselected process machinery.
inline QuantumProcess outcome_process(const MeasurementModel& m, std::size_t i) {
  if (i >= m.num_outcomes()) throw DimensionError("outcome index out of range");
  const Operator h(0.5 * (m.effects()[i].matrix() + m.effects()[i].matrix().adjoint()),
                   m.dims(), {Flag::yes, Flag::unknown, Flag::unknown});
  const auto spec = eig_hermitian(h, true);
  const CMatrix& v = *spec.vectors;
  Eigen::VectorXd s(static_cast<Eigen::Index>(spec.values.size()));
  for (std::size_t k = 0; k < spec.values.size(); ++k) {
    s(static_cast<Eigen::Index>(k)) = std::sqrt(std::max(spec.values[k], 0.0));
  }
  const CMatrix root = v * s.cast<cplx>().asDiagonal() * v.adjoint();
  return QuantumProcess::kraus({root}, m.dims());
}

}  // namespace qpv

#endif  // QPV_MEAS_VERIFY_HPP
