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

#ifndef QPV_STRATEGIES_HPP
#define QPV_STRATEGIES_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qpv/channels.hpp"
#include "qpv/clifford.hpp"
#include "qpv/hypergraph.hpp"
#include "qpv/pauli.hpp"

namespace qpv {

//=============================================================================
// Local measurement descriptions
//=============================================================================

// Single-qubit projective measurement along a Bloch axis. Outcome bit 0 is
// the +1 eigenvector, bit 1 the -1 eigenvector. Label 'I' means the qubit is
// not needed; it is read out in Z and the outcome is ignored.
struct QubitBasis {
  char label = 'Z';  // I, X, Y, Z or A (arbitrary axis)
  std::array<double, 3> axis{0.0, 0.0, 1.0};

  static QubitBasis pauli(char c) {
    switch (c) {
      case 'I': return {'I', {0.0, 0.0, 1.0}};
      case 'X': return {'X', {1.0, 0.0, 0.0}};
      case 'Y': return {'Y', {0.0, 1.0, 0.0}};
      case 'Z': return {'Z', {0.0, 0.0, 1.0}};
      default:
        throw DomainError("unknown basis label '" + std::string(1, c) + "'");
    }
  }

  static QubitBasis along(std::array<double, 3> n) {
    const double nrm = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
    if (nrm < 1e-9) throw DomainError("measurement axis has zero length");
    for (auto& c : n) c /= nrm;
    return {'A', n};
  }

  bool measured() const noexcept { return label != 'I'; }

  /// Columns are the outcome-0 and outcome-1 eigenvectors.
  CMatrix eigenbasis() const {
    const double r = 1.0 / std::sqrt(2.0);
    const cplx i(0.0, 1.0);
    CMatrix v(2, 2);
    switch (label) {
      case 'I':
      case 'Z':
        v << 1, 0, 0, 1;
        return v;
      case 'X':
        v << r, r, r, -r;
        return v;
      case 'Y':
        v << r, r, i * r, -i * r;
        return v;
      default:
        break;
    }
    const double theta = std::acos(std::clamp(axis[2], -1.0, 1.0));
    const double phi = std::atan2(axis[1], axis[0]);
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    const cplx e = std::polar(1.0, phi);
    v << c, -std::conj(e) * s, e * s, c;
    return v;
  }

  /// Projector onto outcome bit b; (1 +- sigma)/2 entrywise for Pauli labels.
  CMatrix projector(unsigned bit) const {
    const double sg = bit == 0 ? 0.5 : -0.5;
    const cplx i(0.0, 1.0);
    CMatrix p = 0.5 * CMatrix::Identity(2, 2);
    switch (label) {
      case 'I':
      case 'Z':
        p(0, 0) += sg;
        p(1, 1) -= sg;
        return p;
      case 'X':
        p(0, 1) = p(1, 0) = sg;
        return p;
      case 'Y':
        p(0, 1) = -i * sg;
        p(1, 0) = i * sg;
        return p;
      default:
        break;
    }
    const CVector v = eigenbasis().col(bit);
    return v * v.adjoint();
  }
};

// Parity condition on measured bits b_q (0 for outcome +1, 1 for -1):
//   prod_{q in qubits} (-1)^{b_q} * prod_{m in monomials} (-1)^{prod_{u in m} b_u} == sign.
struct ParityCheck {
  std::vector<std::size_t> qubits;
  std::vector<std::vector<std::size_t>> monomials;
  int sign = 1;

  bool holds(std::size_t outcome, std::size_t n) const {
    const auto bit = [&](std::size_t q) { return (outcome >> (n - 1 - q)) & 1u; };
    std::size_t parity = 0;
    for (auto q : qubits) parity ^= bit(q);
    for (const auto& m : monomials) {
      std::size_t prod = 1;
      for (auto u : m) prod &= bit(u);
      parity ^= prod;
    }
    return (parity == 0 ? 1 : -1) == sign;
  }
};

// Product-basis measurement plus a pass rule made of parity checks, all of
// which must hold.
struct LocalSettings {
  std::vector<QubitBasis> bases;
  std::vector<ParityCheck> checks;

  std::size_t num_qubits() const noexcept { return bases.size(); }

  bool passes(std::size_t outcome) const {
    for (const auto& c : checks) {
      if (!c.holds(outcome, bases.size())) return false;
    }
    return true;
  }

  /// Unitary whose column o is the product eigenvector for outcome string o.
  CMatrix basis_change() const {
    CMatrix v = CMatrix::Identity(1, 1);
    for (const auto& b : bases) v = kron(Operator(v), Operator(b.eigenbasis())).matrix();
    return v;
  }

  void validate() const {
    const std::size_t n = bases.size();
    for (const auto& c : checks) {
      if (c.sign != 1 && c.sign != -1) throw DomainError("parity check sign must be +1 or -1");
      for (auto q : c.qubits) {
        if (q >= n) throw DimensionError("parity check qubit out of range");
      }
      for (const auto& m : c.monomials) {
        for (auto q : m) {
          if (q >= n) throw DimensionError("parity check monomial qubit out of range");
        }
      }
    }
  }

  /// Dense projector V diag(pass) V^dagger.
  Operator lower() const {
    const std::size_t n = bases.size();
    const std::size_t D = std::size_t{1} << n;
    check_dim(D, "local test");
    const CMatrix v = basis_change();
    CMatrix sel = CMatrix::Zero(v.rows(), v.cols());
    Eigen::Index k = 0;
    for (std::size_t o = 0; o < D; ++o) {
      if (passes(o)) sel.col(k++) = v.col(static_cast<Eigen::Index>(o));
    }
    CMatrix p = sel.leftCols(k) * sel.leftCols(k).adjoint();
    p = 0.5 * (p + p.adjoint());
    return Operator(std::move(p), qubit_dims(n), {Flag::yes, Flag::unknown, Flag::yes});
  }
};

/// Local description of the +1 (sign = +1) eigenspace test of a Hermitian Pauli string.
inline LocalSettings pauli_local_settings(const PauliString& p) {
  LocalSettings s;
  ParityCheck c;
  for (std::size_t q = 0; q < p.num_qubits(); ++q) {
    s.bases.push_back(QubitBasis::pauli(p.letter(q)));
    if (p.letter(q) != 'I') c.qubits.push_back(q);
  }
  c.sign = p.sign();
  s.checks.push_back(std::move(c));
  return s;
}

//=============================================================================
// Test
//=============================================================================

// One outcome branch of an ancilla-first test: the ancilla effect and the
// system effect applied when that ancilla effect fires.
struct OneWayBranch {
  Operator ancilla;
  Operator system;
};

namespace detail {

// Tr(P M) for a Pauli string P, touching only its nonzero entries.
inline cplx pauli_trace(const PauliString& p, const CMatrix& m) {
  const auto a = pauli_action(p);
  cplx acc = 0.0;
  for (std::size_t col = 0; col < static_cast<std::size_t>(m.cols()); ++col) {
    const double s = (std::popcount(col & a.zmask) % 2 == 0) ? 1.0 : -1.0;
    acc += s * m(static_cast<Eigen::Index>(col), static_cast<Eigen::Index>(col ^ a.xmask));
  }
  return acc * a.base;
}

}  // namespace detail

// A pass-or-fail test on ancilla (x) system. Held symbolically (Pauli string
// or local settings) or as explicit one-way branches; the dense projector is
// lowered on first use and cached.
class Test {
 public:
  enum class Form { pauli, local, one_way };

  Test() = default;

  static Test from_pauli(PauliString p) {
    if (!p.is_hermitian()) throw DomainError("test Pauli string " + p.str() + " is not Hermitian");
    Test t(Form::pauli, p.num_qubits());
    t.local_ = pauli_local_settings(p);
    t.pauli_ = std::move(p);
    return t;
  }

  static Test from_local(LocalSettings s) {
    s.validate();
    Test t(Form::local, s.num_qubits());
    t.local_ = std::move(s);
    return t;
  }

  /// `n_ancilla` qubits carry the ancilla effects, the rest the system effects.
  static Test from_one_way(std::vector<OneWayBranch> branches, std::size_t n_ancilla) {
    if (branches.empty()) throw DomainError("one-way test needs at least one branch");
    const std::size_t da = std::size_t{1} << n_ancilla;
    const std::size_t ds = branches.front().system.dim();
    std::size_t ns = 0;
    while ((std::size_t{1} << ns) < ds) ++ns;
    for (const auto& b : branches) {
      if (b.ancilla.dim() != da || b.system.dim() != ds || (std::size_t{1} << ns) != ds) {
        throw DimensionError("one-way branch dimensions are inconsistent");
      }
    }
    Test t(Form::one_way, n_ancilla + ns);
    t.branches_ = std::move(branches);
    t.n_ancilla_ = n_ancilla;
    return t;
  }

  Form form() const noexcept { return form_; }
  std::size_t num_qubits() const noexcept { return n_; }
  const std::optional<PauliString>& pauli() const noexcept { return pauli_; }
  /// Present for Pauli and local tests.
  const std::optional<LocalSettings>& local() const noexcept { return local_; }
  const std::vector<OneWayBranch>& branches() const noexcept { return branches_; }
  std::size_t one_way_ancilla_qubits() const noexcept { return n_ancilla_; }

  const Operator& projector() const {
    std::call_once(cache_->once, [this] { cache_->proj = lower(); });
    return cache_->proj;
  }

  /// Tr(P rho).
  double pass_probability(const Operator& rho) const {
    if (rho.dim() != (std::size_t{1} << n_)) throw DimensionError("test/state dimension mismatch");
    if (pauli_) {
      return 0.5 * (rho.trace().real() + detail::pauli_trace(*pauli_, rho.matrix()).real());
    }
    return trace_product(projector(), rho);
  }

  /// <v|P|v>.
  double pass_probability(const CVector& v) const {
    if (static_cast<std::size_t>(v.size()) != (std::size_t{1} << n_)) {
      throw DimensionError("test/state dimension mismatch");
    }
    if (pauli_) return 0.5 * (v.squaredNorm() + pauli_expectation(*pauli_, v).real());
    return v.dot(projector().matrix() * v).real();
  }

  /// omega += weight * P.
  void accumulate(CMatrix& omega, double weight) const {
    if (pauli_) {
      omega.diagonal().array() += 0.5 * weight;
      add_pauli(omega, *pauli_, 0.5 * weight);
      return;
    }
    omega += weight * projector().matrix();
  }

  std::string describe() const {
    if (pauli_) return pauli_->str();
    if (form_ == Form::local) return "local";
    return "one-way";
  }

 private:
  Test(Form f, std::size_t n) : form_(f), n_(n), cache_(std::make_shared<Cache>()) {}

  Operator lower() const {
    if (pauli_) return eigenspace_projector(*pauli_, +1);
    if (local_) return local_->lower();
    const std::size_t D = std::size_t{1} << n_;
    check_dim(D, "one-way test");
    CMatrix p = CMatrix::Zero(static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(D));
    for (const auto& b : branches_) p += kron(b.ancilla, b.system).matrix();
    p = 0.5 * (p + p.adjoint());
    return Operator(std::move(p), qubit_dims(n_), {Flag::yes, Flag::unknown, Flag::yes});
  }

  struct Cache {
    std::once_flag once;
    Operator proj;
  };

  Form form_ = Form::pauli;
  std::size_t n_ = 0;
  std::optional<PauliString> pauli_;
  std::optional<LocalSettings> local_;
  std::vector<OneWayBranch> branches_;
  std::size_t n_ancilla_ = 0;
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

//=============================================================================
// AAPVStrategy
//=============================================================================

struct WeightedTest {
  double p;
  Test test;
};

// Omega = sum_i p_i P_i on n_ancilla + n_system qubits (ancilla first) with
// the Choi state it verifies.
class AAPVStrategy {
 public:
  AAPVStrategy() = default;

  AAPVStrategy(std::vector<WeightedTest> tests, PureState target, std::size_t n_ancilla,
               std::size_t n_system, std::string label = {})
      : tests_(std::move(tests)),
        target_(std::move(target)),
        n_ancilla_(n_ancilla),
        n_system_(n_system),
        label_(std::move(label)),
        cache_(std::make_shared<Cache>()) {
    const std::size_t n = n_ancilla_ + n_system_;
    if (n_ancilla_ == 0 || n_system_ == 0) {
      throw DomainError("strategy needs at least one ancilla and one system qubit");
    }
    check_dim(std::size_t{1} << n, "strategy");
    if (target_.dim() != (std::size_t{1} << n)) {
      throw DimensionError("target state dimension does not match " + std::to_string(n) +
                           " qubits");
    }
    if (tests_.empty()) throw StrategyMalformed("strategy has no tests");
    double total = 0.0;
    for (std::size_t i = 0; i < tests_.size(); ++i) {
      const auto& wt = tests_[i];
      if (!(wt.p > 0.0)) {
        throw StrategyMalformed("test " + std::to_string(i) + " has non-positive probability");
      }
      if (wt.test.num_qubits() != n) {
        throw DimensionError("test " + std::to_string(i) + " acts on the wrong qubit count");
      }
      total += wt.p;
    }
    if (std::abs(total - 1.0) > tol::structural) {
      throw StrategyMalformed("test probabilities sum to " + std::to_string(total));
    }
    for (std::size_t i = 0; i < tests_.size(); ++i) {
      const double pass = tests_[i].test.pass_probability(target_.amplitudes());
      if (std::abs(pass - 1.0) > tol::numeric) {
        throw StrategyMalformed("test " + std::to_string(i) + " (" + tests_[i].test.describe() +
                                ") passes the target with probability " +
                                std::to_string(pass));
      }
    }
  }

  const std::vector<WeightedTest>& tests() const noexcept { return tests_; }
  const PureState& target() const noexcept { return target_; }
  std::size_t n_ancilla() const noexcept { return n_ancilla_; }
  std::size_t n_system() const noexcept { return n_system_; }
  std::size_t num_qubits() const noexcept { return n_ancilla_ + n_system_; }
  const std::string& label() const noexcept { return label_; }

  /// Cached dense Omega.
  const Operator& matrix() const {
    std::call_once(cache_->once, [this] {
      const auto D = static_cast<Eigen::Index>(target_.dim());
      CMatrix om = CMatrix::Zero(D, D);
      for (const auto& wt : tests_) wt.test.accumulate(om, wt.p);
      om = 0.5 * (om + om.adjoint());
      cache_->omega = Operator(std::move(om), qubit_dims(num_qubits()),
                               {Flag::yes, Flag::unknown, Flag::unknown});
    });
    return cache_->omega;
  }

 private:
  struct Cache {
    std::once_flag once;
    Operator omega;
  };

  std::vector<WeightedTest> tests_;
  PureState target_;
  std::size_t n_ancilla_ = 0;
  std::size_t n_system_ = 0;
  std::string label_;
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

inline const Operator& strategy_matrix(const AAPVStrategy& s) { return s.matrix(); }

/// 1 - lambda_2(Omega). Zero when the eigenvalue 1 is degenerate.
inline double spectral_gap(const AAPVStrategy& s) {
  const Operator& om = s.matrix();
  const CVector& phi = s.target().amplitudes();
  const CVector r = om.matrix() * phi - phi;
  if (r.cwiseAbs().maxCoeff() > tol::numeric) {
    throw StrategyMalformed("target is not an eigenvector of Omega with eigenvalue 1");
  }
  const auto spec = eig_hermitian(om);
  if (std::abs(spec.values.front() - 1.0) > tol::numeric) {
    throw StrategyMalformed("largest eigenvalue of Omega is " +
                            std::to_string(spec.values.front()));
  }
  if (spec.values.size() < 2) return 1.0;
  return std::clamp(1.0 - spec.values[1], 0.0, 1.0);
}

//=============================================================================
// Sample planning
//=============================================================================

struct SamplePlan {
  double epsilon = 0.0;
  double delta = 0.0;
  double nu = 0.0;
  std::uint64_t N = 0;
  double approx = 0.0;  // ln(1/delta) / (nu epsilon)
};

/// N = ceil(ln(1/delta) / ln(1/(1 - nu epsilon))), at least 1.
inline SamplePlan plan_samples(double epsilon, double delta, double nu) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0,1)");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0,1)");
  if (!(nu > 0.0 && nu <= 1.0)) throw DomainError("nu must lie in (0,1]");
  SamplePlan p{epsilon, delta, nu, 1, 0.0};
  const double num = -std::log(delta);
  const double den = -std::log1p(-nu * epsilon);
  const double n = std::ceil(num / den);
  if (n > 1.0) p.N = static_cast<std::uint64_t>(n);
  p.approx = num / (nu * epsilon);
  return p;
}

/// (1 - epsilon nu)^N.
inline double confidence(double epsilon, double nu, std::uint64_t N) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw DomainError("epsilon must lie in [0,1]");
  if (!(nu >= 0.0 && nu <= 1.0)) throw DomainError("nu must lie in [0,1]");
  if (N == 0) return 1.0;
  return std::pow(1.0 - epsilon * nu, static_cast<double>(N));
}

/// (d-1)/d, the best gap for maximally entangled targets; planning only.
inline double max_entangled_optimal_gap(std::size_t d) {
  if (d < 2) throw DomainError("dimension must be at least 2");
  return static_cast<double>(d - 1) / static_cast<double>(d);
}

//=============================================================================
// Builders
//=============================================================================

/// Weighted Pauli tests (each the +1 eigenspace of a signed string).
inline AAPVStrategy pauli_protocol(const std::vector<std::pair<double, PauliString>>& tests,
                                   PureState target, std::size_t n_ancilla,
                                   std::size_t n_system, std::string label = {}) {
  std::vector<WeightedTest> wt;
  wt.reserve(tests.size());
  for (const auto& [p, s] : tests) wt.push_back({p, Test::from_pauli(s)});
  return AAPVStrategy(std::move(wt), std::move(target), n_ancilla, n_system, std::move(label));
}

inline std::vector<std::pair<double, PauliString>> uniform_tests(
    const std::vector<PauliString>& strings) {
  std::vector<std::pair<double, PauliString>> out;
  for (const auto& s : strings) out.emplace_back(1.0 / static_cast<double>(strings.size()), s);
  return out;
}

inline std::vector<std::pair<double, PauliString>> uniform_tests(
    std::initializer_list<const char*> strings) {
  std::vector<PauliString> v;
  for (auto s : strings) v.push_back(PauliString::parse(s));
  return uniform_tests(v);
}

namespace detail {

inline PureState group_target(const StabilizerGroup& g) {
  if (g.size() != g.num_qubits()) {
    throw DomainError("generators do not fix a unique state (" + std::to_string(g.size()) +
                      " generators on " + std::to_string(g.num_qubits()) + " qubits)");
  }
  return stabilizer_state(g);
}

inline std::size_t default_ancilla(std::size_t n, std::optional<std::size_t> n_ancilla) {
  const std::size_t na = n_ancilla.value_or(n / 2);
  if (na == 0 || na >= n) throw DomainError("invalid ancilla/system split");
  return na;
}

}  // namespace detail

/// Uniform mixture over the generator tests.
inline AAPVStrategy generator_protocol(const StabilizerGroup& g,
                                       std::optional<std::size_t> n_ancilla = std::nullopt,
                                       std::string label = {}) {
  const std::size_t na = detail::default_ancilla(g.num_qubits(), n_ancilla);
  return pauli_protocol(uniform_tests(g.generators()), detail::group_target(g), na,
                        g.num_qubits() - na, std::move(label));
}

/// Uniform mixture over all 2^k - 1 nontrivial group elements.
inline AAPVStrategy full_group_protocol(const StabilizerGroup& g,
                                        std::optional<std::size_t> n_ancilla = std::nullopt,
                                        std::string label = {}) {
  const std::size_t na = detail::default_ancilla(g.num_qubits(), n_ancilla);
  return pauli_protocol(uniform_tests(group_elements(g)), detail::group_target(g), na,
                        g.num_qubits() - na, std::move(label));
}

namespace detail {

inline std::array<double, 3> bloch(const CMatrix& h) {
  return {(h * pauli_matrix::X()).trace().real() / 2, (h * pauli_matrix::Y()).trace().real() / 2,
          (h * pauli_matrix::Z()).trace().real() / 2};
}

}  // namespace detail

/// Substitution rule on the Bell stabilizers: sigma (x) sigma -> sigma (x) U sigma U^dag
/// for sigma in {X, Z} (2 settings) or {X, -Y, Z} (3 settings).
inline AAPVStrategy single_qubit_gate_protocol(const Operator& u, int settings,
                                               std::string label = {}) {
  if (u.dim() != 2) throw DimensionError("single_qubit_gate_protocol: U must be 2x2");
  if (max_abs(u.matrix().adjoint() * u.matrix() - CMatrix::Identity(2, 2)) > tol::numeric) {
    throw DomainError("single_qubit_gate_protocol: U is not unitary");
  }
  std::vector<std::pair<char, int>> base;
  if (settings == 2) {
    base = {{'X', 1}, {'Z', 1}};
  } else if (settings == 3) {
    base = {{'X', 1}, {'Y', -1}, {'Z', 1}};
  } else {
    throw DomainError("settings must be 2 or 3");
  }
  static const char kLetters[3] = {'X', 'Y', 'Z'};
  std::vector<WeightedTest> tests;
  for (const auto& [sigma, s] : base) {
    const CMatrix pm = sigma == 'X' ? pauli_matrix::X()
                       : sigma == 'Y' ? pauli_matrix::Y()
                                      : pauli_matrix::Z();
    const auto c = detail::bloch(u.matrix() * pm * u.matrix().adjoint());
    std::optional<std::size_t> axis;
    for (std::size_t k = 0; k < 3; ++k) {
      if (std::abs(std::abs(c[k]) - 1.0) <= tol::structural) axis = k;
    }
    const double p = 1.0 / static_cast<double>(base.size());
    if (axis) {
      std::string str = (s * (c[*axis] > 0 ? 1 : -1)) > 0 ? "+" : "-";
      str.push_back(sigma);
      str.push_back(kLetters[*axis]);
      tests.push_back({p, Test::from_pauli(PauliString::parse(str))});
    } else {
      LocalSettings ls;
      ls.bases = {QubitBasis::pauli(sigma), QubitBasis::along(c)};
      ls.checks.push_back(ParityCheck{{0, 1}, {}, s});
      tests.push_back({p, Test::from_local(std::move(ls))});
    }
  }
  const PureState target = choi_pure_state(QuantumProcess::unitary(u));
  return AAPVStrategy(std::move(tests), target, 1, 1, std::move(label));
}

/// Coloring protocol for a hypergraph state: one test per color class A,
/// measuring A in X and everything else in Z; passes iff for each v in A the
/// parity X_v prod_{e containing v} Z_{e minus v} is +1.
inline AAPVStrategy hypergraph_protocol(const Hypergraph& h, std::size_t n_ancilla,
                                        std::string label = {}) {
  const Coloring col = proper_coloring(h);
  const std::size_t n = h.num_vertices();
  std::vector<WeightedTest> tests;
  for (std::size_t c = 0; c < col.num_colors; ++c) {
    LocalSettings ls;
    for (std::size_t v = 0; v < n; ++v) {
      ls.bases.push_back(QubitBasis::pauli(col.color[v] == c ? 'X' : 'Z'));
    }
    for (auto v : col.vertices_with(c)) {
      ParityCheck pc;
      pc.qubits = {v};
      for (const auto& e : h.edges()) {
        if (!std::binary_search(e.begin(), e.end(), v)) continue;
        std::vector<std::size_t> rest;
        for (auto u : e) {
          if (u != v) rest.push_back(u);
        }
        pc.monomials.push_back(std::move(rest));
      }
      ls.checks.push_back(std::move(pc));
    }
    tests.push_back({1.0 / static_cast<double>(col.num_colors), Test::from_local(std::move(ls))});
  }
  return AAPVStrategy(std::move(tests), hypergraph_state(h), n_ancilla, n - n_ancilla,
                      std::move(label));
}

/// C^(n-1)Z H^{(x) n}: the process whose Choi state is the Choi hypergraph state.
inline QuantumProcess hypergraph_cz_target(std::size_t n) {
  if (n < 2) throw DomainError("hypergraph_cz_target: n >= 2 required");
  const std::size_t D = std::size_t{1} << n;
  check_dim(D * D, "hypergraph target");
  CMatrix u = CMatrix::Zero(static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(D));
  const double a = 1.0 / std::sqrt(static_cast<double>(D));
  for (std::size_t r = 0; r < D; ++r) {
    const double cz = (r == D - 1) ? -1.0 : 1.0;
    for (std::size_t c = 0; c < D; ++c) {
      const double h = (std::popcount(r & c) % 2 == 0) ? a : -a;
      u(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = cz * h;
    }
  }
  return QuantumProcess::unitary(Operator(std::move(u), qubit_dims(n)));
}

inline AAPVStrategy hypergraph_cz_protocol(std::size_t n) {
  return hypergraph_protocol(controlled_z_choi_hypergraph(n), n,
                             "hypergraph_cz" + std::to_string(n));
}

/// One-way protocol for the single-Kraus filter K on m qubits: the ancilla is
/// measured in each of the 3^m Pauli product bases; for outcome vector |a>
/// the system passes on the projector onto K|conj(a)>.
inline AAPVStrategy filter_protocol(const CMatrix& k, std::string label = {}) {
  const std::size_t d = static_cast<std::size_t>(k.rows());
  if (k.rows() != k.cols() || d < 2 || (d & (d - 1)) != 0) {
    throw DimensionError("filter_protocol: K must be square on qubits");
  }
  std::size_t m = 0;
  while ((std::size_t{1} << m) < d) ++m;
  check_dim(d * d, "filter protocol");
  const auto process = QuantumProcess::kraus({k}, qubit_dims(m));
  const PureState target = choi_pure_state(process);

  std::size_t nsettings = 1;
  for (std::size_t q = 0; q < m; ++q) nsettings *= 3;
  static const char kLetters[3] = {'X', 'Y', 'Z'};
  std::vector<WeightedTest> tests;
  for (std::size_t s = 0; s < nsettings; ++s) {
    LocalSettings ls;
    std::size_t code = s;
    std::vector<char> letters(m);
    for (std::size_t q = m; q-- > 0;) {
      letters[q] = kLetters[code % 3];
      code /= 3;
    }
    for (auto c : letters) ls.bases.push_back(QubitBasis::pauli(c));
    const CMatrix v = ls.basis_change();
    std::vector<OneWayBranch> branches;
    for (std::size_t o = 0; o < d; ++o) {
      const CVector a = v.col(static_cast<Eigen::Index>(o));
      const CVector w = k * a.conjugate();
      const double nw = w.norm();
      CMatrix eff = CMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
      if (nw > tol::structural) eff = (w / nw) * (w / nw).adjoint();
      eff = 0.5 * (eff + eff.adjoint());
      branches.push_back({Operator(a * a.adjoint(), qubit_dims(m), {Flag::yes, Flag::unknown, Flag::unknown}),
                          Operator(std::move(eff), qubit_dims(m), {Flag::yes, Flag::unknown, Flag::unknown})});
    }
    tests.push_back({1.0 / static_cast<double>(nsettings),
                     Test::from_one_way(std::move(branches), m)});
  }
  return AAPVStrategy(std::move(tests), target, m, m, std::move(label));
}

//=============================================================================
// Canned protocols
//=============================================================================

inline const std::vector<std::string>& canned_names() {
  static const std::vector<std::string> kNames = {
      "cnot", "identity2", "identity3", "xgate", "hadamard", "phase", "dj_const1", "dj_balanced_x2"};
  return kNames;
}

/// Balanced Deutsch-Jozsa strings in their originally listed form. They do not all
/// stabilize the target, so a strategy built from them is rejected.
inline std::vector<std::pair<double, PauliString>> dj_balanced_x2_verbatim_tests() {
  return uniform_tests({"+ZZZZZZ", "-ZZYZZY", "+ZZXZZX", "-ZYZZYZ", "+ZXZZXZ", "-YZZYZZ"});
}

inline CliffordCircuit dj_balanced_x2_circuit() {
  CliffordCircuit c(3);
  c.cnot(1, 2);
  return c;
}

/// The process each canned protocol verifies.
inline QuantumProcess canned_target(const std::string& name) {
  const auto gate = [](GateKind k) {
    return QuantumProcess::unitary(Operator(detail::gate_matrix_1q(k), qubit_dims(1)));
  };
  if (name == "identity2" || name == "identity3") return QuantumProcess::identity(qubit_dims(1));
  if (name == "xgate") return gate(GateKind::X);
  if (name == "hadamard") return gate(GateKind::H);
  if (name == "phase") return gate(GateKind::S);
  if (name == "cnot") {
    CliffordCircuit c(2);
    c.cnot(0, 1);
    return QuantumProcess::unitary(circuit_unitary(c));
  }
  if (name == "dj_const1") {
    CliffordCircuit c(3);
    c.add(GateKind::Z, 2);
    return QuantumProcess::unitary(circuit_unitary(c));
  }
  if (name == "dj_balanced_x2") return QuantumProcess::unitary(circuit_unitary(dj_balanced_x2_circuit()));
  throw DomainError("unknown canned protocol '" + name + "'");
}

inline AAPVStrategy canned(const std::string& name) {
  const auto target = [&] { return choi_pure_state(canned_target(name)); };
  if (name == "cnot") {
    return pauli_protocol(uniform_tests({"+ZXZX", "+IZZZ", "+ZZIZ", "+XXXI"}), target(), 2, 2, name);
  }
  if (name == "identity2") return pauli_protocol(uniform_tests({"+XX", "+ZZ"}), target(), 1, 1, name);
  if (name == "identity3") {
    return pauli_protocol(uniform_tests({"+XX", "-YY", "+ZZ"}), target(), 1, 1, name);
  }
  if (name == "xgate") return pauli_protocol(uniform_tests({"+XX", "-ZZ"}), target(), 1, 1, name);
  if (name == "hadamard") return pauli_protocol(uniform_tests({"+XZ", "+ZX"}), target(), 1, 1, name);
  if (name == "phase") return pauli_protocol(uniform_tests({"+ZZ", "+XY"}), target(), 1, 1, name);
  if (name == "dj_const1") {
    return pauli_protocol(
        uniform_tests({"+ZZZZZZ", "+ZZYZZY", "-ZZXZZX", "-ZYZZYZ", "+ZXZZXZ", "-YZZYZZ"}),
        target(), 3, 3, name);
  }
  if (name == "dj_balanced_x2") {
    const auto g = choi_stabilizers(dj_balanced_x2_circuit());
    return pauli_protocol(uniform_tests(g.generators()), target(), 3, 3, name);
  }
  throw DomainError("unknown canned protocol '" + name + "'");
}

}  // namespace qpv

#endif  // QPV_STRATEGIES_HPP
