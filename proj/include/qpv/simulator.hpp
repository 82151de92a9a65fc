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

#ifndef QPV_SIMULATOR_HPP
#define QPV_SIMULATOR_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "qpv/pmpv.hpp"
#include "qpv/rng.hpp"

namespace qpv {

enum class SamplingMode { projector, local_sequential };

inline std::string mode_name(SamplingMode m) {
  return m == SamplingMode::projector ? "projector" : "local";
}

struct RunConfig {
  std::uint64_t N = 1;     // rounds that produce an output
  std::uint64_t seed = 0;
  SamplingMode mode = SamplingMode::projector;
  std::uint64_t max_attempts = 0;  // postselected runs stop here too; 0 = unlimited
};

struct RunResult {
  std::uint64_t rounds_executed = 0;
  std::uint64_t passes = 0;
  std::uint64_t fails = 0;
  std::uint64_t postselected_rounds = 0;  // attempts, including rounds without output
  bool accepted = true;

  double empirical_pass_rate() const {
    return rounds_executed == 0 ? 0.0
                                : static_cast<double>(passes) / static_cast<double>(rounds_executed);
  }

  /// (1 - eps nu)^N when accepted, 1 otherwise.
  double delta_bound_at(double epsilon, double nu) const {
    if (!accepted || rounds_executed == 0) return 1.0;
    return confidence(epsilon, nu, rounds_executed);
  }

  friend bool operator==(const RunResult&, const RunResult&) = default;
};

inline double verdict_and_confidence(const RunResult& r, double epsilon, double nu) {
  return r.delta_bound_at(epsilon, nu);
}

namespace detail {

// Probabilities within 1e-12 of 0 or 1 are exact.
inline double snap(double p) {
  if (p <= tol::structural) return 0.0;
  if (p >= 1.0 - tol::structural) return 1.0;
  return p;
}

inline void tally(RunResult& r, bool pass) {
  ++r.rounds_executed;
  if (pass) {
    ++r.passes;
  } else {
    ++r.fails;
    r.accepted = false;
  }
}

}  // namespace detail

struct LocalRound {
  bool passed = false;
  // Per-qubit outcome bits (0 for +1). For one-way tests: the ancilla branch
  // index bits followed by the system verdict bit.
  std::vector<std::uint8_t> outcomes;
};

// Samples a test by local measurements, qubit after qubit, from the exact
// conditional distributions of a fixed state.
class LocalSampler {
 public:
  LocalSampler(const Test& test, const Operator& rho) : test_(&test) {
    const std::size_t n = test.num_qubits();
    if (rho.dim() != (std::size_t{1} << n)) throw DimensionError("local sampler: dimension mismatch");
    if (test.local()) {
      const CMatrix v = test.local()->basis_change();
      const CMatrix rot = v.adjoint() * rho.matrix() * v;
      prefix_.assign(static_cast<std::size_t>(rot.rows()) + 1, 0.0);
      for (Eigen::Index o = 0; o < rot.rows(); ++o) {
        prefix_[static_cast<std::size_t>(o) + 1] =
            prefix_[static_cast<std::size_t>(o)] + std::max(rot(o, o).real(), 0.0);
      }
      return;
    }
    if (test.form() != Test::Form::one_way) throw DomainError("test has no local decomposition");
    const std::size_t ns = n - test.one_way_ancilla_qubits();
    const Operator id_s = Operator::identity(qubit_dims(ns));
    for (const auto& b : test.branches()) {
      const Operator a = Operator(b.ancilla.matrix(), qubit_dims(test.one_way_ancilla_qubits()));
      const double q = std::max(trace_product(kron(a, id_s), rho), 0.0);
      const double joint = std::max(trace_product(kron(a, b.system), rho), 0.0);
      branch_.push_back(q);
      cond_.push_back(q > tol::structural ? detail::snap(joint / q) : 0.0);
    }
  }

  LocalRound sample(KeyedRng& rng) const {
    LocalRound out;
    const std::size_t n = test_->num_qubits();
    if (!prefix_.empty()) {
      std::size_t lo = 0, size = prefix_.size() - 1;
      for (std::size_t q = 0; q < n; ++q) {
        const std::size_t half = size / 2;
        const double total = prefix_[lo + size] - prefix_[lo];
        const double p0 = total > 0.0 ? detail::snap((prefix_[lo + half] - prefix_[lo]) / total) : 0.5;
        const bool zero = rng.bernoulli(p0);
        out.outcomes.push_back(zero ? 0 : 1);
        if (!zero) lo += half;
        size = half;
      }
      out.passed = test_->local()->passes(lo);
      return out;
    }
    const std::size_t b = rng.categorical(branch_);
    const std::size_t na = test_->one_way_ancilla_qubits();
    for (std::size_t q = 0; q < na; ++q) out.outcomes.push_back((b >> (na - 1 - q)) & 1u);
    out.passed = rng.bernoulli(cond_[b]);
    out.outcomes.push_back(out.passed ? 0 : 1);
    return out;
  }

 private:
  const Test* test_;
  std::vector<double> prefix_;
  std::vector<double> branch_;
  std::vector<double> cond_;
};

inline LocalRound local_round(const Test& test, const Operator& rho_out, KeyedRng& rng) {
  return LocalSampler(test, rho_out).sample(rng);
}

/// Each round draws test i ~ p_i and accepts it on (I (x) E)(|psi><psi|/d).
inline RunResult simulate_aapv(const AAPVStrategy& s, const QuantumProcess& e,
                               const RunConfig& cfg) {
  if (cfg.N == 0) throw DomainError("N must be at least 1");
  if (e.d_in() != (std::size_t{1} << s.n_ancilla()) ||
      e.d_out() != (std::size_t{1} << s.n_system())) {
    throw DimensionError("process dims do not match the strategy");
  }
  if (!e.is_trace_preserving()) throw DomainError("simulate_aapv needs a trace-preserving process");
  const Operator raw = choi_state(e);
  const Operator rho(raw.matrix(), qubit_dims(s.num_qubits()), raw.flags());

  std::vector<double> weights;
  std::vector<double> pass;
  std::vector<LocalSampler> samplers;
  for (const auto& wt : s.tests()) {
    weights.push_back(wt.p);
    if (cfg.mode == SamplingMode::projector) {
      pass.push_back(detail::snap(wt.test.pass_probability(rho)));
    } else {
      samplers.emplace_back(wt.test, rho);
    }
  }
  RunResult r;
  for (std::uint64_t k = 0; k < cfg.N; ++k) {
    KeyedRng rng(cfg.seed, k);
    const std::size_t i = rng.categorical(weights);
    const bool ok = cfg.mode == SamplingMode::projector ? rng.bernoulli(pass[i])
                                                        : samplers[i].sample(rng).passed;
    detail::tally(r, ok);
  }
  r.postselected_rounds = r.rounds_executed;
  return r;
}

/// Each attempt draws entry i ~ p_i and prepares rho_i. A trace-decreasing
/// process yields an output with probability Tr E(rho_i); only output rounds
/// count toward N and are tested with the normalized output.
inline RunResult simulate_pmpv(const PMPVStrategy& x, const QuantumProcess& e,
                               const RunConfig& cfg) {
  if (cfg.N == 0) throw DomainError("N must be at least 1");
  if (e.dims_in() != x.dims_in() || e.dims_out() != x.dims_out()) {
    throw DimensionError("process dims do not match the PMPV strategy");
  }
  const bool tp = e.is_trace_preserving();
  std::vector<double> weights, out_prob, pass;
  double any = 0.0;
  for (const auto& en : x.entries()) {
    const Operator out = apply(e, en.input);
    const double t = tp ? 1.0 : detail::snap(out.trace().real());
    weights.push_back(en.p);
    out_prob.push_back(t);
    pass.push_back(t > 0.0 ? detail::snap(trace_product(out, en.effect) / out.trace().real()) : 0.0);
    any += en.p * t;
  }
  if (any <= 0.0) throw DomainError("process never produces an output");
  RunResult r;
  std::uint64_t attempt = 0;
  while (r.rounds_executed < cfg.N && (cfg.max_attempts == 0 || attempt < cfg.max_attempts)) {
    KeyedRng rng(cfg.seed, attempt++);
    const std::size_t i = rng.categorical(weights);
    if (!rng.bernoulli(out_prob[i])) continue;
    detail::tally(r, rng.bernoulli(pass[i]));
  }
  r.postselected_rounds = attempt;
  return r;
}

}  // namespace qpv

#endif  // QPV_SIMULATOR_HPP
