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

// Shared helpers for the test binaries. Reference computations here are
// written from loops over matrix entries so they do not share code paths with
// the library.

#ifndef QPV_TESTS_SUPPORT_HPP
#define QPV_TESTS_SUPPORT_HPP

#include <cmath>
#include <vector>

#include <Eigen/QR>

#include "qpv/qpv.hpp"

namespace qpv::testing {

inline bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline CMatrix naive_kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index k = 0; k < b.rows(); ++k)
        for (Eigen::Index l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

// Tr_B of an operator on A (x) B with dims (da, db).
inline CMatrix naive_trace_b(const CMatrix& m, Eigen::Index da, Eigen::Index db) {
  CMatrix out = CMatrix::Zero(da, da);
  for (Eigen::Index i = 0; i < da; ++i)
    for (Eigen::Index j = 0; j < da; ++j)
      for (Eigen::Index k = 0; k < db; ++k) out(i, j) += m(i * db + k, j * db + k);
  return out;
}

// Tr_A of an operator on A (x) B.
inline CMatrix naive_trace_a(const CMatrix& m, Eigen::Index da, Eigen::Index db) {
  CMatrix out = CMatrix::Zero(db, db);
  for (Eigen::Index i = 0; i < db; ++i)
    for (Eigen::Index j = 0; j < db; ++j)
      for (Eigen::Index k = 0; k < da; ++k) out(i, j) += m(k * db + i, k * db + j);
  return out;
}

inline CMatrix gaussian_matrix(KeyedRng& rng, Eigen::Index r, Eigen::Index c) {
  CMatrix g(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) g(i, j) = rng.complex_normal();
  return g;
}

inline CMatrix random_unitary(KeyedRng& rng, Eigen::Index d) {
  Eigen::HouseholderQR<CMatrix> qr(gaussian_matrix(rng, d, d));
  return CMatrix(qr.householderQ());
}

// r Kraus operators d_out x d_in from a random isometry; trace preserving.
inline std::vector<CMatrix> random_kraus(KeyedRng& rng, Eigen::Index din, Eigen::Index dout,
                                         Eigen::Index r) {
  Eigen::HouseholderQR<CMatrix> qr(gaussian_matrix(rng, r * dout, din));
  const CMatrix iso = CMatrix(qr.householderQ()).leftCols(din);
  std::vector<CMatrix> ops;
  for (Eigen::Index k = 0; k < r; ++k) ops.push_back(iso.middleRows(k * dout, dout));
  return ops;
}

inline Operator random_density(KeyedRng& rng, std::size_t d, const Dims& dims) {
  const auto D = static_cast<Eigen::Index>(d);
  const CMatrix g = gaussian_matrix(rng, D, D);
  CMatrix rho = g * g.adjoint();
  rho /= rho.trace();
  return Operator(0.5 * (rho + rho.adjoint()), dims);
}

inline CliffordCircuit random_circuit(KeyedRng& rng, std::size_t n, std::size_t gates) {
  CliffordCircuit c(n);
  const GateKind kinds[] = {GateKind::H, GateKind::S, GateKind::CNOT, GateKind::CZ,
                            GateKind::X, GateKind::Y, GateKind::Z};
  for (std::size_t g = 0; g < gates; ++g) {
    GateKind k = kinds[rng.next_u64() % 7];
    if (n == 1 && (k == GateKind::CNOT || k == GateKind::CZ)) k = GateKind::H;
    const std::size_t a = rng.next_u64() % n;
    std::size_t b = rng.next_u64() % n;
    if (b == a) b = (a + 1) % n;
    c.add(k, a, n > 1 ? b : 0);
  }
  return c;
}

// 4 sigma of a binomial proportion.
inline double four_sigma(double p, double n) { return 4.0 * std::sqrt(std::max(p * (1 - p), 1e-12) / n); }

}  // namespace qpv::testing

#endif  // QPV_TESTS_SUPPORT_HPP
