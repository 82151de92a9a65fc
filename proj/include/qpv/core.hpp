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

#ifndef QPV_CORE_HPP
#define QPV_CORE_HPP

#include <atomic>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qpv {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Ordered subsystem dimensions of a tensor-product space.
using Dims = std::vector<std::size_t>;

namespace tol {
/// Structural flags (hermiticity, normalization, probability sums).
inline constexpr double structural = 1e-12;
/// Projector idempotence, PSD checks and eigen residuals.
inline constexpr double numeric = 1e-10;
/// Rank decisions on Choi states.
inline constexpr double rank = 1e-8;
}  // namespace tol

//-----------------------------------------------------------------------------
// Errors
//-----------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched or malformed subsystem dimensions / indices.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A parameter lies outside its mathematical domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Dense dimension above the configured cap.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

/// A verification strategy whose target does not pass with certainty.
class StrategyMalformed : public Error {
 public:
  using Error::Error;
};

/// Input document could not be interpreted; `field` names the offending path.
class ParseError : public Error {
 public:
  ParseError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

//-----------------------------------------------------------------------------
// Dimension cap
//-----------------------------------------------------------------------------

inline constexpr std::size_t kDefaultDimCap = std::size_t{1} << 10;
inline constexpr std::size_t kMaxDimCap = std::size_t{1} << 12;

namespace detail {

inline std::size_t cap_from_env() {
  const char* raw = std::getenv("QPV_DIM_CAP");
  if (raw == nullptr || *raw == '\0') return kDefaultDimCap;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(raw, &end, 10);
  if (end == raw || *end != '\0' || v < 2 || v > kMaxDimCap) {
    throw DomainError("QPV_DIM_CAP must be an integer in [2, 4096], got '" +
                      std::string(raw) + "'");
  }
  return static_cast<std::size_t>(v);
}

inline std::atomic<std::size_t>& cap_storage() {
  static std::atomic<std::size_t> cap{cap_from_env()};
  return cap;
}

}  // namespace detail

/// Largest total Hilbert-space dimension any dense operator may have.
inline std::size_t dim_cap() { return detail::cap_storage().load(); }

/// Raises or lowers the cap; values above 4096 (12 qubits) are refused.
inline void set_dim_cap(std::size_t cap) {
  if (cap < 2 || cap > kMaxDimCap) {
    throw DomainError("dimension cap must lie in [2, 4096]");
  }
  detail::cap_storage().store(cap);
}

inline void check_dim(std::size_t d, const char* what = "operator") {
  if (d > dim_cap()) {
    throw CapExceeded(std::string(what) + " dimension " + std::to_string(d) +
                      " exceeds cap " + std::to_string(dim_cap()));
  }
}

inline std::size_t product(const Dims& dims) {
  std::size_t d = 1;
  for (auto x : dims) d *= x;
  return d;
}

inline Dims qubit_dims(std::size_t n) { return Dims(n, 2); }

inline double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace qpv

#endif  // QPV_CORE_HPP
