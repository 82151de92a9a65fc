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

#ifndef QPV_PAULI_HPP
#define QPV_PAULI_HPP

#include <bit>
#include <string>
#include <string_view>
#include <vector>

#include "qpv/tensor.hpp"

namespace qpv {

//=============================================================================
// PauliString
//=============================================================================

// i^phase * (sigma_0 (x) sigma_1 (x) ... (x) sigma_{n-1}) with sigma_q encoded
// symplectically: (x,z) = (0,0) I, (1,0) X, (1,1) Y, (0,1) Z. Qubit 0 is the
// leftmost character and the most significant tensor factor. Bits are packed
// 64 qubits per word.
class PauliString {
 public:
  PauliString() = default;

  /// Identity on n qubits.
  explicit PauliString(std::size_t n)
      : n_(n), xs_(words(n), 0), zs_(words(n), 0) {}

  /// Parses text such as "ZXZX", "+XXXI", "-ZZYZZY", "+iXZ", "-iY".
  static PauliString parse(std::string_view text) {
    unsigned phase = 0;
    std::size_t pos = 0;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
      if (text[pos] == '-') phase = 2;
      ++pos;
    }
    if (pos < text.size() && text[pos] == 'i') {
      phase = (phase + 1) & 3u;
      ++pos;
    }
    const std::string_view body = text.substr(pos);
    if (body.empty()) throw DomainError("empty Pauli string '" + std::string(text) + "'");
    PauliString p(body.size());
    for (std::size_t q = 0; q < body.size(); ++q) {
      switch (body[q]) {
        case 'I':
        case '_':
          break;
        case 'X':
          p.set(q, true, false);
          break;
        case 'Y':
          p.set(q, true, true);
          break;
        case 'Z':
          p.set(q, false, true);
          break;
        default:
          throw DomainError("invalid Pauli character '" + std::string(1, body[q]) +
                            "' in '" + std::string(text) + "'");
      }
    }
    p.phase_ = phase;
    return p;
  }

  std::size_t num_qubits() const noexcept { return n_; }
  /// Exponent of i in {0,1,2,3}.
  unsigned phase() const noexcept { return phase_; }
  void set_phase(unsigned ph) noexcept { phase_ = ph & 3u; }

  bool x(std::size_t q) const { return (xs_[q / 64] >> (q % 64)) & 1u; }
  bool z(std::size_t q) const { return (zs_[q / 64] >> (q % 64)) & 1u; }

  void set(std::size_t q, bool x, bool z) {
    const std::uint64_t bit = std::uint64_t{1} << (q % 64);
    xs_[q / 64] = x ? (xs_[q / 64] | bit) : (xs_[q / 64] & ~bit);
    zs_[q / 64] = z ? (zs_[q / 64] | bit) : (zs_[q / 64] & ~bit);
  }

  char letter(std::size_t q) const {
    static constexpr char kLetters[4] = {'I', 'X', 'Z', 'Y'};
    return kLetters[(x(q) ? 1 : 0) + (z(q) ? 2 : 0)];
  }

  /// Hermitian iff the overall phase is real.
  bool is_hermitian() const noexcept { return (phase_ & 1u) == 0; }

  /// +1 or -1 for Hermitian strings.
  int sign() const {
    if (!is_hermitian()) throw DomainError("sign() on non-Hermitian Pauli string");
    return phase_ == 0 ? 1 : -1;
  }

  bool is_identity() const {
    for (std::size_t w = 0; w < xs_.size(); ++w) {
      if (xs_[w] != 0 || zs_[w] != 0) return false;
    }
    return true;
  }

  std::size_t weight() const {
    std::size_t w = 0;
    for (std::size_t k = 0; k < xs_.size(); ++k) w += std::popcount(xs_[k] | zs_[k]);
    return w;
  }

  /// Same letters with phase reset to +1.
  PauliString unsigned_part() const {
    PauliString p = *this;
    p.phase_ = 0;
    return p;
  }

  PauliString negated() const {
    PauliString p = *this;
    p.phase_ = (phase_ + 2) & 3u;
    return p;
  }

  std::string str() const {
    static constexpr const char* kPrefix[4] = {"+", "+i", "-", "-i"};
    std::string s = kPrefix[phase_];
    for (std::size_t q = 0; q < n_; ++q) s.push_back(letter(q));
    return s;
  }

  /// Letters only, without the phase prefix.
  std::string letters() const {
    std::string s;
    for (std::size_t q = 0; q < n_; ++q) s.push_back(letter(q));
    return s;
  }

  bool commutes(const PauliString& o) const {
    check_same_size(o);
    std::uint64_t acc = 0;
    for (std::size_t w = 0; w < xs_.size(); ++w) {
      acc ^= (xs_[w] & o.zs_[w]) ^ (zs_[w] & o.xs_[w]);
    }
    return std::popcount(acc) % 2 == 0;
  }

  /// Operator product this * rhs with the phase tracked exactly.
  PauliString operator*(const PauliString& rhs) const {
    check_same_size(rhs);
    PauliString out = *this;
    // Per-position mod-4 counters of the i^{+-1} factors picked up where the
    // two strings anticommute (two bit planes, cnt1 low and cnt2 high).
    std::uint64_t cnt1 = 0, cnt2 = 0;
    for (std::size_t w = 0; w < xs_.size(); ++w) {
      const std::uint64_t x1 = xs_[w], z1 = zs_[w];
      const std::uint64_t x2 = rhs.xs_[w], z2 = rhs.zs_[w];
      const std::uint64_t nx = x1 ^ x2, nz = z1 ^ z2;
      const std::uint64_t x1z2 = x1 & z2;
      const std::uint64_t anti = (x2 & z1) ^ x1z2;
      cnt2 ^= (cnt1 ^ nx ^ nz ^ x1z2) & anti;
      cnt1 ^= anti;
      out.xs_[w] = nx;
      out.zs_[w] = nz;
    }
    const unsigned extra =
        (static_cast<unsigned>(std::popcount(cnt1)) +
         2u * static_cast<unsigned>(std::popcount(cnt2))) & 3u;
    out.phase_ = (phase_ + rhs.phase_ + extra) & 3u;
    return out;
  }

  friend bool operator==(const PauliString& a, const PauliString& b) {
    return a.n_ == b.n_ && a.phase_ == b.phase_ && a.xs_ == b.xs_ && a.zs_ == b.zs_;
  }

  /// Strict order on (letters, phase); used for canonical sorting.
  friend bool operator<(const PauliString& a, const PauliString& b) {
    if (a.n_ != b.n_) return a.n_ < b.n_;
    const auto la = a.letters(), lb = b.letters();
    if (la != lb) return la < lb;
    return a.phase_ < b.phase_;
  }

  /// Symplectic bit vector (x bits then z bits) for GF(2) rank checks.
  std::vector<std::uint64_t> symplectic() const {
    std::vector<std::uint64_t> v = xs_;
    v.insert(v.end(), zs_.begin(), zs_.end());
    return v;
  }

 private:
  static std::size_t words(std::size_t n) { return (n + 63) / 64; }

  void check_same_size(const PauliString& o) const {
    if (o.n_ != n_) throw DimensionError("Pauli strings act on different qubit counts");
  }

  std::size_t n_ = 0;
  std::vector<std::uint64_t> xs_;
  std::vector<std::uint64_t> zs_;
  unsigned phase_ = 0;
};

namespace detail {

struct PauliAction {
  std::size_t xmask = 0;
  std::size_t zmask = 0;
  cplx base{1.0, 0.0};
};

// P|col> = base * (-1)^{popcount(col & zmask)} |col ^ xmask>.
inline PauliAction pauli_action(const PauliString& p) {
  const std::size_t n = p.num_qubits();
  PauliAction a;
  std::size_t ny = 0;
  for (std::size_t q = 0; q < n; ++q) {
    const std::size_t bit = std::size_t{1} << (n - 1 - q);
    if (p.x(q)) a.xmask |= bit;
    if (p.z(q)) a.zmask |= bit;
    if (p.x(q) && p.z(q)) ++ny;
  }
  static const cplx kIpow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  a.base = kIpow[(p.phase() + ny) & 3u];
  return a;
}

}  // namespace detail

/// <v|P|v> without forming the dense matrix.
inline cplx pauli_expectation(const PauliString& p, const CVector& v) {
  if (v.size() != (Eigen::Index{1} << p.num_qubits())) {
    throw DimensionError("pauli_expectation: vector length mismatch");
  }
  const auto a = detail::pauli_action(p);
  cplx acc = 0.0;
  for (std::size_t col = 0; col < static_cast<std::size_t>(v.size()); ++col) {
    const double s = (std::popcount(col & a.zmask) % 2 == 0) ? 1.0 : -1.0;
    acc += std::conj(v(static_cast<Eigen::Index>(col ^ a.xmask))) * s *
           v(static_cast<Eigen::Index>(col));
  }
  return acc * a.base;
}

/// m += coeff * P, touching only the 2^n nonzero entries of P.
inline void add_pauli(CMatrix& m, const PauliString& p, cplx coeff) {
  if (m.rows() != (Eigen::Index{1} << p.num_qubits()) || m.rows() != m.cols()) {
    throw DimensionError("add_pauli: matrix size mismatch");
  }
  const auto a = detail::pauli_action(p);
  for (std::size_t col = 0; col < static_cast<std::size_t>(m.cols()); ++col) {
    const double s = (std::popcount(col & a.zmask) % 2 == 0) ? 1.0 : -1.0;
    m(static_cast<Eigen::Index>(col ^ a.xmask), static_cast<Eigen::Index>(col)) +=
        coeff * s * a.base;
  }
}

/// Dense 2^n x 2^n matrix of a Pauli string.
inline Operator pauli_to_matrix(const PauliString& p) {
  const std::size_t n = p.num_qubits();
  if (n >= 63) throw CapExceeded("Pauli string too long for dense lowering");
  const std::size_t D = std::size_t{1} << n;
  check_dim(D, "Pauli matrix");
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(D));
  add_pauli(m, p, 1.0);
  OperatorFlags f;
  f.unitary = Flag::yes;
  f.hermitian = p.is_hermitian() ? Flag::yes : Flag::no;
  return Operator(std::move(m), qubit_dims(n), f);
}

/// (1 + sign * P) / 2 for a Hermitian Pauli string P.
inline Operator eigenspace_projector(const PauliString& p, int sign = +1) {
  if (!p.is_hermitian()) {
    throw DomainError("eigenspace_projector: Pauli string " + p.str() + " is not Hermitian");
  }
  if (sign != 1 && sign != -1) throw DomainError("eigenspace_projector: sign must be +1 or -1");
  const Operator P = pauli_to_matrix(p);
  const auto D = static_cast<Eigen::Index>(P.dim());
  CMatrix m = 0.5 * (CMatrix::Identity(D, D) + static_cast<double>(sign) * P.matrix());
  return Operator(std::move(m), P.dims(), {Flag::yes, Flag::unknown, Flag::yes});
}

//=============================================================================
// StabilizerGroup
//=============================================================================

namespace detail {

// Rank over GF(2) of the given bit vectors (Gaussian elimination in place).
inline std::size_t gf2_rank(std::vector<std::vector<std::uint64_t>> rows) {
  std::size_t rank = 0;
  if (rows.empty()) return 0;
  const std::size_t nbits = rows[0].size() * 64;
  for (std::size_t bit = 0; bit < nbits && rank < rows.size(); ++bit) {
    const std::size_t w = bit / 64;
    const std::uint64_t m = std::uint64_t{1} << (bit % 64);
    std::size_t pivot = rank;
    while (pivot < rows.size() && !(rows[pivot][w] & m)) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[pivot], rows[rank]);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r != rank && (rows[r][w] & m)) {
        for (std::size_t k = 0; k < rows[r].size(); ++k) rows[r][k] ^= rows[rank][k];
      }
    }
    ++rank;
  }
  return rank;
}

}  // namespace detail

// Commuting, independent, Hermitian generators with phases +-1.
class StabilizerGroup {
 public:
  StabilizerGroup() = default;

  StabilizerGroup(std::size_t n, std::vector<PauliString> generators)
      : n_(n), gens_(std::move(generators)) {
    std::vector<std::vector<std::uint64_t>> rows;
    for (std::size_t i = 0; i < gens_.size(); ++i) {
      const auto& g = gens_[i];
      if (g.num_qubits() != n_) {
        throw DimensionError("generator " + g.str() + " has wrong qubit count");
      }
      if (!g.is_hermitian()) {
        throw DomainError("generator " + g.str() + " is not Hermitian");
      }
      if (g.is_identity()) throw DomainError("identity is not a valid generator");
      for (std::size_t j = 0; j < i; ++j) {
        if (!g.commutes(gens_[j])) {
          throw DomainError("generators " + gens_[j].str() + " and " + g.str() +
                            " anticommute");
        }
      }
      rows.push_back(g.symplectic());
    }
    if (detail::gf2_rank(rows) != gens_.size()) {
      throw DomainError("stabilizer generators are not independent");
    }
  }

  std::size_t num_qubits() const noexcept { return n_; }
  const std::vector<PauliString>& generators() const noexcept { return gens_; }
  std::size_t size() const noexcept { return gens_.size(); }

 private:
  std::size_t n_ = 0;
  std::vector<PauliString> gens_;
};

inline constexpr std::size_t kMaxEnumeratedGenerators = 20;

/// All 2^k - 1 non-identity products of the k generators. Element m is the
/// ordered product of the generators whose bits are set in m.
inline std::vector<PauliString> group_elements(const StabilizerGroup& g) {
  const std::size_t k = g.size();
  if (k > kMaxEnumeratedGenerators) {
    throw CapExceeded("group_elements: more than 20 generators");
  }
  std::vector<PauliString> out;
  out.reserve((std::size_t{1} << k) - 1);
  for (std::size_t mask = 1; mask < (std::size_t{1} << k); ++mask) {
    PauliString acc(g.num_qubits());
    for (std::size_t i = 0; i < k; ++i) {
      if (mask & (std::size_t{1} << i)) acc = acc * g.generators()[i];
    }
    out.push_back(std::move(acc));
  }
  return out;
}

/// Dense joint +1 eigenspace projector prod_i (1 + g_i)/2.
inline Operator stabilizer_projector(const StabilizerGroup& g) {
  Operator proj = Operator::identity(qubit_dims(g.num_qubits()));
  for (const auto& gen : g.generators()) {
    proj = Operator((proj * eigenspace_projector(gen)).matrix(), proj.dims());
  }
  return Operator(0.5 * (proj.matrix() + proj.matrix().adjoint()), proj.dims(),
                  {Flag::yes, Flag::unknown, Flag::yes});
}

/// The unique joint +1 eigenvector of a maximal group (k == n); the global
/// phase makes the first nonzero amplitude real positive.
inline PureState stabilizer_state(const StabilizerGroup& g) {
  if (g.size() != g.num_qubits()) {
    throw DomainError("stabilizer_state: need n independent generators for a unique state");
  }
  const Operator proj = stabilizer_projector(g);
  Eigen::Index best = 0;
  double best_norm = -1.0;
  for (Eigen::Index c = 0; c < proj.matrix().cols(); ++c) {
    const double nrm = proj.matrix().col(c).norm();
    if (nrm > best_norm + tol::structural) {
      best_norm = nrm;
      best = c;
    }
  }
  CVector v = proj.matrix().col(best);
  detail::fix_phase(v);
  return PureState::normalized(v, proj.dims());
}

}  // namespace qpv

#endif  // QPV_PAULI_HPP
