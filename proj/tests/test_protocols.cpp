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

// Strategies, one-way conversion and worst-case oracles.

#include <catch_amalgamated.hpp>

#include <set>

#include <Eigen/Eigenvalues>

#include "support.hpp"

using namespace qpv;
using qpv::testing::naive_kron;
using qpv::testing::near;

namespace {

const cplx kI(0.0, 1.0);

// Dense +1 projector of a signed string from 2x2 blocks.
CMatrix ref_projector(const std::string& text) {
  int sign = 1;
  std::size_t pos = 0;
  if (text[0] == '+' || text[0] == '-') {
    sign = text[0] == '-' ? -1 : 1;
    pos = 1;
  }
  CMatrix p = CMatrix::Ones(1, 1);
  for (std::size_t i = pos; i < text.size(); ++i) {
    const char c = text[i];
    p = naive_kron(p, c == 'X' ? pauli_matrix::X() : c == 'Y' ? pauli_matrix::Y()
                                : c == 'Z' ? pauli_matrix::Z() : pauli_matrix::I());
  }
  return 0.5 * (CMatrix::Identity(p.rows(), p.cols()) + static_cast<double>(sign) * p);
}

CMatrix ref_omega(const std::vector<std::string>& strings) {
  CMatrix om;
  for (const auto& s : strings) {
    const CMatrix p = ref_projector(s);
    om = om.size() ? CMatrix(om + p) : p;
  }
  return om / static_cast<double>(strings.size());
}

// Second-largest eigenvalue gap straight from Eigen.
double ref_gap(const CMatrix& om) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (om + om.adjoint()), Eigen::EigenvaluesOnly);
  const auto& v = es.eigenvalues();
  return 1.0 - v(v.size() - 2);
}

CVector ket(std::initializer_list<cplx> v) {
  CVector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (auto x : v) out(i++) = x;
  return out;
}

CMatrix proj(const CVector& v) { return v * v.adjoint(); }

const CVector k0 = ket({1, 0}), k1 = ket({0, 1});
const CVector kp = ket({M_SQRT1_2, M_SQRT1_2}), km = ket({M_SQRT1_2, -M_SQRT1_2});
const CVector ktop = ket({M_SQRT1_2, cplx(0, M_SQRT1_2)}), kbot = ket({cplx(0, M_SQRT1_2), M_SQRT1_2});

// Finds a PMPV entry with the given input and effect; returns its weight.
std::optional<double> find_entry(const PMPVStrategy& x, const CMatrix& in, const CMatrix& eff) {
  for (const auto& e : x.entries()) {
    if (max_abs(e.input.matrix() - in) <= 1e-12 && max_abs(e.effect.matrix() - eff) <= 1e-12) return e.p;
  }
  return std::nullopt;
}

const std::map<std::string, std::vector<std::string>> kReferenceStrings = {
    {"cnot", {"+ZXZX", "+IZZZ", "+ZZIZ", "+XXXI"}},
    {"identity2", {"+XX", "+ZZ"}},
    {"identity3", {"+XX", "-YY", "+ZZ"}},
    {"xgate", {"+XX", "-ZZ"}},
    {"hadamard", {"+XZ", "+ZX"}},
    {"phase", {"+ZZ", "+XY"}},
};

}  // namespace

//=============================================================================
// strategies
//=============================================================================

TEST_CASE("canned strategy matrices match their reference strings", "[strategies]") {
  for (const auto& [name, strings] : kReferenceStrings) {
    const AAPVStrategy s = canned(name);
    CHECK(max_abs(strategy_matrix(s).matrix() - ref_omega(strings)) <= 1e-12);
  }
}

TEST_CASE("canned spectral gaps", "[strategies]") {
  const std::map<std::string, double> want{
      {"cnot", 0.25},     {"identity2", 0.5}, {"identity3", 2.0 / 3}, {"xgate", 0.5},
      {"hadamard", 0.5},  {"phase", 0.5},     {"dj_const1", 1.0 / 6}, {"dj_balanced_x2", 1.0 / 6}};
  for (const auto& name : canned_names()) {
    const AAPVStrategy s = canned(name);
    INFO(name);
    CHECK(near(spectral_gap(s), want.at(name), 1e-10));
    CHECK(near(spectral_gap(s), ref_gap(s.matrix().matrix()), 1e-10));
    // Target is the eigenvalue-1 eigenvector.
    const CVector& phi = s.target().amplitudes();
    CHECK((s.matrix().matrix() * phi - phi).norm() <= 1e-10);
    // k generators give 1/k.
    CHECK(near(spectral_gap(s), name == "identity3" ? 2.0 / 3 : 1.0 / static_cast<double>(s.tests().size()),
               1e-10));
  }
}

TEST_CASE("Deutsch-Jozsa constant protocol keeps its signs", "[strategies]") {
  const AAPVStrategy s = canned("dj_const1");
  REQUIRE(s.tests().size() == 6);
  std::set<std::string> strs;
  for (const auto& t : s.tests()) strs.insert(t.test.pauli()->str());
  CHECK(strs.count("-ZYZZYZ") == 1);
  CHECK(strs.count("-YZZYZZ") == 1);
  CHECK(max_abs(s.matrix().matrix() -
                ref_omega({"+ZZZZZZ", "+ZZYZZY", "-ZZXZZX", "-ZYZZYZ", "+ZXZZXZ", "-YZZYZZ"})) <= 1e-12);
}

TEST_CASE("strings that miss the target are rejected", "[strategies]") {
  const auto tests = dj_balanced_x2_verbatim_tests();
  const PureState target = choi_pure_state(canned_target("dj_balanced_x2"));
  CHECK_THROWS_AS(pauli_protocol(tests, target, 3, 3), StrategyMalformed);
  CHECK_THROWS_AS(pauli_protocol(uniform_tests({"+XX", "+YY"}), canned("identity2").target(), 1, 1),
                  StrategyMalformed);
  CHECK_THROWS_AS(pauli_protocol({{0.4, PauliString::parse("XX")}, {0.4, PauliString::parse("ZZ")}},
                                 canned("identity2").target(), 1, 1),
                  StrategyMalformed);
  CHECK_THROWS_AS(pauli_protocol({{1.0, PauliString::parse("XXX")}}, canned("identity2").target(), 1, 1),
                  DimensionError);
}

TEST_CASE("single test strategy is its projector", "[strategies]") {
  const AAPVStrategy s = pauli_protocol({{1.0, PauliString::parse("+ZZ")}}, canned("identity2").target(), 1, 1);
  CHECK(max_abs(s.matrix().matrix() - ref_projector("+ZZ")) <= 1e-15);
}

TEST_CASE("sample plans", "[strategies]") {
  CHECK(plan_samples(0.01, 0.01, 1.0).N == 459);
  CHECK(plan_samples(0.01, 0.01, 0.25).N == 1840);
  // Direct evaluation of the ceiling.
  const double direct = std::ceil(std::log(100.0) / std::log(1.0 / (1.0 - 0.0025)));
  CHECK(static_cast<double>(plan_samples(0.01, 0.01, 0.25).N) == direct);
  CHECK(near(plan_samples(0.01, 0.01, 0.25).approx, 4.0 / 0.01 * std::log(100.0), 1e-9));
  CHECK(plan_samples(0.5, 0.5, 1.0).N == 1);
  CHECK(plan_samples(0.999, 0.9, 1.0).N == 1);

  std::uint64_t prev = std::numeric_limits<std::uint64_t>::max();
  for (double eps : {0.001, 0.01, 0.05, 0.2, 0.6}) {
    const auto n = plan_samples(eps, 0.05, 0.5).N;
    CHECK(n <= prev);
    prev = n;
  }
  prev = std::numeric_limits<std::uint64_t>::max();
  for (double nu : {0.1, 0.25, 0.5, 1.0}) {
    const auto n = plan_samples(0.05, 0.05, nu).N;
    CHECK(n <= prev);
    prev = n;
  }
  prev = std::numeric_limits<std::uint64_t>::max();
  for (double d : {0.001, 0.01, 0.1, 0.5}) {
    const auto n = plan_samples(0.05, d, 0.3).N;
    CHECK(n <= prev);
    prev = n;
  }
  CHECK_THROWS_AS(plan_samples(0.0, 0.1, 1.0), DomainError);
  CHECK_THROWS_AS(plan_samples(0.1, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(plan_samples(0.1, 0.1, 0.0), DomainError);
}

TEST_CASE("confidence", "[strategies]") {
  CHECK(confidence(0.01, 1.0, 0) == 1.0);
  CHECK(confidence(0.01, 1.0, 459) <= 0.01);
  CHECK(confidence(0.01, 1.0, 458) > 0.01);
  CHECK(confidence(1.0, 1.0, 1) == 0.0);
  CHECK(near(confidence(0.1, 0.5, 3), std::pow(0.95, 3), 1e-15));
  CHECK_THROWS_AS(confidence(-0.1, 0.5, 3), DomainError);
}

TEST_CASE("generator and full-group protocols", "[strategies]") {
  CliffordCircuit cx(2);
  cx.cnot(0, 1);
  const auto g = choi_stabilizers(cx);
  CHECK(near(spectral_gap(generator_protocol(g)), 0.25, 1e-10));
  CHECK(near(spectral_gap(generator_protocol(
                 StabilizerGroup(2, {PauliString::parse("XX"), PauliString::parse("ZZ")}))),
             0.5, 1e-10));
  CHECK_THROWS_AS(generator_protocol(StabilizerGroup(2, {PauliString::parse("XX")})), DomainError);

  const auto id = full_group_protocol(choi_stabilizers(CliffordCircuit(1)));
  CHECK(id.tests().size() == 3);
  CHECK(near(spectral_gap(id), 2.0 / 3, 1e-10));
  CHECK(max_abs(id.matrix().matrix() - canned("identity3").matrix().matrix()) <= 1e-12);

  const auto full = full_group_protocol(g);
  CHECK(full.tests().size() == 15);
  CHECK(near(spectral_gap(full), 8.0 / 15, 1e-10));

  KeyedRng rng(3, 3);
  const auto c3 = qpv::testing::random_circuit(rng, 3, 20);
  const auto f3 = full_group_protocol(choi_stabilizers(c3));
  CHECK(f3.tests().size() == 63);
  CHECK(near(spectral_gap(f3), 32.0 / 63, 1e-10));
  CHECK(near(spectral_gap(f3), ref_gap(f3.matrix().matrix()), 1e-10));
  for (std::size_t n = 1; n <= 3; ++n) {
    const double nu = std::pow(2.0, 2.0 * n - 1) / (std::pow(2.0, 2.0 * n) - 1);
    CHECK(static_cast<double>(plan_samples(0.01, 0.01, nu).N) <= 2.0 / 0.01 * std::log(100.0));
  }
}

TEST_CASE("single-qubit substitution rule", "[strategies]") {
  const auto gate = [](GateKind k) { return Operator(circuit_unitary(CliffordCircuit(1).add(k, 0)).matrix(), {2}); };
  const auto h = single_qubit_gate_protocol(gate(GateKind::H), 2);
  CHECK(max_abs(h.matrix().matrix() - ref_omega({"+XZ", "+ZX"})) <= 1e-12);
  const auto s = single_qubit_gate_protocol(gate(GateKind::S), 2);
  CHECK(max_abs(s.matrix().matrix() - ref_omega({"+ZZ", "+XY"})) <= 1e-12);
  const auto x = single_qubit_gate_protocol(gate(GateKind::X), 2);
  CHECK(max_abs(x.matrix().matrix() - ref_omega({"+XX", "-ZZ"})) <= 1e-12);
  const auto h3 = single_qubit_gate_protocol(gate(GateKind::H), 3);
  CHECK(near(spectral_gap(h3), 2.0 / 3, 1e-10));

  for (std::uint64_t t = 0; t < 5; ++t) {
    KeyedRng rng(19, t);
    const Operator u(qpv::testing::random_unitary(rng, 2), {2});
    const auto p2 = single_qubit_gate_protocol(u, 2);
    const auto p3 = single_qubit_gate_protocol(u, 3);
    CHECK(near(spectral_gap(p2), 0.5, 1e-10));
    CHECK(near(spectral_gap(p3), 2.0 / 3, 1e-10));
    // Each test is the +1 projector of sigma (x) U sigma U^dag.
    const CMatrix um = u.matrix();
    const CMatrix want = 0.5 * (0.5 * (CMatrix::Identity(4, 4) + naive_kron(pauli_matrix::X(), um * pauli_matrix::X() * um.adjoint())) +
                                0.5 * (CMatrix::Identity(4, 4) + naive_kron(pauli_matrix::Z(), um * pauli_matrix::Z() * um.adjoint())));
    CHECK(max_abs(p2.matrix().matrix() - want) <= 1e-12);
  }
  CHECK_THROWS_AS(single_qubit_gate_protocol(Operator(2.0 * pauli_matrix::X(), {2}), 2), DomainError);
  CHECK_THROWS_AS(single_qubit_gate_protocol(gate(GateKind::H), 4), DomainError);
}

TEST_CASE("hypergraph coloring protocols", "[strategies]") {
  for (std::size_t n : {2u, 3u}) {
    const auto s = hypergraph_cz_protocol(n);
    CHECK(s.tests().size() == n + 1);
    CHECK(near(spectral_gap(s), 1.0 / static_cast<double>(n + 1), 1e-10));
    CHECK(near(spectral_gap(s), ref_gap(s.matrix().matrix()), 1e-10));
    for (const auto& t : s.tests()) CHECK(near(t.test.pass_probability(s.target().density()), 1.0, 1e-12));
    CHECK(std::abs(s.target().amplitudes().dot(choi_pure_state(hypergraph_cz_target(n)).amplitudes())) >=
          1 - 1e-12);
  }
  // Test projector equals the product of (1 + K_v)/2 over its color class,
  // with K_v = X_v times the diagonal sign of the edges through v.
  const Hypergraph hg = controlled_z_choi_hypergraph(3);
  const auto s = hypergraph_protocol(hg, 3);
  const auto col = proper_coloring(hg);
  const std::size_t n = hg.num_vertices(), D = std::size_t{1} << n;
  for (std::size_t c = 0; c < col.num_colors; ++c) {
    CMatrix p = CMatrix::Identity(static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(D));
    for (auto v : col.vertices_with(c)) {
      CMatrix k = CMatrix::Zero(static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(D));
      for (std::size_t b = 0; b < D; ++b) {
        int par = 0;
        for (const auto& e : hg.edges()) {
          if (std::find(e.begin(), e.end(), v) == e.end()) continue;
          int all = 1;
          for (auto u : e) {
            if (u != v) all &= static_cast<int>((b >> (n - 1 - u)) & 1u);
          }
          par ^= all;
        }
        const std::size_t flipped = b ^ (std::size_t{1} << (n - 1 - v));
        k(static_cast<Eigen::Index>(flipped), static_cast<Eigen::Index>(b)) = par ? -1.0 : 1.0;
      }
      p = p * 0.5 * (CMatrix::Identity(static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(D)) + k);
    }
    CHECK(max_abs(s.tests()[c].test.projector().matrix() - p) <= 1e-12);
  }
}

TEST_CASE("local settings lower to the Pauli projectors", "[strategies][property]") {
  for (const auto& name : canned_names()) {
    const AAPVStrategy s = canned(name);
    for (const auto& t : s.tests()) {
      const PauliString& p = *t.test.pauli();
      CHECK(max_abs(pauli_local_settings(p).lower().matrix() - eigenspace_projector(p, +1).matrix()) <= 1e-12);
    }
  }
  // Arbitrary axis: +1 eigenvector of n.sigma.
  const auto b = QubitBasis::along({0.3, -0.4, 0.5});
  const CMatrix v = b.eigenbasis();
  const double nrm = std::sqrt(0.5);
  const CMatrix ns = (0.3 * pauli_matrix::X() - 0.4 * pauli_matrix::Y() + 0.5 * pauli_matrix::Z()) / nrm;
  CHECK((ns * v.col(0) - v.col(0)).norm() <= 1e-12);
  CHECK((ns * v.col(1) + v.col(1)).norm() <= 1e-12);
  CHECK(max_abs(v.adjoint() * v - CMatrix::Identity(2, 2)) <= 1e-12);
}

TEST_CASE("filter protocol", "[strategies]") {
  CMatrix k(2, 2);
  k << 1, 0, 0, 0.5;
  const auto s = filter_protocol(k);
  CHECK(s.tests().size() == 3);
  const double nu = spectral_gap(s);
  CHECK(nu > 0.0);
  CHECK(near(nu, ref_gap(s.matrix().matrix()), 1e-10));
  CHECK_THROWS_AS(filter_protocol(CMatrix::Identity(3, 3)), DimensionError);
}

TEST_CASE("canned names", "[strategies]") {
  CHECK(canned_names().size() == 8);
  CHECK_THROWS_AS(canned("toffoli"), DomainError);
  CHECK(near(max_entangled_optimal_gap(4), 0.75, 1e-15));
}

//=============================================================================
// One-way decomposition and PMPV
//=============================================================================

TEST_CASE("one-way decomposition reconstructs Omega", "[pmpv][property]") {
  std::vector<AAPVStrategy> all;
  for (const auto& name : canned_names()) all.push_back(canned(name));
  all.push_back(hypergraph_cz_protocol(2));
  CMatrix k(2, 2);
  k << 1, 0, 0, 0.5;
  all.push_back(filter_protocol(k));
  all.push_back(single_qubit_gate_protocol(Operator(qpv::testing::random_unitary(*std::make_unique<KeyedRng>(4, 4), 2), {2}), 3));
  for (const auto& s : all) {
    INFO(s.label());
    for (auto g : {OneWayGranularity::per_qubit, OneWayGranularity::parity}) {
      const bool pauli_only = std::all_of(s.tests().begin(), s.tests().end(), [](const WeightedTest& t) {
        return t.test.pauli().has_value() || t.test.form() == Test::Form::one_way;
      });
      if (g == OneWayGranularity::parity && !pauli_only) {
        CHECK_THROWS_AS(one_way_decompose(s, g), DomainError);
        continue;
      }
      const OneWayForm f = one_way_decompose(s, g);
      CHECK(max_abs(f.reconstruct().matrix() - s.matrix().matrix()) <= 1e-12);
      CHECK(f.povm_error() <= 1e-10);
      for (const auto& pr : f.pairs) {
        const auto sp = eig_hermitian(pr.n);
        CHECK(sp.values.back() >= -1e-10);
        CHECK(sp.values.front() <= 1 + 1e-10);
      }
    }
  }
}

TEST_CASE("correlation expansion of a single test", "[pmpv]") {
  const auto s = pauli_protocol({{1.0, PauliString::parse("+ZZ")}}, canned("identity2").target(), 1, 1);
  const auto f = one_way_decompose(s, OneWayGranularity::parity);
  REQUIRE(f.pairs.size() == 2);
  const CMatrix p0 = proj(k0), p1 = proj(k1);
  CHECK(max_abs(f.pairs[0].m.matrix() - p0) <= 1e-15);
  CHECK(max_abs(f.pairs[0].n.matrix() - p0) <= 1e-15);
  CHECK(max_abs(f.pairs[1].m.matrix() - p1) <= 1e-15);
  CHECK(max_abs(f.pairs[1].n.matrix() - p1) <= 1e-15);
}

TEST_CASE("identity protocol one-way form", "[pmpv]") {
  const auto f = one_way_decompose(canned("identity2"), OneWayGranularity::parity);
  REQUIRE(f.pairs.size() == 4);
  for (const auto& pr : f.pairs) {
    CHECK(near(pr.m.trace().real(), 0.5, 1e-15));
    // System effect is the ancilla projector (weight removed).
    CHECK(max_abs(pr.n.matrix() - 2.0 * pr.m.matrix()) <= 1e-15);
  }
}

TEST_CASE("CNOT one-way pairs", "[pmpv]") {
  const auto f = one_way_decompose(canned("cnot"), OneWayGranularity::parity);
  // The ZXZX test: ancilla Z(x)X outcome a, system P^a_{ZX}.
  bool seen = false;
  for (int a : {1, -1}) {
    const CMatrix m = 0.25 * eigenspace_projector(PauliString::parse("ZX"), a).matrix();
    const CMatrix n = eigenspace_projector(PauliString::parse("ZX"), a).matrix();
    for (const auto& pr : f.pairs) {
      if (max_abs(pr.m.matrix() - m) <= 1e-12 && max_abs(pr.n.matrix() - n) <= 1e-12) seen = true;
    }
  }
  CHECK(seen);
}

TEST_CASE("prepare-and-measure ensembles", "[pmpv]") {
  SECTION("identity") {
    const auto x = to_pmpv(canned("identity2"));
    REQUIRE(x.entries().size() == 4);
    for (const auto& v : {kp, km, k0, k1}) {
      const auto w = find_entry(x, proj(v), proj(v));
      REQUIRE(w);
      CHECK(near(*w, 0.25, 1e-15));
    }
  }
  SECTION("hadamard") {
    const auto x = to_pmpv(canned("hadamard"));
    REQUIRE(x.entries().size() == 4);
    const std::vector<std::pair<CVector, CVector>> want{{kp, k0}, {km, k1}, {k0, kp}, {k1, km}};
    for (const auto& [in, out] : want) {
      const auto w = find_entry(x, proj(in), proj(out));
      REQUIRE(w);
      CHECK(near(*w, 0.25, 1e-15));
    }
  }
  SECTION("phase") {
    const auto x = to_pmpv(canned("phase"));
    REQUIRE(x.entries().size() == 4);
    const std::vector<std::pair<CVector, CVector>> want{{k0, k0}, {k1, k1}, {kp, ktop}, {km, kbot}};
    for (const auto& [in, out] : want) {
      const auto w = find_entry(x, proj(in), proj(out));
      REQUIRE(w);
      CHECK(near(*w, 0.25, 1e-15));
    }
  }
}

TEST_CASE("conversion identity and mean input", "[pmpv][property]") {
  std::vector<AAPVStrategy> all;
  for (const auto& name : canned_names()) all.push_back(canned(name));
  all.push_back(hypergraph_cz_protocol(2));
  for (const auto& s : all) {
    INFO(s.label());
    const double d = std::pow(2.0, static_cast<double>(s.n_ancilla()));
    for (auto g : {OneWayGranularity::per_qubit, OneWayGranularity::parity}) {
      if (g == OneWayGranularity::parity && !s.tests().front().test.pauli()) continue;
      const auto x = to_pmpv(s, g);
      CHECK(max_abs(xi_matrix(x).matrix() - s.matrix().matrix() / d) <= 1e-12);
      CHECK(max_abs(x.mean_input().matrix() - CMatrix::Identity(x.d(), x.d()) / d) <= 1e-12);
      double total = 0;
      for (const auto& e : x.entries()) total += e.p;
      CHECK(near(total, 1.0, 1e-12));
    }
  }
}

TEST_CASE("converted inputs are product states", "[pmpv][property]") {
  for (const auto& name : canned_names()) {
    const auto x = to_pmpv(canned(name));
    for (const auto& e : x.entries()) {
      const auto& dims = e.input.dims();
      const CMatrix& rho = e.input.matrix();
      CHECK(near((rho * rho).trace().real(), 1.0, 1e-12));
      CMatrix prod = CMatrix::Ones(1, 1);
      for (std::size_t q = 0; q < dims.size(); ++q) prod = naive_kron(prod, partial_trace(e.input, {q}).matrix());
      CHECK(max_abs(prod - rho) <= 1e-12);
    }
  }
}

TEST_CASE("xi of a trivial ensemble", "[pmpv]") {
  const PMPVStrategy x({{1.0, Operator(CMatrix::Identity(2, 2) / 2.0, {2}), Operator::identity({2})}});
  CHECK(max_abs(xi_matrix(x).matrix() - CMatrix::Identity(4, 4) / 2.0) <= 1e-15);
}

TEST_CASE("PMPV strategies validate", "[pmpv]") {
  const Operator half(CMatrix::Identity(2, 2) / 2.0, {2});
  CHECK_THROWS_AS(PMPVStrategy({{0.5, half, Operator::identity({2})}}), StrategyMalformed);
  CHECK_THROWS_AS(PMPVStrategy({{1.0, half, Operator(2.0 * CMatrix::Identity(2, 2), {2})}}), StrategyMalformed);
  CHECK_THROWS_AS(PMPVStrategy({{1.0, Operator(CMatrix::Identity(2, 2), {2}), Operator::identity({2})}}),
                  StrategyMalformed);
  // Target that the ensemble does not always pass.
  CHECK_THROWS_AS(PMPVStrategy({{1.0, half, Operator(proj(k0), {2})}}, canned("identity2").target()),
                  StrategyMalformed);
  OneWayForm bad;
  bad.ancilla_dims = {2};
  bad.system_dims = {2};
  bad.pairs.push_back({Operator(proj(k0), {2}), Operator::identity({2})});
  CHECK_THROWS_AS(to_pmpv(bad, 2), DomainError);
}

TEST_CASE("PMPV pass probability on trace-preserving processes", "[pmpv]") {
  const auto s = canned("cnot");
  const auto x = to_pmpv(s);
  const QuantumProcess u = canned_target("cnot");
  CHECK(near(failure_probability(x, u), 1.0, 1e-12));

  const QuantumProcess noisy = make_noise(u, Depolarizing{0.04});
  const double via_choi = trace_product(s.matrix(), choi_state(noisy));
  CHECK(near(failure_probability(x, noisy), via_choi, 1e-10));
  // Closed form: (1 - p) + p Tr(Omega) / 16 with Tr(Omega) = 8.
  CHECK(near(via_choi, 0.96 + 0.04 * 0.5, 1e-12));
  const double eps = 1.0 - entanglement_fidelity(noisy, u);
  CHECK(failure_probability(x, noisy) <= 1.0 - eps * spectral_gap(s) + 1e-10);

  CMatrix k(4, 4);
  k.setIdentity();
  k(3, 3) = 0.5;
  CHECK_THROWS_AS(failure_probability(x, u.then(QuantumProcess::kraus({k}, {2, 2}))), DomainError);
}

TEST_CASE("postselected pass probability", "[pmpv][property]") {
  CMatrix k(2, 2);
  k << 1, 0, 0, 0.5;
  const auto s = filter_protocol(k);
  const auto x = to_pmpv(s);
  const QuantumProcess filt = QuantumProcess::kraus({k}, {2});
  CHECK(near(postselected_failure_probability(x, filt), 1.0, 1e-12));

  const auto cx = to_pmpv(canned("cnot"));
  const auto noisy = make_noise(canned_target("cnot"), Depolarizing{0.1});
  CHECK(near(postselected_failure_probability(cx, noisy), failure_probability(cx, noisy), 1e-12));

  // Random trace-decreasing processes on the identity and filter protocols.
  for (std::uint64_t t = 0; t < 50; ++t) {
    KeyedRng rng(808, t);
    auto ops = qpv::testing::random_kraus(rng, 2, 2, 1 + static_cast<Eigen::Index>(t % 3));
    ops.front() *= 0.3 + 0.7 * rng.uniform();
    const QuantumProcess e = QuantumProcess::kraus(ops, {2});
    const AAPVStrategy& strat = t % 2 ? s : canned("identity2");
    const auto px = to_pmpv(strat);
    const Operator ups = choi_matrix(e);
    const double tr = ups.trace().real();
    const double pass = trace_product(strat.matrix(), choi_state(e));
    CHECK(near(trace_product(xi_matrix(px), ups), pass * tr / 2.0, 1e-10));
    CHECK(near(postselected_failure_probability(px, e), pass, 1e-10));
  }
}

TEST_CASE("noisy filter attains the bound at the oracle maximizer", "[pmpv][oracle]") {
  CMatrix k(2, 2);
  k << 1, 0, 0, 0.5;
  const auto s = filter_protocol(k);
  const auto x = to_pmpv(s);
  const double eps = 0.1;
  const auto rep = subspace_worst_case(s, eps);
  // Scale the maximizer into a trace-nonincreasing Choi matrix.
  const Operator marg = partial_trace(rep.maximizer, {0});
  const double top = eig_hermitian(marg).values.front();
  const Operator ups(rep.maximizer.matrix() / top, {2, 2});
  const QuantumProcess e = process_from_choi(ups, {2}, {2});
  CHECK(near(state_fidelity(choi_state(e), s.target()), 1.0 - eps, 1e-10));
  CHECK(near(postselected_failure_probability(x, e), 1.0 - eps * spectral_gap(s), 1e-9));
}

//=============================================================================
// Oracles
//=============================================================================

TEST_CASE("analytic worst case", "[oracle]") {
  CHECK(near(analytic_worst_case(canned("cnot"), 0.1), 0.975, 1e-12));
  CHECK(analytic_worst_case(canned("cnot"), 0.0) == 1.0);
  // Rank-one test |00><00| on the product target |00>.
  LocalSettings ls;
  ls.bases = {QubitBasis::pauli('Z'), QubitBasis::pauli('Z')};
  ls.checks = {ParityCheck{{0}, {}, 1}, ParityCheck{{1}, {}, 1}};
  const AAPVStrategy perfect({{1.0, Test::from_local(ls)}}, PureState::basis(0, {2, 2}), 1, 1);
  CHECK(near(spectral_gap(perfect), 1.0, 1e-12));
  CHECK(near(analytic_worst_case(perfect, 0.2), 0.8, 1e-12));
  CHECK_THROWS_AS(analytic_worst_case(perfect, 1.0), DomainError);
}

TEST_CASE("subspace worst case", "[oracle]") {
  CHECK(near(subspace_worst_case(canned("identity3"), 0.3).subspace_max, 0.8, 1e-9));
  CHECK(near(subspace_worst_case(hypergraph_cz_protocol(2), 0.12).subspace_max, 0.96, 1e-9));

  LocalSettings all;
  all.bases = {QubitBasis::pauli('Z'), QubitBasis::pauli('Z')};
  const AAPVStrategy useless({{1.0, Test::from_local(all)}}, canned("identity2").target(), 1, 1);
  const auto r = subspace_worst_case(useless, 0.3);
  CHECK(near(r.subspace_max, 1.0, 1e-12));
  CHECK(r.degenerate);
  CHECK(spectral_gap(useless) == 0.0);
}

TEST_CASE("subspace maximum equals the analytic bound", "[oracle][property]") {
  for (const auto& name : canned_names()) {
    const auto s = canned(name);
    for (double eps : {0.01, 0.05, 0.1, 0.2}) {
      const auto r = subspace_worst_case(s, eps);
      INFO(name << " eps=" << eps);
      CHECK(near(r.subspace_max, r.analytic, 1e-9));
      CHECK_FALSE(r.degenerate);
      CHECK(near(state_fidelity(r.maximizer, s.target()), 1.0 - eps, 1e-10));
      CHECK(near(trace_product(s.matrix(), r.maximizer), r.subspace_max, 1e-10));
    }
  }
}

TEST_CASE("random search", "[oracle]") {
  const auto s = canned("cnot");
  const auto r = subspace_worst_case(s, 0.1);
  // Seeding with the complement part of the maximizer hits the maximum.
  const auto spec = eig_hermitian(r.maximizer, true);
  const CVector phi = s.target().amplitudes();
  CVector v = spec.vectors->col(1);
  v -= phi * phi.dot(v);
  CHECK(near(random_search_worst_case(s, 0.1, 1, 5, {v}), r.subspace_max, 1e-10));

  const double rs = random_search_worst_case(s, 0.1, 10000, 17);
  CHECK(rs <= r.subspace_max + 1e-9);
  CHECK(rs >= 0.975 - 5e-3);
  CHECK(random_search_worst_case(s, 0.0, 3, 1) == 1.0);
  CHECK(random_search_worst_case(s, 0.1, 200, 3) == random_search_worst_case(s, 0.1, 200, 3));
  CHECK_THROWS_AS(random_search_worst_case(s, 0.1, 0, 3), DomainError);
}

TEST_CASE("trace-preserving search", "[oracle]") {
  const auto s = canned("cnot");
  CHECK(tp_constrained_search(s, 0.0, 5, 1) == 1.0);
  const QuantumProcess u = canned_target("cnot");
  for (double p : {0.01, 0.05, 0.1, 0.15, 0.2}) {
    const auto e = make_noise(u, Depolarizing{p});
    const double eps = 1.0 - entanglement_fidelity(e, u);
    CHECK(trace_product(s.matrix(), choi_state(e)) <= 1.0 - eps * spectral_gap(s) + 1e-9);
  }
  const auto id = canned("identity2");
  for (double eps : {0.05, 0.2}) {
    const double tp = tp_constrained_search(id, eps, 500, 9);
    CHECK(tp <= subspace_worst_case(id, eps).subspace_max + 1e-9);
  }
  // Target with a non-uniform ancilla marginal.
  CMatrix k(2, 2);
  k << 1, 0, 0, 0.5;
  CHECK_THROWS_AS(tp_constrained_search(filter_protocol(k), 0.1, 5, 1), DomainError);
  const auto rep = worst_case_report(filter_protocol(k), 0.1, 10, 1);
  CHECK_FALSE(rep.tp_constrained_max.has_value());
}

TEST_CASE("oracle ordering chain", "[oracle][property]") {
  std::vector<AAPVStrategy> all;
  for (const auto& name : canned_names()) all.push_back(canned(name));
  all.push_back(hypergraph_cz_protocol(2));
  for (const auto& s : all) {
    for (double eps : {0.01, 0.05, 0.1, 0.2}) {
      const auto r = worst_case_report(s, eps, 300, 11);
      INFO(s.label() << " eps=" << eps);
      CHECK(r.random_search_max <= r.subspace_max + 1e-9);
      REQUIRE(r.tp_constrained_max.has_value());
      if (!std::isnan(*r.tp_constrained_max)) CHECK(*r.tp_constrained_max <= r.subspace_max + 1e-9);
      CHECK(r.subspace_max <= r.analytic + 1e-9);
    }
  }
}
