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

#ifndef QPV_HYPERGRAPH_HPP
#define QPV_HYPERGRAPH_HPP

#include <algorithm>
#include <set>
#include <vector>

#include "qpv/tensor.hpp"

namespace qpv {

using Hyperedge = std::vector<std::size_t>;

class Hypergraph {
 public:
  Hypergraph() = default;

  Hypergraph(std::size_t n, std::vector<Hyperedge> edges) : n_(n) {
    std::set<Hyperedge> seen;
    for (auto e : edges) {
      std::sort(e.begin(), e.end());
      if (e.size() < 2) throw DomainError("hyperedges need at least two vertices");
      if (std::adjacent_find(e.begin(), e.end()) != e.end()) {
        throw DomainError("hyperedge repeats a vertex");
      }
      if (e.back() >= n_) throw DimensionError("hyperedge vertex out of range");
      if (!seen.insert(e).second) throw DomainError("duplicate hyperedge");
      edges_.push_back(std::move(e));
    }
  }

  std::size_t num_vertices() const noexcept { return n_; }
  const std::vector<Hyperedge>& edges() const noexcept { return edges_; }

  bool adjacent(std::size_t u, std::size_t v) const {
    for (const auto& e : edges_) {
      const bool hu = std::binary_search(e.begin(), e.end(), u);
      const bool hv = std::binary_search(e.begin(), e.end(), v);
      if (hu && hv) return true;
    }
    return false;
  }

 private:
  std::size_t n_ = 0;
  std::vector<Hyperedge> edges_;
};

struct Coloring {
  std::vector<std::size_t> color;  // color[v]
  std::size_t num_colors = 0;

  std::vector<std::size_t> vertices_with(std::size_t c) const {
    std::vector<std::size_t> out;
    for (std::size_t v = 0; v < color.size(); ++v) {
      if (color[v] == c) out.push_back(v);
    }
    return out;
  }
};

/// Greedy coloring in vertex-index order: each vertex takes the smallest
/// color unused by earlier vertices it shares an edge with.
inline Coloring proper_coloring(const Hypergraph& h) {
  Coloring c;
  c.color.assign(h.num_vertices(), 0);
  for (std::size_t v = 0; v < h.num_vertices(); ++v) {
    std::vector<bool> used(h.num_vertices() + 1, false);
    for (std::size_t u = 0; u < v; ++u) {
      if (h.adjacent(u, v)) used[c.color[u]] = true;
    }
    std::size_t k = 0;
    while (used[k]) ++k;
    c.color[v] = k;
    c.num_colors = std::max(c.num_colors, k + 1);
  }
  if (h.num_vertices() == 0) c.num_colors = 0;
  return c;
}

/// prod_e CZ_e |+>^{(x) n}: amplitude of |b> is 2^{-n/2} (-1)^{#edges fully set in b}.
inline PureState hypergraph_state(const Hypergraph& h) {
  const std::size_t n = h.num_vertices();
  const std::size_t D = std::size_t{1} << n;
  check_dim(D, "hypergraph state");
  std::vector<std::size_t> masks;
  for (const auto& e : h.edges()) {
    std::size_t m = 0;
    for (auto v : e) m |= std::size_t{1} << (n - 1 - v);
    masks.push_back(m);
  }
  CVector amp(static_cast<Eigen::Index>(D));
  const double a = 1.0 / std::sqrt(static_cast<double>(D));
  for (std::size_t b = 0; b < D; ++b) {
    int parity = 0;
    for (auto m : masks) parity ^= ((b & m) == m) ? 1 : 0;
    amp(static_cast<Eigen::Index>(b)) = parity ? -a : a;
  }
  return PureState(std::move(amp), qubit_dims(n));
}

/// Hypergraph of I^{(x) n} (x) C^{(n-1)}Z applied to (|0>|+> + |1>|->)^{(x) n}:
/// ancilla i = vertex i, system i = vertex n+i, edges {i, n+i} plus the
/// system hyperedge {n, ..., 2n-1}.
inline Hypergraph controlled_z_choi_hypergraph(std::size_t n) {
  if (n < 2) throw DomainError("C^(n-1)Z Choi hypergraph needs n >= 2");
  std::vector<Hyperedge> edges;
  for (std::size_t i = 0; i < n; ++i) edges.push_back({i, n + i});
  Hyperedge sys;
  for (std::size_t i = 0; i < n; ++i) sys.push_back(n + i);
  edges.push_back(sys);
  return Hypergraph(2 * n, std::move(edges));
}

}  // namespace qpv

#endif  // QPV_HYPERGRAPH_HPP
