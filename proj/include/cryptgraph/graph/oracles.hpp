/*
 * Copyright 2026 The CryptGraph Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Plaintext reference implementations. The encrypted pipelines are checked
// against these, so they follow the same formulas verbatim: no dangling-mass
// redistribution in PageRank and cc(i) = 0 below degree 2.

#ifndef CRYPTGRAPH_GRAPH_ORACLES_HPP_
#define CRYPTGRAPH_GRAPH_ORACLES_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "cryptgraph/common/errors.hpp"
#include "cryptgraph/graph/graph.hpp"

namespace cryptgraph {

namespace internal {

inline void RequireKind(const Graph& g, GraphKind kind, const char* what) {
  if (g.kind() != kind) {
    throw GraphKindError(std::string(what) + " needs a " +
                         std::string(GraphKindName(kind)) + " graph, got " +
                         std::string(GraphKindName(g.kind())));
  }
}

inline void RequireVertex(const Graph& g, int i) {
  if (i < 0 || i >= g.n()) {
    throw ValidationError("vertex " + std::to_string(i) + " out of range");
  }
}

}  // namespace internal

inline int Degree(const Graph& g, int i) {
  internal::RequireKind(g, GraphKind::kUndirected, "degree");
  internal::RequireVertex(g, i);
  int d = 0;
  for (const Edge& e : g.edges()) d += (e.u == i || e.v == i);
  return d;
}

inline std::vector<int> Degrees(const Graph& g) {
  internal::RequireKind(g, GraphKind::kUndirected, "degree");
  std::vector<int> d(g.n(), 0);
  for (const Edge& e : g.edges()) {
    ++d[e.u];
    ++d[e.v];
  }
  return d;
}

inline std::vector<int> Outdegrees(const Graph& g) {
  internal::RequireKind(g, GraphKind::kDirected, "outdegree");
  std::vector<int> d(g.n(), 0);
  for (const Edge& e : g.edges()) ++d[e.u];
  return d;
}

inline int Outdegree(const Graph& g, int j) {
  internal::RequireVertex(g, j);
  return Outdegrees(g)[j];
}

// Sum over j != i and k > j, k != i of I_ij I_ik I_jk.
inline std::int64_t TriangleCountPlain(const Graph& g, int i) {
  internal::RequireKind(g, GraphKind::kUndirected, "triangle count");
  internal::RequireVertex(g, i);
  const AdjacencyMatrix a = BuildAdjacency(g);
  std::int64_t count = 0;
  for (int j = 0; j < g.n(); ++j) {
    if (j == i || a(i, j) == 0) continue;
    for (int k = j + 1; k < g.n(); ++k) {
      if (k == i) continue;
      count += a(i, k) * a(j, k);
    }
  }
  return count;
}

inline std::vector<double> ClusteringCoefficientPlain(const Graph& g) {
  internal::RequireKind(g, GraphKind::kUndirected, "clustering coefficient");
  const std::vector<int> d = Degrees(g);
  std::vector<double> cc(g.n(), 0.0);
  for (int i = 0; i < g.n(); ++i) {
    if (d[i] < 2) continue;
    const double pairs = 0.5 * d[i] * (d[i] - 1);
    cc[i] = static_cast<double>(TriangleCountPlain(g, i)) / pairs;
  }
  return cc;
}

// Synchronous iteration from PR = 1/N:
//   PR'(i) = (1 - d)/N + d * sum over inbound j of PR(j) / DO(j).
inline std::vector<double> PageRankPlain(const Graph& g, double damping, int iterations) {
  internal::RequireKind(g, GraphKind::kDirected, "pagerank");
  if (!(damping > 0.0 && damping < 1.0)) {
    throw ParameterError("damping must lie in (0, 1)");
  }
  if (iterations < 0) throw ParameterError("iteration count must be non-negative");
  const int n = g.n();
  const std::vector<int> out = Outdegrees(g);
  std::vector<double> pr(n, n > 0 ? 1.0 / n : 0.0), next(n);
  for (int it = 0; it < iterations; ++it) {
    std::fill(next.begin(), next.end(), (1.0 - damping) / n);
    for (const Edge& e : g.edges()) next[e.v] += damping * pr[e.u] / out[e.u];
    pr.swap(next);
  }
  return pr;
}

}  // namespace cryptgraph

#endif  // CRYPTGRAPH_GRAPH_ORACLES_HPP_
