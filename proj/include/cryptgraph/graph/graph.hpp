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

// Plaintext graphs and their matrix encoding.
//
// Adjacency entries:
//   undirected  I_ij = I_ji = 1 for an edge {i, j}
//   directed    an edge u -> v sets I_vu = 1 (inbound at v) and I_uv = -1
//               (outbound at u)
//   bipartite   I_uv = 1 for an edge between u in U and v in V
//
// At most one edge joins any pair of vertices, so a directed graph never
// holds both u -> v and v -> u.

#ifndef CRYPTGRAPH_GRAPH_GRAPH_HPP_
#define CRYPTGRAPH_GRAPH_GRAPH_HPP_

#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cryptgraph/common/errors.hpp"

namespace cryptgraph {

enum class GraphKind : std::uint8_t { kUndirected = 0, kDirected = 1, kBipartite = 2 };

inline std::string_view GraphKindName(GraphKind kind) {
  switch (kind) {
    case GraphKind::kUndirected:
      return "undirected";
    case GraphKind::kDirected:
      return "directed";
    case GraphKind::kBipartite:
      return "bipartite";
  }
  return "?";
}

inline std::optional<GraphKind> ParseGraphKind(std::string_view s) {
  if (s == "undirected") return GraphKind::kUndirected;
  if (s == "directed") return GraphKind::kDirected;
  if (s == "bipartite") return GraphKind::kBipartite;
  return std::nullopt;
}

struct Edge {
  int u = 0;
  int v = 0;
  std::optional<double> weight;

  friend bool operator==(const Edge&, const Edge&) = default;
};

template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, const T& fill = T())
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  T& operator()(int r, int c) { return data_[Index(r, c)]; }
  const T& operator()(int r, int c) const { return data_[Index(r, c)]; }
  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t Index(int r, int c) const {
    return static_cast<std::size_t>(r) * cols_ + c;
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

using AdjacencyMatrix = Matrix<std::int8_t>;
// Entries are meaningful only where the adjacency is nonzero.
using WeightMatrix = Matrix<double>;

class Graph {
 public:
  Graph() = default;
  Graph(GraphKind kind, int n, int n2 = 0, bool weighted = false)
      : kind_(kind), n_(n), n2_(n2), weighted_(weighted) {
    if (n < 0) throw ValidationError("vertex count must be non-negative");
    if (kind == GraphKind::kBipartite) {
      if (n2 < 0) throw ValidationError("second part size must be non-negative");
    } else if (n2 != 0) {
      throw ValidationError("only bipartite graphs have a second part");
    }
  }

  GraphKind kind() const { return kind_; }
  int n() const { return n_; }
  int n2() const { return n2_; }
  bool weighted() const { return weighted_; }
  int rows() const { return n_; }
  int cols() const { return kind_ == GraphKind::kBipartite ? n2_ : n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t num_edges() const { return edges_.size(); }

  bool HasPair(int u, int v) const { return pairs_.count(PairKey(u, v)) > 0; }

  // Throws ValidationError on self-loops, out-of-range endpoints, a second
  // edge between the same pair, or a weight mismatch.
  void AddEdge(int u, int v, std::optional<double> weight = std::nullopt) {
    CheckEdge(u, v, weight);
    if (HasPair(u, v)) {
      throw ValidationError("duplicate edge between " + std::to_string(u) +
                            " and " + std::to_string(v));
    }
    pairs_.insert(PairKey(u, v));
    edges_.push_back({u, v, weight});
  }

  void CheckEdge(int u, int v, const std::optional<double>& weight) const {
    if (u < 0 || u >= rows() || v < 0 || v >= cols()) {
      throw ValidationError("edge (" + std::to_string(u) + ", " +
                            std::to_string(v) + ") out of range");
    }
    if (kind_ != GraphKind::kBipartite && u == v) {
      throw ValidationError("self-loop at vertex " + std::to_string(u));
    }
    if (weighted_ != weight.has_value()) {
      throw ValidationError(weighted_ ? "weighted graph edge lacks a weight"
                                      : "unweighted graph edge carries a weight");
    }
    if (weight && !std::isfinite(*weight)) {
      throw ValidationError("edge weight must be finite");
    }
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.kind_ == b.kind_ && a.n_ == b.n_ && a.n2_ == b.n2_ &&
           a.weighted_ == b.weighted_ && a.edges_ == b.edges_;
  }

 private:
  std::pair<int, int> PairKey(int u, int v) const {
    if (kind_ == GraphKind::kBipartite) return {u, v};
    return {std::min(u, v), std::max(u, v)};
  }

  GraphKind kind_ = GraphKind::kUndirected;
  int n_ = 0;
  int n2_ = 0;
  bool weighted_ = false;
  std::vector<Edge> edges_;
  std::set<std::pair<int, int>> pairs_;
};

inline AdjacencyMatrix BuildAdjacency(const Graph& g) {
  AdjacencyMatrix m(g.rows(), g.cols(), 0);
  for (const Edge& e : g.edges()) {
    switch (g.kind()) {
      case GraphKind::kUndirected:
        m(e.u, e.v) = 1;
        m(e.v, e.u) = 1;
        break;
      case GraphKind::kDirected:
        m(e.v, e.u) = 1;
        m(e.u, e.v) = -1;
        break;
      case GraphKind::kBipartite:
        m(e.u, e.v) = 1;
        break;
    }
  }
  return m;
}

// Weights sit at every nonzero adjacency position of their edge.
inline WeightMatrix BuildWeights(const Graph& g) {
  WeightMatrix w(g.rows(), g.cols(), 0.0);
  if (!g.weighted()) return w;
  for (const Edge& e : g.edges()) {
    w(e.u, e.v) = *e.weight;
    if (g.kind() != GraphKind::kBipartite) w(e.v, e.u) = *e.weight;
  }
  return w;
}

// Inverse of BuildAdjacency. Edges come out in row-major order of their
// canonical position; `weights` may be null for unweighted graphs.
inline Graph GraphFromMatrices(GraphKind kind, int n, int n2, bool weighted,
                               const AdjacencyMatrix& adj,
                               const WeightMatrix* weights) {
  Graph g(kind, n, n2, weighted);
  for (int i = 0; i < adj.rows(); ++i) {
    for (int j = 0; j < adj.cols(); ++j) {
      const int x = adj(i, j);
      if (kind != GraphKind::kBipartite && i == j && x != 0) {
        throw ValidationError("nonzero diagonal entry at " + std::to_string(i));
      }
      std::optional<double> w;
      if (weighted && x != 0) w = (*weights)(i, j);
      switch (kind) {
        case GraphKind::kUndirected:
          if (x != 0 && x != 1) throw ValidationError("undirected entry outside {0,1}");
          if (x != adj(j, i)) throw ValidationError("undirected matrix not symmetric");
          if (x == 1 && i < j) g.AddEdge(i, j, w);
          break;
        case GraphKind::kDirected:
          if (x != -adj(j, i)) throw ValidationError("directed matrix not antisymmetric");
          if (x == -1) g.AddEdge(i, j, w);  // outbound at i: edge i -> j
          break;
        case GraphKind::kBipartite:
          if (x != 0 && x != 1) throw ValidationError("bipartite entry outside {0,1}");
          if (x == 1) g.AddEdge(i, j, w);
          break;
      }
    }
  }
  return g;
}

// Same edge set, order-insensitive.
inline bool SameStructure(const Graph& a, const Graph& b) {
  return a.kind() == b.kind() && a.n() == b.n() && a.n2() == b.n2() &&
         BuildAdjacency(a) == BuildAdjacency(b);
}

// ---------------------------------------------------------------------------
// Edge-list text format.
//
//   # comment
//   graph <undirected|directed|bipartite> <n> [<n2>] [weighted]
//   e <i> <j> [<w>]

struct LoadStats {
  std::size_t duplicates_dropped = 0;
  std::size_t lines = 0;
};

namespace internal {

inline std::vector<std::string> SplitWords(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

inline long long ParseIndex(const std::string& s, std::size_t line) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos, 10);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty() || s[0] == '+') {
    throw SyntaxError("line " + std::to_string(line) + ": expected an integer, got '" +
                      s + "'");
  }
  return v;
}

inline double ParseWeight(const std::string& s, std::size_t line) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty()) {
    throw SyntaxError("line " + std::to_string(line) + ": expected a number, got '" +
                      s + "'");
  }
  return v;
}

}  // namespace internal

// Repeated edges between one pair (including the reverse of a directed
// edge) are dropped and counted; every other defect is an error naming the
// offending line.
inline Graph LoadEdgeList(std::istream& in, LoadStats* stats = nullptr) {
  LoadStats local;
  std::optional<Graph> g;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto words = internal::SplitWords(line);
    if (words.empty() || words[0][0] == '#') continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (!g) {
      if (words[0] != "graph" || words.size() < 3) {
        throw SyntaxError(where + "expected header 'graph <kind> <n> [<n2>] [weighted]'");
      }
      const auto kind = ParseGraphKind(words[1]);
      if (!kind) throw SyntaxError(where + "unknown graph kind '" + words[1] + "'");
      std::size_t next = 2;
      const long long n = internal::ParseIndex(words[next++], lineno);
      long long n2 = 0;
      if (*kind == GraphKind::kBipartite) {
        if (next >= words.size()) throw SyntaxError(where + "bipartite header needs <n2>");
        n2 = internal::ParseIndex(words[next++], lineno);
      }
      bool weighted = false;
      if (next < words.size() && words[next] == "weighted") {
        weighted = true;
        ++next;
      }
      if (next != words.size()) throw SyntaxError(where + "trailing header fields");
      if (n < 0 || n > (1 << 24) || n2 < 0 || n2 > (1 << 24)) {
        throw ValidationError(where + "vertex count out of range");
      }
      g.emplace(*kind, static_cast<int>(n), static_cast<int>(n2), weighted);
      continue;
    }
    if (words[0] != "e") {
      throw SyntaxError(where + "expected an edge line 'e <i> <j>'");
    }
    const std::size_t want = g->weighted() ? 4 : 3;
    if (words.size() != want) {
      throw SyntaxError(where + "edge line needs " + std::to_string(want - 1) +
                        " fields");
    }
    const long long u = internal::ParseIndex(words[1], lineno);
    const long long v = internal::ParseIndex(words[2], lineno);
    std::optional<double> w;
    if (g->weighted()) w = internal::ParseWeight(words[3], lineno);
    if (u < 0 || u >= g->rows() || v < 0 || v >= g->cols()) {
      throw ValidationError(where + "vertex index out of range");
    }
    try {
      g->CheckEdge(static_cast<int>(u), static_cast<int>(v), w);
    } catch (const ValidationError& e) {
      throw ValidationError(where + e.what());
    }
    if (g->HasPair(static_cast<int>(u), static_cast<int>(v))) {
      ++local.duplicates_dropped;
      continue;
    }
    g->AddEdge(static_cast<int>(u), static_cast<int>(v), w);
  }
  if (!g) throw SyntaxError("missing 'graph' header line");
  local.lines = lineno;
  if (stats) *stats = local;
  return *std::move(g);
}

inline Graph LoadEdgeListFile(const std::string& path, LoadStats* stats = nullptr) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open graph file '" + path + "'");
  return LoadEdgeList(in, stats);
}

inline void WriteEdgeList(std::ostream& out, const Graph& g) {
  out << "graph " << GraphKindName(g.kind()) << ' ' << g.n();
  if (g.kind() == GraphKind::kBipartite) out << ' ' << g.n2();
  if (g.weighted()) out << " weighted";
  out << '\n';
  out.precision(17);
  for (const Edge& e : g.edges()) {
    out << "e " << e.u << ' ' << e.v;
    if (e.weight) out << ' ' << *e.weight;
    out << '\n';
  }
}

// Subgraph induced by `vertices`, relabelled 0..k-1 in the given order.
inline Graph InducedSubgraph(const Graph& g, const std::vector<int>& vertices) {
  if (g.kind() == GraphKind::kBipartite) {
    throw GraphKindError("induced subgraphs are defined for one vertex set only");
  }
  std::vector<int> label(g.n(), -1);
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    const int v = vertices[k];
    if (v < 0 || v >= g.n()) throw ValidationError("subgraph vertex out of range");
    if (label[v] != -1) throw ValidationError("subgraph vertex listed twice");
    label[v] = static_cast<int>(k);
  }
  Graph out(g.kind(), static_cast<int>(vertices.size()), 0, g.weighted());
  for (const Edge& e : g.edges()) {
    if (label[e.u] >= 0 && label[e.v] >= 0) out.AddEdge(label[e.u], label[e.v], e.weight);
  }
  return out;
}

}  // namespace cryptgraph

#endif  // CRYPTGRAPH_GRAPH_GRAPH_HPP_
