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

// Element-wise encrypted graphs and the structure-query polynomials.
//
// Only the vertex counts, the graph kind and the weighted flag are public.
// Every adjacency (and weight) position is encrypted, including the zeros,
// so the ciphertext matrix says nothing about the edge set.
//
// Query atoms over one entry x in {-1, 0, 1}:
//   undirected  p1(x) = x
//   inbound     p2(x) = (x^2 + x) / 2    1 -> 1, 0 and -1 -> 0
//   outbound    p3(x) = (x^2 - x) / 2   -1 -> 1, 0 and  1 -> 0
// The halves are never materialized: the result is x^2 +- x with the scale
// doubled.

#ifndef CRYPTGRAPH_CRYPTO_GRAPH_CRYPTO_HPP_
#define CRYPTGRAPH_CRYPTO_GRAPH_CRYPTO_HPP_

#include <cstdint>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cryptgraph/common/bytes.hpp"
#include "cryptgraph/encoding/encoding.hpp"
#include "cryptgraph/graph/graph.hpp"
#include "cryptgraph/he/he.hpp"
#include "cryptgraph/he/serialization.hpp"

namespace cryptgraph {

struct GraphMeta {
  GraphKind kind = GraphKind::kUndirected;
  int n = 0;
  int n2 = 0;
  bool weighted = false;

  int rows() const { return n; }
  int cols() const { return kind == GraphKind::kBipartite ? n2 : n; }
  friend bool operator==(const GraphMeta&, const GraphMeta&) = default;
};

struct EncryptedGraph {
  GraphMeta meta;
  std::uint64_t fingerprint = 0;
  Matrix<Ciphertext> adjacency;
  // Present iff meta.weighted; every entry at weight_scale.
  std::optional<Matrix<Ciphertext>> weights;
  BigInt weight_scale = 1;

  const Ciphertext& at(int i, int j) const { return adjacency(i, j); }
};

inline EncryptedGraph EncryptGraph(Encryptor& enc, const Graph& g,
                                   const ScalePolicy& policy) {
  policy.Validate();
  const HeContext& ctx = *enc.context();
  EncryptedGraph eg;
  eg.meta = {g.kind(), g.n(), g.n2(), g.weighted()};
  eg.fingerprint = ctx.fingerprint();
  const AdjacencyMatrix adj = BuildAdjacency(g);
  eg.adjacency = Matrix<Ciphertext>(adj.rows(), adj.cols());
  for (int i = 0; i < adj.rows(); ++i) {
    for (int j = 0; j < adj.cols(); ++j) eg.adjacency(i, j) = enc.Encrypt(adj(i, j));
  }
  if (g.weighted()) {
    const WeightMatrix w = BuildWeights(g);
    const std::uint64_t t = ctx.params().plaintext_modulus;
    eg.weight_scale = policy.base_scale;
    eg.weights = Matrix<Ciphertext>(w.rows(), w.cols());
    for (int i = 0; i < w.rows(); ++i) {
      for (int j = 0; j < w.cols(); ++j) {
        (*eg.weights)(i, j) = enc.Encrypt(Encode(w(i, j), policy.base_scale, t),
                                          policy.base_scale);
      }
    }
  }
  return eg;
}

// Test and client-side inverse. Throws CorruptionError if any entry fails
// to decrypt and ValidationError if the matrix is not a valid encoding.
inline Graph DecryptGraph(const Decryptor& dec, const EncryptedGraph& eg) {
  const GraphMeta& m = eg.meta;
  AdjacencyMatrix adj(m.rows(), m.cols(), 0);
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      const std::int64_t x = dec.Decrypt(eg.adjacency(i, j));
      if (x < -1 || x > 1) {
        throw ValidationError("adjacency entry decrypts to " + std::to_string(x));
      }
      adj(i, j) = static_cast<std::int8_t>(x);
    }
  }
  std::optional<WeightMatrix> w;
  if (m.weighted) {
    w.emplace(m.rows(), m.cols(), 0.0);
    for (int i = 0; i < m.rows(); ++i) {
      for (int j = 0; j < m.cols(); ++j) {
        if (adj(i, j) == 0) continue;
        const Ciphertext& c = (*eg.weights)(i, j);
        (*w)(i, j) = Decode(dec.Decrypt(c), c.scale());
      }
    }
  }
  return GraphFromMatrices(m.kind, m.n, m.n2, m.weighted, adj, w ? &*w : nullptr);
}

// ---------------------------------------------------------------------------
// File format.
//
//   "CGRF1"
//   u8 kind, u32 n, u32 n2, u8 weighted, u64 parameter fingerprint
//   u16 weight scale length + magnitude (weighted only)
//   rows*cols adjacency ciphertexts, row-major, each u32 length + bytes
//   rows*cols weight ciphertexts, same layout (weighted only)

inline constexpr std::string_view kEncryptedGraphMagic = "CGRF1";

inline Bytes SerializeEncryptedGraph(const EncryptedGraph& eg, const HeContext& ctx) {
  ByteWriter w;
  w.PutString(kEncryptedGraphMagic);
  w.PutU8(static_cast<std::uint8_t>(eg.meta.kind));
  w.PutU32(static_cast<std::uint32_t>(eg.meta.n));
  w.PutU32(static_cast<std::uint32_t>(eg.meta.n2));
  w.PutU8(eg.meta.weighted ? 1 : 0);
  w.PutU64(eg.fingerprint);
  if (eg.meta.weighted) {
    const Bytes s = MagnitudeBytes(eg.weight_scale);
    w.PutU16(static_cast<std::uint16_t>(s.size()));
    w.PutBytes(s);
  }
  auto put_matrix = [&](const Matrix<Ciphertext>& mat) {
    for (const Ciphertext& c : mat.data()) {
      const Bytes b = SerializeCiphertext(c, ctx);
      w.PutU32(static_cast<std::uint32_t>(b.size()));
      w.PutBytes(b);
    }
  };
  put_matrix(eg.adjacency);
  if (eg.meta.weighted) put_matrix(*eg.weights);
  return std::move(w).Take();
}

inline EncryptedGraph DeserializeEncryptedGraph(std::span<const std::uint8_t> bytes,
                                                const HeContext& ctx) {
  ByteReader r(bytes);
  const auto magic = r.GetBytes(kEncryptedGraphMagic.size());
  if (!std::equal(magic.begin(), magic.end(), kEncryptedGraphMagic.begin())) {
    throw MalformedError("not an encrypted graph file (bad magic)");
  }
  EncryptedGraph eg;
  const std::uint8_t kind = r.GetU8();
  if (kind > 2) throw MalformedError("unknown graph kind byte");
  eg.meta.kind = static_cast<GraphKind>(kind);
  const std::uint32_t n = r.GetU32(), n2 = r.GetU32();
  if (n > (1u << 24) || n2 > (1u << 24)) throw MalformedError("vertex count out of range");
  eg.meta.n = static_cast<int>(n);
  eg.meta.n2 = static_cast<int>(n2);
  if (eg.meta.kind != GraphKind::kBipartite && eg.meta.n2 != 0) {
    throw MalformedError("second part size on a non-bipartite graph");
  }
  const std::uint8_t weighted = r.GetU8();
  if (weighted > 1) throw MalformedError("bad weighted flag");
  eg.meta.weighted = weighted == 1;
  eg.fingerprint = r.GetU64();
  if (eg.fingerprint != ctx.fingerprint()) {
    throw FingerprintError("encrypted graph was produced under different parameters");
  }
  if (eg.meta.weighted) {
    const auto s = r.GetBytes(r.GetU16());
    eg.weight_scale = FromMagnitudeBytes(s.data(), s.size());
    if (eg.weight_scale < 1) throw MalformedError("weight scale must be positive");
  }
  auto get_matrix = [&]() {
    Matrix<Ciphertext> mat(eg.meta.rows(), eg.meta.cols());
    for (Ciphertext& c : mat.data()) {
      const auto b = r.GetBytes(r.GetU32());
      c = DeserializeCiphertext(b, ctx);
    }
    return mat;
  };
  eg.adjacency = get_matrix();
  if (eg.meta.weighted) eg.weights = get_matrix();
  if (!r.done()) throw MalformedError("trailing bytes after encrypted graph");
  return eg;
}

inline Bytes ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  Bytes out((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return out;
}

inline void WriteFileBytes(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to '" + path + "'");
}

// ---------------------------------------------------------------------------
// Structure queries. Nothing below touches key material.

inline Ciphertext AtomUndirected(const Ciphertext& ct) { return ct; }

namespace internal {

inline Ciphertext QuadraticAtom(const Evaluator& eval, const Ciphertext& x, bool inbound) {
  const Ciphertext sq = eval.Mul(x, x);
  // x must join x^2 at scale s^2.
  const Ciphertext lin =
      x.scale() == 1 ? x : eval.ScaleAlign(x, static_cast<std::int64_t>(x.scale()));
  const Ciphertext sum = inbound ? eval.Add(sq, lin) : eval.Sub(sq, lin);
  return sum.WithScale(sq.scale() * 2);
}

}  // namespace internal

inline Ciphertext AtomInbound(const Evaluator& eval, const Ciphertext& ct) {
  return internal::QuadraticAtom(eval, ct, /*inbound=*/true);
}

inline Ciphertext AtomOutbound(const Evaluator& eval, const Ciphertext& ct) {
  return internal::QuadraticAtom(eval, ct, /*inbound=*/false);
}

inline Ciphertext Conjunction(const Evaluator& eval, std::span<const Ciphertext> atoms) {
  if (atoms.empty()) throw ValidationError("conjunction of zero atoms");
  const std::uint64_t fp = atoms[0].fingerprint();
  for (const auto& a : atoms) {
    if (a.fingerprint() != fp) {
      throw FingerprintError("conjunction atoms come from different graphs");
    }
  }
  Ciphertext acc = atoms[0];
  for (std::size_t k = 1; k < atoms.size(); ++k) acc = eval.Mul(acc, atoms[k]);
  return acc;
}

struct MaskedTerm {
  Ciphertext mask;
  Ciphertext value;
};

// Sum of mask (x) value. An empty sum is a fresh encryption of zero at
// `empty_scale`.
inline Ciphertext MaskedSum(const Evaluator& eval, Encryptor& enc,
                            std::span<const MaskedTerm> terms,
                            const BigInt& empty_scale) {
  if (terms.empty()) return enc.Encrypt(0, empty_scale);
  Ciphertext acc = eval.Mul(terms[0].mask, terms[0].value);
  for (std::size_t k = 1; k < terms.size(); ++k) {
    acc = eval.Add(acc, eval.Mul(terms[k].mask, terms[k].value));
  }
  return acc;
}

}  // namespace cryptgraph

#endif  // CRYPTGRAPH_CRYPTO_GRAPH_CRYPTO_HPP_
