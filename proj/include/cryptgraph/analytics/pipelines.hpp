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

// Cloud-side analytics over an encrypted adjacency matrix: degrees,
// triangle counts, clustering coefficient, outdegrees and PageRank.
//
// Nothing here holds a secret key. Division and rescaling go through a
// Channel to the user's client; everything else is Evaluator arithmetic.
// Every intermediate scale is checked against the bookkeeping below, so a
// mismatch surfaces as ScaleError instead of a wrong number.
//
// Scales and ciphertext degrees (fresh = 2, product of a and b = a + b - 1):
//
//   clustering coefficient
//     d_i    = sum_j I_ij                         scale 1     degree 2
//     T_i    = sum_j I_ij (x) sum_k I_ik (x) I_jk scale 1     degree 4
//     D_i    = d_i (x) (d_i - 1), tagged scale 2  scale 2     degree 3
//     r_i    = reciprocal(D_i)                    scale R     degree 2
//     cc_i   = T_i (x) r_i                        scale R     degree 5
//   pagerank
//     DO_j   = sum_i out(I_ji)                    scale 2     degree 3
//     r_j    = reciprocal(DO_j)                   scale Rp    degree 2
//     w_j    = r_j (x) PR_j                       scale Rp*V  degree 3
//     S_i    = sum_j in(I_ij) (x) w_j             scale 2RpV  degree 5
//     U_i    = num*S_i + (den-num)/(den*N)        scale den*2RpV
//     PR_i   = rescale(U_i)                       scale V     degree 2

#ifndef CRYPTGRAPH_ANALYTICS_PIPELINES_HPP_
#define CRYPTGRAPH_ANALYTICS_PIPELINES_HPP_

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "cryptgraph/analytics/encrypted_vector.hpp"
#include "cryptgraph/crypto/graph_crypto.hpp"
#include "cryptgraph/encoding/encoding.hpp"
#include "cryptgraph/outsourcing/channel.hpp"

namespace cryptgraph {

// Seconds per named phase.
using PhaseTimings = std::map<std::string, double>;

// Test hook: sees every intermediate the pipelines produce. May be called
// from worker threads.
struct AuditEvent {
  std::string_view stage;
  int iteration = 0;  // pagerank only, 0 elsewhere
  std::size_t index = 0;
  const Ciphertext& value;
};
using AuditHook = std::function<void(const AuditEvent&)>;

struct AnalyticsOptions {
  unsigned threads = 1;
  // PageRank keeps the n*n inbound masks between iterations when they fit
  // in this many bytes; otherwise they are recomputed every iteration.
  std::size_t mask_cache_bytes = std::size_t{768} << 20;
  AuditHook audit;
};

// Runs fn(0..n-1), possibly on several threads. The first exception wins
// and is rethrown after all workers stop.
template <typename Fn>
void ParallelFor(std::size_t n, unsigned threads, Fn&& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned count = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  for (unsigned k = 0; k < count; ++k) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

namespace internal {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double Lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - start_).count();
    start_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

inline void ExpectScale(const Ciphertext& c, const BigInt& want, std::string_view what) {
  if (c.scale() != want) {
    throw ScaleError(std::string(what) + " has scale " + ToDecimal(c.scale()) +
                     ", expected " + ToDecimal(want));
  }
}

inline void RequireGraph(const Evaluator& eval, const EncryptedGraph& eg, GraphKind kind,
                         const char* what) {
  if (eg.meta.kind != kind) {
    throw GraphKindError(std::string(what) + " needs a " + std::string(GraphKindName(kind)) +
                         " graph, got " + std::string(GraphKindName(eg.meta.kind)));
  }
  if (eg.fingerprint != eval.context()->fingerprint()) {
    throw FingerprintError("encrypted graph was produced under different parameters");
  }
}

inline void Audit(const AnalyticsOptions& opts, std::string_view stage, int iteration,
                  std::size_t index, const Ciphertext& c) {
  if (opts.audit) opts.audit(AuditEvent{stage, iteration, index, c});
}

inline std::size_t CiphertextBytes(const Ciphertext& c, const HeContext& ctx) {
  if (c.backend() == BackendKind::kTransparent) return sizeof(Ciphertext) + 16;
  return sizeof(Ciphertext) + static_cast<std::size_t>(c.degree()) *
                                  ctx.params().modulus_bits.size() * ctx.ring_degree() * 8;
}

inline std::int64_t Binomial2(std::int64_t m) { return m < 2 ? 0 : m * (m - 1) / 2; }

}  // namespace internal

// ---------------------------------------------------------------------------
// Clustering coefficient.

// Row sums of the undirected adjacency matrix.
inline EncryptedVector EncryptedDegrees(const Evaluator& eval, const EncryptedGraph& eg,
                                        const AnalyticsOptions& opts = {}) {
  internal::RequireGraph(eval, eg, GraphKind::kUndirected, "degree computation");
  const int n = eg.meta.n;
  std::vector<Ciphertext> d(n);
  ParallelFor(n, opts.threads, [&](std::size_t i) {
    Ciphertext acc = eg.at(static_cast<int>(i), 0);
    for (int j = 1; j < n; ++j) acc = eval.Add(acc, eg.at(static_cast<int>(i), j));
    internal::ExpectScale(acc, 1, "degree");
    internal::Audit(opts, "degree", 0, i, acc);
    d[i] = std::move(acc);
  });
  return EncryptedVector(std::move(d));
}

// sum over j != i, k > j, k != i of I_ij * I_ik * I_jk, evaluated as
// sum_j I_ij * (sum_k I_ik * I_jk). Scale 1. `zero` is returned when the
// index ranges are empty (n < 3).
inline Ciphertext EncryptedTriangleCount(const Evaluator& eval, const EncryptedGraph& eg,
                                         int i, const Ciphertext& zero) {
  const int n = eg.meta.n;
  if (i < 0 || i >= n) throw ValidationError("vertex " + std::to_string(i) + " out of range");
  std::optional<Ciphertext> total;
  for (int j = 0; j < n; ++j) {
    if (j == i) continue;
    std::optional<Ciphertext> inner;
    for (int k = j + 1; k < n; ++k) {
      if (k == i) continue;
      Ciphertext term = eval.Mul(eg.at(i, k), eg.at(j, k));
      inner = inner ? eval.Add(*inner, term) : std::move(term);
    }
    if (!inner) continue;
    Ciphertext term = eval.Mul(eg.at(i, j), *inner);
    total = total ? eval.Add(*total, term) : std::move(term);
  }
  if (!total) return zero;
  internal::ExpectScale(*total, 1, "triangle count");
  return *total;
}

inline Ciphertext EncryptedTriangleCount(const Evaluator& eval, Encryptor& enc,
                                         const EncryptedGraph& eg, int i) {
  internal::RequireGraph(eval, eg, GraphKind::kUndirected, "triangle counting");
  return EncryptedTriangleCount(eval, eg, i, enc.Encrypt(0));
}

// Reciprocal scale used by the clustering coefficient: base_scale times the
// largest possible triangle count, so the final product carries at most
// 0.5 / base_scale of rounding error.
inline BigInt ClusteringReciprocalScale(int n, const ScalePolicy& policy) {
  return policy.base_scale * std::max<std::int64_t>(1, internal::Binomial2(n - 1));
}

struct ClusteringOutput {
  EncryptedVector cc;  // scale ClusteringReciprocalScale(n, policy)
  std::vector<ItemError> zero_divisors;
  PhaseTimings timings;
};

inline ClusteringOutput EncryptedClusteringCoefficient(const Evaluator& eval, Encryptor& enc,
                                                       const EncryptedGraph& eg,
                                                       Channel& channel,
                                                       const ScalePolicy& policy,
                                                       const AnalyticsOptions& opts = {}) {
  internal::RequireGraph(eval, eg, GraphKind::kUndirected, "clustering coefficient");
  policy.Validate();
  const int n = eg.meta.n;
  const std::uint64_t t = eval.context()->params().plaintext_modulus;
  const BigInt recip_scale = ClusteringReciprocalScale(n, policy);
  policy.CheckTotal(recip_scale, t, "clustering coefficient");

  ClusteringOutput out;
  internal::Stopwatch total, sw;
  const EncryptedVector degrees = EncryptedDegrees(eval, eg, opts);
  out.timings["degrees"] = sw.Lap();

  const Ciphertext zero = enc.Encrypt(0);
  std::vector<Ciphertext> tri(n), denom(n);
  ParallelFor(n, opts.threads, [&](std::size_t i) {
    tri[i] = EncryptedTriangleCount(eval, eg, static_cast<int>(i), zero);
    internal::Audit(opts, "triangles", 0, i, tri[i]);
  });
  out.timings["triangles"] = sw.Lap();
  out.timings["triangles_per_vertex"] = n > 0 ? out.timings["triangles"] / n : 0.0;

  // d(d-1) at scale 2 decodes to d(d-1)/2.
  for (int i = 0; i < n; ++i) {
    denom[i] = eval.Mul(degrees[i], eval.AddPlain(degrees[i], -1)).WithScale(2);
    internal::Audit(opts, "denominator", 0, i, denom[i]);
  }
  out.timings["denominators"] = sw.Lap();

  ReciprocalResult recip = RequestReciprocals(channel, denom, recip_scale);
  out.zero_divisors = std::move(recip.errors);
  out.timings["outsourcing"] = sw.Lap();

  std::vector<Ciphertext> cc(n);
  for (int i = 0; i < n; ++i) {
    internal::ExpectScale(recip.values[i], recip_scale, "reciprocal");
    internal::Audit(opts, "reciprocal", 0, i, recip.values[i]);
    cc[i] = eval.Mul(tri[i], recip.values[i]);
    internal::ExpectScale(cc[i], recip_scale, "clustering coefficient");
    internal::Audit(opts, "cc", 0, i, cc[i]);
  }
  out.timings["products"] = sw.Lap();
  out.timings["total"] = total.Lap();
  out.cc = EncryptedVector(std::move(cc));
  return out;
}

// ---------------------------------------------------------------------------
// PageRank.

struct PageRankConfig {
  RationalConst damping{85, 100};
  int iterations = 20;
  BigInt reciprocal_scale = 10000000;
  BigInt value_scale = 10000000;
  bool use_convergence_flag = false;
  double epsilon = 1e-6;

  // Scale of one iteration's result before it is rescaled.
  BigInt IterationScale() const {
    return BigInt(damping.denominator()) * 2 * reciprocal_scale * value_scale;
  }

  // Ranks never exceed 1, so the iteration scale itself is the largest
  // plaintext magnitude an iteration can produce.
  void Validate(std::uint64_t t) const {
    if (damping.numerator() <= 0 || damping.numerator() >= damping.denominator()) {
      throw ParameterError("damping must lie strictly between 0 and 1, got " +
                           damping.ToString());
    }
    if (iterations < 1) throw ParameterError("iterations must be positive");
    if (reciprocal_scale < 1 || value_scale < 1) {
      throw ParameterError("pagerank scales must be positive");
    }
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
      throw ParameterError("epsilon must be a finite non-negative number");
    }
    const BigInt half = BigInt(t / 2);
    if (IterationScale() > half) {
      throw ScaleError("pagerank iteration scale " + ToDecimal(IterationScale()) +
                       " exceeds t/2 = " + ToDecimal(half));
    }
  }
};

// Column j: number of i with j -> i. Scale 2.
inline EncryptedVector EncryptedOutdegrees(const Evaluator& eval, const EncryptedGraph& eg,
                                           const AnalyticsOptions& opts = {}) {
  internal::RequireGraph(eval, eg, GraphKind::kDirected, "outdegree computation");
  const int n = eg.meta.n;
  std::vector<Ciphertext> out(n);
  ParallelFor(n, opts.threads, [&](std::size_t j) {
    const int row = static_cast<int>(j);
    Ciphertext acc = AtomOutbound(eval, eg.at(row, 0));
    for (int i = 1; i < n; ++i) acc = eval.Add(acc, AtomOutbound(eval, eg.at(row, i)));
    internal::ExpectScale(acc, 2, "outdegree");
    internal::Audit(opts, "outdegree", 0, j, acc);
    out[j] = std::move(acc);
  });
  return EncryptedVector(std::move(out));
}

struct PageRankOutput {
  EncryptedVector ranks;  // scale cfg.value_scale
  int iterations_run = 0;
  bool converged = false;
  PhaseTimings timings;
};

inline PageRankOutput EncryptedPageRank(const Evaluator& eval, Encryptor& enc,
                                        const EncryptedGraph& eg, const PageRankConfig& cfg,
                                        Channel& channel, const AnalyticsOptions& opts = {}) {
  internal::RequireGraph(eval, eg, GraphKind::kDirected, "pagerank");
  const HeContext& ctx = *eval.context();
  const std::uint64_t t = ctx.params().plaintext_modulus;
  cfg.Validate(t);
  const int n = eg.meta.n;
  PageRankOutput out;
  if (n == 0) return out;

  const BigInt& R = cfg.reciprocal_scale;
  const BigInt& V = cfg.value_scale;
  const BigInt sum_scale = 2 * R * V;
  const BigInt iter_scale = cfg.IterationScale();
  const std::int64_t num = cfg.damping.numerator();
  const std::int64_t den = cfg.damping.denominator();
  const std::int64_t teleport =
      EncodeRational(RationalConst(den - num, den * n), iter_scale, t);

  internal::Stopwatch total, sw;

  // Inbound masks in(I_ij): kept when they fit, else rebuilt per use.
  const std::size_t mask_bytes =
      static_cast<std::size_t>(n) * n *
      internal::CiphertextBytes(eval.Mul(eg.at(0, 0), eg.at(0, 0)), ctx);
  std::optional<Matrix<Ciphertext>> masks;
  if (mask_bytes <= opts.mask_cache_bytes) {
    masks.emplace(n, n);
    ParallelFor(n, opts.threads, [&](std::size_t i) {
      for (int j = 0; j < n; ++j) {
        (*masks)(static_cast<int>(i), j) = AtomInbound(eval, eg.at(static_cast<int>(i), j));
      }
    });
  }
  out.timings["masks"] = sw.Lap();

  const EncryptedVector outdeg = EncryptedOutdegrees(eval, eg, opts);
  out.timings["outdegrees"] = sw.Lap();

  ReciprocalResult rr = RequestReciprocals(channel, outdeg.values(), R);
  const std::vector<Ciphertext> recip = std::move(rr.values);
  for (int j = 0; j < n; ++j) {
    internal::ExpectScale(recip[j], R, "outdegree reciprocal");
    internal::Audit(opts, "reciprocal", 0, j, recip[j]);
  }
  out.timings["outsourcing"] = sw.Lap();

  std::vector<Ciphertext> pr(n);
  const std::int64_t init = EncodeRational(RationalConst(1, n), V, t);
  for (int j = 0; j < n; ++j) {
    pr[j] = enc.Encrypt(init, V);
    internal::Audit(opts, "rank", 0, j, pr[j]);
  }

  double update_seconds = 0.0, rescale_seconds = 0.0;
  std::vector<Ciphertext> w(n), next(n);
  for (int it = 1; it <= cfg.iterations; ++it) {
    for (int j = 0; j < n; ++j) w[j] = eval.Mul(recip[j], pr[j]);
    ParallelFor(n, opts.threads, [&](std::size_t idx) {
      const int i = static_cast<int>(idx);
      auto mask = [&](int j) {
        return masks ? (*masks)(i, j) : AtomInbound(eval, eg.at(i, j));
      };
      Ciphertext s = eval.Mul(mask(0), w[0]);
      for (int j = 1; j < n; ++j) s = eval.Add(s, eval.Mul(mask(j), w[j]));
      internal::ExpectScale(s, sum_scale, "inbound sum");
      Ciphertext u = eval.AddPlain(MulRational(eval, s, cfg.damping), teleport);
      internal::ExpectScale(u, iter_scale, "pagerank update");
      internal::Audit(opts, "update", it, idx, u);
      next[idx] = std::move(u);
    });
    update_seconds += sw.Lap();

    RescaleResult rs = RequestRescale(channel, next, V, cfg.use_convergence_flag,
                                      cfg.use_convergence_flag
                                          ? std::span<const Ciphertext>(pr)
                                          : std::span<const Ciphertext>(),
                                      cfg.epsilon);
    rescale_seconds += sw.Lap();
    pr = std::move(rs.values);
    for (int j = 0; j < n; ++j) {
      internal::ExpectScale(pr[j], V, "rescaled rank");
      internal::Audit(opts, "rank", it, j, pr[j]);
    }
    out.iterations_run = it;
    if (rs.converged.value_or(false)) {
      out.converged = true;
      break;
    }
  }
  out.timings["updates"] = update_seconds;
  out.timings["rescales"] = rescale_seconds;
  out.timings["update_per_vertex"] =
      update_seconds / (static_cast<double>(n) * std::max(1, out.iterations_run));
  out.timings["total"] = total.Lap();
  out.ranks = EncryptedVector(std::move(pr));
  return out;
}

}  // namespace cryptgraph

#endif  // CRYPTGRAPH_ANALYTICS_PIPELINES_HPP_
