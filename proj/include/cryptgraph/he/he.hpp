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

// Public HE surface: key generation and the three role objects.
//
//   Encryptor  - public key only; held by the graph owner and by the cloud
//                (which needs fresh encryptions of public constants).
//   Decryptor  - secret key; only the user client ever constructs one.
//   Evaluator  - no key material at all; everything the cloud computes goes
//                through it.
//
// Parameters, keys and ciphertexts are immutable and may be shared across
// threads. An Encryptor owns a PRNG and must not be shared without
// synchronization.

#ifndef CRYPTGRAPH_HE_HE_HPP_
#define CRYPTGRAPH_HE_HE_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "cryptgraph/he/backend.hpp"

namespace cryptgraph {

inline KeyPair Keygen(const HeParams& params, const Seed& seed) {
  ContextPtr ctx = HeContext::Create(params);
  return BackendFor(params.backend).Keygen(ctx, seed);
}

inline KeyPair Keygen(const ContextPtr& ctx, const Seed& seed) {
  return BackendFor(ctx->backend()).Keygen(ctx, seed);
}

namespace internal {

inline void CheckPlainRange(const HeContext& ctx, std::int64_t m) {
  if (m < ctx.plain_min() || m > ctx.plain_max()) {
    throw EncodingError("plaintext " + std::to_string(m) +
                        " outside the centered range (-t/2, t/2]");
  }
}

inline void CheckBelongs(const HeContext& ctx, const Ciphertext& ct) {
  if (ct.backend() != ctx.backend() || ct.fingerprint() != ctx.fingerprint()) {
    throw FingerprintError("ciphertext was produced under different parameters");
  }
}

}  // namespace internal

class Encryptor {
 public:
  explicit Encryptor(PublicKey pk) : Encryptor(std::move(pk), RandomSeed()) {}
  Encryptor(PublicKey pk, const Seed& seed)
      : pk_(std::move(pk)), prng_(DeriveSeed(seed, "encryptor")) {}

  // Fresh ciphertext of m at scale 1.
  Ciphertext Encrypt(std::int64_t m) { return Encrypt(m, BigInt(1)); }

  // Fresh ciphertext of m tagged with `scale`; m must already be the
  // scaled integer.
  Ciphertext Encrypt(std::int64_t m, const BigInt& scale) {
    internal::CheckPlainRange(*pk_.context, m);
    if (scale < 1) throw ScaleError("scale must be a positive integer");
    return BackendFor(pk_.context->backend()).Encrypt(pk_, m, scale, prng_);
  }

  const PublicKey& public_key() const { return pk_; }
  const ContextPtr& context() const { return pk_.context; }

 private:
  PublicKey pk_;
  Prng prng_;
};

class Decryptor {
 public:
  explicit Decryptor(SecretKey sk) : sk_(std::move(sk)) {}

  // Centered integer in (-t/2, t/2]; the scale is not applied.
  std::int64_t Decrypt(const Ciphertext& ct) const {
    const DecryptionResult r = Run(ct);
    if (!r.consistent) {
      throw CorruptionError(
          "decryption consistency check failed (noise budget exhausted)");
    }
    return r.value;
  }

  // Remaining headroom in bits; kUnboundedNoiseBudget on the transparent
  // backend.
  int NoiseBudget(const Ciphertext& ct) const { return Run(ct).noise_budget; }

  const ContextPtr& context() const { return sk_.context; }

 private:
  DecryptionResult Run(const Ciphertext& ct) const {
    internal::CheckBelongs(*sk_.context, ct);
    return BackendFor(sk_.context->backend()).Decrypt(sk_, ct);
  }

  SecretKey sk_;
};

class Evaluator {
 public:
  explicit Evaluator(ContextPtr ctx) : ctx_(std::move(ctx)) {}

  const ContextPtr& context() const { return ctx_; }
  int max_degree() const { return ctx_->params().max_ct_degree; }

  Ciphertext Add(const Ciphertext& a, const Ciphertext& b) const {
    CheckBinary(a, b);
    RequireEqualScales(a, b, "add");
    return backend().Add(*ctx_, a, b);
  }

  Ciphertext Sub(const Ciphertext& a, const Ciphertext& b) const {
    CheckBinary(a, b);
    RequireEqualScales(a, b, "sub");
    return backend().Sub(*ctx_, a, b);
  }

  Ciphertext Negate(const Ciphertext& a) const {
    internal::CheckBelongs(*ctx_, a);
    return backend().Negate(*ctx_, a);
  }

  // Degrees add minus one; scales multiply.
  Ciphertext Mul(const Ciphertext& a, const Ciphertext& b) const {
    CheckBinary(a, b);
    const int degree = a.degree() + b.degree() - 1;
    if (degree > max_degree()) {
      throw DepthError("product would have " + std::to_string(degree) +
                       " components; the limit is " +
                       std::to_string(max_degree()));
    }
    return backend().Mul(*ctx_, a, b);
  }

  // Multiplies the underlying integer by k; the scale is unchanged.
  Ciphertext MulPlain(const Ciphertext& a, std::int64_t k) const {
    internal::CheckBelongs(*ctx_, a);
    internal::CheckPlainRange(*ctx_, k);
    return backend().MulPlain(*ctx_, a, k);
  }

  // Adds the integer k, which the caller has encoded at a.scale().
  Ciphertext AddPlain(const Ciphertext& a, std::int64_t k) const {
    internal::CheckBelongs(*ctx_, a);
    internal::CheckPlainRange(*ctx_, k);
    return backend().AddPlain(*ctx_, a, k);
  }

  // Multiplies value and scale by k > 0, so the decoded real is unchanged.
  Ciphertext ScaleAlign(const Ciphertext& a, std::int64_t k) const {
    if (k < 1) throw ScaleError("scale_align factor must be positive");
    Ciphertext out = MulPlain(a, k);
    return out.WithScale(a.scale() * k);
  }

 private:
  const Backend& backend() const { return BackendFor(ctx_->backend()); }

  void CheckBinary(const Ciphertext& a, const Ciphertext& b) const {
    internal::CheckBelongs(*ctx_, a);
    internal::CheckBelongs(*ctx_, b);
  }

  static void RequireEqualScales(const Ciphertext& a, const Ciphertext& b,
                                 const char* op) {
    if (a.scale() != b.scale()) {
      throw ScaleError(std::string(op) + " needs equal scales, got " +
                       ToDecimal(a.scale()) + " and " + ToDecimal(b.scale()));
    }
  }

  ContextPtr ctx_;
};

}  // namespace cryptgraph

#endif  // CRYPTGRAPH_HE_HE_HPP_
