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

#ifndef CRYPTGRAPH_HE_PARAMS_HPP_
#define CRYPTGRAPH_HE_PARAMS_HPP_

#include <sodium.h>

#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "cryptgraph/common/bigint.hpp"
#include "cryptgraph/common/bytes.hpp"
#include "cryptgraph/common/errors.hpp"
#include "cryptgraph/he/modarith.hpp"
#include "cryptgraph/he/ntt.hpp"

namespace cryptgraph {

enum class BackendKind : std::uint8_t { kTransparent = 0, kLattice = 1 };

inline std::string_view BackendName(BackendKind kind) {
  return kind == BackendKind::kTransparent ? "transparent" : "lattice";
}

inline BackendKind ParseBackend(std::string_view name) {
  if (name == "transparent") return BackendKind::kTransparent;
  if (name == "lattice") return BackendKind::kLattice;
  throw ParameterError("unknown backend '" + std::string(name) + "'");
}

// Largest prime below 2^58.
inline constexpr std::uint64_t kDefaultPlaintextModulus = 288230376151711717ULL;

struct HeParams {
  BackendKind backend = BackendKind::kLattice;
  // Lattice backend only: X^n + 1 and the RNS primes whose product is q.
  std::size_t ring_degree = 4096;
  std::vector<int> modulus_bits = {61, 61, 61, 61, 61, 61};
  std::uint64_t plaintext_modulus = kDefaultPlaintextModulus;
  double noise_stddev = 3.2;
  // Maximum number of ciphertext components (a fresh ciphertext has 2).
  int max_ct_degree = 5;

  static HeParams Defaults(BackendKind kind = BackendKind::kLattice) {
    HeParams p;
    p.backend = kind;
    return p;
  }

  void Validate() const {
    if (ring_degree < 2 || (ring_degree & (ring_degree - 1)) != 0) {
      throw ParameterError("ring degree " + std::to_string(ring_degree) +
                           " is not a power of two");
    }
    if (plaintext_modulus < (1ULL << 32) || plaintext_modulus >= (1ULL << 62)) {
      throw ParameterError("plaintext modulus must lie in [2^32, 2^62)");
    }
    if (max_ct_degree < 5) {
      throw ParameterError("max_ct_degree must be at least 5");
    }
    if (backend == BackendKind::kLattice) {
      if (modulus_bits.empty()) {
        throw ParameterError("lattice backend needs at least one RNS prime");
      }
      int total_bits = 0;
      for (int b : modulus_bits) total_bits += b;
      if (total_bits < std::log2(static_cast<double>(plaintext_modulus)) + 20) {
        throw ParameterError(
            "ciphertext modulus must exceed the plaintext modulus by at least "
            "20 bits");
      }
      if (!(noise_stddev > 0.0) || noise_stddev > 64.0) {
        throw ParameterError("noise standard deviation must lie in (0, 64]");
      }
    }
  }
};

// Immutable per-parameter-set state: RNS primes, NTT tables and the CRT
// constants used by decryption. Shared by keys and ciphertexts.
class HeContext {
 public:
  static std::shared_ptr<const HeContext> Create(const HeParams& params) {
    params.Validate();
    return std::shared_ptr<const HeContext>(new HeContext(params));
  }

  const HeParams& params() const { return params_; }
  BackendKind backend() const { return params_.backend; }
  std::uint64_t fingerprint() const { return fingerprint_; }
  std::size_t ring_degree() const { return params_.ring_degree; }
  std::size_t num_primes() const { return moduli_.size(); }
  const std::vector<Modulus>& moduli() const { return moduli_; }
  const std::vector<NttTables>& ntt() const { return ntt_; }
  const Modulus& plaintext() const { return plain_; }
  const BigInt& ciphertext_modulus() const { return q_; }
  // Binomial parameter realizing noise_stddev: variance eta / 2.
  int noise_eta() const { return noise_eta_; }

  // Garner constants: inv[i][j] = p_j^{-1} mod p_i for j < i.
  const std::vector<std::vector<std::uint64_t>>& garner_inverse() const {
    return garner_inv_;
  }
  // Mixed-radix place values P_i = p_0 ... p_{i-1}, reduced mod t and as
  // long doubles.
  const std::vector<std::uint64_t>& place_mod_t() const { return place_mod_t_; }
  const std::vector<long double>& place_approx() const { return place_approx_; }
  // Mixed-radix digits of (q - 1) / 2.
  const std::vector<std::uint64_t>& half_digits() const { return half_digits_; }

  // (-t/2, t/2] bounds for the centered plaintext representation.
  std::int64_t plain_max() const {
    return static_cast<std::int64_t>(params_.plaintext_modulus / 2);
  }
  std::int64_t plain_min() const {
    return -static_cast<std::int64_t>((params_.plaintext_modulus - 1) / 2);
  }

 private:
  explicit HeContext(const HeParams& params)
      : params_(params), plain_(params.plaintext_modulus) {
    if (params_.backend == BackendKind::kLattice) {
      const std::uint64_t two_n = 2 * params_.ring_degree;
      std::vector<std::uint64_t> primes;
      for (int bits : params_.modulus_bits) {
        auto p = FindNttPrimes(bits, 1, two_n, primes);
        primes.push_back(p.front());
      }
      q_ = 1;
      for (auto p : primes) {
        if (p == params_.plaintext_modulus) {
          throw ParameterError("RNS prime collides with plaintext modulus");
        }
        moduli_.emplace_back(p);
        ntt_.emplace_back(params_.ring_degree, moduli_.back());
        q_ *= p;
      }
      const std::size_t l = moduli_.size();
      garner_inv_.assign(l, std::vector<std::uint64_t>(l, 0));
      for (std::size_t i = 0; i < l; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
          garner_inv_[i][j] =
              moduli_[i].Inverse(moduli_[j].value() % moduli_[i].value());
        }
      }
      place_mod_t_.resize(l);
      place_approx_.resize(l);
      std::uint64_t acc_t = 1;
      long double acc = 1.0L;
      for (std::size_t i = 0; i < l; ++i) {
        place_mod_t_[i] = acc_t;
        place_approx_[i] = acc;
        acc_t = plain_.Mul(acc_t, moduli_[i].value() % plain_.value());
        acc *= static_cast<long double>(moduli_[i].value());
      }
      BigInt half = (q_ - 1) / 2;
      half_digits_.resize(l);
      for (std::size_t i = 0; i < l; ++i) {
        half_digits_[i] =
            static_cast<std::uint64_t>(half % moduli_[i].value());
        half /= moduli_[i].value();
      }
      noise_eta_ = static_cast<int>(
          std::lround(2.0 * params_.noise_stddev * params_.noise_stddev));
      if (noise_eta_ < 1) noise_eta_ = 1;
    }
    fingerprint_ = ComputeFingerprint();
  }

  std::uint64_t ComputeFingerprint() const {
    ByteWriter w;
    w.PutString("cryptgraph-params-v1");
    w.PutU8(static_cast<std::uint8_t>(params_.backend));
    w.PutU64(params_.plaintext_modulus);
    w.PutU16(static_cast<std::uint16_t>(params_.max_ct_degree));
    if (params_.backend == BackendKind::kLattice) {
      w.PutU64(params_.ring_degree);
      w.PutU64(static_cast<std::uint64_t>(std::llround(params_.noise_stddev * 1e6)));
      w.PutU16(static_cast<std::uint16_t>(moduli_.size()));
      for (const auto& m : moduli_) w.PutU64(m.value());
    }
    EnsureSodium();
    std::uint8_t digest[16];
    crypto_generichash(digest, sizeof(digest), w.bytes().data(),
                       w.bytes().size(), nullptr, 0);
    std::uint64_t fp = 0;
    for (int i = 0; i < 8; ++i) fp = (fp << 8) | digest[i];
    return fp;
  }

  HeParams params_;
  Modulus plain_;
  std::vector<Modulus> moduli_;
  std::vector<NttTables> ntt_;
  BigInt q_ = 0;
  int noise_eta_ = 0;
  std::uint64_t fingerprint_ = 0;
  std::vector<std::vector<std::uint64_t>> garner_inv_;
  std::vector<std::uint64_t> place_mod_t_;
  std::vector<long double> place_approx_;
  std::vector<std::uint64_t> half_digits_;
};

using ContextPtr = std::shared_ptr<const HeContext>;

}  // namespace cryptgraph

#endif  // CRYPTGRAPH_HE_PARAMS_HPP_
