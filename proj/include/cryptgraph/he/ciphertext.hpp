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

#ifndef CRYPTGRAPH_HE_CIPHERTEXT_HPP_
#define CRYPTGRAPH_HE_CIPHERTEXT_HPP_

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "cryptgraph/common/bigint.hpp"
#include "cryptgraph/he/params.hpp"

namespace cryptgraph {

// A ring element in RNS form: residues for prime i occupy
// [i * n, (i + 1) * n). Stored polynomials are kept in NTT form.
struct RnsPoly {
  std::vector<std::uint64_t> data;

  RnsPoly() = default;
  RnsPoly(std::size_t num_primes, std::size_t n) : data(num_primes * n, 0) {}

  std::span<std::uint64_t> Residues(std::size_t prime, std::size_t n) {
    return {data.data() + prime * n, n};
  }
  std::span<const std::uint64_t> Residues(std::size_t prime,
                                          std::size_t n) const {
    return {data.data() + prime * n, n};
  }

  friend bool operator==(const RnsPoly&, const RnsPoly&) = default;
};

// An encrypted integer together with the scale its real value was encoded
// at. `degree` counts ciphertext components: a fresh encryption has 2 and
// multiplying ciphertexts with a and b components yields a + b - 1. The
// transparent backend tracks the same degree but carries the plaintext
// residue instead of ring elements.
class Ciphertext {
 public:
  Ciphertext() = default;

  static Ciphertext Lattice(std::uint64_t fingerprint, BigInt scale,
                            std::vector<RnsPoly> components) {
    Ciphertext ct;
    ct.backend_ = BackendKind::kLattice;
    ct.fingerprint_ = fingerprint;
    ct.degree_ = static_cast<int>(components.size());
    ct.scale_ = std::move(scale);
    ct.components_ = std::move(components);
    return ct;
  }

  static Ciphertext Transparent(std::uint64_t fingerprint, int degree,
                                BigInt scale, std::uint64_t residue) {
    Ciphertext ct;
    ct.backend_ = BackendKind::kTransparent;
    ct.fingerprint_ = fingerprint;
    ct.degree_ = degree;
    ct.scale_ = std::move(scale);
    ct.residue_ = residue;
    return ct;
  }

  BackendKind backend() const { return backend_; }
  std::uint64_t fingerprint() const { return fingerprint_; }
  int degree() const { return degree_; }
  const BigInt& scale() const { return scale_; }
  const std::vector<RnsPoly>& components() const { return components_; }
  std::uint64_t residue() const { return residue_; }

  // Same payload, different scale metadata.
  Ciphertext WithScale(BigInt scale) const {
    Ciphertext ct = *this;
    ct.scale_ = std::move(scale);
    return ct;
  }

 private:
  BackendKind backend_ = BackendKind::kTransparent;
  std::uint64_t fingerprint_ = 0;
  int degree_ = 0;
  BigInt scale_ = 1;
  std::vector<RnsPoly> components_;
  std::uint64_t residue_ = 0;
};

using KeyId = std::array<std::uint8_t, 32>;

struct PublicKey {
  ContextPtr context;
  KeyId key_id{};
  // Lattice: b = -a*s + t*e, both in NTT form. Empty for transparent keys.
  RnsPoly b;
  RnsPoly a;
};

struct SecretKey {
  ContextPtr context;
  KeyId key_id{};
  RnsPoly s;  // ternary secret, NTT form
};

struct KeyPair {
  SecretKey secret_key;
  PublicKey public_key;
};

}  // namespace cryptgraph

#endif  // CRYPTGRAPH_HE_CIPHERTEXT_HPP_
