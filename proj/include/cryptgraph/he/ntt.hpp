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

// Negacyclic number-theoretic transform over Z_p[X]/(X^n + 1).
//
// The forward transform is a merged Cooley-Tukey pass with the 2n-th root
// folded into the twiddles, so no separate pre-multiplication is needed and
// pointwise products of transformed vectors are negacyclic convolutions.
// Outputs are in bit-reversed order; only pointwise operations ever look at
// them.

#ifndef CRYPTGRAPH_HE_NTT_HPP_
#define CRYPTGRAPH_HE_NTT_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "cryptgraph/he/modarith.hpp"

namespace cryptgraph {

class NttTables {
 public:
  NttTables(std::size_t n, const Modulus& modulus) : n_(n), mod_(modulus) {
    if (n < 2 || (n & (n - 1)) != 0) {
      throw ParameterError("ring degree must be a power of two");
    }
    const std::uint64_t p = mod_.value();
    if ((p - 1) % (2 * n) != 0) {
      throw ParameterError("prime does not support a 2n-th root of unity");
    }
    int log_n = 0;
    while ((std::size_t{1} << log_n) < n) ++log_n;

    const std::uint64_t psi = FindPrimitiveRoot(2 * n);
    const std::uint64_t psi_inv = mod_.Inverse(psi);
    psi_rev_.resize(n);
    psi_rev_shoup_.resize(n);
    psi_inv_rev_.resize(n);
    psi_inv_rev_shoup_.resize(n);
    std::uint64_t pw = 1;
    std::uint64_t pw_inv = 1;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t r = BitReverse(i, log_n);
      psi_rev_[r] = pw;
      psi_inv_rev_[r] = pw_inv;
      pw = mod_.Mul(pw, psi);
      pw_inv = mod_.Mul(pw_inv, psi_inv);
    }
    for (std::size_t i = 0; i < n; ++i) {
      psi_rev_shoup_[i] = mod_.ShoupPrecompute(psi_rev_[i]);
      psi_inv_rev_shoup_[i] = mod_.ShoupPrecompute(psi_inv_rev_[i]);
    }
    n_inv_ = mod_.Inverse(n % p);
    n_inv_shoup_ = mod_.ShoupPrecompute(n_inv_);
  }

  std::size_t size() const { return n_; }
  const Modulus& modulus() const { return mod_; }

  void Forward(std::span<std::uint64_t> a) const {
    std::size_t t = n_;
    for (std::size_t m = 1; m < n_; m <<= 1) {
      t >>= 1;
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j1 = 2 * i * t;
        const std::uint64_t w = psi_rev_[m + i];
        const std::uint64_t ws = psi_rev_shoup_[m + i];
        for (std::size_t j = j1; j < j1 + t; ++j) {
          const std::uint64_t u = a[j];
          const std::uint64_t v = mod_.MulShoup(a[j + t], w, ws);
          a[j] = mod_.Add(u, v);
          a[j + t] = mod_.Sub(u, v);
        }
      }
    }
  }

  void Inverse(std::span<std::uint64_t> a) const {
    std::size_t t = 1;
    for (std::size_t m = n_; m > 1; m >>= 1) {
      const std::size_t h = m >> 1;
      std::size_t j1 = 0;
      for (std::size_t i = 0; i < h; ++i) {
        const std::uint64_t w = psi_inv_rev_[h + i];
        const std::uint64_t ws = psi_inv_rev_shoup_[h + i];
        for (std::size_t j = j1; j < j1 + t; ++j) {
          const std::uint64_t u = a[j];
          const std::uint64_t v = a[j + t];
          a[j] = mod_.Add(u, v);
          a[j + t] = mod_.MulShoup(mod_.Sub(u, v), w, ws);
        }
        j1 += 2 * t;
      }
      t <<= 1;
    }
    for (auto& x : a) x = mod_.MulShoup(x, n_inv_, n_inv_shoup_);
  }

 private:
  static std::size_t BitReverse(std::size_t x, int bits) {
    std::size_t r = 0;
    for (int i = 0; i < bits; ++i) {
      r = (r << 1) | (x & 1);
      x >>= 1;
    }
    return r;
  }

  // Smallest-candidate primitive `order`-th root (order a power of two):
  // g = x^((p-1)/order) has full order iff g^(order/2) = -1.
  std::uint64_t FindPrimitiveRoot(std::uint64_t order) const {
    const std::uint64_t p = mod_.value();
    for (std::uint64_t x = 2; x < p; ++x) {
      const std::uint64_t g = mod_.Pow(x, (p - 1) / order);
      if (mod_.Pow(g, order / 2) == p - 1) return g;
    }
    throw ParameterError("no primitive root found");
  }

  std::size_t n_;
  Modulus mod_;
  std::vector<std::uint64_t> psi_rev_, psi_rev_shoup_;
  std::vector<std::uint64_t> psi_inv_rev_, psi_inv_rev_shoup_;
  std::uint64_t n_inv_ = 0, n_inv_shoup_ = 0;
};

}  // namespace cryptgraph

#endif  // CRYPTGRAPH_HE_NTT_HPP_
