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

// Word-sized modular arithmetic for moduli below 2^62.

#ifndef CRYPTGRAPH_HE_MODARITH_HPP_
#define CRYPTGRAPH_HE_MODARITH_HPP_

#include <cstdint>
#include <vector>

#include "cryptgraph/common/errors.hpp"

namespace cryptgraph {

using u128 = unsigned __int128;

class Modulus {
 public:
  Modulus() = default;
  explicit Modulus(std::uint64_t value) : value_(value) {
    if (value < 2 || value >= (1ULL << 62)) {
      throw ParameterError("modulus must lie in [2, 2^62)");
    }
    const u128 ratio = ~u128{0} / value;  // floor(2^128 / p) for odd p
    ratio_lo_ = static_cast<std::uint64_t>(ratio);
    ratio_hi_ = static_cast<std::uint64_t>(ratio >> 64);
  }

  std::uint64_t value() const { return value_; }

  // Barrett reduction of x < value^2.
  std::uint64_t Reduce(u128 x) const {
    const auto x0 = static_cast<std::uint64_t>(x);
    const auto x1 = static_cast<std::uint64_t>(x >> 64);
    const u128 a = static_cast<u128>(x0) * ratio_lo_;
    const u128 b = static_cast<u128>(x0) * ratio_hi_;
    const u128 c = static_cast<u128>(x1) * ratio_lo_;
    const u128 mid = (a >> 64) + static_cast<std::uint64_t>(b) +
                     static_cast<std::uint64_t>(c);
    const std::uint64_t qhat = static_cast<std::uint64_t>(b >> 64) +
                               static_cast<std::uint64_t>(c >> 64) +
                               static_cast<std::uint64_t>(mid >> 64) +
                               x1 * ratio_hi_;
    std::uint64_t r = x0 - qhat * value_;
    while (r >= value_) r -= value_;
    return r;
  }

  std::uint64_t Reduce(std::uint64_t x) const { return x % value_; }

  std::uint64_t Add(std::uint64_t a, std::uint64_t b) const {
    std::uint64_t s = a + b;
    return s >= value_ ? s - value_ : s;
  }
  std::uint64_t Sub(std::uint64_t a, std::uint64_t b) const {
    return a >= b ? a - b : a + value_ - b;
  }
  std::uint64_t Neg(std::uint64_t a) const { return a == 0 ? 0 : value_ - a; }
  std::uint64_t Mul(std::uint64_t a, std::uint64_t b) const {
    return Reduce(static_cast<u128>(a) * b);
  }

  std::uint64_t Pow(std::uint64_t base, std::uint64_t exp) const {
    std::uint64_t result = 1 % value_;
    base %= value_;
    while (exp > 0) {
      if (exp & 1) result = Mul(result, base);
      base = Mul(base, base);
      exp >>= 1;
    }
    return result;
  }

  // Modulus must be prime.
  std::uint64_t Inverse(std::uint64_t a) const { return Pow(a, value_ - 2); }

  // Maps a signed integer into [0, value).
  std::uint64_t FromSigned(std::int64_t x) const {
    const auto m = static_cast<std::int64_t>(value_);
    std::int64_t r = x % m;
    return static_cast<std::uint64_t>(r < 0 ? r + m : r);
  }

  // Precomputed operand for Shoup multiplication by a fixed w.
  std::uint64_t ShoupPrecompute(std::uint64_t w) const {
    return static_cast<std::uint64_t>((static_cast<u128>(w) << 64) / value_);
  }
  std::uint64_t MulShoup(std::uint64_t x, std::uint64_t w,
                         std::uint64_t w_shoup) const {
    const auto q = static_cast<std::uint64_t>((static_cast<u128>(x) * w_shoup) >> 64);
    std::uint64_t r = x * w - q * value_;
    return r >= value_ ? r - value_ : r;
  }

 private:
  std::uint64_t value_ = 0;
  std::uint64_t ratio_lo_ = 0;
  std::uint64_t ratio_hi_ = 0;
};

namespace internal {

inline std::uint64_t MulMod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

inline std::uint64_t PowMod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = MulMod(r, b, m);
    b = MulMod(b, b, m);
    e >>= 1;
  }
  return r;
}

}  // namespace internal

// Deterministic Miller-Rabin; these bases are exact for all 64-bit inputs.
inline bool IsPrime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL,
                          23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL,
                          23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = internal::PowMod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < r; ++i) {
      x = internal::MulMod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

// Largest primes below 2^bits congruent to 1 mod `two_n`, in descending
// order, skipping anything already in `taken`.
inline std::vector<std::uint64_t> FindNttPrimes(
    int bits, std::size_t count, std::uint64_t two_n,
    const std::vector<std::uint64_t>& taken = {}) {
  if (bits < 20 || bits > 61) {
    throw ParameterError("NTT prime size must be between 20 and 61 bits");
  }
  std::vector<std::uint64_t> out;
  std::uint64_t candidate = ((1ULL << bits) / two_n) * two_n + 1;
  if (candidate >= (1ULL << bits)) candidate -= two_n;
  while (out.size() < count) {
    if (candidate < (1ULL << (bits - 1))) {
      throw ParameterError("ran out of NTT primes of " + std::to_string(bits) +
                           " bits");
    }
    bool used = false;
    for (auto t : taken) used = used || (t == candidate);
    if (!used && IsPrime(candidate)) out.push_back(candidate);
    candidate -= two_n;
  }
  return out;
}

}  // namespace cryptgraph

#endif  // CRYPTGRAPH_HE_MODARITH_HPP_
