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

// Fixed-point encoding of reals as scaled integers.
//
// A real x travels as the integer round(x * s) together with its scale s.
// Scales are exact big integers: they multiply under ciphertext products and
// may leave the 64-bit range long before the plaintext does.

#ifndef CRYPTGRAPH_ENCODING_ENCODING_HPP_
#define CRYPTGRAPH_ENCODING_ENCODING_HPP_

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>

#include "cryptgraph/common/bigint.hpp"
#include "cryptgraph/common/errors.hpp"
#include "cryptgraph/he/he.hpp"

namespace cryptgraph {

// num/den in lowest terms, den >= 1.
class RationalConst {
 public:
  RationalConst() : num_(0), den_(1) {}
  RationalConst(std::int64_t num, std::int64_t den) {
    if (den == 0) throw ParameterError("rational constant with zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    num_ = num / (g == 0 ? 1 : g);
    den_ = den / (g == 0 ? 1 : g);
  }

  std::int64_t numerator() const { return num_; }
  std::int64_t denominator() const { return den_; }
  double ToDouble() const { return static_cast<double>(num_) / den_; }
  std::string ToString() const {
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  friend bool operator==(const RationalConst&, const RationalConst&) = default;

 private:
  std::int64_t num_;
  std::int64_t den_;
};

struct ScalePolicy {
  BigInt base_scale = 1000000;
  // Largest total scale any pipeline may reach; zero means "derive from t".
  BigInt max_total_scale = 0;

  void Validate() const {
    if (base_scale < 2 || base_scale % 2 != 0) {
      throw ParameterError("base_scale must be an even integer >= 2, got " +
                           ToDecimal(base_scale));
    }
    if (max_total_scale < 0) {
      throw ParameterError("max_total_scale must be non-negative");
    }
  }

  // Effective ceiling under plaintext modulus t: values up to 1 at the
  // returned scale still fit in (-t/2, t/2].
  BigInt Ceiling(std::uint64_t t) const {
    const BigInt half = BigInt(t / 2);
    if (max_total_scale == 0 || max_total_scale > half) return half;
    return max_total_scale;
  }

  void CheckTotal(const BigInt& scale, std::uint64_t t,
                  const std::string& what) const {
    if (scale > Ceiling(t)) {
      throw ScaleError(what + " scale " + ToDecimal(scale) +
                       " exceeds the ceiling " + ToDecimal(Ceiling(t)));
    }
  }
};

// round-half-away-from-zero(num / den) for den > 0.
inline BigInt RoundDiv(const BigInt& num, const BigInt& den) {
  if (den <= 0) throw ParameterError("RoundDiv needs a positive divisor");
  const BigInt mag = (2 * abs(num) + den) / (2 * den);
  return num < 0 ? BigInt(-mag) : mag;
}

namespace internal {

inline std::int64_t FitPlaintext(const BigInt& v, std::uint64_t t) {
  const BigInt half = BigInt(t / 2);
  const BigInt low = -BigInt((t - 1) / 2);
  if (v > half || v < low) {
    throw EncodingError("encoded value " + ToDecimal(v) +
                        " overflows the plaintext modulus");
  }
  return static_cast<std::int64_t>(v);
}

}  // namespace internal

// round-half-away-from-zero(x * s).
inline std::int64_t Encode(long double x, const BigInt& s,
                           std::uint64_t t = kDefaultPlaintextModulus) {
  if (s < 1) throw ScaleError("scale must be a positive integer");
  if (!std::isfinite(x)) throw EncodingError("cannot encode a non-finite value");
  // Scales below 2^64 convert to long double exactly.
  const long double factor =
      s <= BigInt(UINT64_MAX)
          ? static_cast<long double>(static_cast<std::uint64_t>(s))
          : static_cast<long double>(ToDouble(s));
  const long double scaled = std::roundl(x * factor);
  if (std::fabs(scaled) > static_cast<long double>(t / 2) + 1.0L) {
    throw EncodingError("encoded value overflows the plaintext modulus");
  }
  return internal::FitPlaintext(BigInt(static_cast<long long>(scaled)), t);
}

// Exact variant for rationals: round-half-away-from-zero(num * s / den).
inline std::int64_t EncodeRational(const RationalConst& c, const BigInt& s,
                                   std::uint64_t t = kDefaultPlaintextModulus) {
  if (s < 1) throw ScaleError("scale must be a positive integer");
  return internal::FitPlaintext(RoundDiv(BigInt(c.numerator()) * s,
                                         BigInt(c.denominator())),
                                t);
}

inline double Decode(std::int64_t m, const BigInt& s) {
  if (s < 1) throw ScaleError("scale must be a positive integer");
  if (m == 0) return 0.0;
  if (s <= BigInt(UINT64_MAX)) {
    return static_cast<double>(static_cast<long double>(m) /
                               static_cast<long double>(static_cast<std::uint64_t>(s)));
  }
  return static_cast<double>(static_cast<long double>(m) /
                             static_cast<long double>(ToDouble(s)));
}

// Lifts both operands to lcm(a.scale, b.scale). The integer values are
// multiplied by the cofactors, so decoded values are unchanged.
inline std::pair<Ciphertext, Ciphertext> AlignScales(const Evaluator& eval,
                                                     const Ciphertext& a,
                                                     const Ciphertext& b,
                                                     const ScalePolicy& policy) {
  if (a.scale() == b.scale()) return {a, b};
  const BigInt l = Lcm(a.scale(), b.scale());
  const std::uint64_t t = eval.context()->params().plaintext_modulus;
  policy.CheckTotal(l, t, "aligned");
  auto lift = [&](const Ciphertext& c) {
    const BigInt k = l / c.scale();
    return k == 1 ? c : eval.ScaleAlign(c, static_cast<std::int64_t>(k));
  };
  return {lift(a), lift(b)};
}

// Multiplies the encrypted real by num/den: the integer by num, the scale
// by den.
inline Ciphertext MulRational(const Evaluator& eval, const Ciphertext& c,
                              const RationalConst& r) {
  return eval.MulPlain(c, r.numerator()).WithScale(c.scale() * r.denominator());
}

}  // namespace cryptgraph

#endif  // CRYPTGRAPH_ENCODING_ENCODING_HPP_
