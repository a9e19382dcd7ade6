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

// Arbitrary-precision integers for scales and the ciphertext modulus.

#ifndef CRYPTGRAPH_COMMON_BIGINT_HPP_
#define CRYPTGRAPH_COMMON_BIGINT_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "cryptgraph/common/errors.hpp"

namespace cryptgraph {

using BigInt = boost::multiprecision::cpp_int;

inline std::string ToDecimal(const BigInt& value) { return value.str(); }

// Accepts an optional leading '-' followed by at least one decimal digit.
inline BigInt ParseDecimal(std::string_view text) {
  std::size_t start = (!text.empty() && text.front() == '-') ? 1 : 0;
  if (text.size() == start) {
    throw MalformedError("empty decimal integer");
  }
  for (std::size_t i = start; i < text.size(); ++i) {
    if (text[i] < '0' || text[i] > '9') {
      throw MalformedError("not a decimal integer: '" + std::string(text) +
                           "'");
    }
  }
  return BigInt(std::string(text));
}

// Big-endian magnitude; zero encodes as an empty byte string.
inline std::vector<std::uint8_t> MagnitudeBytes(const BigInt& value) {
  std::vector<std::uint8_t> out;
  const BigInt magnitude = boost::multiprecision::abs(value);
  boost::multiprecision::export_bits(magnitude, std::back_inserter(out), 8,
                                     /*msv_first=*/true);
  while (!out.empty() && out.front() == 0) out.erase(out.begin());
  return out;
}

inline BigInt FromMagnitudeBytes(const std::uint8_t* data, std::size_t size) {
  BigInt value = 0;
  if (size > 0) {
    boost::multiprecision::import_bits(value, data, data + size, 8,
                                       /*msv_first=*/true);
  }
  return value;
}

inline BigInt Gcd(const BigInt& a, const BigInt& b) {
  return boost::multiprecision::gcd(a, b);
}

inline BigInt Lcm(const BigInt& a, const BigInt& b) {
  return boost::multiprecision::lcm(a, b);
}

inline double ToDouble(const BigInt& value) {
  return value.convert_to<double>();
}

}  // namespace cryptgraph

#endif  // CRYPTGRAPH_COMMON_BIGINT_HPP_
