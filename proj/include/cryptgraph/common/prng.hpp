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

// Seedable ChaCha20 keystream used for every random draw in the library.
// A fixed 32-byte seed makes keys, encryptions and test fixtures
// reproducible.

#ifndef CRYPTGRAPH_COMMON_PRNG_HPP_
#define CRYPTGRAPH_COMMON_PRNG_HPP_

#include <sodium.h>

#include <array>
#include <bit>
#include <cstdint>
#include <span>
#include <string_view>

#include "cryptgraph/common/bytes.hpp"

namespace cryptgraph {

using Seed = std::array<std::uint8_t, 32>;

inline Seed SeedFromInteger(std::uint64_t value) {
  EnsureSodium();
  std::array<std::uint8_t, 8> in{};
  for (int i = 0; i < 8; ++i) in[i] = static_cast<std::uint8_t>(value >> (56 - 8 * i));
  Seed out{};
  crypto_generichash(out.data(), out.size(), in.data(), in.size(), nullptr, 0);
  return out;
}

// Domain-separated child seed, so independent consumers of one master seed
// never share a keystream.
inline Seed DeriveSeed(const Seed& parent, std::string_view label) {
  EnsureSodium();
  Seed out{};
  crypto_generichash(out.data(), out.size(),
                     reinterpret_cast<const unsigned char*>(label.data()),
                     label.size(), parent.data(), parent.size());
  return out;
}

inline Seed RandomSeed() {
  EnsureSodium();
  Seed out{};
  randombytes_buf(out.data(), out.size());
  return out;
}

class Prng {
 public:
  explicit Prng(const Seed& seed) : key_(seed) { EnsureSodium(); }

  static Prng FromEntropy() { return Prng(RandomSeed()); }

  void Fill(std::span<std::uint8_t> out) {
    for (auto& b : out) {
      if (pos_ == buffer_.size()) Refill();
      b = buffer_[pos_++];
    }
  }

  std::uint64_t NextU64() {
    if (buffer_.size() - pos_ < 8) Refill();
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | buffer_[pos_ + i];
    pos_ += 8;
    return v;
  }

  // Uniform in [0, bound) by rejection; bound > 0.
  std::uint64_t UniformBelow(std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t v = NextU64();
    while (v >= limit) v = NextU64();
    return v % bound;
  }

  // Uniform in {-1, 0, 1}.
  int Ternary() { return static_cast<int>(UniformBelow(3)) - 1; }

  // Centered binomial with parameter eta: variance eta / 2.
  int CenteredBinomial(int eta) {
    int acc = 0;
    int left = eta;
    while (left > 0) {
      const int take = left < 32 ? left : 32;
      const std::uint64_t bits = NextU64();
      const std::uint64_t mask = (take == 32) ? 0xffffffffULL : ((1ULL << take) - 1);
      acc += std::popcount(bits & mask) - std::popcount((bits >> 32) & mask);
      left -= take;
    }
    return acc;
  }

 private:
  void Refill() {
    std::array<std::uint8_t, crypto_stream_chacha20_ietf_NONCEBYTES> nonce{};
    for (int i = 0; i < 8; ++i) nonce[4 + i] = static_cast<std::uint8_t>(counter_ >> (56 - 8 * i));
    ++counter_;
    crypto_stream_chacha20_ietf(buffer_.data(), buffer_.size(), nonce.data(),
                                key_.data());
    pos_ = 0;
  }

  Seed key_;
  std::uint64_t counter_ = 0;
  std::array<std::uint8_t, 4096> buffer_{};
  std::size_t pos_ = buffer_.size();
};

}  // namespace cryptgraph

#endif  // CRYPTGRAPH_COMMON_PRNG_HPP_
