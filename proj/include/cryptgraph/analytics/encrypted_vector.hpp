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

#ifndef CRYPTGRAPH_ANALYTICS_ENCRYPTED_VECTOR_HPP_
#define CRYPTGRAPH_ANALYTICS_ENCRYPTED_VECTOR_HPP_

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cryptgraph/common/bytes.hpp"
#include "cryptgraph/encoding/encoding.hpp"
#include "cryptgraph/he/he.hpp"
#include "cryptgraph/he/serialization.hpp"

namespace cryptgraph {

// One ciphertext per vertex, all at the same scale.
class EncryptedVector {
 public:
  EncryptedVector() = default;
  explicit EncryptedVector(std::vector<Ciphertext> values) : values_(std::move(values)) {
    for (const Ciphertext& c : values_) {
      if (c.scale() != values_.front().scale()) {
        throw ScaleError("encrypted vector entries must share one scale");
      }
    }
  }

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  const Ciphertext& operator[](std::size_t i) const { return values_[i]; }
  const std::vector<Ciphertext>& values() const { return values_; }
  // Scale of every entry; 1 for an empty vector.
  BigInt scale() const { return values_.empty() ? BigInt(1) : values_.front().scale(); }

 private:
  std::vector<Ciphertext> values_;
};

// User side: decrypt and decode every entry.
inline std::vector<double> DecryptVector(const Decryptor& dec, const EncryptedVector& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const Ciphertext& c : v.values()) out.push_back(Decode(dec.Decrypt(c), c.scale()));
  return out;
}

// File format:
//   "CGRV1", u64 parameter fingerprint, u32 count,
//   then per entry u32 length + serialized ciphertext.
inline constexpr std::string_view kEncryptedVectorMagic = "CGRV1";

inline Bytes SerializeEncryptedVector(const EncryptedVector& v, const HeContext& ctx) {
  ByteWriter w;
  w.PutString(kEncryptedVectorMagic);
  w.PutU64(ctx.fingerprint());
  w.PutU32(static_cast<std::uint32_t>(v.size()));
  for (const Ciphertext& c : v.values()) {
    const Bytes b = SerializeCiphertext(c, ctx);
    w.PutU32(static_cast<std::uint32_t>(b.size()));
    w.PutBytes(b);
  }
  return std::move(w).Take();
}

inline EncryptedVector DeserializeEncryptedVector(std::span<const std::uint8_t> bytes,
                                                  const HeContext& ctx) {
  ByteReader r(bytes);
  const auto magic = r.GetBytes(kEncryptedVectorMagic.size());
  if (!std::equal(magic.begin(), magic.end(), kEncryptedVectorMagic.begin())) {
    throw MalformedError("not an encrypted result file (bad magic)");
  }
  if (r.GetU64() != ctx.fingerprint()) {
    throw FingerprintError("encrypted result was produced under different parameters");
  }
  const std::uint32_t n = r.GetU32();
  if (n > (1u << 24)) throw MalformedError("entry count out of range");
  std::vector<Ciphertext> values;
  values.reserve(n);
  for (std::uint32_t k = 0; k < n; ++k) {
    const auto b = r.GetBytes(r.GetU32());
    values.push_back(DeserializeCiphertext(b, ctx));
  }
  if (!r.done()) throw MalformedError("trailing bytes after encrypted result");
  try {
    return EncryptedVector(std::move(values));
  } catch (const ScaleError& e) {
    throw MalformedError(e.what());
  }
}

}  // namespace cryptgraph

#endif  // CRYPTGRAPH_ANALYTICS_ENCRYPTED_VECTOR_HPP_
