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

// Big-endian byte buffers and base64. All multi-byte integers on disk and on
// the wire are big-endian.

#ifndef CRYPTGRAPH_COMMON_BYTES_HPP_
#define CRYPTGRAPH_COMMON_BYTES_HPP_

#include <sodium.h>

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cryptgraph/common/errors.hpp"

namespace cryptgraph {

using Bytes = std::vector<std::uint8_t>;

class ByteWriter {
 public:
  void PutU8(std::uint8_t v) { buf_.push_back(v); }
  void PutU16(std::uint16_t v) { PutBig(v, 2); }
  void PutU32(std::uint32_t v) { PutBig(v, 4); }
  void PutU64(std::uint64_t v) { PutBig(v, 8); }
  void PutBytes(std::span<const std::uint8_t> bytes) {
    buf_.insert(buf_.end(), bytes.begin(), bytes.end());
  }
  void PutString(std::string_view s) {
    buf_.insert(buf_.end(), s.begin(), s.end());
  }

  std::size_t size() const { return buf_.size(); }
  Bytes Take() && { return std::move(buf_); }
  const Bytes& bytes() const { return buf_; }

 private:
  void PutBig(std::uint64_t v, int width) {
    for (int i = width - 1; i >= 0; --i) {
      buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
  }

  Bytes buf_;
};

// Bounds-checked reader; every overrun is a MalformedError.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint8_t GetU8() { return static_cast<std::uint8_t>(GetBig(1)); }
  std::uint16_t GetU16() { return static_cast<std::uint16_t>(GetBig(2)); }
  std::uint32_t GetU32() { return static_cast<std::uint32_t>(GetBig(4)); }
  std::uint64_t GetU64() { return GetBig(8); }

  std::span<const std::uint8_t> GetBytes(std::size_t n) {
    Require(n);
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  std::size_t remaining() const { return data_.size() - pos_; }
  bool done() const { return pos_ == data_.size(); }

 private:
  void Require(std::size_t n) const {
    if (n > data_.size() - pos_) {
      throw MalformedError("truncated input: need " + std::to_string(n) +
                           " bytes at offset " + std::to_string(pos_) +
                           ", have " + std::to_string(data_.size() - pos_));
    }
  }

  std::uint64_t GetBig(int width) {
    Require(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v = (v << 8) | data_[pos_ + i];
    pos_ += static_cast<std::size_t>(width);
    return v;
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

inline void EnsureSodium() {
  static const bool ok = sodium_init() >= 0;
  if (!ok) throw std::runtime_error("libsodium failed to initialize");
}

inline std::string Base64Encode(std::span<const std::uint8_t> bytes) {
  EnsureSodium();
  const int variant = sodium_base64_VARIANT_ORIGINAL;
  std::string out(sodium_base64_encoded_len(bytes.size(), variant), '\0');
  sodium_bin2base64(out.data(), out.size(), bytes.data(), bytes.size(),
                    variant);
  out.resize(out.size() - 1);  // drop the terminating NUL
  return out;
}

inline Bytes Base64Decode(std::string_view text) {
  EnsureSodium();
  Bytes out(text.size() / 4 * 3 + 3);
  std::size_t len = 0;
  const char* end = nullptr;
  if (sodium_base642bin(out.data(), out.size(), text.data(), text.size(),
                        nullptr, &len, &end,
                        sodium_base64_VARIANT_ORIGINAL) != 0 ||
      end != text.data() + text.size()) {
    throw MalformedError("invalid base64 payload");
  }
  out.resize(len);
  return out;
}

}  // namespace cryptgraph

#endif  // CRYPTGRAPH_COMMON_BYTES_HPP_
