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

// Byte formats for ciphertexts, parameters and keys.
//
// Ciphertext (all integers big-endian):
//
//   u8   version = 0x01
//   u8   backend (0 transparent, 1 lattice)
//   u64  parameter fingerprint
//   u16  degree (component count)
//   u16  scale length, then the scale magnitude
//   per component: u32 byte length, then the coefficients
//
// Lattice components are written in coefficient (not NTT) form, prime by
// prime, one u64 residue per coefficient. The transparent backend writes a
// single 8-byte component holding its residue mod t, whatever its degree.

#ifndef CRYPTGRAPH_HE_SERIALIZATION_HPP_
#define CRYPTGRAPH_HE_SERIALIZATION_HPP_

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "cryptgraph/common/bytes.hpp"
#include "cryptgraph/he/he.hpp"

namespace cryptgraph {

inline constexpr std::uint8_t kCiphertextVersion = 0x01;

namespace internal {

inline void WritePoly(ByteWriter& w, const HeContext& ctx, const RnsPoly& poly,
                      bool to_coefficients) {
  const std::size_t n = ctx.ring_degree();
  RnsPoly tmp = poly;
  if (to_coefficients) {
    for (std::size_t i = 0; i < ctx.num_primes(); ++i) {
      ctx.ntt()[i].Inverse(tmp.Residues(i, n));
    }
  }
  w.PutU32(static_cast<std::uint32_t>(tmp.data.size() * 8));
  for (auto x : tmp.data) w.PutU64(x);
}

inline RnsPoly ReadPoly(ByteReader& r, const HeContext& ctx,
                        bool from_coefficients) {
  const std::size_t n = ctx.ring_degree();
  const std::size_t expected = ctx.num_primes() * n * 8;
  const std::uint32_t len = r.GetU32();
  if (len != expected) {
    throw MalformedError("polynomial has " + std::to_string(len) +
                         " bytes, expected " + std::to_string(expected));
  }
  RnsPoly poly(ctx.num_primes(), n);
  for (std::size_t i = 0; i < ctx.num_primes(); ++i) {
    const std::uint64_t p = ctx.moduli()[i].value();
    auto res = poly.Residues(i, n);
    for (auto& x : res) {
      x = r.GetU64();
      if (x >= p) throw MalformedError("residue exceeds its prime");
    }
    if (from_coefficients) ctx.ntt()[i].Forward(res);
  }
  return poly;
}

}  // namespace internal

inline Bytes SerializeCiphertext(const Ciphertext& ct, const HeContext& ctx) {
  internal::CheckBelongs(ctx, ct);
  ByteWriter w;
  w.PutU8(kCiphertextVersion);
  w.PutU8(static_cast<std::uint8_t>(ct.backend()));
  w.PutU64(ct.fingerprint());
  w.PutU16(static_cast<std::uint16_t>(ct.degree()));
  const Bytes scale = MagnitudeBytes(ct.scale());
  w.PutU16(static_cast<std::uint16_t>(scale.size()));
  w.PutBytes(scale);
  if (ct.backend() == BackendKind::kTransparent) {
    w.PutU32(8);
    w.PutU64(ct.residue());
  } else {
    for (const auto& poly : ct.components()) {
      internal::WritePoly(w, ctx, poly, /*to_coefficients=*/true);
    }
  }
  return std::move(w).Take();
}

inline Ciphertext DeserializeCiphertext(std::span<const std::uint8_t> bytes,
                                        const HeContext& ctx) {
  ByteReader r(bytes);
  const std::uint8_t version = r.GetU8();
  if (version != kCiphertextVersion) {
    throw MalformedError("unsupported ciphertext version " +
                         std::to_string(version));
  }
  const auto backend = static_cast<BackendKind>(r.GetU8());
  if (backend != BackendKind::kTransparent && backend != BackendKind::kLattice) {
    throw MalformedError("unknown backend byte");
  }
  const std::uint64_t fingerprint = r.GetU64();
  if (backend != ctx.backend() || fingerprint != ctx.fingerprint()) {
    throw FingerprintError("ciphertext parameters fingerprint mismatch");
  }
  const int degree = r.GetU16();
  if (degree < 1 || degree > ctx.params().max_ct_degree) {
    throw MalformedError("ciphertext degree " + std::to_string(degree) +
                         " out of range");
  }
  const std::uint16_t scale_len = r.GetU16();
  auto scale_bytes = r.GetBytes(scale_len);
  BigInt scale = FromMagnitudeBytes(scale_bytes.data(), scale_bytes.size());
  if (scale < 1) throw MalformedError("ciphertext scale must be positive");

  Ciphertext ct;
  if (backend == BackendKind::kTransparent) {
    if (r.GetU32() != 8) throw MalformedError("transparent component length");
    const std::uint64_t residue = r.GetU64();
    if (residue >= ctx.plaintext().value()) {
      throw MalformedError("transparent residue exceeds t");
    }
    ct = Ciphertext::Transparent(fingerprint, degree, std::move(scale), residue);
  } else {
    std::vector<RnsPoly> comps;
    for (int k = 0; k < degree; ++k) {
      comps.push_back(internal::ReadPoly(r, ctx, /*from_coefficients=*/true));
    }
    ct = Ciphertext::Lattice(fingerprint, std::move(scale), std::move(comps));
  }
  if (!r.done()) throw MalformedError("trailing bytes after ciphertext");
  return ct;
}

// Parameter block shared by the key file formats.
inline void WriteParams(ByteWriter& w, const HeParams& p) {
  w.PutU8(static_cast<std::uint8_t>(p.backend));
  w.PutU32(static_cast<std::uint32_t>(p.ring_degree));
  w.PutU64(p.plaintext_modulus);
  w.PutU32(static_cast<std::uint32_t>(std::llround(p.noise_stddev * 1e6)));
  w.PutU16(static_cast<std::uint16_t>(p.max_ct_degree));
  w.PutU16(static_cast<std::uint16_t>(p.modulus_bits.size()));
  for (int b : p.modulus_bits) w.PutU8(static_cast<std::uint8_t>(b));
}

inline HeParams ReadParams(ByteReader& r) {
  HeParams p;
  const std::uint8_t backend = r.GetU8();
  if (backend > 1) throw MalformedError("unknown backend byte");
  p.backend = static_cast<BackendKind>(backend);
  p.ring_degree = r.GetU32();
  p.plaintext_modulus = r.GetU64();
  p.noise_stddev = r.GetU32() / 1e6;
  p.max_ct_degree = r.GetU16();
  p.modulus_bits.resize(r.GetU16());
  for (auto& b : p.modulus_bits) b = r.GetU8();
  return p;
}

inline constexpr std::string_view kPublicKeyMagic = "CGPK1";
inline constexpr std::string_view kSecretKeyMagic = "CGSK1";

namespace internal {

inline void WriteKeyHeader(ByteWriter& w, std::string_view magic,
                           const HeContext& ctx, const KeyId& id) {
  w.PutString(magic);
  WriteParams(w, ctx.params());
  w.PutU64(ctx.fingerprint());
  w.PutBytes(id);
}

inline ContextPtr ReadKeyHeader(ByteReader& r, std::string_view magic,
                                KeyId* id) {
  auto got = r.GetBytes(magic.size());
  if (std::string_view(reinterpret_cast<const char*>(got.data()), got.size()) !=
      magic) {
    throw MalformedError("bad key file magic");
  }
  ContextPtr ctx = HeContext::Create(ReadParams(r));
  if (r.GetU64() != ctx->fingerprint()) {
    throw FingerprintError("key file fingerprint does not match its parameters");
  }
  auto id_bytes = r.GetBytes(id->size());
  std::copy(id_bytes.begin(), id_bytes.end(), id->begin());
  return ctx;
}

inline bool HasMagic(std::span<const std::uint8_t> bytes, std::string_view magic) {
  return bytes.size() >= magic.size() &&
         std::equal(magic.begin(), magic.end(), bytes.begin());
}

}  // namespace internal

inline Bytes SerializePublicKey(const PublicKey& pk) {
  ByteWriter w;
  internal::WriteKeyHeader(w, kPublicKeyMagic, *pk.context, pk.key_id);
  if (pk.context->backend() == BackendKind::kLattice) {
    internal::WritePoly(w, *pk.context, pk.b, /*to_coefficients=*/false);
    internal::WritePoly(w, *pk.context, pk.a, /*to_coefficients=*/false);
  }
  return std::move(w).Take();
}

inline Bytes SerializeSecretKey(const SecretKey& sk) {
  ByteWriter w;
  internal::WriteKeyHeader(w, kSecretKeyMagic, *sk.context, sk.key_id);
  if (sk.context->backend() == BackendKind::kLattice) {
    internal::WritePoly(w, *sk.context, sk.s, /*to_coefficients=*/false);
  }
  return std::move(w).Take();
}

// Refuses secret key material outright: this is the only key loader the
// cloud role links against.
inline PublicKey DeserializePublicKey(std::span<const std::uint8_t> bytes) {
  if (internal::HasMagic(bytes, kSecretKeyMagic)) {
    throw PrivacyError("refusing to load a secret key where a public key is expected");
  }
  ByteReader r(bytes);
  PublicKey pk;
  pk.context = internal::ReadKeyHeader(r, kPublicKeyMagic, &pk.key_id);
  if (pk.context->backend() == BackendKind::kLattice) {
    pk.b = internal::ReadPoly(r, *pk.context, /*from_coefficients=*/false);
    pk.a = internal::ReadPoly(r, *pk.context, /*from_coefficients=*/false);
  }
  if (!r.done()) throw MalformedError("trailing bytes after public key");
  return pk;
}

inline SecretKey DeserializeSecretKey(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  SecretKey sk;
  sk.context = internal::ReadKeyHeader(r, kSecretKeyMagic, &sk.key_id);
  if (sk.context->backend() == BackendKind::kLattice) {
    sk.s = internal::ReadPoly(r, *sk.context, /*from_coefficients=*/false);
  }
  if (!r.done()) throw MalformedError("trailing bytes after secret key");
  return sk;
}

}  // namespace cryptgraph

#endif  // CRYPTGRAPH_HE_SERIALIZATION_HPP_
