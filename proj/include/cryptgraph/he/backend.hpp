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

// The two interchangeable HE backends.
//
// Lattice: a BGV-style scheme over Z_q[X]/(X^n + 1) with q a product of
// word-sized NTT primes. A plaintext m is the constant polynomial m, and a
// ciphertext (c_0, ..., c_{d-1}) satisfies
//
//   c_0 + c_1 s + ... + c_{d-1} s^{d-1} = m + t e   (mod q)
//
// for small e. Multiplication is the plain tensor product (no
// relinearization), so components accumulate. Decryption lifts every
// coefficient of the left-hand side to (-q/2, q/2]; the constant term mod t
// is the message and every other coefficient must vanish mod t. When noise
// wraps around q that check fails, which is how overflow surfaces as a
// corruption error instead of a wrong answer.
//
// Transparent: carries the plaintext residue mod t in the clear and mirrors
// the lattice operation algebra (degrees, scales, wrap-around mod t)
// exactly. It is the oracle backend for tests and large desk-scale runs.
//
// Both backends assume the Evaluator has already validated fingerprints,
// scales and degree budgets.

#ifndef CRYPTGRAPH_HE_BACKEND_HPP_
#define CRYPTGRAPH_HE_BACKEND_HPP_

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <vector>

#include "cryptgraph/common/prng.hpp"
#include "cryptgraph/he/ciphertext.hpp"

namespace cryptgraph {

inline constexpr int kUnboundedNoiseBudget = std::numeric_limits<int>::max();

struct DecryptionResult {
  std::int64_t value = 0;
  bool consistent = true;
  int noise_budget = 0;
};

class Backend {
 public:
  virtual ~Backend() = default;

  virtual KeyPair Keygen(const ContextPtr& ctx, const Seed& seed) const = 0;
  virtual Ciphertext Encrypt(const PublicKey& pk, std::int64_t m, BigInt scale,
                             Prng& prng) const = 0;
  virtual DecryptionResult Decrypt(const SecretKey& sk,
                                   const Ciphertext& ct) const = 0;

  virtual Ciphertext Add(const HeContext& ctx, const Ciphertext& a,
                         const Ciphertext& b) const = 0;
  virtual Ciphertext Sub(const HeContext& ctx, const Ciphertext& a,
                         const Ciphertext& b) const = 0;
  virtual Ciphertext Negate(const HeContext& ctx,
                            const Ciphertext& a) const = 0;
  virtual Ciphertext Mul(const HeContext& ctx, const Ciphertext& a,
                         const Ciphertext& b) const = 0;
  virtual Ciphertext MulPlain(const HeContext& ctx, const Ciphertext& a,
                              std::int64_t k) const = 0;
  virtual Ciphertext AddPlain(const HeContext& ctx, const Ciphertext& a,
                              std::int64_t k) const = 0;
};

class TransparentBackend final : public Backend {
 public:
  KeyPair Keygen(const ContextPtr& ctx, const Seed& seed) const override {
    KeyPair kp;
    const Seed id = DeriveSeed(seed, "transparent-key-id");
    kp.secret_key.context = ctx;
    kp.public_key.context = ctx;
    std::copy(id.begin(), id.end(), kp.secret_key.key_id.begin());
    kp.public_key.key_id = kp.secret_key.key_id;
    return kp;
  }

  Ciphertext Encrypt(const PublicKey& pk, std::int64_t m, BigInt scale,
                     Prng&) const override {
    const HeContext& ctx = *pk.context;
    return Ciphertext::Transparent(ctx.fingerprint(), 2, std::move(scale),
                                   ctx.plaintext().FromSigned(m));
  }

  DecryptionResult Decrypt(const SecretKey& sk,
                           const Ciphertext& ct) const override {
    return {Center(*sk.context, ct.residue()), true, kUnboundedNoiseBudget};
  }

  Ciphertext Add(const HeContext& ctx, const Ciphertext& a,
                 const Ciphertext& b) const override {
    return Make(a, std::max(a.degree(), b.degree()), a.scale(),
                ctx.plaintext().Add(a.residue(), b.residue()));
  }
  Ciphertext Sub(const HeContext& ctx, const Ciphertext& a,
                 const Ciphertext& b) const override {
    return Make(a, std::max(a.degree(), b.degree()), a.scale(),
                ctx.plaintext().Sub(a.residue(), b.residue()));
  }
  Ciphertext Negate(const HeContext& ctx, const Ciphertext& a) const override {
    return Make(a, a.degree(), a.scale(), ctx.plaintext().Neg(a.residue()));
  }
  Ciphertext Mul(const HeContext& ctx, const Ciphertext& a,
                 const Ciphertext& b) const override {
    return Make(a, a.degree() + b.degree() - 1, a.scale() * b.scale(),
                ctx.plaintext().Mul(a.residue(), b.residue()));
  }
  Ciphertext MulPlain(const HeContext& ctx, const Ciphertext& a,
                      std::int64_t k) const override {
    const auto& t = ctx.plaintext();
    return Make(a, a.degree(), a.scale(), t.Mul(a.residue(), t.FromSigned(k)));
  }
  Ciphertext AddPlain(const HeContext& ctx, const Ciphertext& a,
                      std::int64_t k) const override {
    const auto& t = ctx.plaintext();
    return Make(a, a.degree(), a.scale(), t.Add(a.residue(), t.FromSigned(k)));
  }

 private:
  static std::int64_t Center(const HeContext& ctx, std::uint64_t r) {
    const std::uint64_t t = ctx.plaintext().value();
    return r > t / 2 ? -static_cast<std::int64_t>(t - r)
                     : static_cast<std::int64_t>(r);
  }

  static Ciphertext Make(const Ciphertext& like, int degree,
                         const BigInt& scale, std::uint64_t residue) {
    return Ciphertext::Transparent(like.fingerprint(), degree, scale, residue);
  }
};

class LatticeBackend final : public Backend {
 public:
  KeyPair Keygen(const ContextPtr& ctx_ptr, const Seed& seed) const override {
    const HeContext& ctx = *ctx_ptr;
    Prng prng(DeriveSeed(seed, "lattice-keygen"));
    const std::size_t n = ctx.ring_degree();

    std::vector<std::int64_t> small(n);
    for (auto& c : small) c = prng.Ternary();
    RnsPoly s = SmallToNtt(ctx, small);

    RnsPoly a(ctx.num_primes(), n);
    for (std::size_t i = 0; i < ctx.num_primes(); ++i) {
      const std::uint64_t p = ctx.moduli()[i].value();
      for (auto& x : a.Residues(i, n)) x = prng.UniformBelow(p);
    }

    for (auto& c : small) c = prng.CenteredBinomial(ctx.noise_eta());
    RnsPoly e = SmallToNtt(ctx, small);

    // b = -a*s + t*e
    RnsPoly b(ctx.num_primes(), n);
    for (std::size_t i = 0; i < ctx.num_primes(); ++i) {
      const Modulus& mod = ctx.moduli()[i];
      const std::uint64_t t_mod = ctx.plaintext().value() % mod.value();
      auto bs = b.Residues(i, n);
      auto as = a.Residues(i, n);
      auto ss = s.Residues(i, n);
      auto es = e.Residues(i, n);
      for (std::size_t j = 0; j < n; ++j) {
        bs[j] = mod.Sub(mod.Mul(t_mod, es[j]), mod.Mul(as[j], ss[j]));
      }
    }

    KeyPair kp;
    const Seed id = DeriveSeed(seed, "lattice-key-id");
    kp.secret_key.context = ctx_ptr;
    std::copy(id.begin(), id.end(), kp.secret_key.key_id.begin());
    kp.secret_key.s = std::move(s);
    kp.public_key.context = ctx_ptr;
    kp.public_key.key_id = kp.secret_key.key_id;
    kp.public_key.a = std::move(a);
    kp.public_key.b = std::move(b);
    return kp;
  }

  Ciphertext Encrypt(const PublicKey& pk, std::int64_t m, BigInt scale,
                     Prng& prng) const override {
    const HeContext& ctx = *pk.context;
    const std::size_t n = ctx.ring_degree();
    std::vector<std::int64_t> small(n);
    for (auto& c : small) c = prng.Ternary();
    const RnsPoly u = SmallToNtt(ctx, small);
    for (auto& c : small) c = prng.CenteredBinomial(ctx.noise_eta());
    const RnsPoly e1 = SmallToNtt(ctx, small);
    for (auto& c : small) c = prng.CenteredBinomial(ctx.noise_eta());
    const RnsPoly e2 = SmallToNtt(ctx, small);

    // c0 = b*u + t*e1 + m, c1 = a*u + t*e2
    RnsPoly c0(ctx.num_primes(), n);
    RnsPoly c1(ctx.num_primes(), n);
    for (std::size_t i = 0; i < ctx.num_primes(); ++i) {
      const Modulus& mod = ctx.moduli()[i];
      const std::uint64_t t_mod = ctx.plaintext().value() % mod.value();
      const std::uint64_t m_mod = mod.FromSigned(m);
      auto bs = pk.b.Residues(i, n);
      auto as = pk.a.Residues(i, n);
      auto us = u.Residues(i, n);
      auto e1s = e1.Residues(i, n);
      auto e2s = e2.Residues(i, n);
      auto c0s = c0.Residues(i, n);
      auto c1s = c1.Residues(i, n);
      for (std::size_t j = 0; j < n; ++j) {
        c0s[j] = mod.Add(mod.Add(mod.Mul(bs[j], us[j]), mod.Mul(t_mod, e1s[j])),
                         m_mod);
        c1s[j] = mod.Add(mod.Mul(as[j], us[j]), mod.Mul(t_mod, e2s[j]));
      }
    }
    std::vector<RnsPoly> comps;
    comps.push_back(std::move(c0));
    comps.push_back(std::move(c1));
    return Ciphertext::Lattice(ctx.fingerprint(), std::move(scale),
                               std::move(comps));
  }

  DecryptionResult Decrypt(const SecretKey& sk,
                           const Ciphertext& ct) const override {
    const HeContext& ctx = *sk.context;
    const std::size_t n = ctx.ring_degree();
    const std::size_t l = ctx.num_primes();
    const auto& comps = ct.components();

    // Horner: v = c_0 + s (c_1 + s (c_2 + ...)).
    RnsPoly v = comps.back();
    for (std::size_t k = comps.size() - 1; k-- > 0;) {
      for (std::size_t i = 0; i < l; ++i) {
        const Modulus& mod = ctx.moduli()[i];
        auto vs = v.Residues(i, n);
        auto ss = sk.s.Residues(i, n);
        auto cs = comps[k].Residues(i, n);
        for (std::size_t j = 0; j < n; ++j) {
          vs[j] = mod.Add(mod.Mul(vs[j], ss[j]), cs[j]);
        }
      }
    }
    for (std::size_t i = 0; i < l; ++i) ctx.ntt()[i].Inverse(v.Residues(i, n));

    const Modulus& tmod = ctx.plaintext();
    DecryptionResult result;
    long double max_mag = 0.0L;
    std::vector<std::uint64_t> residues(l);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < l; ++i) residues[i] = v.data[i * n + j];
      long double mag = 0.0L;
      const std::uint64_t mod_t = LiftCoefficient(ctx, residues, &mag);
      if (mag > max_mag) max_mag = mag;
      if (j == 0) {
        const std::uint64_t t = tmod.value();
        result.value = mod_t > t / 2 ? -static_cast<std::int64_t>(t - mod_t)
                                     : static_cast<std::int64_t>(mod_t);
      } else if (mod_t != 0) {
        result.consistent = false;
      }
    }
    if (!result.consistent) {
      result.noise_budget = 0;
    } else {
      const double q_bits = std::log2(ToDouble(ctx.ciphertext_modulus()));
      const double used = max_mag > 0 ? std::log2(static_cast<double>(max_mag)) : 0.0;
      const double budget = std::floor(q_bits - 1.0 - used);
      result.noise_budget = budget > 0 ? static_cast<int>(budget) : 0;
    }
    return result;
  }

  Ciphertext Add(const HeContext& ctx, const Ciphertext& a,
                 const Ciphertext& b) const override {
    return Combine(ctx, a, b, /*subtract=*/false);
  }
  Ciphertext Sub(const HeContext& ctx, const Ciphertext& a,
                 const Ciphertext& b) const override {
    return Combine(ctx, a, b, /*subtract=*/true);
  }

  Ciphertext Negate(const HeContext& ctx, const Ciphertext& a) const override {
    std::vector<RnsPoly> out = a.components();
    const std::size_t n = ctx.ring_degree();
    for (auto& poly : out) {
      for (std::size_t i = 0; i < ctx.num_primes(); ++i) {
        const Modulus& mod = ctx.moduli()[i];
        for (auto& x : poly.Residues(i, n)) x = mod.Neg(x);
      }
    }
    return Ciphertext::Lattice(a.fingerprint(), a.scale(), std::move(out));
  }

  Ciphertext Mul(const HeContext& ctx, const Ciphertext& a,
                 const Ciphertext& b) const override {
    const std::size_t n = ctx.ring_degree();
    const auto& ac = a.components();
    const auto& bc = b.components();
    std::vector<RnsPoly> out(ac.size() + bc.size() - 1,
                             RnsPoly(ctx.num_primes(), n));
    for (std::size_t x = 0; x < ac.size(); ++x) {
      for (std::size_t y = 0; y < bc.size(); ++y) {
        RnsPoly& dst = out[x + y];
        for (std::size_t i = 0; i < ctx.num_primes(); ++i) {
          const Modulus& mod = ctx.moduli()[i];
          auto d = dst.Residues(i, n);
          auto p = ac[x].Residues(i, n);
          auto q = bc[y].Residues(i, n);
          for (std::size_t j = 0; j < n; ++j) {
            d[j] = mod.Add(d[j], mod.Mul(p[j], q[j]));
          }
        }
      }
    }
    return Ciphertext::Lattice(a.fingerprint(), a.scale() * b.scale(),
                               std::move(out));
  }

  Ciphertext MulPlain(const HeContext& ctx, const Ciphertext& a,
                      std::int64_t k) const override {
    std::vector<RnsPoly> out = a.components();
    const std::size_t n = ctx.ring_degree();
    for (std::size_t i = 0; i < ctx.num_primes(); ++i) {
      const Modulus& mod = ctx.moduli()[i];
      const std::uint64_t w = mod.FromSigned(k);
      const std::uint64_t ws = mod.ShoupPrecompute(w);
      for (auto& poly : out) {
        for (auto& x : poly.Residues(i, n)) x = mod.MulShoup(x, w, ws);
      }
    }
    return Ciphertext::Lattice(a.fingerprint(), a.scale(), std::move(out));
  }

  Ciphertext AddPlain(const HeContext& ctx, const Ciphertext& a,
                      std::int64_t k) const override {
    std::vector<RnsPoly> out = a.components();
    const std::size_t n = ctx.ring_degree();
    // The constant polynomial k transforms to k in every NTT slot.
    for (std::size_t i = 0; i < ctx.num_primes(); ++i) {
      const Modulus& mod = ctx.moduli()[i];
      const std::uint64_t w = mod.FromSigned(k);
      for (auto& x : out[0].Residues(i, n)) x = mod.Add(x, w);
    }
    return Ciphertext::Lattice(a.fingerprint(), a.scale(), std::move(out));
  }

  // Signed small coefficients -> RNS residues -> NTT form.
  static RnsPoly SmallToNtt(const HeContext& ctx,
                            const std::vector<std::int64_t>& coeffs) {
    const std::size_t n = ctx.ring_degree();
    RnsPoly out(ctx.num_primes(), n);
    for (std::size_t i = 0; i < ctx.num_primes(); ++i) {
      const Modulus& mod = ctx.moduli()[i];
      auto r = out.Residues(i, n);
      for (std::size_t j = 0; j < n; ++j) r[j] = mod.FromSigned(coeffs[j]);
      ctx.ntt()[i].Forward(r);
    }
    return out;
  }

  // Garner mixed-radix reconstruction of one coefficient. Returns the
  // centered lift reduced mod t and stores its magnitude in *magnitude.
  static std::uint64_t LiftCoefficient(const HeContext& ctx,
                                       std::span<std::uint64_t> residues,
                                       long double* magnitude) {
    const std::size_t l = ctx.num_primes();
    const auto& inv = ctx.garner_inverse();
    std::uint64_t digits[16];
    std::vector<std::uint64_t> heap;
    std::uint64_t* d = digits;
    if (l > 16) {
      heap.resize(l);
      d = heap.data();
    }
    for (std::size_t i = 0; i < l; ++i) {
      const Modulus& mi = ctx.moduli()[i];
      std::uint64_t x = residues[i];
      for (std::size_t j = 0; j < i; ++j) {
        x = mi.Mul(mi.Sub(x, d[j] % mi.value()), inv[i][j]);
      }
      d[i] = x;
    }
    const auto& half = ctx.half_digits();
    bool negative = false;
    for (std::size_t i = l; i-- > 0;) {
      if (d[i] != half[i]) {
        negative = d[i] > half[i];
        break;
      }
    }
    const Modulus& tmod = ctx.plaintext();
    std::uint64_t acc_t = 0;
    long double acc = 0.0L;
    for (std::size_t i = 0; i < l; ++i) {
      const std::uint64_t digit =
          negative ? ctx.moduli()[i].value() - 1 - d[i] : d[i];
      acc_t = tmod.Add(acc_t, tmod.Mul(digit % tmod.value(), ctx.place_mod_t()[i]));
      acc += static_cast<long double>(digit) * ctx.place_approx()[i];
    }
    if (negative) {
      // x - q = -((q - 1 - x) + 1)
      acc_t = tmod.Neg(tmod.Add(acc_t, 1));
      acc += 1.0L;
    }
    *magnitude = acc;
    return acc_t;
  }

 private:
  static Ciphertext Combine(const HeContext& ctx, const Ciphertext& a,
                            const Ciphertext& b, bool subtract) {
    const auto& ac = a.components();
    const auto& bc = b.components();
    std::vector<RnsPoly> out(std::max(ac.size(), bc.size()),
                             RnsPoly(ctx.num_primes(), ctx.ring_degree()));
    for (std::size_t k = 0; k < ac.size(); ++k) out[k] = ac[k];
    for (std::size_t k = 0; k < bc.size(); ++k) {
      AddInto(ctx, out[k], bc[k], subtract);
    }
    return Ciphertext::Lattice(a.fingerprint(), a.scale(), std::move(out));
  }

  static void AddInto(const HeContext& ctx, RnsPoly& dst, const RnsPoly& src,
                      bool subtract) {
    const std::size_t n = ctx.ring_degree();
    for (std::size_t i = 0; i < ctx.num_primes(); ++i) {
      const Modulus& mod = ctx.moduli()[i];
      auto d = dst.Residues(i, n);
      auto s = src.Residues(i, n);
      if (subtract) {
        for (std::size_t j = 0; j < n; ++j) d[j] = mod.Sub(d[j], s[j]);
      } else {
        for (std::size_t j = 0; j < n; ++j) d[j] = mod.Add(d[j], s[j]);
      }
    }
  }
};

inline const Backend& BackendFor(BackendKind kind) {
  static const TransparentBackend transparent;
  static const LatticeBackend lattice;
  if (kind == BackendKind::kTransparent) return transparent;
  return lattice;
}

}  // namespace cryptgraph

#endif  // CRYPTGRAPH_HE_BACKEND_HPP_
