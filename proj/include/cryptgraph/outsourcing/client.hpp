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

// User-side half of the outsourcing protocol: decrypt, divide or rescale
// in the clear, re-encrypt fresh.

#ifndef CRYPTGRAPH_OUTSOURCING_CLIENT_HPP_
#define CRYPTGRAPH_OUTSOURCING_CLIENT_HPP_

#include <cmath>
#include <cstdint>
#include <utility>

#include "cryptgraph/encoding/encoding.hpp"
#include "cryptgraph/outsourcing/messages.hpp"
#include "cryptgraph/outsourcing/transport.hpp"

namespace cryptgraph {

struct ClientCounts {
  std::size_t requests = 0;
  std::size_t reciprocals = 0;  // items
  std::size_t rescales = 0;     // items
};

class ClientHandler {
 public:
  ClientHandler(SecretKey sk, PublicKey pk, const Seed& seed)
      : dec_(std::move(sk)), enc_(std::move(pk), DeriveSeed(seed, "client")) {
    if (dec_.context()->fingerprint() != enc_.context()->fingerprint()) {
      throw FingerprintError("client secret and public keys use different parameters");
    }
  }

  const ContextPtr& context() const { return enc_.context(); }
  const ClientCounts& counts() const { return counts_; }

  OutsourceResponse Handle(const OutsourceRequest& req) {
    const std::uint64_t t = context()->params().plaintext_modulus;
    ++counts_.requests;
    OutsourceResponse resp;
    resp.id = req.id;
    resp.items.reserve(req.items.size());

    double max_delta = 0.0;
    bool compare = req.kind == RequestKind::kRescaleBatch && req.report_convergence &&
                   req.previous.has_value();
    for (std::size_t k = 0; k < req.items.size(); ++k) {
      const WireItem& item = req.items[k];
      std::int64_t m = 0;
      try {
        m = dec_.Decrypt(item.ct);
      } catch (const CorruptionError&) {
        resp.errors.push_back({k, ItemErrorCode::kCorrupt});
        resp.items.push_back({enc_.Encrypt(0, req.target_scale), req.target_scale});
        compare = false;
        continue;
      }
      BigInt out;
      if (req.kind == RequestKind::kReciprocalBatch) {
        ++counts_.reciprocals;
        if (m == 0) {
          resp.errors.push_back({k, ItemErrorCode::kZeroDivisor});
          resp.items.push_back({enc_.Encrypt(0, req.target_scale), req.target_scale});
          continue;
        }
        // target / (m / s), rounded half away from zero.
        const BigInt num = req.target_scale * item.scale;
        out = RoundDiv(m < 0 ? BigInt(-num) : num, abs(BigInt(m)));
      } else {
        ++counts_.rescales;
        out = RoundDiv(BigInt(m) * req.target_scale, item.scale);
        if (compare) {
          const WireItem& prev = (*req.previous)[k];
          try {
            const double now = Decode(m, item.scale);
            const double before = Decode(dec_.Decrypt(prev.ct), prev.scale);
            max_delta = std::max(max_delta, std::fabs(now - before));
          } catch (const CorruptionError&) {
            compare = false;
          }
        }
      }
      const std::int64_t enc_value = internal::FitPlaintext(out, t);
      resp.items.push_back({enc_.Encrypt(enc_value, req.target_scale), req.target_scale});
    }
    if (req.kind == RequestKind::kRescaleBatch && req.report_convergence) {
      resp.converged = compare && max_delta < req.epsilon;
    }
    return resp;
  }

 private:
  Decryptor dec_;
  Encryptor enc_;
  ClientCounts counts_;
};

// Answers framed requests on `stream` until the peer closes it. Any
// protocol or transport failure ends the session and is rethrown.
inline void Serve(ByteStream& stream, ClientHandler& handler,
                  std::size_t max_frame = kDefaultMaxFrame) {
  const HeContext& ctx = *handler.context();
  for (;;) {
    std::optional<std::string> frame = ReadFrame(stream, max_frame);
    if (!frame) break;
    Json j;
    try {
      j = Json::parse(*frame);
    } catch (const Json::exception& e) {
      stream.Close();
      throw ProtocolError(std::string("request is not valid JSON: ") + e.what());
    }
    try {
      const OutsourceRequest req = RequestFromJson(j, ctx);
      const OutsourceResponse resp = handler.Handle(req);
      WriteFrame(stream, ResponseToJson(resp, ctx).dump(), max_frame);
    } catch (...) {
      stream.Close();
      throw;
    }
  }
  stream.Close();
}

}  // namespace cryptgraph

#endif  // CRYPTGRAPH_OUTSOURCING_CLIENT_HPP_
