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

// Cloud-side half of the outsourcing protocol. Calls are synchronous: one
// request, one response, in order.

#ifndef CRYPTGRAPH_OUTSOURCING_CHANNEL_HPP_
#define CRYPTGRAPH_OUTSOURCING_CHANNEL_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <thread>
#include <utility>
#include <vector>

#include "cryptgraph/outsourcing/messages.hpp"
#include "cryptgraph/outsourcing/transport.hpp"

namespace cryptgraph {

struct ChannelCounts {
  std::size_t reciprocal_batches = 0;
  std::size_t rescale_batches = 0;
  std::size_t reciprocal_items = 0;
  std::size_t rescale_items = 0;
};

class Channel {
 public:
  Channel(std::unique_ptr<ByteStream> stream, ContextPtr ctx,
          std::size_t max_frame = kDefaultMaxFrame)
      : stream_(std::move(stream)), ctx_(std::move(ctx)), max_frame_(max_frame) {}

  ~Channel() {
    if (stream_) stream_->Close();
  }

  const ChannelCounts& counts() const { return counts_; }
  const ContextPtr& context() const { return ctx_; }

  // Assigns the request id and checks the response against the request.
  OutsourceResponse Call(OutsourceRequest req) {
    req.id = next_id_++;
    WriteFrame(*stream_, RequestToJson(req, *ctx_).dump(), max_frame_);
    std::optional<std::string> frame = ReadFrame(*stream_, max_frame_);
    if (!frame) throw TransportError("client closed the connection");
    Json j;
    try {
      j = Json::parse(*frame);
    } catch (const Json::exception& e) {
      throw ProtocolError(std::string("response is not valid JSON: ") + e.what());
    }
    OutsourceResponse resp = ResponseFromJson(j, *ctx_);
    if (resp.id != req.id) {
      throw ProtocolError("response id " + std::to_string(resp.id) +
                          " does not match request " + std::to_string(req.id));
    }
    if (resp.items.size() != req.items.size()) {
      throw ProtocolError("response carries the wrong number of items");
    }
    for (const WireItem& it : resp.items) {
      if (it.ct.scale() != req.target_scale) {
        throw ProtocolError("response item not at the requested scale");
      }
    }
    if (req.kind == RequestKind::kReciprocalBatch) {
      ++counts_.reciprocal_batches;
      counts_.reciprocal_items += req.items.size();
    } else {
      ++counts_.rescale_batches;
      counts_.rescale_items += req.items.size();
    }
    return resp;
  }

  void Close() { stream_->Close(); }

 private:
  std::unique_ptr<ByteStream> stream_;
  ContextPtr ctx_;
  std::size_t max_frame_;
  std::uint64_t next_id_ = 1;
  ChannelCounts counts_;
};

namespace internal {

inline std::vector<WireItem> ToItems(std::span<const Ciphertext> cts) {
  std::vector<WireItem> items;
  items.reserve(cts.size());
  for (const Ciphertext& c : cts) items.push_back({c, c.scale()});
  return items;
}

inline std::vector<Ciphertext> FromItems(std::vector<WireItem>&& items) {
  std::vector<Ciphertext> out;
  out.reserve(items.size());
  for (WireItem& it : items) out.push_back(std::move(it.ct));
  return out;
}

}  // namespace internal

struct ReciprocalResult {
  std::vector<Ciphertext> values;  // zero divisors come back as enc(0)
  std::vector<ItemError> errors;
};

inline ReciprocalResult RequestReciprocals(Channel& ch, std::span<const Ciphertext> cts,
                                           const BigInt& target_scale) {
  if (cts.empty()) return {};
  OutsourceRequest req;
  req.kind = RequestKind::kReciprocalBatch;
  req.target_scale = target_scale;
  req.items = internal::ToItems(cts);
  OutsourceResponse resp = ch.Call(std::move(req));
  return {internal::FromItems(std::move(resp.items)), std::move(resp.errors)};
}

struct RescaleResult {
  std::vector<Ciphertext> values;
  std::optional<bool> converged;
  std::vector<ItemError> errors;
};

inline RescaleResult RequestRescale(Channel& ch, std::span<const Ciphertext> cts,
                                    const BigInt& target_scale, bool report_convergence,
                                    std::span<const Ciphertext> previous = {},
                                    double epsilon = 1e-6) {
  if (cts.empty()) return {};
  if (report_convergence && !previous.empty() && previous.size() != cts.size()) {
    throw ValidationError("previous values differ in length from the batch");
  }
  OutsourceRequest req;
  req.kind = RequestKind::kRescaleBatch;
  req.target_scale = target_scale;
  req.report_convergence = report_convergence;
  req.epsilon = epsilon;
  req.items = internal::ToItems(cts);
  if (report_convergence && !previous.empty()) req.previous = internal::ToItems(previous);
  OutsourceResponse resp = ch.Call(std::move(req));
  return {internal::FromItems(std::move(resp.items)), resp.converged, std::move(resp.errors)};
}

}  // namespace cryptgraph

#endif  // CRYPTGRAPH_OUTSOURCING_CHANNEL_HPP_
