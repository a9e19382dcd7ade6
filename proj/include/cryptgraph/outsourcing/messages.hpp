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

// Outsourcing protocol messages and their JSON form.
//
// Request:
//   {"id": 7, "kind": "reciprocal_batch" | "rescale_batch",
//    "target_scale": "1000000",
//    "report_convergence": true, "epsilon": "1e-06",     (optional)
//    "items": [{"ct": "<base64>", "scale": "2"}, ...],
//    "previous": [...]}                                   (optional)
// Response:
//   {"id": 7, "items": [{"ct": "<base64>", "scale": "1000000"}, ...],
//    "converged": false,                                  (optional)
//    "errors": [{"index": 3, "code": "zero_divisor" | "corrupt"}]}  (optional)
//
// The only plaintext numbers on the wire are ids, scales, error indices and
// epsilon; values travel as ciphertexts in both directions.

#ifndef CRYPTGRAPH_OUTSOURCING_MESSAGES_HPP_
#define CRYPTGRAPH_OUTSOURCING_MESSAGES_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cryptgraph/common/bigint.hpp"
#include "cryptgraph/common/bytes.hpp"
#include "cryptgraph/common/errors.hpp"
#include "cryptgraph/he/serialization.hpp"

namespace cryptgraph {

// Closed on purpose: the client knows two generic operations and nothing
// about the analytics that use them.
enum class RequestKind { kReciprocalBatch, kRescaleBatch };

inline std::string_view RequestKindName(RequestKind k) {
  return k == RequestKind::kReciprocalBatch ? "reciprocal_batch" : "rescale_batch";
}

enum class ItemErrorCode { kZeroDivisor, kCorrupt };

inline std::string_view ItemErrorName(ItemErrorCode c) {
  return c == ItemErrorCode::kZeroDivisor ? "zero_divisor" : "corrupt";
}

struct WireItem {
  Ciphertext ct;
  BigInt scale;
};

struct ItemError {
  std::size_t index = 0;
  ItemErrorCode code = ItemErrorCode::kZeroDivisor;
  friend bool operator==(const ItemError&, const ItemError&) = default;
};

struct OutsourceRequest {
  std::uint64_t id = 0;
  RequestKind kind = RequestKind::kReciprocalBatch;
  BigInt target_scale = 1;
  bool report_convergence = false;
  double epsilon = 1e-6;
  std::vector<WireItem> items;
  std::optional<std::vector<WireItem>> previous;
};

struct OutsourceResponse {
  std::uint64_t id = 0;
  std::vector<WireItem> items;
  std::optional<bool> converged;
  std::vector<ItemError> errors;
};

using Json = nlohmann::json;

namespace internal {

inline std::string FormatEpsilon(double eps) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", eps);
  return buf;
}

inline const Json& Field(const Json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ProtocolError(std::string("missing field '") + key + "'");
  return *it;
}

inline BigInt ParseScale(const Json& v) {
  if (!v.is_string()) throw ProtocolError("scale must be a decimal string");
  BigInt s;
  try {
    s = ParseDecimal(v.get<std::string>());
  } catch (const MalformedError& e) {
    throw ProtocolError(e.what());
  }
  if (s < 1) throw ProtocolError("scale must be positive");
  return s;
}

inline Json ItemsToJson(const std::vector<WireItem>& items, const HeContext& ctx) {
  Json arr = Json::array();
  for (const WireItem& it : items) {
    arr.push_back({{"ct", Base64Encode(SerializeCiphertext(it.ct, ctx))},
                   {"scale", ToDecimal(it.scale)}});
  }
  return arr;
}

inline std::vector<WireItem> ItemsFromJson(const Json& arr, const HeContext& ctx) {
  if (!arr.is_array()) throw ProtocolError("items must be an array");
  std::vector<WireItem> out;
  out.reserve(arr.size());
  for (const Json& it : arr) {
    if (!it.is_object()) throw ProtocolError("item must be an object");
    const Json& ct = Field(it, "ct");
    if (!ct.is_string()) throw ProtocolError("item ct must be a base64 string");
    WireItem w;
    Bytes raw;
    try {
      raw = Base64Decode(ct.get<std::string>());
    } catch (const MalformedError& e) {
      throw ProtocolError(std::string("bad base64 ciphertext: ") + e.what());
    }
    w.ct = DeserializeCiphertext(raw, ctx);
    w.scale = ParseScale(Field(it, "scale"));
    if (w.scale != w.ct.scale()) {
      throw ProtocolError("item scale disagrees with its ciphertext");
    }
    out.push_back(std::move(w));
  }
  return out;
}

inline std::uint64_t ParseId(const Json& v) {
  if (!v.is_number_unsigned()) throw ProtocolError("id must be an unsigned integer");
  return v.get<std::uint64_t>();
}

}  // namespace internal

inline Json RequestToJson(const OutsourceRequest& req, const HeContext& ctx) {
  Json j;
  j["id"] = req.id;
  j["kind"] = std::string(RequestKindName(req.kind));
  j["target_scale"] = ToDecimal(req.target_scale);
  if (req.report_convergence) {
    j["report_convergence"] = true;
    j["epsilon"] = internal::FormatEpsilon(req.epsilon);
  }
  j["items"] = internal::ItemsToJson(req.items, ctx);
  if (req.previous) j["previous"] = internal::ItemsToJson(*req.previous, ctx);
  return j;
}

inline OutsourceRequest RequestFromJson(const Json& j, const HeContext& ctx) {
  if (!j.is_object()) throw ProtocolError("request must be a JSON object");
  OutsourceRequest req;
  req.id = internal::ParseId(internal::Field(j, "id"));
  const Json& kind = internal::Field(j, "kind");
  if (kind == "reciprocal_batch") {
    req.kind = RequestKind::kReciprocalBatch;
  } else if (kind == "rescale_batch") {
    req.kind = RequestKind::kRescaleBatch;
  } else {
    throw ProtocolError("unknown request kind " + kind.dump());
  }
  req.target_scale = internal::ParseScale(internal::Field(j, "target_scale"));
  if (auto it = j.find("report_convergence"); it != j.end()) {
    if (!it->is_boolean()) throw ProtocolError("report_convergence must be boolean");
    req.report_convergence = it->get<bool>();
  }
  if (auto it = j.find("epsilon"); it != j.end()) {
    if (!it->is_string()) throw ProtocolError("epsilon must be a decimal string");
    try {
      std::size_t pos = 0;
      const std::string s = it->get<std::string>();
      req.epsilon = std::stod(s, &pos);
      if (pos != s.size() || !(req.epsilon >= 0)) throw std::invalid_argument(s);
    } catch (const std::exception&) {
      throw ProtocolError("bad epsilon");
    }
  }
  req.items = internal::ItemsFromJson(internal::Field(j, "items"), ctx);
  if (req.items.empty()) throw ProtocolError("request carries no items");
  if (auto it = j.find("previous"); it != j.end()) {
    req.previous = internal::ItemsFromJson(*it, ctx);
    if (req.previous->size() != req.items.size()) {
      throw ProtocolError("previous and items differ in length");
    }
  }
  return req;
}

inline Json ResponseToJson(const OutsourceResponse& resp, const HeContext& ctx) {
  Json j;
  j["id"] = resp.id;
  j["items"] = internal::ItemsToJson(resp.items, ctx);
  if (resp.converged) j["converged"] = *resp.converged;
  if (!resp.errors.empty()) {
    Json errs = Json::array();
    for (const ItemError& e : resp.errors) {
      errs.push_back({{"index", e.index}, {"code", std::string(ItemErrorName(e.code))}});
    }
    j["errors"] = errs;
  }
  return j;
}

inline OutsourceResponse ResponseFromJson(const Json& j, const HeContext& ctx) {
  if (!j.is_object()) throw ProtocolError("response must be a JSON object");
  OutsourceResponse resp;
  resp.id = internal::ParseId(internal::Field(j, "id"));
  resp.items = internal::ItemsFromJson(internal::Field(j, "items"), ctx);
  if (auto it = j.find("converged"); it != j.end()) {
    if (!it->is_boolean()) throw ProtocolError("converged must be boolean");
    resp.converged = it->get<bool>();
  }
  if (auto it = j.find("errors"); it != j.end()) {
    if (!it->is_array()) throw ProtocolError("errors must be an array");
    for (const Json& e : *it) {
      ItemError err;
      err.index = static_cast<std::size_t>(internal::ParseId(internal::Field(e, "index")));
      const Json& code = internal::Field(e, "code");
      if (code == "zero_divisor") {
        err.code = ItemErrorCode::kZeroDivisor;
      } else if (code == "corrupt") {
        err.code = ItemErrorCode::kCorrupt;
      } else {
        throw ProtocolError("unknown item error code " + code.dump());
      }
      if (err.index >= resp.items.size()) throw ProtocolError("error index out of range");
      resp.errors.push_back(err);
    }
  }
  return resp;
}

}  // namespace cryptgraph

#endif  // CRYPTGRAPH_OUTSOURCING_MESSAGES_HPP_
