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

#ifndef CRYPTGRAPH_COMMON_ERRORS_HPP_
#define CRYPTGRAPH_COMMON_ERRORS_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace cryptgraph {

enum class ErrorCode {
  kParameter,    // invalid HE parameters or configuration values
  kEncoding,     // plaintext outside the centered range (-t/2, t/2]
  kScale,        // scale mismatch or total-scale overflow
  kDepth,        // ciphertext degree budget exhausted
  kCorruption,   // decryption failed its consistency check
  kFingerprint,  // ciphertext/key bound to different parameters
  kMalformed,    // truncated or otherwise unparseable bytes
  kValidation,   // graph invariant violated
  kSyntax,       // edge-list text could not be parsed
  kGraphKind,    // operation applied to the wrong kind of graph
  kProtocol,     // outsourcing message violates the wire schema
  kTransport,    // connection refused, lost or closed
  kFrame,        // frame length exceeds the configured limit
  kIo,           // filesystem failure
  kPrivacy,      // a role attempted to touch key material it must not hold
};

inline std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParameter: return "parameter";
    case ErrorCode::kEncoding: return "encoding";
    case ErrorCode::kScale: return "scale";
    case ErrorCode::kDepth: return "depth";
    case ErrorCode::kCorruption: return "corruption";
    case ErrorCode::kFingerprint: return "fingerprint";
    case ErrorCode::kMalformed: return "malformed";
    case ErrorCode::kValidation: return "validation";
    case ErrorCode::kSyntax: return "syntax";
    case ErrorCode::kGraphKind: return "graph-kind";
    case ErrorCode::kProtocol: return "protocol";
    case ErrorCode::kTransport: return "transport";
    case ErrorCode::kFrame: return "frame";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kPrivacy: return "privacy";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + " error: " +
                           message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Distinct types so callers and tests can catch one failure class.
template <ErrorCode kCode>
class CodedError : public Error {
 public:
  explicit CodedError(const std::string& message) : Error(kCode, message) {}
};

using ParameterError = CodedError<ErrorCode::kParameter>;
using EncodingError = CodedError<ErrorCode::kEncoding>;
using ScaleError = CodedError<ErrorCode::kScale>;
using DepthError = CodedError<ErrorCode::kDepth>;
using CorruptionError = CodedError<ErrorCode::kCorruption>;
using FingerprintError = CodedError<ErrorCode::kFingerprint>;
using MalformedError = CodedError<ErrorCode::kMalformed>;
using ValidationError = CodedError<ErrorCode::kValidation>;
using SyntaxError = CodedError<ErrorCode::kSyntax>;
using GraphKindError = CodedError<ErrorCode::kGraphKind>;
using ProtocolError = CodedError<ErrorCode::kProtocol>;
using TransportError = CodedError<ErrorCode::kTransport>;
using FrameError = CodedError<ErrorCode::kFrame>;
using IoError = CodedError<ErrorCode::kIo>;
using PrivacyError = CodedError<ErrorCode::kPrivacy>;

}  // namespace cryptgraph

#endif  // CRYPTGRAPH_COMMON_ERRORS_HPP_
