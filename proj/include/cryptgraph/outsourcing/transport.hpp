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

// Byte streams and the length-prefixed framing that runs over them.
//
// A frame is a 4-byte big-endian payload length followed by the payload.
// Payloads above the frame limit (CRYPTGRAPH_MAX_FRAME, 64 MiB by default)
// are refused on both ends.

#ifndef CRYPTGRAPH_OUTSOURCING_TRANSPORT_HPP_
#define CRYPTGRAPH_OUTSOURCING_TRANSPORT_HPP_

#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <condition_variable>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cryptgraph/common/errors.hpp"

namespace cryptgraph {

inline constexpr std::size_t kDefaultMaxFrame = 64u << 20;

inline std::size_t MaxFrameFromEnv() {
  const char* v = std::getenv("CRYPTGRAPH_MAX_FRAME");
  if (v == nullptr || *v == '\0') return kDefaultMaxFrame;
  char* end = nullptr;
  const unsigned long long x = std::strtoull(v, &end, 10);
  if (*end != '\0' || x == 0 || x > 0xffffffffULL) {
    throw ParameterError(std::string("bad CRYPTGRAPH_MAX_FRAME '") + v + "'");
  }
  return static_cast<std::size_t>(x);
}

class ByteStream {
 public:
  virtual ~ByteStream() = default;
  virtual void WriteAll(std::span<const std::uint8_t> data) = 0;
  // Fills `out` completely. Returns false if the peer closed before the
  // first byte; throws TransportError if it closes part-way.
  virtual bool ReadExact(std::span<std::uint8_t> out) = 0;
  virtual void Close() = 0;
};

// ---------------------------------------------------------------------------
// In-process pipe.

namespace internal {

struct PipeState {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::uint8_t> buf[2];  // buf[k]: bytes travelling towards end k
  bool closed[2] = {false, false};  // end k has closed
};

class PipeEnd final : public ByteStream {
 public:
  PipeEnd(std::shared_ptr<PipeState> s, int side) : s_(std::move(s)), side_(side) {}
  ~PipeEnd() override { Close(); }

  void WriteAll(std::span<const std::uint8_t> data) override {
    std::lock_guard<std::mutex> lock(s_->mu);
    if (s_->closed[side_] || s_->closed[1 - side_]) {
      throw TransportError("pipe closed");
    }
    s_->buf[1 - side_].insert(s_->buf[1 - side_].end(), data.begin(), data.end());
    s_->cv.notify_all();
  }

  bool ReadExact(std::span<std::uint8_t> out) override {
    std::unique_lock<std::mutex> lock(s_->mu);
    auto& in = s_->buf[side_];
    std::size_t got = 0;
    while (got < out.size()) {
      s_->cv.wait(lock, [&] {
        return !in.empty() || s_->closed[1 - side_] || s_->closed[side_];
      });
      if (in.empty()) {
        if (got == 0) return false;
        throw TransportError("pipe closed mid-frame");
      }
      const std::size_t take = std::min(in.size(), out.size() - got);
      std::copy(in.begin(), in.begin() + take, out.begin() + got);
      in.erase(in.begin(), in.begin() + take);
      got += take;
    }
    return true;
  }

  void Close() override {
    std::lock_guard<std::mutex> lock(s_->mu);
    s_->closed[side_] = true;
    s_->cv.notify_all();
  }

 private:
  std::shared_ptr<PipeState> s_;
  int side_;
};

}  // namespace internal

inline std::pair<std::unique_ptr<ByteStream>, std::unique_ptr<ByteStream>> MakePipe() {
  auto s = std::make_shared<internal::PipeState>();
  return {std::make_unique<internal::PipeEnd>(s, 0),
          std::make_unique<internal::PipeEnd>(s, 1)};
}

// ---------------------------------------------------------------------------
// TCP.

class TcpStream final : public ByteStream {
 public:
  explicit TcpStream(int fd) : fd_(fd) {
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  }
  ~TcpStream() override { Close(); }
  TcpStream(const TcpStream&) = delete;
  TcpStream& operator=(const TcpStream&) = delete;

  void WriteAll(std::span<const std::uint8_t> data) override {
    std::size_t sent = 0;
    while (sent < data.size()) {
      const ssize_t k = ::send(fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
      if (k < 0 && errno == EINTR) continue;
      if (k <= 0) throw TransportError(std::string("send failed: ") + std::strerror(errno));
      sent += static_cast<std::size_t>(k);
    }
  }

  bool ReadExact(std::span<std::uint8_t> out) override {
    std::size_t got = 0;
    while (got < out.size()) {
      const ssize_t k = ::recv(fd_, out.data() + got, out.size() - got, 0);
      if (k < 0 && errno == EINTR) continue;
      if (k < 0) throw TransportError(std::string("recv failed: ") + std::strerror(errno));
      if (k == 0) {
        if (got == 0) return false;
        throw TransportError("connection closed mid-frame");
      }
      got += static_cast<std::size_t>(k);
    }
    return true;
  }

  void Close() override {
    if (fd_ >= 0) {
      ::shutdown(fd_, SHUT_RDWR);
      ::close(fd_);
      fd_ = -1;
    }
  }

 private:
  int fd_;
};

struct HostPort {
  std::string host;
  std::uint16_t port = 0;
};

inline HostPort ParseHostPort(std::string_view addr) {
  const auto colon = addr.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw ParameterError("address must look like host:port, got '" + std::string(addr) + "'");
  }
  HostPort hp;
  hp.host = std::string(addr.substr(0, colon));
  const std::string port(addr.substr(colon + 1));
  char* end = nullptr;
  const unsigned long p = std::strtoul(port.c_str(), &end, 10);
  if (port.empty() || *end != '\0' || p > 65535) {
    throw ParameterError("bad port in '" + std::string(addr) + "'");
  }
  hp.port = static_cast<std::uint16_t>(p);
  return hp;
}

namespace internal {

struct AddrInfoDeleter {
  void operator()(addrinfo* p) const { ::freeaddrinfo(p); }
};

inline std::unique_ptr<addrinfo, AddrInfoDeleter> Resolve(const HostPort& hp, bool passive) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  const std::string port = std::to_string(hp.port);
  const int rc = ::getaddrinfo(hp.host.c_str(), port.c_str(), &hints, &res);
  if (rc != 0) {
    throw TransportError("cannot resolve '" + hp.host + "': " + ::gai_strerror(rc));
  }
  return std::unique_ptr<addrinfo, AddrInfoDeleter>(res);
}

}  // namespace internal

class TcpListener {
 public:
  explicit TcpListener(const HostPort& hp) {
    auto res = internal::Resolve(hp, /*passive=*/true);
    for (addrinfo* ai = res.get(); ai != nullptr; ai = ai->ai_next) {
      const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
      if (fd < 0) continue;
      int one = 1;
      ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
      if (::bind(fd, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(fd, 4) == 0) {
        fd_ = fd;
        break;
      }
      ::close(fd);
    }
    if (fd_ < 0) {
      throw TransportError("cannot listen on " + hp.host + ":" + std::to_string(hp.port) +
                           ": " + std::strerror(errno));
    }
    sockaddr_storage ss{};
    socklen_t len = sizeof(ss);
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&ss), &len);
    port_ = ntohs(ss.ss_family == AF_INET6
                      ? reinterpret_cast<sockaddr_in6*>(&ss)->sin6_port
                      : reinterpret_cast<sockaddr_in*>(&ss)->sin_port);
  }
  ~TcpListener() { Close(); }
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::uint16_t port() const { return port_; }

  std::unique_ptr<ByteStream> Accept() {
    for (;;) {
      const int fd = ::accept(fd_, nullptr, nullptr);
      if (fd >= 0) return std::make_unique<TcpStream>(fd);
      if (errno != EINTR) {
        throw TransportError(std::string("accept failed: ") + std::strerror(errno));
      }
    }
  }

  void Close() {
    if (fd_ >= 0) {
      ::shutdown(fd_, SHUT_RDWR);
      ::close(fd_);
      fd_ = -1;
    }
  }

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

inline std::unique_ptr<ByteStream> TcpConnect(const HostPort& hp) {
  auto res = internal::Resolve(hp, /*passive=*/false);
  int err = 0;
  for (addrinfo* ai = res.get(); ai != nullptr; ai = ai->ai_next) {
    const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
      return std::make_unique<TcpStream>(fd);
    }
    err = errno;
    ::close(fd);
  }
  throw TransportError("cannot connect to " + hp.host + ":" + std::to_string(hp.port) +
                       ": " + std::strerror(err));
}

// ---------------------------------------------------------------------------
// Framing.

inline std::vector<std::uint8_t> EncodeFrame(std::string_view payload,
                                             std::size_t max_frame = kDefaultMaxFrame) {
  if (payload.size() > max_frame) {
    throw FrameError("frame of " + std::to_string(payload.size()) +
                     " bytes exceeds the limit of " + std::to_string(max_frame));
  }
  std::vector<std::uint8_t> out(4 + payload.size());
  const auto n = static_cast<std::uint32_t>(payload.size());
  out[0] = static_cast<std::uint8_t>(n >> 24);
  out[1] = static_cast<std::uint8_t>(n >> 16);
  out[2] = static_cast<std::uint8_t>(n >> 8);
  out[3] = static_cast<std::uint8_t>(n);
  std::memcpy(out.data() + 4, payload.data(), payload.size());
  return out;
}

inline void WriteFrame(ByteStream& s, std::string_view payload,
                       std::size_t max_frame = kDefaultMaxFrame) {
  s.WriteAll(EncodeFrame(payload, max_frame));
}

// nullopt on a clean end of stream between frames.
inline std::optional<std::string> ReadFrame(ByteStream& s,
                                            std::size_t max_frame = kDefaultMaxFrame) {
  std::uint8_t hdr[4];
  if (!s.ReadExact(hdr)) return std::nullopt;
  const std::uint32_t n = (std::uint32_t{hdr[0]} << 24) | (std::uint32_t{hdr[1]} << 16) |
                          (std::uint32_t{hdr[2]} << 8) | std::uint32_t{hdr[3]};
  if (n > max_frame) {
    s.Close();
    throw FrameError("incoming frame of " + std::to_string(n) +
                     " bytes exceeds the limit of " + std::to_string(max_frame));
  }
  std::string payload(n, '\0');
  if (n > 0 && !s.ReadExact(std::span<std::uint8_t>(
                   reinterpret_cast<std::uint8_t*>(payload.data()), n))) {
    throw TransportError("stream ended inside a frame");
  }
  return payload;
}

}  // namespace cryptgraph

#endif  // CRYPTGRAPH_OUTSOURCING_TRANSPORT_HPP_
