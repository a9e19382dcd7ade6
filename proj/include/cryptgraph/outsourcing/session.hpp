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

// Runs a ClientHandler on a background thread and hands back the cloud's
// Channel. Used by tests, the bench command and single-process runs.

#ifndef CRYPTGRAPH_OUTSOURCING_SESSION_HPP_
#define CRYPTGRAPH_OUTSOURCING_SESSION_HPP_

#include <exception>
#include <memory>
#include <optional>
#include <thread>
#include <utility>

#include "cryptgraph/outsourcing/channel.hpp"
#include "cryptgraph/outsourcing/client.hpp"

namespace cryptgraph {

enum class TransportKind { kInProcess, kTcp };

class ClientSession {
 public:
  // For kTcp the client listens on an ephemeral loopback port and the cloud
  // connects to it, the same direction the CLI uses.
  ClientSession(ClientHandler& handler, TransportKind transport,
                std::size_t max_frame = kDefaultMaxFrame)
      : handler_(handler) {
    std::unique_ptr<ByteStream> cloud_end;
    if (transport == TransportKind::kInProcess) {
      auto [a, b] = MakePipe();
      client_end_ = std::move(a);
      cloud_end = std::move(b);
      thread_ = std::thread([this, max_frame] { Run(*client_end_, max_frame); });
    } else {
      auto listener = std::make_shared<TcpListener>(HostPort{"127.0.0.1", 0});
      const std::uint16_t port = listener->port();
      thread_ = std::thread([this, listener, max_frame] {
        try {
          client_end_ = listener->Accept();
        } catch (...) {
          error_ = std::current_exception();
          return;
        }
        listener->Close();
        Run(*client_end_, max_frame);
      });
      try {
        cloud_end = TcpConnect(HostPort{"127.0.0.1", port});
      } catch (...) {
        listener->Close();
        thread_.join();
        throw;
      }
    }
    channel_.emplace(std::move(cloud_end), handler.context(), max_frame);
  }

  ClientSession(const ClientSession&) = delete;
  ClientSession& operator=(const ClientSession&) = delete;

  ~ClientSession() {
    try {
      Finish();
    } catch (...) {
    }
  }

  Channel& channel() { return *channel_; }

  // Closes the cloud side, waits for the client thread and rethrows
  // anything it failed with.
  void Finish() {
    if (!thread_.joinable()) return;
    channel_->Close();
    thread_.join();
    if (error_) std::rethrow_exception(std::exchange(error_, nullptr));
  }

 private:
  void Run(ByteStream& stream, std::size_t max_frame) {
    try {
      Serve(stream, handler_, max_frame);
    } catch (...) {
      error_ = std::current_exception();
    }
  }

  ClientHandler& handler_;
  std::unique_ptr<ByteStream> client_end_;
  std::optional<Channel> channel_;
  std::thread thread_;
  std::exception_ptr error_;
};

}  // namespace cryptgraph

#endif  // CRYPTGRAPH_OUTSOURCING_SESSION_HPP_
