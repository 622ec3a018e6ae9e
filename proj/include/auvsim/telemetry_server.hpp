// Copyright 2026 The auvsim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "auvsim/telemetry.hpp"

namespace auvsim {

struct ServerOptions {
  int thruster_count = 3;
  // A client whose unsent backlog would exceed this is disconnected.
  std::size_t max_pending_bytes = 1 << 20;
  std::size_t max_line_bytes = 4096;
  // SO_SNDBUF for accepted sockets; 0 keeps the OS default.
  int send_buffer_bytes = 0;
};

/// Fans frames out to TCP line clients and WebSocket clients, and feeds
/// their commands into a CommandQueue. All socket work runs on one
/// background io thread.
class TelemetryServer : public FrameSink {
 public:
  TelemetryServer(CommandQueue& queue, ServerOptions options = {});
  ~TelemetryServer() override;

  TelemetryServer(const TelemetryServer&) = delete;
  TelemetryServer& operator=(const TelemetryServer&) = delete;

  // Port 0 binds an ephemeral port. Returns the bound port.
  // Throw Error(kIo) if the address cannot be bound.
  std::uint16_t ListenTcp(const std::string& host, std::uint16_t port);
  std::uint16_t ListenWebSocket(const std::string& host, std::uint16_t port);

  void Start();
  // Flushes what it can for up to `grace_ms`, then closes everything.
  void Stop(int grace_ms = 500);

  void Publish(const TelemetryFrame& frame, const std::string& record) override;

  /// Sends a reply line to one connection; unknown ids are ignored.
  void Reply(std::uint64_t origin, std::string line);

  /// Blocks until everything posted before this call reached the sessions.
  void Sync();

  std::size_t client_count() const;
  std::uint64_t dropped_clients() const;

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

}  // namespace auvsim
