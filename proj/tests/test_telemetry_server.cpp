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

#include <gtest/gtest.h>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include <chrono>
#include <string>
#include <thread>
#include <vector>

#include "auvsim/param_file.hpp"
#include "auvsim/serve.hpp"
#include "auvsim/simulation.hpp"
#include "auvsim/telemetry.hpp"
#include "auvsim/telemetry_server.hpp"

namespace auvsim {
namespace {

namespace net = boost::asio;
namespace websocket = boost::beast::websocket;
using tcp = net::ip::tcp;

template <typename Pred>
bool WaitFor(Pred pred, int timeout_ms = 5000) {
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
  while (!pred()) {
    if (std::chrono::steady_clock::now() > deadline) return false;
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
  }
  return true;
}

class LineClient {
 public:
  explicit LineClient(std::uint16_t port, int rcvbuf = 0) : socket_(io_) {
    socket_.open(tcp::v4());
    if (rcvbuf > 0) socket_.set_option(net::socket_base::receive_buffer_size(rcvbuf));
    socket_.connect({net::ip::make_address("127.0.0.1"), port});
  }

  void Send(const std::string& line) { net::write(socket_, net::buffer(line)); }

  std::string ReadLine() {
    net::read_until(socket_, buf_, '\n');
    std::istream in(&buf_);
    std::string line;
    std::getline(in, line);
    return line;
  }

  // Lines until the server closes the connection.
  std::vector<std::string> ReadAll() {
    std::vector<std::string> lines;
    boost::system::error_code ec;
    while (true) {
      net::read_until(socket_, buf_, '\n', ec);
      if (ec) break;
      std::istream in(&buf_);
      std::string line;
      std::getline(in, line);
      lines.push_back(line);
    }
    return lines;
  }

 private:
  net::io_context io_;
  tcp::socket socket_;
  net::streambuf buf_;
};

class WsClient {
 public:
  explicit WsClient(std::uint16_t port) : ws_(io_) {
    ws_.next_layer().connect({net::ip::make_address("127.0.0.1"), port});
    ws_.handshake("127.0.0.1:" + std::to_string(port), "/");
  }
  void Send(const std::string& text) { ws_.write(net::buffer(text)); }
  std::optional<std::string> Read() {
    boost::beast::flat_buffer buf;
    boost::system::error_code ec;
    ws_.read(buf, ec);
    if (ec) return std::nullopt;
    return boost::beast::buffers_to_string(buf.data());
  }

 private:
  net::io_context io_;
  websocket::stream<tcp::socket> ws_;
};

struct Rig {
  Rig() : sim(DefaultVehicleConfig(), {}), server(queue), loop(sim, queue, 35.0) {
    tcp_port = server.ListenTcp("127.0.0.1", 0);
    ws_port = server.ListenWebSocket("127.0.0.1", 0);
    loop.AddSink(&server);
    loop.SetReply([this](std::uint64_t o, const std::string& l) { server.Reply(o, l); });
    server.Start();
  }
  Simulation sim;
  CommandQueue queue;
  TelemetryServer server;
  ServeLoop loop;
  std::uint16_t tcp_port = 0;
  std::uint16_t ws_port = 0;
};

class CaptureSink : public FrameSink {
 public:
  void Publish(const TelemetryFrame&, const std::string& record) override {
    records.push_back(record.substr(0, record.size() - 1));
  }
  std::vector<std::string> records;
};

TEST(TelemetryServer, ConcurrentSubscribersSeeIdenticalStreams) {
  Rig rig;
  CaptureSink local;
  rig.loop.AddSink(&local);
  LineClient a(rig.tcp_port), b(rig.tcp_port);
  WsClient w(rig.ws_port);
  ASSERT_TRUE(WaitFor([&] { return rig.server.client_count() == 3; }));
  std::this_thread::sleep_for(std::chrono::milliseconds(50));  // websocket handshake

  std::vector<std::string> ws_lines;
  std::thread ws_reader([&] {
    while (auto m = w.Read()) ws_lines.push_back(*m);
  });
  std::vector<std::string> got_a, got_b;
  std::thread ra([&] { got_a = a.ReadAll(); });
  std::thread rb([&] { got_b = b.ReadAll(); });
  for (int i = 0; i < 200; ++i) rig.loop.Tick();
  rig.server.Stop(2000);
  ra.join();
  rb.join();
  ws_reader.join();

  ASSERT_EQ(local.records.size(), static_cast<std::size_t>(rig.loop.frames()));
  EXPECT_EQ(got_a, local.records);
  EXPECT_EQ(got_b, local.records);
  EXPECT_EQ(ws_lines, local.records);
  EXPECT_EQ(rig.server.dropped_clients(), 0u);
}

TEST(TelemetryServer, CommandsOverTcpGetReplies) {
  Rig rig;
  LineClient c(rig.tcp_port);
  ASSERT_TRUE(WaitFor([&] { return rig.server.client_count() == 1; }));
  c.Send("SetManualThrust seq=1 thrust=0.3,0.3,0.3\n");
  c.Send("Engage seq=2 setpoint=120 kp=5 ki=0 kd=0\n");
  ASSERT_TRUE(WaitFor([&] { return rig.queue.size() == 2; }));
  rig.loop.Tick();
  // Frames and replies share the connection; pick the replies out.
  std::vector<std::string> replies;
  while (replies.size() < 2) {
    const std::string line = c.ReadLine();
    if (line.rfind("FRAME", 0) != 0) replies.push_back(line);
  }
  EXPECT_EQ(replies[0], "APPLIED seq=1 ts=0");
  EXPECT_EQ(replies[1], "APPLIED seq=2 ts=0");
  EXPECT_EQ(rig.sim.autopilot().mode, AutopilotMode::kHeadingLock);
  EXPECT_DOUBLE_EQ(rig.sim.autopilot().cruise_thrust, 0.3);
}

TEST(TelemetryServer, MalformedRecordLeavesQueueAlone) {
  Rig rig;
  LineClient c(rig.tcp_port);
  ASSERT_TRUE(WaitFor([&] { return rig.server.client_count() == 1; }));
  c.Send("Fly seq=1 now\n");
  EXPECT_EQ(c.ReadLine(), "ERROR seq=1 kind=MalformedCommand detail=unknown command 'Fly'");
  c.Send("SetCruiseThrust seq=1 thrust=1.5\n");
  EXPECT_EQ(c.ReadLine().rfind("ERROR seq=1 kind=RangeViolation", 0), 0u);
  c.Send("Disengage seq=2\n");
  c.Send("Disengage seq=2\n");
  EXPECT_EQ(c.ReadLine().rfind("ERROR seq=2 kind=StaleSequence", 0), 0u);
  rig.server.Sync();
  EXPECT_EQ(rig.queue.size(), 1u);
}

TEST(TelemetryServer, SequenceNumbersArePerConnection) {
  Rig rig;
  LineClient a(rig.tcp_port), b(rig.tcp_port);
  ASSERT_TRUE(WaitFor([&] { return rig.server.client_count() == 2; }));
  a.Send("Disengage seq=1\n");
  b.Send("Disengage seq=1\n");
  ASSERT_TRUE(WaitFor([&] { return rig.queue.size() == 2; }));
}

TEST(TelemetryServer, WebSocketCommands) {
  Rig rig;
  WsClient w(rig.ws_port);
  ASSERT_TRUE(WaitFor([&] { return rig.server.client_count() == 1; }));
  w.Send("SetGains seq=1 kp=7 ki=0 kd=0");
  ASSERT_TRUE(WaitFor([&] { return rig.queue.size() == 1; }));
  rig.loop.Tick();
  std::optional<std::string> reply;
  while ((reply = w.Read()) && reply->rfind("FRAME", 0) == 0) {
  }
  ASSERT_TRUE(reply);
  EXPECT_EQ(*reply, "APPLIED seq=1 ts=0");
  EXPECT_EQ(rig.sim.autopilot().gains.kp, 7);
}

TEST(TelemetryServer, SlowConsumerIsDroppedWithoutStallingOthers) {
  CommandQueue queue;
  ServerOptions opt;
  opt.max_pending_bytes = 32 * 1024;
  opt.send_buffer_bytes = 8 * 1024;
  TelemetryServer server(queue, opt);
  const auto port = server.ListenTcp("127.0.0.1", 0);
  server.Start();

  LineClient slow(port, 4096);  // never reads
  LineClient fast(port);
  ASSERT_TRUE(WaitFor([&] { return server.client_count() == 2; }));
  std::size_t fast_lines = 0;
  std::thread reader([&] { fast_lines = fast.ReadAll().size(); });

  TelemetryFrame f;
  f.voltage = 150;
  const int batches = 1000, per_batch = 20;
  for (int b = 0; b < batches; ++b) {
    for (int i = 0; i < per_batch; ++i) {
      f.timestamp_ms = b * per_batch + i;
      server.Publish(f, EncodeFrame(f));
    }
    server.Sync();
    std::this_thread::sleep_for(std::chrono::microseconds(200));
  }
  EXPECT_TRUE(WaitFor([&] { return server.dropped_clients() == 1; }));
  server.Stop(5000);
  reader.join();
  EXPECT_EQ(server.dropped_clients(), 1u);
  EXPECT_EQ(fast_lines, static_cast<std::size_t>(batches * per_batch));
}

TEST(TelemetryServer, BindFailureIsIoError) {
  CommandQueue queue;
  TelemetryServer first(queue);
  const auto port = first.ListenTcp("127.0.0.1", 0);
  TelemetryServer second(queue);
  try {
    second.ListenTcp("127.0.0.1", port);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIo);
  }
}

}  // namespace
}  // namespace auvsim
