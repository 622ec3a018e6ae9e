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

#include "auvsim/telemetry_server.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include <chrono>
#include <deque>
#include <future>
#include <istream>
#include <map>
#include <optional>
#include <thread>
#include <vector>

#include "auvsim/error.hpp"

namespace auvsim {

namespace net = boost::asio;
namespace websocket = boost::beast::websocket;
using tcp = net::ip::tcp;
using Message = std::shared_ptr<const std::string>;

namespace {

class Session;

}  // namespace

struct TelemetryServer::Impl {
  Impl(CommandQueue& q, ServerOptions o) : queue(q), options(o) {}

  void Accept(tcp::acceptor& acceptor, bool websocket);
  std::uint16_t Listen(const std::string& host, std::uint16_t port, bool websocket);

  CommandQueue& queue;
  ServerOptions options;
  net::io_context io;
  std::optional<net::executor_work_guard<net::io_context::executor_type>> work;
  std::thread thread;
  std::vector<std::unique_ptr<tcp::acceptor>> acceptors;
  std::vector<bool> acceptor_is_ws;
  // Touched only on the io thread.
  std::map<std::uint64_t, std::shared_ptr<Session>> sessions;
  std::uint64_t next_id = 1;
  std::atomic<std::size_t> clients{0};
  std::atomic<std::uint64_t> dropped{0};
  bool running = false;
};

namespace {

class Session : public std::enable_shared_from_this<Session> {
 public:
  Session(TelemetryServer::Impl& server, std::uint64_t id)
      : server_(server), id_(id), decoder_(server.options.thruster_count) {}
  virtual ~Session() = default;

  virtual void Begin() = 0;

  void Deliver(const Message& msg) {
    if (closed_ || closing_) return;
    if (pending_ + msg->size() > server_.options.max_pending_bytes) {
      ++server_.dropped;
      Close();
      return;
    }
    pending_ += msg->size();
    queue_.push_back(msg);
    if (!writing_ && ready_) {
      writing_ = true;
      WriteFront();
    }
  }

  void Shutdown() {
    closing_ = true;
    if (!writing_) Close();
  }

  void Close() {
    if (closed_) return;
    closed_ = true;
    CloseTransport();
    auto self = shared_from_this();
    if (server_.sessions.erase(id_)) --server_.clients;
  }

 protected:
  virtual void CloseTransport() = 0;
  virtual void WriteFront() = 0;

  void MarkReady() {
    ready_ = true;
    if (!queue_.empty() && !writing_) {
      writing_ = true;
      WriteFront();
    }
  }

  void OnWritten(const boost::system::error_code& ec) {
    pending_ -= queue_.front()->size();
    queue_.pop_front();
    if (ec) {
      Close();
      return;
    }
    if (!queue_.empty()) {
      WriteFront();
      return;
    }
    writing_ = false;
    if (closing_) Close();
  }

  void HandleLine(std::string_view line) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) {
      line.remove_suffix(1);
    }
    if (line.empty()) return;
    try {
      server_.queue.Push(id_, decoder_.Decode(line));
    } catch (const Error& e) {
      Deliver(std::make_shared<const std::string>(
          EncodeErrorReply(PeekSeq(line), e.kind(), e.what())));
    }
  }

  const std::string& Front() const { return *queue_.front(); }

  TelemetryServer::Impl& server_;
  std::uint64_t id_;
  bool closed_ = false;

 private:
  CommandDecoder decoder_;
  std::deque<Message> queue_;
  std::size_t pending_ = 0;
  bool writing_ = false;
  bool closing_ = false;
  bool ready_ = false;
};

class TcpSession : public Session {
 public:
  TcpSession(TelemetryServer::Impl& server, std::uint64_t id, tcp::socket socket)
      : Session(server, id),
        socket_(std::move(socket)),
        buffer_(server.options.max_line_bytes) {}

  void Begin() override {
    MarkReady();
    Read();
  }

 private:
  void Read() {
    net::async_read_until(
        socket_, buffer_, '\n',
        [self = std::static_pointer_cast<TcpSession>(shared_from_this())](
            const boost::system::error_code& ec, std::size_t) {
          if (ec) {
            self->Close();
            return;
          }
          std::istream in(&self->buffer_);
          std::string line;
          std::getline(in, line);
          self->HandleLine(line);
          if (!self->closed_) self->Read();
        });
  }

  void WriteFront() override {
    net::async_write(
        socket_, net::buffer(Front()),
        [self = std::static_pointer_cast<TcpSession>(shared_from_this())](
            const boost::system::error_code& ec, std::size_t) { self->OnWritten(ec); });
  }

  void CloseTransport() override {
    boost::system::error_code ignored;
    socket_.shutdown(tcp::socket::shutdown_both, ignored);
    socket_.close(ignored);
  }

  tcp::socket socket_;
  net::streambuf buffer_;
};

class WebSocketSession : public Session {
 public:
  WebSocketSession(TelemetryServer::Impl& server, std::uint64_t id, tcp::socket socket)
      : Session(server, id), ws_(std::move(socket)) {}

  void Begin() override {
    ws_.text(true);
    ws_.read_message_max(server_.options.max_line_bytes);
    ws_.async_accept(
        [self = std::static_pointer_cast<WebSocketSession>(shared_from_this())](
            const boost::system::error_code& ec) {
          if (ec) {
            self->Close();
            return;
          }
          self->MarkReady();
          self->Read();
        });
  }

 private:
  void Read() {
    ws_.async_read(
        buffer_,
        [self = std::static_pointer_cast<WebSocketSession>(shared_from_this())](
            const boost::system::error_code& ec, std::size_t) {
          if (ec) {
            self->Close();
            return;
          }
          const std::string text = boost::beast::buffers_to_string(self->buffer_.data());
          self->buffer_.consume(self->buffer_.size());
          std::string_view rest = text;
          while (!rest.empty() && !self->closed_) {
            const auto pos = rest.find('\n');
            self->HandleLine(rest.substr(0, pos));
            rest = pos == std::string_view::npos ? std::string_view{} : rest.substr(pos + 1);
          }
          if (!self->closed_) self->Read();
        });
  }

  // One record per message, without the line terminator.
  void WriteFront() override {
    const std::string& msg = Front();
    std::size_t n = msg.size();
    if (n > 0 && msg[n - 1] == '\n') --n;
    ws_.async_write(
        net::buffer(msg.data(), n),
        [self = std::static_pointer_cast<WebSocketSession>(shared_from_this())](
            const boost::system::error_code& ec, std::size_t) { self->OnWritten(ec); });
  }

  void CloseTransport() override {
    boost::system::error_code ignored;
    auto& sock = boost::beast::get_lowest_layer(ws_);
    sock.shutdown(tcp::socket::shutdown_both, ignored);
    sock.close(ignored);
  }

  websocket::stream<tcp::socket> ws_;
  boost::beast::flat_buffer buffer_;
};

}  // namespace

void TelemetryServer::Impl::Accept(tcp::acceptor& acceptor, bool ws) {
  acceptor.async_accept([this, &acceptor, ws](const boost::system::error_code& ec,
                                              tcp::socket socket) {
    if (!ec) {
      if (options.send_buffer_bytes > 0) {
        boost::system::error_code ignored;
        socket.set_option(net::socket_base::send_buffer_size(options.send_buffer_bytes),
                          ignored);
      }
      const std::uint64_t id = next_id++;
      std::shared_ptr<Session> s;
      if (ws) {
        s = std::make_shared<WebSocketSession>(*this, id, std::move(socket));
      } else {
        s = std::make_shared<TcpSession>(*this, id, std::move(socket));
      }
      sessions.emplace(id, s);
      ++clients;
      s->Begin();
    }
    if (acceptor.is_open()) Accept(acceptor, ws);
  });
}

std::uint16_t TelemetryServer::Impl::Listen(const std::string& host, std::uint16_t port,
                                            bool ws) {
  if (running) throw Error(ErrorKind::kInvalidConfig, "listen before starting the server");
  try {
    tcp::resolver resolver(io);
    const auto results = resolver.resolve(host, std::to_string(port));
    if (results.empty()) throw Error(ErrorKind::kIo, "cannot resolve " + host);
    auto acceptor = std::make_unique<tcp::acceptor>(io);
    const tcp::endpoint ep = results.begin()->endpoint();
    acceptor->open(ep.protocol());
    acceptor->set_option(tcp::acceptor::reuse_address(true));
    acceptor->bind(ep);
    acceptor->listen();
    const auto bound = acceptor->local_endpoint().port();
    acceptors.push_back(std::move(acceptor));
    acceptor_is_ws.push_back(ws);
    return bound;
  } catch (const boost::system::system_error& e) {
    throw Error(ErrorKind::kIo, host + ":" + std::to_string(port) + ": " + e.what());
  }
}

TelemetryServer::TelemetryServer(CommandQueue& queue, ServerOptions options)
    : impl_(std::make_unique<Impl>(queue, options)) {}

TelemetryServer::~TelemetryServer() { Stop(0); }

std::uint16_t TelemetryServer::ListenTcp(const std::string& host, std::uint16_t port) {
  return impl_->Listen(host, port, false);
}

std::uint16_t TelemetryServer::ListenWebSocket(const std::string& host,
                                               std::uint16_t port) {
  return impl_->Listen(host, port, true);
}

void TelemetryServer::Start() {
  if (impl_->running) return;
  impl_->running = true;
  impl_->work.emplace(impl_->io.get_executor());
  for (std::size_t i = 0; i < impl_->acceptors.size(); ++i) {
    impl_->Accept(*impl_->acceptors[i], impl_->acceptor_is_ws[i]);
  }
  impl_->thread = std::thread([this] { impl_->io.run(); });
}

void TelemetryServer::Stop(int grace_ms) {
  if (!impl_->running) return;
  impl_->running = false;
  Impl* impl = impl_.get();
  net::post(impl->io, [impl] {
    boost::system::error_code ignored;
    for (auto& a : impl->acceptors) a->close(ignored);
    std::vector<std::shared_ptr<Session>> all;
    for (auto& [id, s] : impl->sessions) all.push_back(s);
    for (auto& s : all) s->Shutdown();
  });
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(grace_ms);
  while (impl->clients.load() > 0 && std::chrono::steady_clock::now() < deadline) {
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
  }
  impl->work.reset();
  impl->io.stop();
  impl->thread.join();
  impl->sessions.clear();
  impl->clients = 0;
}

void TelemetryServer::Publish(const TelemetryFrame&, const std::string& record) {
  if (!impl_->running) return;
  auto msg = std::make_shared<const std::string>(record);
  Impl* impl = impl_.get();
  net::post(impl->io, [impl, msg] {
    std::vector<std::shared_ptr<Session>> all;
    all.reserve(impl->sessions.size());
    for (auto& [id, s] : impl->sessions) all.push_back(s);
    for (auto& s : all) s->Deliver(msg);
  });
}

void TelemetryServer::Reply(std::uint64_t origin, std::string line) {
  if (!impl_->running) return;
  auto msg = std::make_shared<const std::string>(std::move(line));
  Impl* impl = impl_.get();
  net::post(impl->io, [impl, origin, msg] {
    const auto it = impl->sessions.find(origin);
    if (it != impl->sessions.end()) {
      auto s = it->second;
      s->Deliver(msg);
    }
  });
}

void TelemetryServer::Sync() {
  if (!impl_->running) return;
  std::promise<void> done;
  auto fut = done.get_future();
  net::post(impl_->io, [&done] { done.set_value(); });
  fut.wait();
}

std::size_t TelemetryServer::client_count() const { return impl_->clients.load(); }

std::uint64_t TelemetryServer::dropped_clients() const { return impl_->dropped.load(); }

}  // namespace auvsim
