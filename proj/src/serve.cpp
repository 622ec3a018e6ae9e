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

#include "auvsim/serve.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <sstream>
#include <thread>

#include "auvsim/error.hpp"
#include "auvsim/number_format.hpp"

namespace auvsim {
namespace {

constexpr std::string_view kLogMagic = "# auvsim-commands";

std::string HeaderValue(const std::string& header, const std::string& key) {
  std::istringstream in(header);
  std::string tok;
  while (in >> tok) {
    if (tok.rfind(key + "=", 0) == 0) return tok.substr(key.size() + 1);
  }
  throw Error(ErrorKind::kMalformedCommand, "command log header lacks '" + key + "'");
}

double HeaderDouble(const std::string& header, const std::string& key) {
  const auto v = ParseDouble(HeaderValue(header, key));
  if (!v) throw Error(ErrorKind::kMalformedCommand, "bad '" + key + "' in log header");
  return *v;
}

}  // namespace

ServeLoop::ServeLoop(Simulation& sim, CommandQueue& queue, double rate_hz)
    : sim_(sim), queue_(queue), rate_hz_(rate_hz), publisher_(sim, rate_hz) {}

void ServeLoop::SetCommandLog(std::ostream* log) {
  log_ = log;
  if (!log_) return;
  const auto& o = sim_.options();
  *log_ << kLogMagic << " params=" << sim_.config().source_hash
        << " rate=" << FormatDouble(rate_hz_) << " dt=" << FormatDouble(o.dt)
        << " period=" << FormatDouble(o.control_period)
        << " heading=" << FormatDouble(o.initial_heading_deg)
        << " disturbance=" << FormatDouble(o.disturbance.mz) << '\n';
}

void ServeLoop::Tick() {
  const auto ts = static_cast<std::int64_t>(std::llround(sim_.time() * 1000.0));
  for (auto& entry : queue_.Drain()) {
    std::string reply;
    try {
      ApplyCommand(sim_, entry.command);
      reply = EncodeApplied(entry.command.seq, ts);
      ++applied_;
      if (log_) *log_ << sim_.ticks() << ' ' << EncodeCommand(entry.command);
    } catch (const Error& e) {
      // Rejected commands leave the vehicle untouched, so they stay out of the log.
      reply = EncodeErrorReply(entry.command.seq, e.kind(), e.what());
      ++rejected_;
    }
    if (reply_) reply_(entry.origin, reply);
  }
  publisher_.RunTick();
}

void ServeLoop::Run(const ServeLimits& limits, const std::atomic<bool>* stop) {
  const double period = sim_.options().control_period;
  std::optional<std::int64_t> total;
  if (limits.duration) {
    total = static_cast<std::int64_t>(std::ceil(*limits.duration / period - 1e-9));
  }
  const auto start = std::chrono::steady_clock::now();
  const std::int64_t first = sim_.ticks();
  while (!(stop && stop->load())) {
    if (total && sim_.ticks() - first >= *total) break;
    Tick();
    if (limits.realtime) {
      const auto due = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                   std::chrono::duration<double>(
                                       static_cast<double>(sim_.ticks() - first) * period));
      std::this_thread::sleep_until(due);
    }
  }
}

void ServeLoop::FinishLog() {
  if (log_) {
    *log_ << "END ticks=" << sim_.ticks() << '\n';
    log_->flush();
  }
}

std::int64_t ReplayCommandLog(std::istream& log, const VehicleConfig& config,
                              const std::vector<FrameSink*>& sinks) {
  std::string header;
  if (!std::getline(log, header) || header.rfind(kLogMagic, 0) != 0) {
    throw Error(ErrorKind::kMalformedCommand, "not a command log");
  }
  if (HeaderValue(header, "params") != config.source_hash) {
    throw Error(ErrorKind::kInvalidConfig,
                "command log was recorded with different vehicle parameters");
  }
  SimulationOptions options;
  options.dt = HeaderDouble(header, "dt");
  options.control_period = HeaderDouble(header, "period");
  options.initial_heading_deg = HeaderDouble(header, "heading");
  options.disturbance.mz = HeaderDouble(header, "disturbance");
  const double rate = HeaderDouble(header, "rate");

  std::map<std::int64_t, std::vector<Command>> by_tick;
  std::optional<std::int64_t> end;
  const int n = static_cast<int>(config.allocation.thruster_count());
  std::string line;
  while (std::getline(log, line)) {
    if (line.empty()) continue;
    if (line.rfind("END ticks=", 0) == 0) {
      end = ParseInt(std::string_view(line).substr(10));
      if (!end) throw Error(ErrorKind::kMalformedCommand, "bad END line");
      break;
    }
    const auto space = line.find(' ');
    const auto tick = ParseInt(std::string_view(line).substr(0, space));
    if (!tick || space == std::string::npos) {
      throw Error(ErrorKind::kMalformedCommand, "bad log line: " + line);
    }
    by_tick[*tick].push_back(ParseCommand(std::string_view(line).substr(space + 1), n));
  }
  if (!end) throw Error(ErrorKind::kMalformedCommand, "command log is truncated");

  Simulation sim(config, options);
  TelemetryPublisher publisher(sim, rate);
  for (FrameSink* s : sinks) publisher.AddSink(s);
  while (sim.ticks() < *end) {
    if (auto it = by_tick.find(sim.ticks()); it != by_tick.end()) {
      for (const Command& cmd : it->second) ApplyCommand(sim, cmd);
    }
    publisher.RunTick();
  }
  return publisher.frames_published();
}

}  // namespace auvsim
