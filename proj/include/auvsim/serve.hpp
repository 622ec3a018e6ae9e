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
#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "auvsim/simulation.hpp"
#include "auvsim/telemetry.hpp"

namespace auvsim {

struct ServeLimits {
  bool realtime = false;
  std::optional<double> duration;  // simulated seconds
};

/// The fixed-rate scheduler behind `serve`: each control tick drains the
/// command queue, applies commands in arrival order, then advances the
/// simulation while publishing frames.
class ServeLoop {
 public:
  using ReplyFn = std::function<void(std::uint64_t origin, const std::string& line)>;

  ServeLoop(Simulation& sim, CommandQueue& queue, double rate_hz);

  void AddSink(FrameSink* sink) { publisher_.AddSink(sink); }
  void SetReply(ReplyFn reply) { reply_ = std::move(reply); }
  // Every applied command is logged with its tick so a run can be replayed.
  void SetCommandLog(std::ostream* log);

  void Tick();
  // Runs until the duration elapses or *stop becomes true.
  void Run(const ServeLimits& limits, const std::atomic<bool>* stop);
  void FinishLog();

  std::int64_t ticks() const { return sim_.ticks(); }
  std::int64_t applied() const { return applied_; }
  std::int64_t rejected() const { return rejected_; }
  std::int64_t frames() const { return publisher_.frames_published(); }

 private:
  Simulation& sim_;
  CommandQueue& queue_;
  double rate_hz_;
  TelemetryPublisher publisher_;
  ReplyFn reply_;
  std::ostream* log_ = nullptr;
  std::int64_t applied_ = 0;
  std::int64_t rejected_ = 0;
};

/// Re-runs a command log against a fresh simulation built from `config`,
/// publishing to `sinks`. Throws Error(kInvalidConfig) if the log was
/// recorded with different parameters, Error(kMalformedCommand) if it is
/// unreadable.
std::int64_t ReplayCommandLog(std::istream& log, const VehicleConfig& config,
                              const std::vector<FrameSink*>& sinks);

}  // namespace auvsim
