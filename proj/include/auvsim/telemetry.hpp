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

#include <array>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "auvsim/autopilot.hpp"
#include "auvsim/error.hpp"
#include "auvsim/simulation.hpp"

namespace auvsim {

/// One sample of the vehicle channels streamed to stations and logged.
struct TelemetryFrame {
  std::int64_t timestamp_ms = 0;
  double roll = 0.0;   // deg, [-180, 180)
  double pitch = 0.0;  // deg, [-180, 180)
  double yaw = 0.0;    // deg, [0, 360)
  double depth = 0.0;  // m
  double altitude = 0.0;
  double obstacle_range = -1.0;  // m, -1 = nothing detected
  std::array<int, 3> thruster_rpm{};
  std::array<bool, 8> leak{};
  double voltage = 0.0;

  friend bool operator==(const TelemetryFrame&, const TelemetryFrame&) = default;
};

/// Frame record: `FRAME ts=.. roll=.. pitch=.. yaw=.. depth=.. altitude=..
/// obstacle=.. rpm=a,b,c leak=8 x 0/1 voltage=..` plus '\n'. Doubles use
/// the shortest round-trip form.
std::string EncodeFrame(const TelemetryFrame& frame);

/// Throws Error(kMalformedCommand) on syntax errors and
/// Error(kRangeViolation) when a channel breaks its range.
TelemetryFrame DecodeFrame(std::string_view line);

std::string FrameCsvHeader();
std::string EncodeFrameCsv(const TelemetryFrame& frame);

/// Samples the simulated channels. Depth is pose z, altitude is measured
/// from the configured lakebed, obstacle/leak are quiet and voltage is the
/// configured supply.
TelemetryFrame MakeFrame(const SimState& state,
                         const std::vector<ThrusterState>& thrusters,
                         const EnvironmentParams& environment,
                         std::int64_t timestamp_ms);

// Operator commands. Every record starts with the variant name, then seq.
struct SetManualThrustCmd {
  std::vector<double> thrust;
  friend bool operator==(const SetManualThrustCmd&, const SetManualThrustCmd&) = default;
};
struct EngageCmd {
  double setpoint = 0.0;
  PidGains gains;
  friend bool operator==(const EngageCmd&, const EngageCmd&) = default;
};
struct DisengageCmd {
  friend bool operator==(const DisengageCmd&, const DisengageCmd&) = default;
};
struct SetGainsCmd {
  PidGains gains;
  friend bool operator==(const SetGainsCmd&, const SetGainsCmd&) = default;
};
struct SetCruiseThrustCmd {
  double thrust = 0.0;
  friend bool operator==(const SetCruiseThrustCmd&, const SetCruiseThrustCmd&) = default;
};

using CommandBody = std::variant<SetManualThrustCmd, EngageCmd, DisengageCmd,
                                 SetGainsCmd, SetCruiseThrustCmd>;

struct Command {
  std::int64_t seq = 0;
  CommandBody body;
  friend bool operator==(const Command&, const Command&) = default;
};

std::string EncodeCommand(const Command& command);

/// Syntax and range validation of one record, without sequence tracking.
/// Throws Error(kMalformedCommand) or Error(kRangeViolation).
Command ParseCommand(std::string_view line, int thruster_count);

/// Per-connection decoder that also enforces strictly increasing seq.
class CommandDecoder {
 public:
  explicit CommandDecoder(int thruster_count = 3)
      : thruster_count_(thruster_count) {}

  /// Throws Error(kMalformedCommand), Error(kStaleSequence) or
  /// Error(kRangeViolation). Only accepted commands advance the sequence.
  Command Decode(std::string_view line);

  std::optional<std::int64_t> last_seq() const { return last_seq_; }

 private:
  int thruster_count_;
  std::optional<std::int64_t> last_seq_;
};

/// Applies a decoded command to the simulation (between ticks only).
void ApplyCommand(Simulation& sim, const Command& command);

// Replies sent back on the originating connection.
std::string EncodeApplied(std::int64_t seq, std::int64_t timestamp_ms);
std::string EncodeErrorReply(std::optional<std::int64_t> seq, ErrorKind kind,
                             std::string_view detail);

/// Best-effort seq extraction for error replies on records that failed to
/// parse.
std::optional<std::int64_t> PeekSeq(std::string_view line);

/// Validated commands from every connection, in arrival order.
class CommandQueue {
 public:
  struct Entry {
    std::uint64_t origin = 0;  // connection id
    Command command;
  };

  void Push(std::uint64_t origin, Command command);
  std::vector<Entry> Drain();
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::deque<Entry> entries_;
};

struct StreamConfig {
  double rate_hz = 35.0;
  std::string host = "127.0.0.1";
  std::uint16_t port = 5760;

  void Validate() const;
};

class FrameSink {
 public:
  virtual ~FrameSink() = default;
  /// `record` is EncodeFrame(frame).
  virtual void Publish(const TelemetryFrame& frame, const std::string& record) = 0;
};

/// Appends one CSV row per frame.
class CsvFrameLog : public FrameSink {
 public:
  explicit CsvFrameLog(std::ostream& out);
  void Publish(const TelemetryFrame& frame, const std::string& record) override;
  std::int64_t rows() const { return rows_; }

 private:
  std::ostream& out_;
  std::int64_t rows_ = 0;
};

/// Drives a simulation one control tick at a time and emits frames at exact
/// simulation times k / rate_hz. Frames that fall inside an integrator
/// substep are sampled with a partial step from its start, so emission never
/// perturbs the trajectory.
class TelemetryPublisher {
 public:
  TelemetryPublisher(Simulation& sim, double rate_hz);

  void AddSink(FrameSink* sink) { sinks_.push_back(sink); }

  /// One control tick with every frame whose time lies in [t, t + period).
  void RunTick();

  std::int64_t frames_published() const { return next_frame_; }
  double NextFrameTime() const;

 private:
  void Emit(const SimState& state);

  Simulation& sim_;
  double rate_hz_;
  std::int64_t next_frame_ = 0;
  std::vector<FrameSink*> sinks_;
};

}  // namespace auvsim
