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

#include "auvsim/telemetry.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numbers>
#include <utility>

#include "auvsim/error.hpp"
#include "auvsim/number_format.hpp"

namespace auvsim {
namespace {

[[noreturn]] void Malformed(const std::string& what) {
  throw Error(ErrorKind::kMalformedCommand, what);
}

[[noreturn]] void OutOfRange(const std::string& what) {
  throw Error(ErrorKind::kRangeViolation, what);
}

std::string_view StripEol(std::string_view line) {
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) {
    line.remove_suffix(1);
  }
  return line;
}

std::vector<std::string_view> SplitTokens(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const auto pos = line.find(sep);
    out.push_back(line.substr(0, pos));
    if (pos == std::string_view::npos) break;
    line = line.substr(pos + 1);
  }
  return out;
}

// Reads `key=value` tokens in a fixed order.
class FieldReader {
 public:
  FieldReader(std::vector<std::string_view> tokens, std::size_t first)
      : tokens_(std::move(tokens)), index_(first) {}

  std::string_view Raw(std::string_view key) {
    if (index_ >= tokens_.size()) Malformed("missing field '" + std::string(key) + "'");
    const std::string_view tok = tokens_[index_++];
    if (tok.size() <= key.size() || tok.substr(0, key.size()) != key ||
        tok[key.size()] != '=') {
      Malformed("expected field '" + std::string(key) + "', got '" +
                std::string(tok) + "'");
    }
    return tok.substr(key.size() + 1);
  }

  double Double(std::string_view key) {
    const auto raw = Raw(key);
    const auto v = ParseDouble(raw);
    if (!v || !std::isfinite(*v)) {
      Malformed("field '" + std::string(key) + "' is not a finite number");
    }
    return *v;
  }

  std::int64_t Int(std::string_view key) {
    const auto v = ParseInt(Raw(key));
    if (!v) Malformed("field '" + std::string(key) + "' is not an integer");
    return *v;
  }

  std::vector<double> Doubles(std::string_view key) {
    std::vector<double> out;
    for (auto part : SplitTokens(Raw(key), ',')) {
      const auto v = ParseDouble(part);
      if (!v || !std::isfinite(*v)) {
        Malformed("field '" + std::string(key) + "' has a bad list entry");
      }
      out.push_back(*v);
    }
    return out;
  }

  void Finish() const {
    if (index_ != tokens_.size()) {
      Malformed("unexpected trailing field '" + std::string(tokens_[index_]) + "'");
    }
  }

 private:
  std::vector<std::string_view> tokens_;
  std::size_t index_;
};

double Wrap180(double deg) {
  double w = deg - 360.0 * std::floor((deg + 180.0) / 360.0);
  if (w >= 180.0) w -= 360.0;
  return w;
}

double ToDegrees(double rad) { return rad * 180.0 / std::numbers::pi; }

void CheckFrameRanges(const TelemetryFrame& f) {
  if (!(f.yaw >= 0.0 && f.yaw < 360.0)) OutOfRange("yaw outside [0, 360)");
  if (!(f.roll >= -180.0 && f.roll < 180.0)) OutOfRange("roll outside [-180, 180)");
  if (!(f.pitch >= -180.0 && f.pitch < 180.0)) OutOfRange("pitch outside [-180, 180)");
  for (double v : {f.depth, f.altitude, f.obstacle_range, f.voltage}) {
    if (!std::isfinite(v)) OutOfRange("non-finite telemetry channel");
  }
}

void CheckGains(const PidGains& g) {
  for (double v : {g.kp, g.ki, g.kd}) {
    if (v < 0.0) OutOfRange("gains must be >= 0");
  }
}

Command ParseSyntax(std::string_view line) {
  line = StripEol(line);
  if (line.empty()) Malformed("empty record");
  auto tokens = SplitTokens(line, ' ');
  const std::string name(tokens.front());
  FieldReader r(std::move(tokens), 1);

  static constexpr std::string_view kNames[] = {
      "SetManualThrust", "Engage", "Disengage", "SetGains", "SetCruiseThrust"};
  if (std::find(std::begin(kNames), std::end(kNames), name) == std::end(kNames)) {
    Malformed("unknown command '" + name + "'");
  }
  Command cmd;
  cmd.seq = r.Int("seq");
  if (name == "SetManualThrust") {
    cmd.body = SetManualThrustCmd{r.Doubles("thrust")};
  } else if (name == "Engage") {
    EngageCmd e;
    e.setpoint = r.Double("setpoint");
    e.gains.kp = r.Double("kp");
    e.gains.ki = r.Double("ki");
    e.gains.kd = r.Double("kd");
    cmd.body = e;
  } else if (name == "Disengage") {
    cmd.body = DisengageCmd{};
  } else if (name == "SetGains") {
    SetGainsCmd g;
    g.gains.kp = r.Double("kp");
    g.gains.ki = r.Double("ki");
    g.gains.kd = r.Double("kd");
    cmd.body = g;
  } else if (name == "SetCruiseThrust") {
    cmd.body = SetCruiseThrustCmd{r.Double("thrust")};
  } else {
    Malformed("unknown command '" + name + "'");
  }
  r.Finish();
  return cmd;
}

void CheckRanges(const Command& cmd, int thruster_count) {
  std::visit(
      [&](const auto& body) {
        using T = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<T, SetManualThrustCmd>) {
          if (static_cast<int>(body.thrust.size()) != thruster_count) {
            OutOfRange("expected " + std::to_string(thruster_count) + " thrust values");
          }
          for (double t : body.thrust) {
            if (t < -1.0 || t > 1.0) OutOfRange("thrust outside [-1, 1]");
          }
        } else if constexpr (std::is_same_v<T, EngageCmd>) {
          if (body.setpoint < 0.0 || body.setpoint >= 360.0) {
            OutOfRange("setpoint outside [0, 360)");
          }
          CheckGains(body.gains);
        } else if constexpr (std::is_same_v<T, SetGainsCmd>) {
          CheckGains(body.gains);
        } else if constexpr (std::is_same_v<T, SetCruiseThrustCmd>) {
          if (body.thrust < 0.0 || body.thrust > 1.0) {
            OutOfRange("cruise thrust outside [0, 1]");
          }
        }
      },
      cmd.body);
}

}  // namespace

std::string EncodeFrame(const TelemetryFrame& f) {
  CheckFrameRanges(f);
  std::string s = "FRAME ts=" + std::to_string(f.timestamp_ms);
  s += " roll=" + FormatDouble(f.roll);
  s += " pitch=" + FormatDouble(f.pitch);
  s += " yaw=" + FormatDouble(f.yaw);
  s += " depth=" + FormatDouble(f.depth);
  s += " altitude=" + FormatDouble(f.altitude);
  s += " obstacle=" + FormatDouble(f.obstacle_range);
  s += " rpm=";
  for (std::size_t i = 0; i < f.thruster_rpm.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(f.thruster_rpm[i]);
  }
  s += " leak=";
  for (std::size_t i = 0; i < f.leak.size(); ++i) {
    if (i) s += ',';
    s += f.leak[i] ? '1' : '0';
  }
  s += " voltage=" + FormatDouble(f.voltage);
  s += '\n';
  return s;
}

TelemetryFrame DecodeFrame(std::string_view line) {
  line = StripEol(line);
  auto tokens = SplitTokens(line, ' ');
  if (tokens.front() != "FRAME") Malformed("not a FRAME record");
  FieldReader r(std::move(tokens), 1);

  TelemetryFrame f;
  f.timestamp_ms = r.Int("ts");
  f.roll = r.Double("roll");
  f.pitch = r.Double("pitch");
  f.yaw = r.Double("yaw");
  f.depth = r.Double("depth");
  f.altitude = r.Double("altitude");
  f.obstacle_range = r.Double("obstacle");

  const auto rpm = SplitTokens(r.Raw("rpm"), ',');
  if (rpm.size() != f.thruster_rpm.size()) Malformed("rpm needs 3 entries");
  for (std::size_t i = 0; i < rpm.size(); ++i) {
    const auto v = ParseInt(rpm[i]);
    if (!v) Malformed("rpm entry is not an integer");
    f.thruster_rpm[i] = static_cast<int>(*v);
  }
  const auto leak = SplitTokens(r.Raw("leak"), ',');
  if (leak.size() != f.leak.size()) Malformed("leak needs 8 entries");
  for (std::size_t i = 0; i < leak.size(); ++i) {
    if (leak[i] != "0" && leak[i] != "1") Malformed("leak entries are 0 or 1");
    f.leak[i] = leak[i] == "1";
  }
  f.voltage = r.Double("voltage");
  r.Finish();
  CheckFrameRanges(f);
  return f;
}

std::string FrameCsvHeader() {
  return "timestamp_ms,roll,pitch,yaw,depth,altitude,obstacle_range,"
         "rpm0,rpm1,rpm2,leak0,leak1,leak2,leak3,leak4,leak5,leak6,leak7,"
         "voltage\n";
}

std::string EncodeFrameCsv(const TelemetryFrame& f) {
  std::string s = std::to_string(f.timestamp_ms);
  for (double v : {f.roll, f.pitch, f.yaw, f.depth, f.altitude, f.obstacle_range}) {
    s += ',' + FormatDouble(v);
  }
  for (int rpm : f.thruster_rpm) s += ',' + std::to_string(rpm);
  for (bool leak : f.leak) s += leak ? ",1" : ",0";
  s += ',' + FormatDouble(f.voltage) + '\n';
  return s;
}

TelemetryFrame MakeFrame(const SimState& state,
                         const std::vector<ThrusterState>& thrusters,
                         const EnvironmentParams& environment,
                         std::int64_t timestamp_ms) {
  TelemetryFrame f;
  f.timestamp_ms = timestamp_ms;
  f.roll = Wrap180(ToDegrees(state.pose.phi));
  f.pitch = Wrap180(ToDegrees(state.pose.theta));
  f.yaw = Wrap360(ToDegrees(state.pose.psi));
  f.depth = state.pose.z;
  f.altitude = environment.lakebed_depth - state.pose.z;
  f.obstacle_range = -1.0;
  for (std::size_t i = 0; i < f.thruster_rpm.size() && i < thrusters.size(); ++i) {
    f.thruster_rpm[i] = static_cast<int>(std::lround(thrusters[i].rpm));
  }
  f.voltage = environment.supply_voltage;
  return f;
}

std::string EncodeCommand(const Command& cmd) {
  std::string s;
  const std::string seq = " seq=" + std::to_string(cmd.seq);
  auto gains = [](const PidGains& g) {
    return " kp=" + FormatDouble(g.kp) + " ki=" + FormatDouble(g.ki) +
           " kd=" + FormatDouble(g.kd);
  };
  std::visit(
      [&](const auto& body) {
        using T = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<T, SetManualThrustCmd>) {
          s = "SetManualThrust" + seq + " thrust=";
          for (std::size_t i = 0; i < body.thrust.size(); ++i) {
            if (i) s += ',';
            s += FormatDouble(body.thrust[i]);
          }
        } else if constexpr (std::is_same_v<T, EngageCmd>) {
          s = "Engage" + seq + " setpoint=" + FormatDouble(body.setpoint) + gains(body.gains);
        } else if constexpr (std::is_same_v<T, DisengageCmd>) {
          s = "Disengage" + seq;
        } else if constexpr (std::is_same_v<T, SetGainsCmd>) {
          s = "SetGains" + seq + gains(body.gains);
        } else {
          s = "SetCruiseThrust" + seq + " thrust=" + FormatDouble(body.thrust);
        }
      },
      cmd.body);
  s += '\n';
  return s;
}

Command ParseCommand(std::string_view line, int thruster_count) {
  Command cmd = ParseSyntax(line);
  CheckRanges(cmd, thruster_count);
  return cmd;
}

Command CommandDecoder::Decode(std::string_view line) {
  Command cmd = ParseSyntax(line);
  if (last_seq_ && cmd.seq <= *last_seq_) {
    throw Error(ErrorKind::kStaleSequence,
                "seq " + std::to_string(cmd.seq) + " <= last accepted " +
                    std::to_string(*last_seq_));
  }
  CheckRanges(cmd, thruster_count_);
  last_seq_ = cmd.seq;
  return cmd;
}

void ApplyCommand(Simulation& sim, const Command& command) {
  std::visit(
      [&](const auto& body) {
        using T = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<T, SetManualThrustCmd>) {
          sim.SetManualThrust(body.thrust);
        } else if constexpr (std::is_same_v<T, EngageCmd>) {
          sim.Engage(body.setpoint, body.gains);
        } else if constexpr (std::is_same_v<T, DisengageCmd>) {
          sim.Disengage();
        } else if constexpr (std::is_same_v<T, SetGainsCmd>) {
          sim.SetGains(body.gains);
        } else {
          sim.SetCruiseThrust(body.thrust);
        }
      },
      command.body);
}

std::string EncodeApplied(std::int64_t seq, std::int64_t timestamp_ms) {
  return "APPLIED seq=" + std::to_string(seq) + " ts=" + std::to_string(timestamp_ms) + '\n';
}

std::string EncodeErrorReply(std::optional<std::int64_t> seq, ErrorKind kind,
                             std::string_view detail) {
  std::string s = "ERROR seq=" + (seq ? std::to_string(*seq) : std::string("-1")) +
                  " kind=" + std::string(ToString(kind)) + " detail=";
  for (char c : detail) s += (c == '\n' || c == '\r') ? ' ' : c;
  s += '\n';
  return s;
}

std::optional<std::int64_t> PeekSeq(std::string_view line) {
  const auto tokens = SplitTokens(StripEol(line), ' ');
  if (tokens.size() < 2 || tokens[1].substr(0, 4) != "seq=") return std::nullopt;
  const auto v = ParseInt(tokens[1].substr(4));
  return v ? std::optional<std::int64_t>(*v) : std::nullopt;
}

void CommandQueue::Push(std::uint64_t origin, Command command) {
  std::lock_guard lock(mutex_);
  entries_.push_back({origin, std::move(command)});
}

std::vector<CommandQueue::Entry> CommandQueue::Drain() {
  std::lock_guard lock(mutex_);
  std::vector<Entry> out(std::make_move_iterator(entries_.begin()),
                         std::make_move_iterator(entries_.end()));
  entries_.clear();
  return out;
}

std::size_t CommandQueue::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

void StreamConfig::Validate() const {
  if (!(rate_hz >= 1.0 && rate_hz <= 100.0)) {
    throw Error(ErrorKind::kInvalidConfig, "telemetry rate must lie in [1, 100] Hz");
  }
}

CsvFrameLog::CsvFrameLog(std::ostream& out) : out_(out) { out_ << FrameCsvHeader(); }

void CsvFrameLog::Publish(const TelemetryFrame& frame, const std::string&) {
  out_ << EncodeFrameCsv(frame);
  ++rows_;
}

TelemetryPublisher::TelemetryPublisher(Simulation& sim, double rate_hz)
    : sim_(sim), rate_hz_(rate_hz) {
  StreamConfig{rate_hz}.Validate();
  // Frame k is stamped k / rate seconds after the simulation clock origin.
  while (NextFrameTime() < sim_.time()) ++next_frame_;
}

double TelemetryPublisher::NextFrameTime() const {
  return static_cast<double>(next_frame_) / rate_hz_;
}

void TelemetryPublisher::Emit(const SimState& state) {
  const auto ts = static_cast<std::int64_t>(std::llround(NextFrameTime() * 1000.0));
  const TelemetryFrame frame = MakeFrame(state, sim_.thrusters(),
                                         sim_.config().environment, ts);
  const std::string record = EncodeFrame(frame);
  for (FrameSink* sink : sinks_) sink->Publish(frame, record);
  ++next_frame_;
}

void TelemetryPublisher::RunTick() {
  sim_.BeginTick();
  const double dt = sim_.options().dt;
  while (sim_.InTick()) {
    const double start = sim_.time();
    while (NextFrameTime() < start + dt) {
      Emit(sim_.Peek(NextFrameTime() - start));
    }
    sim_.Substep();
  }
}

}  // namespace auvsim
