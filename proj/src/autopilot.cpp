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

#include "auvsim/autopilot.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "auvsim/error.hpp"

namespace auvsim {
namespace {

double Clamp1(double x) { return std::clamp(x, -1.0, 1.0); }

}  // namespace

void PidGains::Validate() const {
  for (double g : {kp, ki, kd}) {
    if (!std::isfinite(g) || g < 0.0) {
      throw Error(ErrorKind::kRangeViolation, "PID gains must be finite and >= 0");
    }
  }
}

MixerLayout MixerLayout::FromMounts(std::span<const ThrusterMount> mounts) {
  MixerLayout layout;
  layout.thruster_count = static_cast<int>(mounts.size());
  for (int i = 0; i < layout.thruster_count; ++i) {
    switch (mounts[i].role) {
      case ThrusterRole::kAxial: layout.axial.push_back(i); break;
      case ThrusterRole::kPort: layout.port = i; break;
      case ThrusterRole::kStarboard: layout.starboard = i; break;
      case ThrusterRole::kFixed: break;
    }
  }
  return layout;
}

double Wrap360(double deg) {
  double w = std::fmod(deg, 360.0);
  if (w < 0.0) w += 360.0;
  if (w >= 360.0) w -= 360.0;
  return w;
}

double HeadingError(double setpoint_deg, double psi_deg) {
  double e = std::fmod(setpoint_deg - psi_deg, 360.0);
  if (e >= 180.0) e -= 360.0;
  if (e < -180.0) e += 360.0;
  return e;
}

PidOutput PidStep(const PidGains& gains, const AutopilotState& state,
                  double error_deg) {
  if (state.mode != AutopilotMode::kHeadingLock) {
    throw Error(ErrorKind::kNotEngaged, "PID step requested in manual mode");
  }
  PidOutput out{0.0, state};
  AutopilotState& s = out.state;
  const double dt = s.sample_period;

  s.integral += error_deg * dt;
  if (gains.ki > 0.0) {
    // Anti-windup: the integral term alone never exceeds 100 %.
    const double limit = 100.0 / gains.ki;
    s.integral = std::clamp(s.integral, -limit, limit);
  }
  const double derivative =
      s.has_last_error ? (error_deg - s.last_error) / dt : 0.0;
  const double percent =
      gains.kp * error_deg + gains.ki * s.integral + gains.kd * derivative;

  s.last_error = error_deg;
  s.has_last_error = true;
  out.yaw_command = Clamp1(percent / 100.0);
  return out;
}

AutopilotState Engage(const AutopilotState& state, double setpoint_deg,
                      const PidGains& gains) {
  gains.Validate();
  if (!std::isfinite(setpoint_deg)) {
    throw Error(ErrorKind::kRangeViolation, "heading setpoint must be finite");
  }
  AutopilotState s = state;
  s.mode = AutopilotMode::kHeadingLock;
  s.gains = gains;
  s.heading_setpoint = Wrap360(setpoint_deg);
  s.integral = 0.0;
  s.last_error = 0.0;
  s.has_last_error = false;
  return s;
}

AutopilotState Disengage(const AutopilotState& state) {
  AutopilotState s = state;
  s.mode = AutopilotMode::kManual;
  s.integral = 0.0;
  s.last_error = 0.0;
  s.has_last_error = false;
  return s;
}

AutopilotState SetManualThrust(const AutopilotState& state,
                               std::span<const double> commands,
                               const MixerLayout& layout) {
  if (static_cast<int>(commands.size()) != layout.thruster_count) {
    throw Error(ErrorKind::kDimensionMismatch,
                "manual thrust needs " + std::to_string(layout.thruster_count) +
                    " commands");
  }
  AutopilotState s = state;
  s.manual_command.assign(commands.begin(), commands.end());
  for (double& c : s.manual_command) c = Clamp1(c);
  if (s.mode == AutopilotMode::kManual && !layout.axial.empty()) {
    s.cruise_thrust = std::clamp(s.manual_command[layout.axial.front()], 0.0, 1.0);
  }
  return s;
}

TickOutput ControlTick(const AutopilotState& state, double measured_psi_deg,
                       const MixerLayout& layout) {
  TickOutput out{{std::vector<double>(layout.thruster_count, 0.0)}, state};
  auto& cmd = out.command.per_thruster;

  if (state.mode == AutopilotMode::kManual) {
    for (int i = 0; i < layout.thruster_count &&
                    i < static_cast<int>(state.manual_command.size());
         ++i) {
      cmd[i] = Clamp1(state.manual_command[i]);
    }
    return out;
  }

  const double error = HeadingError(state.heading_setpoint, measured_psi_deg);
  PidOutput pid = PidStep(state.gains, state, error);
  out.state = pid.state;
  for (int i : layout.axial) cmd[i] = Clamp1(state.cruise_thrust);
  if (layout.port >= 0) cmd[layout.port] = Clamp1(state.cruise_thrust + pid.yaw_command);
  if (layout.starboard >= 0) {
    cmd[layout.starboard] = Clamp1(state.cruise_thrust - pid.yaw_command);
  }
  return out;
}

}  // namespace auvsim
