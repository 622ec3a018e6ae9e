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

#include <span>
#include <vector>

#include "auvsim/actuation.hpp"

namespace auvsim {

/// Gains act on heading error in degrees and produce command percent.
struct PidGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;

  void Validate() const;
  friend bool operator==(const PidGains&, const PidGains&) = default;
};

enum class AutopilotMode { kManual, kHeadingLock };

inline constexpr double kDefaultControlPeriod = 0.030;

struct AutopilotState {
  AutopilotMode mode = AutopilotMode::kManual;
  PidGains gains;
  double heading_setpoint = 0.0;  // deg, [0, 360)
  double cruise_thrust = 0.0;     // normalized, [0, 1]
  double integral = 0.0;          // deg s
  double last_error = 0.0;        // deg
  bool has_last_error = false;    // derivative is skipped on the first sample
  double sample_period = kDefaultControlPeriod;
  std::vector<double> manual_command;  // operator thrust, passed through in kManual

  friend bool operator==(const AutopilotState&, const AutopilotState&) = default;
};

struct ActuatorCommand {
  std::vector<double> per_thruster;
};

/// Thruster indices the heading-lock mixer drives.
struct MixerLayout {
  std::vector<int> axial;
  int port = -1;
  int starboard = -1;
  int thruster_count = 0;

  static MixerLayout FromMounts(std::span<const ThrusterMount> mounts);
};

/// Shortest signed turn from psi to setpoint, in [-180, 180). Positive means
/// turning toward increasing psi.
double HeadingError(double setpoint_deg, double psi_deg);

/// Wraps degrees into [0, 360).
double Wrap360(double deg);

struct PidOutput {
  double yaw_command = 0.0;  // normalized, [-1, 1]
  AutopilotState state;
};

/// One sample of the heading PID. Throws Error(kNotEngaged) in kManual.
PidOutput PidStep(const PidGains& gains, const AutopilotState& state,
                  double error_deg);

/// Switches to heading lock with fresh integrator/derivative history.
AutopilotState Engage(const AutopilotState& state, double setpoint_deg,
                      const PidGains& gains);

AutopilotState Disengage(const AutopilotState& state);

/// Records operator thrust. In manual mode the axial command also becomes the
/// cruise thrust carried into heading lock.
AutopilotState SetManualThrust(const AutopilotState& state,
                               std::span<const double> commands,
                               const MixerLayout& layout);

struct TickOutput {
  ActuatorCommand command;
  AutopilotState state;
};

/// One control period. Manual passes operator commands through; heading lock
/// puts cruise thrust on the axial thrusters and cruise +/- yaw command on the
/// port/starboard pair. Every component is clamped to [-1, 1].
TickOutput ControlTick(const AutopilotState& state, double measured_psi_deg,
                       const MixerLayout& layout);

}  // namespace auvsim
