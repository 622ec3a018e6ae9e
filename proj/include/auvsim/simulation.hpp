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

#include <cstdint>
#include <span>
#include <vector>

#include "auvsim/actuation.hpp"
#include "auvsim/autopilot.hpp"
#include "auvsim/dynamics.hpp"
#include "auvsim/param_file.hpp"

namespace auvsim {

struct SimulationOptions {
  double dt = 0.005;                             // integrator step, s
  double control_period = kDefaultControlPeriod;  // s, multiple of dt
  GeneralizedForce disturbance;                  // constant w
  double initial_heading_deg = 0.0;
};

/// Closed-loop vehicle: autopilot -> thrusters -> allocation -> dynamics.
///
/// Time advances in whole control ticks. Each tick evaluates the control law
/// once on the current heading, then runs control_period / dt integrator
/// substeps, each of which lags the thrusters by dt and integrates the hull
/// with the resulting tau held constant. Operator changes may only be applied
/// between ticks.
class Simulation {
 public:
  Simulation(VehicleConfig config, SimulationOptions options);

  const VehicleConfig& config() const { return config_; }
  const SimulationOptions& options() const { return options_; }
  const SimState& state() const { return state_; }
  const AutopilotState& autopilot() const { return autopilot_; }
  const std::vector<ThrusterState>& thrusters() const { return thrusters_; }
  const MixerLayout& layout() const { return layout_; }
  const ActuatorCommand& last_command() const { return command_; }
  std::int64_t ticks() const { return ticks_; }
  int substeps_per_tick() const { return substeps_per_tick_; }
  double time() const { return state_.time; }

  /// Current yaw in degrees, [0, 360).
  double HeadingDeg() const;

  // Operator inputs. Throw Error(kInvalidConfig) if called mid-tick.
  void SetManualThrust(std::span<const double> commands);
  void SetCruiseThrust(double cruise);
  void Engage(double setpoint_deg, const PidGains& gains);
  void Disengage();
  void SetGains(const PidGains& gains);
  void SetDisturbance(const GeneralizedForce& w);

  /// Evaluates the control law; must be followed by substeps_per_tick()
  /// calls to Substep().
  const ActuatorCommand& BeginTick();
  void Substep();
  bool InTick() const { return substep_ < substeps_per_tick_; }

  /// BeginTick plus all of its substeps.
  const ActuatorCommand& AdvanceTick();

  /// State h seconds after the current time, 0 <= h <= dt, along the same
  /// trajectory the next Substep() will follow. Does not mutate.
  SimState Peek(double h) const;

 private:
  void RequireBetweenTicks() const;
  std::vector<ThrusterState> NextThrusters() const;
  GeneralizedForce ThrustForce(const std::vector<ThrusterState>& th) const;

  VehicleConfig config_;
  SimulationOptions options_;
  VehicleModel model_;
  MixerLayout layout_;
  SimState state_;
  AutopilotState autopilot_;
  std::vector<ThrusterState> thrusters_;
  ActuatorCommand command_;
  std::int64_t ticks_ = 0;
  std::int64_t steps_ = 0;
  int substeps_per_tick_ = 0;
  int substep_ = 0;
};

}  // namespace auvsim
