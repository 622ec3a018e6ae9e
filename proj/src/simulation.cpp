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

#include "auvsim/simulation.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "auvsim/error.hpp"

namespace auvsim {

Simulation::Simulation(VehicleConfig config, SimulationOptions options)
    : config_(std::move(config)),
      options_(options),
      model_(config_.hull),
      layout_(MixerLayout::FromMounts(config_.allocation.mounts())) {
  config_.Validate();
  if (!(options_.dt > 0.0 && options_.dt <= 0.1)) {
    throw Error(ErrorKind::kInvalidConfig, "dt must lie in (0, 0.1] s");
  }
  const double ratio = options_.control_period / options_.dt;
  substeps_per_tick_ = static_cast<int>(std::lround(ratio));
  if (substeps_per_tick_ < 1 || std::abs(ratio - substeps_per_tick_) > 1e-9) {
    throw Error(ErrorKind::kInvalidConfig,
                "dt must divide the control period evenly");
  }
  substep_ = substeps_per_tick_;

  layout_.thruster_count = config_.allocation.thruster_count();
  state_.pose.z = config_.environment.initial_depth;
  state_.pose.psi = WrapPi(options_.initial_heading_deg * std::numbers::pi / 180.0);
  thrusters_.assign(layout_.thruster_count, ThrusterState{});
  autopilot_.sample_period = options_.control_period;
  autopilot_.manual_command.assign(layout_.thruster_count, 0.0);
  command_.per_thruster.assign(layout_.thruster_count, 0.0);
}

double Simulation::HeadingDeg() const {
  return Wrap360(state_.pose.psi * 180.0 / std::numbers::pi);
}

void Simulation::RequireBetweenTicks() const {
  if (InTick()) {
    throw Error(ErrorKind::kInvalidConfig,
                "operator input applied in the middle of a control tick");
  }
}

void Simulation::SetManualThrust(std::span<const double> commands) {
  RequireBetweenTicks();
  for (double c : commands) {
    if (!(std::abs(c) <= 1.0)) {
      throw Error(ErrorKind::kRangeViolation, "manual thrust outside [-1, 1]");
    }
  }
  autopilot_ = auvsim::SetManualThrust(autopilot_, commands, layout_);
}

void Simulation::SetCruiseThrust(double cruise) {
  RequireBetweenTicks();
  if (!(cruise >= 0.0 && cruise <= 1.0)) {
    throw Error(ErrorKind::kRangeViolation, "cruise thrust outside [0, 1]");
  }
  autopilot_.cruise_thrust = cruise;
}

void Simulation::Engage(double setpoint_deg, const PidGains& gains) {
  RequireBetweenTicks();
  autopilot_ = auvsim::Engage(autopilot_, setpoint_deg, gains);
}

void Simulation::Disengage() {
  RequireBetweenTicks();
  autopilot_ = auvsim::Disengage(autopilot_);
}

void Simulation::SetGains(const PidGains& gains) {
  RequireBetweenTicks();
  gains.Validate();
  autopilot_.gains = gains;
}

void Simulation::SetDisturbance(const GeneralizedForce& w) {
  RequireBetweenTicks();
  options_.disturbance = w;
}

const ActuatorCommand& Simulation::BeginTick() {
  RequireBetweenTicks();
  TickOutput out = ControlTick(autopilot_, HeadingDeg(), layout_);
  autopilot_ = std::move(out.state);
  command_ = std::move(out.command);
  substep_ = 0;
  return command_;
}

std::vector<ThrusterState> Simulation::NextThrusters() const {
  std::vector<ThrusterState> next(thrusters_.size());
  for (std::size_t i = 0; i < thrusters_.size(); ++i) {
    next[i] = ThrusterStep(thrusters_[i], config_.thruster,
                           command_.per_thruster[i], options_.dt);
  }
  return next;
}

GeneralizedForce Simulation::ThrustForce(const std::vector<ThrusterState>& th) const {
  Eigen::VectorXd u(static_cast<Eigen::Index>(th.size()));
  for (std::size_t i = 0; i < th.size(); ++i) u(static_cast<Eigen::Index>(i)) = th[i].thrust;
  return Allocate(config_.allocation, u);
}

void Simulation::Substep() {
  if (!InTick()) {
    throw Error(ErrorKind::kInvalidConfig, "Substep() called outside a tick");
  }
  thrusters_ = NextThrusters();
  SimState next =
      model_.Step(state_, ThrustForce(thrusters_), options_.disturbance, options_.dt);
  ++steps_;
  // Integer step count keeps the clock free of accumulated rounding.
  next.time = static_cast<double>(steps_) * options_.dt;
  state_ = next;
  if (++substep_ == substeps_per_tick_) ++ticks_;
}

const ActuatorCommand& Simulation::AdvanceTick() {
  BeginTick();
  while (InTick()) Substep();
  return command_;
}

SimState Simulation::Peek(double h) const {
  if (h <= 0.0) return state_;
  if (h > options_.dt * (1.0 + 1e-12)) {
    throw Error(ErrorKind::kInvalidConfig, "Peek horizon exceeds one substep");
  }
  const std::vector<ThrusterState> next =
      InTick() ? NextThrusters() : thrusters_;
  SimState s = model_.Step(state_, ThrustForce(next), options_.disturbance, h);
  s.time = state_.time + h;
  return s;
}

}  // namespace auvsim
