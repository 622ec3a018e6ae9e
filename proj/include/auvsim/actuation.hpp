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

#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "auvsim/dynamics.hpp"

namespace auvsim {

struct ThrusterParams {
  double max_thrust = 300.0;     // N, bollard
  double dead_zone = 0.05;       // normalized command fraction
  double time_constant = 0.2;    // s
  double curve_exponent = 2.0;
  double max_rpm = 1500.0;       // display channel only

  void Validate() const;
};

struct ThrusterState {
  double command = 0.0;
  double thrust = 0.0;
  double rpm = 0.0;
};

/// Which part of the heading-lock mixer drives a thruster.
enum class ThrusterRole { kAxial, kPort, kStarboard, kFixed };

std::string_view ToString(ThrusterRole role);
ThrusterRole ParseThrusterRole(std::string_view text);

struct ThrusterMount {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();  // body frame, m
  Eigen::Vector3d axis = Eigen::Vector3d::UnitX();     // unit thrust direction
  ThrusterRole role = ThrusterRole::kFixed;
};

/// Static thrust for a normalized command: zero inside the dead zone, then a
/// power-law rise to max_thrust at |cmd| = 1. Odd in cmd.
/// Throws Error(kCommandOutOfRange) for |cmd| > 1.
double SteadyThrust(const ThrusterParams& params, double cmd);

/// First-order lag of the delivered thrust toward SteadyThrust(cmd).
ThrusterState ThrusterStep(const ThrusterState& state,
                           const ThrusterParams& params, double cmd, double dt);

/// B in tau = B u: one column per thruster.
class AllocationMatrix {
 public:
  AllocationMatrix() = default;
  AllocationMatrix(Eigen::Matrix<double, 6, Eigen::Dynamic> entries,
                   std::vector<ThrusterMount> mounts);

  /// Column i = [axis_i; position_i x axis_i].
  static AllocationMatrix FromGeometry(std::vector<ThrusterMount> mounts);

  const Eigen::Matrix<double, 6, Eigen::Dynamic>& entries() const {
    return entries_;
  }
  const std::vector<ThrusterMount>& mounts() const { return mounts_; }
  int thruster_count() const { return static_cast<int>(entries_.cols()); }

  /// Surge force with every thruster at +max_thrust (only forward-pointing
  /// columns contribute).
  double FullForwardSurge(double max_thrust) const;

 private:
  Eigen::Matrix<double, 6, Eigen::Dynamic> entries_;
  std::vector<ThrusterMount> mounts_;
};

/// tau = B u. Throws Error(kDimensionMismatch) if u has the wrong length.
GeneralizedForce Allocate(const AllocationMatrix& b, const Eigen::VectorXd& u);

}  // namespace auvsim
