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

#include "auvsim/actuation.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "auvsim/error.hpp"

namespace auvsim {

void ThrusterParams::Validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorKind::kInvalidParams, what);
  };
  require(std::isfinite(max_thrust) && max_thrust > 0.0,
          "thruster max_thrust must be positive");
  require(std::isfinite(dead_zone) && dead_zone >= 0.0 && dead_zone < 1.0,
          "thruster dead_zone must lie in [0, 1)");
  require(std::isfinite(time_constant) && time_constant > 0.0,
          "thruster time_constant must be positive");
  require(std::isfinite(curve_exponent) && curve_exponent >= 1.0,
          "thruster curve_exponent must be >= 1");
  require(std::isfinite(max_rpm) && max_rpm >= 0.0,
          "thruster max_rpm must be >= 0");
}

std::string_view ToString(ThrusterRole role) {
  switch (role) {
    case ThrusterRole::kAxial: return "axial";
    case ThrusterRole::kPort: return "port";
    case ThrusterRole::kStarboard: return "starboard";
    case ThrusterRole::kFixed: return "fixed";
  }
  return "fixed";
}

ThrusterRole ParseThrusterRole(std::string_view text) {
  if (text == "axial") return ThrusterRole::kAxial;
  if (text == "port") return ThrusterRole::kPort;
  if (text == "starboard") return ThrusterRole::kStarboard;
  if (text == "fixed") return ThrusterRole::kFixed;
  throw Error(ErrorKind::kInvalidParams,
              "unknown thruster role '" + std::string(text) + "'");
}

double SteadyThrust(const ThrusterParams& params, double cmd) {
  if (!(std::abs(cmd) <= 1.0)) {
    throw Error(ErrorKind::kCommandOutOfRange,
                "thruster command " + std::to_string(cmd) + " outside [-1, 1]");
  }
  const double mag = std::abs(cmd);
  if (mag <= params.dead_zone) return 0.0;
  const double frac = (mag - params.dead_zone) / (1.0 - params.dead_zone);
  const double thrust = params.max_thrust * std::pow(frac, params.curve_exponent);
  return cmd < 0.0 ? -thrust : thrust;
}

ThrusterState ThrusterStep(const ThrusterState& state,
                           const ThrusterParams& params, double cmd,
                           double dt) {
  if (!(dt > 0.0)) {
    throw Error(ErrorKind::kInvalidConfig, "thruster step needs dt > 0");
  }
  const double target = SteadyThrust(params, cmd);
  const double blend = -std::expm1(-dt / params.time_constant);
  ThrusterState next;
  next.command = cmd;
  next.thrust = state.thrust + (target - state.thrust) * blend;
  const double ratio = std::min(1.0, std::abs(next.thrust) / params.max_thrust);
  next.rpm = std::copysign(params.max_rpm * std::sqrt(ratio), next.thrust);
  if (next.thrust == 0.0) next.rpm = 0.0;
  return next;
}

AllocationMatrix::AllocationMatrix(Eigen::Matrix<double, 6, Eigen::Dynamic> entries,
                                   std::vector<ThrusterMount> mounts)
    : entries_(std::move(entries)), mounts_(std::move(mounts)) {
  if (entries_.cols() < 1) {
    throw Error(ErrorKind::kInvalidParams, "allocation needs >= 1 thruster");
  }
  if (!entries_.allFinite()) {
    throw Error(ErrorKind::kInvalidParams, "allocation entries must be finite");
  }
  if (!mounts_.empty() &&
      static_cast<Eigen::Index>(mounts_.size()) != entries_.cols()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "allocation has " + std::to_string(entries_.cols()) +
                    " columns but " + std::to_string(mounts_.size()) +
                    " thruster mounts");
  }
}

AllocationMatrix AllocationMatrix::FromGeometry(std::vector<ThrusterMount> mounts) {
  Eigen::Matrix<double, 6, Eigen::Dynamic> b(6, static_cast<Eigen::Index>(mounts.size()));
  for (std::size_t i = 0; i < mounts.size(); ++i) {
    const Eigen::Vector3d axis = mounts[i].axis.normalized();
    b.col(static_cast<Eigen::Index>(i)) << axis, mounts[i].position.cross(axis);
  }
  return AllocationMatrix(std::move(b), std::move(mounts));
}

double AllocationMatrix::FullForwardSurge(double max_thrust) const {
  return entries_.row(0).cwiseMax(0.0).sum() * max_thrust;
}

GeneralizedForce Allocate(const AllocationMatrix& b, const Eigen::VectorXd& u) {
  if (u.size() != b.thruster_count()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "control vector has " + std::to_string(u.size()) +
                    " entries, allocation expects " +
                    std::to_string(b.thruster_count()));
  }
  return GeneralizedForce::FromVector(b.entries() * u);
}

}  // namespace auvsim
