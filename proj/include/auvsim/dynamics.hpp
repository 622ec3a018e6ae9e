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

#include <Eigen/Dense>

namespace auvsim {

using Vector6 = Eigen::Matrix<double, 6, 1>;
using Matrix6 = Eigen::Matrix<double, 6, 6>;

/// Earth-fixed NED position (z positive down) and Z-Y-X Euler angles.
/// phi and psi are kept in [-pi, pi); |theta| stays below kPitchLimit.
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double phi = 0.0;
  double theta = 0.0;
  double psi = 0.0;

  Vector6 AsVector() const;
  static Pose FromVector(const Vector6& v);
};

/// Body-frame velocity [u v w p q r] (forward-right-down axes).
struct BodyVelocity {
  double u = 0.0;
  double v = 0.0;
  double w = 0.0;
  double p = 0.0;
  double q = 0.0;
  double r = 0.0;

  Vector6 AsVector() const;
  static BodyVelocity FromVector(const Vector6& v);
};

/// Body-frame forces (N) and moments (N m). Used for control input,
/// disturbance and the individual hydrostatic/hydrodynamic terms.
struct GeneralizedForce {
  double fx = 0.0;
  double fy = 0.0;
  double fz = 0.0;
  double mx = 0.0;
  double my = 0.0;
  double mz = 0.0;

  Vector6 AsVector() const;
  static GeneralizedForce FromVector(const Vector6& v);

  friend GeneralizedForce operator+(const GeneralizedForce& a,
                                    const GeneralizedForce& b) {
    return FromVector(a.AsVector() + b.AsVector());
  }
};

struct SimState {
  double time = 0.0;
  Pose pose;
  BodyVelocity velocity;
};

/// Rigid-body and hydrodynamic parameters of the hull. Inertia is taken about
/// the body origin; cg and cb are body-frame offsets from that origin.
struct VehicleParams {
  double mass = 0.0;
  Eigen::Matrix3d inertia = Eigen::Matrix3d::Zero();
  Matrix6 added_mass = Matrix6::Zero();
  Vector6 linear_damping = Vector6::Zero();
  Vector6 quadratic_damping = Vector6::Zero();
  double weight = 0.0;
  double buoyancy = 0.0;
  Eigen::Vector3d cg = Eigen::Vector3d::Zero();
  Eigen::Vector3d cb = Eigen::Vector3d::Zero();
  double length = 0.0;
  double hull_diameter = 0.0;

  /// Throws Error(kInvalidParams) when a field invariant is violated.
  void Validate() const;

  Matrix6 RigidBodyInertia() const;
  Matrix6 TotalInertia() const;
};

/// Pitch magnitude at which the Euler-rate transform is refused.
inline constexpr double kPitchLimit = 1.5707963267948966 - 1e-6;

/// Wraps an angle in radians to [-pi, pi).
double WrapPi(double angle);

Eigen::Matrix3d BodyToEarthRotation(const Pose& pose);

/// J(x): block-diagonal rotation and Euler-rate transform.
/// Throws Error(kSingularAttitude) when |theta| >= kPitchLimit.
Matrix6 VelocityTransform(const Pose& pose);

/// Earth-frame pose rates J(x) * velocity.
Vector6 KinematicTransform(const Pose& pose, const BodyVelocity& vel);

/// Coriolis-centripetal matrix of a symmetric 6x6 inertia. Built from the
/// partitions of M * vel so the result is exactly skew-symmetric.
Matrix6 CoriolisMatrix(const Matrix6& inertia, const BodyVelocity& vel);

/// Diagonal linear plus quadratic drag; each component opposes its velocity.
GeneralizedForce DampingForce(const VehicleParams& params,
                              const BodyVelocity& vel);

/// Physical gravity plus buoyancy load in the body frame. This is -G(x):
/// the equation of motion reads M a + C v + D v + G = tau + w, and
/// DampingForce likewise returns -D v.
GeneralizedForce RestoringForce(const VehicleParams& params, const Pose& pose);

/// Holds the factorized total inertia so repeated evaluation during
/// integration does not refactor M.
class VehicleModel {
 public:
  /// Throws Error(kInvalidParams) or Error(kSingularInertia).
  explicit VehicleModel(VehicleParams params);

  const VehicleParams& params() const { return params_; }
  const Matrix6& inertia() const { return inertia_; }

  /// Body acceleration solving the equation of motion for the given inputs.
  Vector6 Acceleration(const Pose& pose, const BodyVelocity& vel,
                       const GeneralizedForce& tau,
                       const GeneralizedForce& disturbance) const;

  /// One classical RK4 step of length dt in (0, 0.1] with inputs held
  /// constant across the step.
  SimState Step(const SimState& state, const GeneralizedForce& tau,
                const GeneralizedForce& disturbance, double dt) const;

  /// 0.5 v^T M v.
  double KineticEnergy(const BodyVelocity& vel) const;

 private:
  VehicleParams params_;
  Matrix6 inertia_;
  Eigen::LDLT<Matrix6> solver_;
};

Vector6 Acceleration(const VehicleParams& params, const SimState& state,
                     const GeneralizedForce& tau,
                     const GeneralizedForce& disturbance);

SimState Step(const VehicleParams& params, const SimState& state,
              const GeneralizedForce& tau, const GeneralizedForce& disturbance,
              double dt);

}  // namespace auvsim
