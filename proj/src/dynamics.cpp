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

#include "auvsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "auvsim/error.hpp"

namespace auvsim {
namespace {

using Vector12 = Eigen::Matrix<double, 12, 1>;

Eigen::Matrix3d Skew(const Eigen::Vector3d& a) {
  Eigen::Matrix3d s;
  s << 0.0, -a.z(), a.y(),
       a.z(), 0.0, -a.x(),
       -a.y(), a.x(), 0.0;
  return s;
}

bool IsSymmetric(const Eigen::MatrixXd& m) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-9 * scale;
}

void Require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::kInvalidParams, what);
}

}  // namespace

Vector6 Pose::AsVector() const {
  Vector6 v;
  v << x, y, z, phi, theta, psi;
  return v;
}

Pose Pose::FromVector(const Vector6& v) {
  return {v(0), v(1), v(2), v(3), v(4), v(5)};
}

Vector6 BodyVelocity::AsVector() const {
  Vector6 out;
  out << u, v, w, p, q, r;
  return out;
}

BodyVelocity BodyVelocity::FromVector(const Vector6& v) {
  return {v(0), v(1), v(2), v(3), v(4), v(5)};
}

Vector6 GeneralizedForce::AsVector() const {
  Vector6 v;
  v << fx, fy, fz, mx, my, mz;
  return v;
}

GeneralizedForce GeneralizedForce::FromVector(const Vector6& v) {
  return {v(0), v(1), v(2), v(3), v(4), v(5)};
}

void VehicleParams::Validate() const {
  Require(std::isfinite(mass) && mass > 0.0, "mass must be positive");
  Require(inertia.allFinite() && IsSymmetric(inertia),
          "inertia tensor must be symmetric");
  Require(Eigen::LLT<Eigen::Matrix3d>(inertia).info() == Eigen::Success,
          "inertia tensor must be positive definite");
  Require(added_mass.allFinite() && IsSymmetric(added_mass),
          "added mass must be symmetric");
  const double floor = -1e-9 * std::max(1.0, added_mass.cwiseAbs().maxCoeff());
  Eigen::SelfAdjointEigenSolver<Matrix6> eig(added_mass, Eigen::EigenvaluesOnly);
  Require(eig.eigenvalues().minCoeff() >= floor,
          "added mass must be positive semidefinite");
  Require(linear_damping.allFinite() && (linear_damping.array() >= 0.0).all(),
          "linear damping must be non-negative");
  Require(quadratic_damping.allFinite() &&
              (quadratic_damping.array() >= 0.0).all(),
          "quadratic damping must be non-negative");
  Require(std::isfinite(weight) && weight >= 0.0, "weight must be >= 0");
  Require(std::isfinite(buoyancy) && buoyancy >= 0.0, "buoyancy must be >= 0");
  Require(cg.allFinite() && cb.allFinite(), "cg/cb must be finite");
}

Matrix6 VehicleParams::RigidBodyInertia() const {
  Matrix6 m = Matrix6::Zero();
  m.topLeftCorner<3, 3>() = mass * Eigen::Matrix3d::Identity();
  m.topRightCorner<3, 3>() = -mass * Skew(cg);
  m.bottomLeftCorner<3, 3>() = mass * Skew(cg);
  m.bottomRightCorner<3, 3>() = inertia;
  return m;
}

Matrix6 VehicleParams::TotalInertia() const {
  return RigidBodyInertia() + added_mass;
}

double WrapPi(double angle) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double wrapped = angle - kTwoPi * std::floor((angle + std::numbers::pi) / kTwoPi);
  // floor() rounding can land exactly on +pi.
  if (wrapped >= std::numbers::pi) wrapped -= kTwoPi;
  return wrapped;
}

Eigen::Matrix3d BodyToEarthRotation(const Pose& pose) {
  const double cphi = std::cos(pose.phi), sphi = std::sin(pose.phi);
  const double cth = std::cos(pose.theta), sth = std::sin(pose.theta);
  const double cpsi = std::cos(pose.psi), spsi = std::sin(pose.psi);
  Eigen::Matrix3d r;
  r << cpsi * cth, -spsi * cphi + cpsi * sth * sphi, spsi * sphi + cpsi * cphi * sth,
       spsi * cth, cpsi * cphi + sphi * sth * spsi, -cpsi * sphi + sth * spsi * cphi,
       -sth, cth * sphi, cth * cphi;
  return r;
}

Matrix6 VelocityTransform(const Pose& pose) {
  if (!(std::abs(pose.theta) < kPitchLimit)) {
    throw Error(ErrorKind::kSingularAttitude,
                "pitch " + std::to_string(pose.theta) +
                    " rad is too close to +/-pi/2");
  }
  const double cphi = std::cos(pose.phi), sphi = std::sin(pose.phi);
  const double cth = std::cos(pose.theta), tth = std::tan(pose.theta);
  Eigen::Matrix3d t;
  t << 1.0, sphi * tth, cphi * tth,
       0.0, cphi, -sphi,
       0.0, sphi / cth, cphi / cth;
  Matrix6 j = Matrix6::Zero();
  j.topLeftCorner<3, 3>() = BodyToEarthRotation(pose);
  j.bottomRightCorner<3, 3>() = t;
  return j;
}

Vector6 KinematicTransform(const Pose& pose, const BodyVelocity& vel) {
  return VelocityTransform(pose) * vel.AsVector();
}

Matrix6 CoriolisMatrix(const Matrix6& inertia, const BodyVelocity& vel) {
  const Vector6 momentum = inertia * vel.AsVector();
  const Eigen::Matrix3d s_lin = Skew(momentum.head<3>());
  const Eigen::Matrix3d s_ang = Skew(momentum.tail<3>());
  Matrix6 c = Matrix6::Zero();
  c.topRightCorner<3, 3>() = -s_lin;
  c.bottomLeftCorner<3, 3>() = -s_lin;
  c.bottomRightCorner<3, 3>() = -s_ang;
  return c;
}

GeneralizedForce DampingForce(const VehicleParams& params,
                              const BodyVelocity& vel) {
  const Vector6 v = vel.AsVector();
  const Vector6 coeff =
      params.linear_damping + params.quadratic_damping.cwiseProduct(v.cwiseAbs());
  return GeneralizedForce::FromVector(-coeff.cwiseProduct(v));
}

GeneralizedForce RestoringForce(const VehicleParams& params, const Pose& pose) {
  // Earth-frame vertical (down) expressed in body axes.
  const Eigen::Vector3d down =
      BodyToEarthRotation(pose).transpose() * Eigen::Vector3d::UnitZ();
  const Eigen::Vector3d gravity = params.weight * down;
  const Eigen::Vector3d lift = -params.buoyancy * down;
  Vector6 f;
  f.head<3>() = gravity + lift;
  f.tail<3>() = params.cg.cross(gravity) + params.cb.cross(lift);
  return GeneralizedForce::FromVector(f);
}

VehicleModel::VehicleModel(VehicleParams params) : params_(std::move(params)) {
  params_.Validate();
  inertia_ = params_.TotalInertia();
  Eigen::JacobiSVD<Matrix6> svd(inertia_);
  const auto& sv = svd.singularValues();
  if (!(sv(0) > 0.0) || sv(5) / sv(0) < 1e-9) {
    throw Error(ErrorKind::kSingularInertia,
                "combined inertia matrix is not invertible");
  }
  if (Eigen::LLT<Matrix6>(inertia_).info() != Eigen::Success) {
    throw Error(ErrorKind::kInvalidParams,
                "combined inertia matrix is not positive definite");
  }
  solver_.compute(inertia_);
}

Vector6 VehicleModel::Acceleration(const Pose& pose, const BodyVelocity& vel,
                                   const GeneralizedForce& tau,
                                   const GeneralizedForce& disturbance) const {
  const Vector6 v = vel.AsVector();
  const Vector6 rhs = tau.AsVector() + disturbance.AsVector() +
                      DampingForce(params_, vel).AsVector() +
                      RestoringForce(params_, pose).AsVector() -
                      CoriolisMatrix(inertia_, vel) * v;
  return solver_.solve(rhs);
}

SimState VehicleModel::Step(const SimState& state, const GeneralizedForce& tau,
                            const GeneralizedForce& disturbance,
                            double dt) const {
  if (!(dt > 0.0 && dt <= 0.1)) {
    throw Error(ErrorKind::kInvalidConfig,
                "integration step must lie in (0, 0.1] s");
  }
  auto deriv = [&](const Vector12& x) {
    const Pose pose = Pose::FromVector(x.head<6>());
    const BodyVelocity vel = BodyVelocity::FromVector(x.tail<6>());
    Vector12 dx;
    dx.head<6>() = KinematicTransform(pose, vel);
    dx.tail<6>() = Acceleration(pose, vel, tau, disturbance);
    return dx;
  };

  Vector12 x0;
  x0 << state.pose.AsVector(), state.velocity.AsVector();
  const Vector12 k1 = deriv(x0);
  const Vector12 k2 = deriv(x0 + 0.5 * dt * k1);
  const Vector12 k3 = deriv(x0 + 0.5 * dt * k2);
  const Vector12 k4 = deriv(x0 + dt * k3);
  const Vector12 x1 = x0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

  SimState next;
  next.time = state.time + dt;
  next.pose = Pose::FromVector(x1.head<6>());
  next.pose.phi = WrapPi(next.pose.phi);
  next.pose.psi = WrapPi(next.pose.psi);
  next.velocity = BodyVelocity::FromVector(x1.tail<6>());
  if (!(std::abs(next.pose.theta) < kPitchLimit)) {
    throw Error(ErrorKind::kSingularAttitude,
                "integration drove pitch into the Euler singularity");
  }
  return next;
}

double VehicleModel::KineticEnergy(const BodyVelocity& vel) const {
  const Vector6 v = vel.AsVector();
  return 0.5 * v.dot(inertia_ * v);
}

Vector6 Acceleration(const VehicleParams& params, const SimState& state,
                     const GeneralizedForce& tau,
                     const GeneralizedForce& disturbance) {
  return VehicleModel(params).Acceleration(state.pose, state.velocity, tau,
                                           disturbance);
}

SimState Step(const VehicleParams& params, const SimState& state,
              const GeneralizedForce& tau, const GeneralizedForce& disturbance,
              double dt) {
  return VehicleModel(params).Step(state, tau, disturbance, dt);
}

}  // namespace auvsim
