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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "auvsim/dynamics.hpp"
#include "auvsim/error.hpp"
#include "auvsim/param_file.hpp"
#include "test_support.hpp"

namespace auvsim {
namespace {

using testing::ConservativeParams;
using testing::RandomPose;
using testing::RandomVector;

constexpr double kPi = std::numbers::pi;

TEST(KinematicTransform, IdentityAtZeroAngles) {
  BodyVelocity v{1, 0, 0, 0, 0, 0};
  const Vector6 rates = KinematicTransform(Pose{}, v);
  Vector6 expected;
  expected << 1, 0, 0, 0, 0, 0;
  EXPECT_LT((rates - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(KinematicTransform, YawRotatesSurgeIntoEast) {
  Pose pose;
  pose.psi = kPi / 2;
  const Vector6 rates = KinematicTransform(pose, BodyVelocity{1, 0, 0, 0, 0, 0});
  Vector6 expected;
  expected << 0, 1, 0, 0, 0, 0;
  EXPECT_LT((rates - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(KinematicTransform, LinearBlockPreservesSpeed) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    const Pose pose = RandomPose(rng);
    const auto vel = BodyVelocity::FromVector(RandomVector(rng, 3.0));
    const Vector6 rates = KinematicTransform(pose, vel);
    const double speed = std::sqrt(vel.u * vel.u + vel.v * vel.v + vel.w * vel.w);
    EXPECT_NEAR(rates.head<3>().norm(), speed, 1e-12);
  }
}

TEST(KinematicTransform, RotationBlockIsOrthonormal) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 500; ++i) {
    const Matrix6 j = VelocityTransform(RandomPose(rng));
    const Eigen::Matrix3d r = j.topLeftCorner<3, 3>();
    EXPECT_LT((r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
  }
}

TEST(KinematicTransform, EulerRateBlockMatchesHandExpansion) {
  // phi_dot = p + (q sin(phi) + r cos(phi)) tan(theta) etc.
  Pose pose;
  pose.phi = 0.3;
  pose.theta = -0.4;
  const BodyVelocity vel{0, 0, 0, 0.1, 0.2, -0.3};
  const Vector6 rates = KinematicTransform(pose, vel);
  const double sp = std::sin(0.3), cp = std::cos(0.3), tt = std::tan(-0.4), ct = std::cos(-0.4);
  EXPECT_NEAR(rates(3), 0.1 + (0.2 * sp - 0.3 * cp) * tt, 1e-15);
  EXPECT_NEAR(rates(4), 0.2 * cp + 0.3 * sp, 1e-15);
  EXPECT_NEAR(rates(5), (0.2 * sp - 0.3 * cp) / ct, 1e-15);
}

TEST(KinematicTransform, SingularPitchIsRejected) {
  Pose pose;
  pose.theta = kPitchLimit;
  try {
    KinematicTransform(pose, BodyVelocity{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kSingularAttitude);
  }
}

Matrix6 RandomSpd(std::mt19937_64& rng) {
  Matrix6 a;
  for (int i = 0; i < 6; ++i) a.col(i) = RandomVector(rng, 10.0);
  return a * a.transpose() + Matrix6::Identity();
}

TEST(CoriolisMatrix, ZeroVelocityGivesZero) {
  std::mt19937_64 rng(13);
  EXPECT_TRUE(CoriolisMatrix(RandomSpd(rng), BodyVelocity{}).isZero(0.0));
}

TEST(CoriolisMatrix, SkewSymmetricAndPowerNeutral) {
  std::mt19937_64 rng(14);
  for (int i = 0; i < 1000; ++i) {
    const Matrix6 m = RandomSpd(rng);
    const Vector6 v = RandomVector(rng, 2.0);
    const Matrix6 c = CoriolisMatrix(m, BodyVelocity::FromVector(v));
    EXPECT_LT((c + c.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT(std::abs(v.dot(c * v)), 1e-12);
  }
}

TEST(CoriolisMatrix, PureYawOnDiagonalInertiaHasNoForce) {
  Vector6 d;
  d << 400, 400, 400, 30, 600, 600;
  const BodyVelocity vel{0, 0, 0, 0, 0, 0.7};
  const Vector6 cv = CoriolisMatrix(d.asDiagonal(), vel) * vel.AsVector();
  EXPECT_LT(cv.head<3>().cwiseAbs().maxCoeff(), 1e-15);
}

TEST(CoriolisMatrix, SurgeSwayCouplingMatchesHandExpansion) {
  // Diagonal M, v = (u, 0, 0, 0, 0, r): C v has fy = m11 u r, fx = -m22 v r = 0,
  // and mz = (m22 - m11) u v = 0.
  Vector6 d;
  d << 400, 500, 500, 30, 600, 700;
  const BodyVelocity vel{2.0, 0, 0, 0, 0, 0.5};
  const Vector6 cv = CoriolisMatrix(d.asDiagonal(), vel) * vel.AsVector();
  EXPECT_NEAR(cv(0), 0.0, 1e-12);
  EXPECT_NEAR(cv(1), 400 * 2.0 * 0.5, 1e-12);
  EXPECT_NEAR(cv(5), 0.0, 1e-12);
}

TEST(DampingForce, Examples) {
  VehicleParams p = ConservativeParams();
  EXPECT_TRUE(DampingForce(p, BodyVelocity{}).AsVector().isZero(0.0));
  p.linear_damping(0) = 10;
  EXPECT_DOUBLE_EQ(DampingForce(p, BodyVelocity{2, 0, 0, 0, 0, 0}).fx, -20.0);
  p.linear_damping(0) = 0;
  p.quadratic_damping(0) = 5;
  EXPECT_DOUBLE_EQ(DampingForce(p, BodyVelocity{-3, 0, 0, 0, 0, 0}).fx, 45.0);
}

TEST(DampingForce, AlwaysDissipates) {
  const auto p = DefaultVehicleConfig().hull;
  std::mt19937_64 rng(15);
  for (int i = 0; i < 1000; ++i) {
    const Vector6 v = RandomVector(rng, 5.0);
    EXPECT_LE(v.dot(DampingForce(p, BodyVelocity::FromVector(v)).AsVector()), 0.0);
  }
}

TEST(RestoringForce, NetBuoyancyLiftsVehicle) {
  VehicleParams p = ConservativeParams();
  p.weight = 3629.7;
  p.buoyancy = 3708.2;
  const auto g = RestoringForce(p, Pose{});
  EXPECT_NEAR(g.fz, -78.5, 1e-9);
  EXPECT_NEAR(g.fx, 0.0, 1e-12);
  EXPECT_NEAR(g.mx, 0.0, 1e-12);
}

TEST(RestoringForce, NeutralCoincidentIsZero) {
  const VehicleParams p = ConservativeParams();
  std::mt19937_64 rng(16);
  for (int i = 0; i < 200; ++i) {
    EXPECT_LT(RestoringForce(p, RandomPose(rng)).AsVector().cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(RestoringForce, MetacentricArmOpposesRoll) {
  VehicleParams p = ConservativeParams();
  p.cb = Eigen::Vector3d(0, 0, -0.05);
  Pose pose;
  pose.phi = 0.1;
  const auto g = RestoringForce(p, pose);
  EXPECT_NEAR(g.mx, -p.weight * 0.05 * std::sin(0.1), 1e-9);
  EXPECT_NEAR(g.my, 0.0, 1e-12);
}

TEST(Acceleration, RestIsEquilibrium) {
  const SimState rest;
  const Vector6 a = Acceleration(ConservativeParams(), rest, {}, {});
  EXPECT_LT(a.cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Acceleration, ForceOverMass) {
  VehicleParams p = ConservativeParams();
  p.mass = 500;
  p.added_mass.setZero();
  GeneralizedForce tau;
  tau.fx = 300;
  EXPECT_NEAR(Acceleration(p, SimState{}, tau, {})(0), 0.6, 1e-15);
}

TEST(Acceleration, EquationResidualVanishes) {
  const VehicleParams p = DefaultVehicleConfig().hull;
  const Matrix6 m = p.TotalInertia();
  std::mt19937_64 rng(17);
  for (int i = 0; i < 500; ++i) {
    SimState s;
    s.pose = RandomPose(rng);
    s.velocity = BodyVelocity::FromVector(RandomVector(rng, 2.0));
    const auto tau = GeneralizedForce::FromVector(RandomVector(rng, 300.0));
    const auto w = GeneralizedForce::FromVector(RandomVector(rng, 50.0));
    const Vector6 a = Acceleration(p, s, tau, w);
    const Vector6 v = s.velocity.AsVector();
    // Independent assembly of M a + C v + D v + G - tau - w.
    Vector6 dv;
    for (int k = 0; k < 6; ++k) {
      dv(k) = (p.linear_damping(k) + p.quadratic_damping(k) * std::abs(v(k))) * v(k);
    }
    const Vector6 g = -RestoringForce(p, s.pose).AsVector();
    const Vector6 residual = m * a + CoriolisMatrix(m, s.velocity) * v + dv + g -
                             tau.AsVector() - w.AsVector();
    EXPECT_LT(residual.cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Step, RestIsFixedPoint) {
  SimState s;
  s.pose.z = 10;
  const SimState next = Step(ConservativeParams(), s, {}, {}, 0.005);
  EXPECT_DOUBLE_EQ(next.time, 0.005);
  EXPECT_EQ(next.pose.AsVector(), s.pose.AsVector());
  EXPECT_EQ(next.velocity.AsVector(), s.velocity.AsVector());
}

TEST(Step, SurgeDecayMatchesExponential) {
  VehicleParams p = ConservativeParams();
  p.linear_damping(0) = 50;
  const VehicleModel model(p);
  const double m11 = model.inertia()(0, 0);
  SimState s;
  s.velocity.u = 1.5;
  for (int i = 0; i < 2000; ++i) s = model.Step(s, {}, {}, 0.005);
  const double exact = 1.5 * std::exp(-50.0 / m11 * 10.0);
  EXPECT_NEAR(s.velocity.u / exact, 1.0, 1e-6);
  EXPECT_NEAR(s.time, 10.0, 1e-12);
}

TEST(Step, KineticEnergyIsConservedWithoutDamping) {
  const VehicleModel model(ConservativeParams());
  std::mt19937_64 rng(18);
  for (int trial = 0; trial < 5; ++trial) {
    SimState s;
    s.velocity = BodyVelocity::FromVector(RandomVector(rng, 0.5));
    const double e0 = model.KineticEnergy(s.velocity);
    for (int i = 0; i < 2000; ++i) s = model.Step(s, {}, {}, 0.005);
    EXPECT_LT(std::abs(model.KineticEnergy(s.velocity) - e0) / e0, 1e-6);
  }
}

TEST(Step, Deterministic) {
  const VehicleModel model(DefaultVehicleConfig().hull);
  GeneralizedForce tau;
  tau.fx = 200;
  tau.mz = 30;
  auto run = [&] {
    SimState s;
    s.pose.z = 10;
    for (int i = 0; i < 1000; ++i) s = model.Step(s, tau, {}, 0.005);
    return s;
  };
  const SimState a = run(), b = run();
  EXPECT_EQ(a.pose.AsVector(), b.pose.AsVector());
  EXPECT_EQ(a.velocity.AsVector(), b.velocity.AsVector());
}

TEST(Step, WrapsHeading) {
  const VehicleModel model(ConservativeParams());
  SimState s;
  s.pose.psi = kPi - 1e-4;
  s.velocity.r = 0.5;
  s = model.Step(s, {}, {}, 0.005);
  EXPECT_GE(s.pose.psi, -kPi);
  EXPECT_LT(s.pose.psi, 0.0);
}

TEST(Step, RejectsBadStep) {
  const VehicleModel model(ConservativeParams());
  for (double dt : {0.0, -0.005, 0.2}) {
    try {
      model.Step(SimState{}, {}, {}, dt);
      FAIL() << dt;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kInvalidConfig);
    }
  }
}

TEST(Step, PitchSingularityIsAnError) {
  const VehicleModel model(ConservativeParams());
  SimState s;
  s.pose.theta = kPitchLimit - 1e-4;
  s.velocity.q = 1.0;
  try {
    model.Step(s, {}, {}, 0.005);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kSingularAttitude);
  }
}

TEST(VehicleParams, InvalidParamsRejected) {
  auto expect_kind = [](VehicleParams p, ErrorKind kind) {
    try {
      VehicleModel model(p);
      ADD_FAILURE() << "accepted";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), kind) << e.what();
    }
  };
  VehicleParams p = ConservativeParams();
  p.mass = 0;
  expect_kind(p, ErrorKind::kInvalidParams);
  p = ConservativeParams();
  p.linear_damping(2) = -1;
  expect_kind(p, ErrorKind::kInvalidParams);
  p = ConservativeParams();
  p.inertia(0, 1) = 5;
  expect_kind(p, ErrorKind::kInvalidParams);
  p = ConservativeParams();
  p.added_mass(3, 3) = -10;
  expect_kind(p, ErrorKind::kInvalidParams);
  p = ConservativeParams();
  p.added_mass.setZero();
  p.mass = 1.0;
  p.inertia = Eigen::Vector3d(1e-12, 1, 1).asDiagonal();
  expect_kind(p, ErrorKind::kSingularInertia);
}

TEST(VehicleParams, RigidBodyInertiaUsesCgOffset) {
  VehicleParams p = ConservativeParams();
  p.cg = Eigen::Vector3d(0.1, 0, 0.02);
  const Matrix6 m = p.RigidBodyInertia();
  EXPECT_LT((m - m.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  // Surge force from a yaw acceleration acts through the cg lever.
  EXPECT_NEAR(m(1, 5), p.mass * 0.1, 1e-12);
  EXPECT_NEAR(m(0, 4), p.mass * 0.02, 1e-12);
}

}  // namespace
}  // namespace auvsim
