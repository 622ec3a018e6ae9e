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

#include <random>

#include "auvsim/dynamics.hpp"

namespace auvsim::testing {

// Neutrally buoyant, coincident centers, no damping.
inline VehicleParams ConservativeParams() {
  VehicleParams p;
  p.mass = 370.0;
  p.inertia = Eigen::Vector3d(26.0, 610.0, 610.0).asDiagonal();
  Vector6 added;
  added << 37.0, 120.0, 120.0, 2.6, 61.0, 61.0;
  p.added_mass = added.asDiagonal();
  p.weight = 3629.7;
  p.buoyancy = 3629.7;
  return p;
}

inline double Uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vector6 RandomVector(std::mt19937_64& rng, double scale) {
  Vector6 v;
  for (int i = 0; i < 6; ++i) v(i) = Uniform(rng, -scale, scale);
  return v;
}

inline Pose RandomPose(std::mt19937_64& rng) {
  Pose p;
  p.x = Uniform(rng, -50, 50);
  p.y = Uniform(rng, -50, 50);
  p.z = Uniform(rng, 0, 40);
  p.phi = Uniform(rng, -3.1, 3.1);
  p.theta = Uniform(rng, -1.3, 1.3);
  p.psi = Uniform(rng, -3.1, 3.1);
  return p;
}

}  // namespace auvsim::testing
