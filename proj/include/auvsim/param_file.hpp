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
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "auvsim/actuation.hpp"
#include "auvsim/dynamics.hpp"

namespace auvsim {

/// Flat `key = value` text. `#` starts a comment; vectors and matrices are
/// comma-separated, matrices row-major. Keys must be unique.
class KeyValueFile {
 public:
  static KeyValueFile Parse(std::string_view text);

  bool Has(const std::string& key) const;
  std::string GetString(const std::string& key) const;
  double GetDouble(const std::string& key) const;
  double GetDouble(const std::string& key, double fallback) const;
  std::vector<double> GetList(const std::string& key,
                              std::optional<std::size_t> expected = {}) const;

  /// Throws Error(kInvalidParams) naming every key no getter touched.
  void RejectUnused() const;

 private:
  std::map<std::string, std::string> values_;
  std::map<std::string, int> lines_;
  mutable std::set<std::string> used_;
};

struct EnvironmentParams {
  double gravity = 9.81;
  double lakebed_depth = 50.0;   // m, altitude channel reference
  double initial_depth = 10.0;   // m
  double supply_voltage = 150.0; // V, voltage channel
};

/// Everything the simulator reads from a vehicle parameter file.
struct VehicleConfig {
  VehicleParams hull;
  ThrusterParams thruster;
  AllocationMatrix allocation;
  EnvironmentParams environment;
  double max_total_surge = 900.0;  // N, bound on full-forward surge
  std::string source_hash;         // FNV-1a 64 of the file text, hex

  void Validate() const;
};

VehicleConfig ParseVehicleConfig(std::string_view text);
VehicleConfig LoadVehicleConfig(const std::filesystem::path& path);

/// The shipped default parameter file, compiled into the library.
std::string_view DefaultVehicleParamsText();
VehicleConfig DefaultVehicleConfig();

std::string Fnv1aHex(std::string_view bytes);

/// Reads a whole file; throws Error(kIo).
std::string ReadTextFile(const std::filesystem::path& path);

}  // namespace auvsim
