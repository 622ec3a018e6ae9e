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

#include "auvsim/param_file.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>

#include "auvsim/error.hpp"

namespace auvsim {
namespace {

constexpr std::string_view kRowNames[6] = {"fx", "fy", "fz", "mx", "my", "mz"};

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void Fail(const std::string& message) {
  throw Error(ErrorKind::kInvalidParams, message);
}

double ParseNumber(std::string_view text, const std::string& key) {
  text = Trim(text);
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty() || !std::isfinite(value)) {
    Fail("key '" + key + "': '" + std::string(text) + "' is not a finite number");
  }
  return value;
}

Eigen::Vector3d ToVector3(const std::vector<double>& v) {
  return {v[0], v[1], v[2]};
}

}  // namespace

KeyValueFile KeyValueFile::Parse(std::string_view text) {
  KeyValueFile file;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      Fail("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string key(Trim(line.substr(0, eq)));
    std::string value(Trim(line.substr(eq + 1)));
    if (key.empty()) Fail("line " + std::to_string(line_no) + ": empty key");
    if (file.values_.count(key) != 0) {
      Fail("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    file.lines_[key] = line_no;
    file.values_.emplace(std::move(key), std::move(value));
  }
  return file;
}

bool KeyValueFile::Has(const std::string& key) const {
  return values_.count(key) != 0;
}

std::string KeyValueFile::GetString(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) Fail("missing key '" + key + "'");
  used_.insert(key);
  return it->second;
}

double KeyValueFile::GetDouble(const std::string& key) const {
  return ParseNumber(GetString(key), key);
}

double KeyValueFile::GetDouble(const std::string& key, double fallback) const {
  return Has(key) ? GetDouble(key) : fallback;
}

std::vector<double> KeyValueFile::GetList(
    const std::string& key, std::optional<std::size_t> expected) const {
  const std::string raw = GetString(key);
  std::vector<double> out;
  std::string_view rest = raw;
  while (true) {
    const auto comma = rest.find(',');
    out.push_back(ParseNumber(rest.substr(0, comma), key));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  if (expected && out.size() != *expected) {
    Fail("key '" + key + "' needs " + std::to_string(*expected) +
         " values, got " + std::to_string(out.size()));
  }
  return out;
}

void KeyValueFile::RejectUnused() const {
  std::string unknown;
  for (const auto& [key, value] : values_) {
    if (used_.count(key) == 0) {
      if (!unknown.empty()) unknown += ", ";
      unknown += key + " (line " + std::to_string(lines_.at(key)) + ")";
    }
  }
  if (!unknown.empty()) Fail("unknown keys: " + unknown);
}

void VehicleConfig::Validate() const {
  hull.Validate();
  thruster.Validate();
  if (allocation.thruster_count() < 1) Fail("allocation has no thrusters");
  const double surge = allocation.FullForwardSurge(thruster.max_thrust);
  if (surge > max_total_surge + 1e-9) {
    Fail("full-forward surge " + std::to_string(surge) + " N exceeds " +
         std::to_string(max_total_surge) + " N");
  }
  if (!(environment.gravity > 0.0)) Fail("gravity must be positive");
}

VehicleConfig ParseVehicleConfig(std::string_view text) {
  const KeyValueFile kv = KeyValueFile::Parse(text);
  VehicleConfig cfg;
  VehicleParams& hull = cfg.hull;

  cfg.environment.gravity = kv.GetDouble("environment.gravity", 9.81);
  cfg.environment.lakebed_depth = kv.GetDouble("environment.lakebed_depth", 50.0);
  cfg.environment.initial_depth = kv.GetDouble("environment.initial_depth", 10.0);
  cfg.environment.supply_voltage = kv.GetDouble("power.supply_voltage", 150.0);

  hull.mass = kv.GetDouble("mass");
  const auto inertia = kv.GetList("inertia", 9);
  hull.inertia = Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(
      inertia.data());
  hull.weight = kv.GetDouble("weight", hull.mass * cfg.environment.gravity);
  hull.buoyancy = kv.GetDouble("buoyancy");
  hull.cg = ToVector3(kv.GetList("cg", 3));
  hull.cb = ToVector3(kv.GetList("cb", 3));
  hull.length = kv.GetDouble("length", 0.0);
  hull.hull_diameter = kv.GetDouble("hull_diameter", 0.0);
  hull.linear_damping = Vector6(kv.GetList("linear_damping", 6).data());
  hull.quadratic_damping = Vector6(kv.GetList("quadratic_damping", 6).data());

  if (kv.Has("added_mass")) {
    const auto ma = kv.GetList("added_mass", 36);
    hull.added_mass = Eigen::Map<const Eigen::Matrix<double, 6, 6, Eigen::RowMajor>>(ma.data());
  } else {
    // Diagonal added mass scaled from the rigid-body terms.
    const double lin = kv.GetDouble("added_mass.linear_fraction", 0.1);
    const double ang = kv.GetDouble("added_mass.angular_fraction", 0.1);
    hull.added_mass.setZero();
    for (int i = 0; i < 3; ++i) {
      hull.added_mass(i, i) = lin * hull.mass;
      hull.added_mass(i + 3, i + 3) = ang * hull.inertia(i, i);
    }
  }

  ThrusterParams& th = cfg.thruster;
  th.max_thrust = kv.GetDouble("thruster.max_thrust", th.max_thrust);
  th.dead_zone = kv.GetDouble("thruster.dead_zone", th.dead_zone);
  th.time_constant = kv.GetDouble("thruster.time_constant", th.time_constant);
  th.curve_exponent = kv.GetDouble("thruster.curve_exponent", th.curve_exponent);
  th.max_rpm = kv.GetDouble("thruster.max_rpm", th.max_rpm);

  const double count_raw = kv.GetDouble("thruster.count");
  if (count_raw < 1 || count_raw != std::floor(count_raw) || count_raw > 64) {
    Fail("thruster.count must be a positive integer");
  }
  const auto count = static_cast<std::size_t>(count_raw);
  std::vector<ThrusterMount> mounts(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::string prefix = "thruster." + std::to_string(i) + ".";
    mounts[i].position = ToVector3(kv.GetList(prefix + "position", 3));
    mounts[i].axis = ToVector3(kv.GetList(prefix + "axis", 3));
    if (mounts[i].axis.norm() < 1e-12) Fail(prefix + "axis must be non-zero");
    mounts[i].axis.normalize();
    mounts[i].role = ParseThrusterRole(kv.GetString(prefix + "role"));
  }

  const AllocationMatrix from_geometry = AllocationMatrix::FromGeometry(mounts);
  if (kv.Has("allocation.fx")) {
    Eigen::Matrix<double, 6, Eigen::Dynamic> b(6, static_cast<Eigen::Index>(count));
    for (int row = 0; row < 6; ++row) {
      const auto values = kv.GetList("allocation." + std::string(kRowNames[row]), count);
      for (std::size_t c = 0; c < count; ++c) b(row, static_cast<Eigen::Index>(c)) = values[c];
    }
    if ((b - from_geometry.entries()).cwiseAbs().maxCoeff() > 1e-6) {
      Fail("allocation rows disagree with thruster geometry");
    }
    cfg.allocation = AllocationMatrix(std::move(b), std::move(mounts));
  } else {
    cfg.allocation = from_geometry;
  }
  cfg.max_total_surge = kv.GetDouble("allocation.max_total_surge", 900.0);

  kv.RejectUnused();
  cfg.source_hash = Fnv1aHex(text);
  cfg.Validate();
  return cfg;
}

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

VehicleConfig LoadVehicleConfig(const std::filesystem::path& path) {
  return ParseVehicleConfig(ReadTextFile(path));
}

VehicleConfig DefaultVehicleConfig() {
  return ParseVehicleConfig(DefaultVehicleParamsText());
}

std::string Fnv1aHex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace auvsim
