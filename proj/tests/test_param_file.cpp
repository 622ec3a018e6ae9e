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
#include <filesystem>
#include <string>

#include "auvsim/error.hpp"
#include "auvsim/number_format.hpp"
#include "auvsim/param_file.hpp"

namespace auvsim {
namespace {

std::string DefaultText() { return std::string(DefaultVehicleParamsText()); }

std::string Replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  if (pos != std::string::npos) text.replace(pos, from.size(), to);
  return text;
}

void ExpectInvalid(const std::string& text, const std::string& needle) {
  try {
    ParseVehicleConfig(text);
    ADD_FAILURE() << "accepted; expected error mentioning " << needle;
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidParams);
    EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
  }
}

TEST(ParamFile, DefaultVehicle) {
  const auto cfg = DefaultVehicleConfig();
  EXPECT_DOUBLE_EQ(cfg.hull.mass, 370.0);
  EXPECT_DOUBLE_EQ(cfg.hull.weight, 3629.7);
  EXPECT_DOUBLE_EQ(cfg.hull.buoyancy, 3708.2);
  EXPECT_DOUBLE_EQ(cfg.hull.added_mass(0, 0), 37.0);
  EXPECT_DOUBLE_EQ(cfg.hull.added_mass(5, 5), 0.1 * cfg.hull.inertia(2, 2));
  EXPECT_DOUBLE_EQ(cfg.thruster.max_thrust, 300.0);
  EXPECT_EQ(cfg.allocation.thruster_count(), 3);
  EXPECT_DOUBLE_EQ(cfg.allocation.FullForwardSurge(cfg.thruster.max_thrust), 900.0);
  EXPECT_DOUBLE_EQ(cfg.environment.supply_voltage, 150.0);
  EXPECT_EQ(cfg.source_hash, Fnv1aHex(DefaultText()));
  EXPECT_EQ(cfg.source_hash.size(), 16u);
}

TEST(ParamFile, ShippedFileMatchesBuiltIn) {
  const std::filesystem::path shipped = AUVSIM_SOURCE_DIR "/data/default_vehicle.params";
  EXPECT_EQ(ReadTextFile(shipped), DefaultText());
  EXPECT_EQ(LoadVehicleConfig(shipped).source_hash, DefaultVehicleConfig().source_hash);
}

TEST(ParamFile, CommentsAndWhitespace) {
  const auto kv = KeyValueFile::Parse("# header\n  a = 1.5  # trailing\n\nb=2,3\n");
  EXPECT_DOUBLE_EQ(kv.GetDouble("a"), 1.5);
  EXPECT_EQ(kv.GetList("b", 2), (std::vector<double>{2, 3}));
  EXPECT_DOUBLE_EQ(kv.GetDouble("c", 7.0), 7.0);
}

TEST(ParamFile, Rejections) {
  const std::string text = DefaultText();
  ExpectInvalid(text + "\nmass = 1\n", "duplicate");
  ExpectInvalid(text + "\nhull_colour = 3\n", "unknown");
  ExpectInvalid(Replace(text, "allocation.mz = 0.0, 0.4, -0.4", "allocation.mz = 0.0, 0.5, -0.4"),
                "geometry");
  ExpectInvalid(Replace(text, "mass = 370", "mass = heavy"), "finite");
  ExpectInvalid(Replace(text, "thruster.max_thrust = 300.0", "thruster.max_thrust = 400.0"),
                "surge");
  ExpectInvalid(Replace(text, "thruster.2.role = starboard", "thruster.2.role = sideways"),
                "role");
  ExpectInvalid("mass = 1\n", "missing");
  ExpectInvalid("just words\n", "key = value");
}

TEST(ParamFile, MissingFileIsIo) {
  try {
    LoadVehicleConfig("/nonexistent/vehicle.params");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIo);
  }
}

TEST(ParamFile, HashTracksContent) {
  EXPECT_NE(Fnv1aHex("a"), Fnv1aHex("b"));
  EXPECT_EQ(Fnv1aHex(""), "cbf29ce484222325");
}

TEST(NumberFormat, ShortestRoundTrip) {
  EXPECT_EQ(FormatDouble(0.1), "0.1");
  EXPECT_EQ(FormatDouble(-0.0), "0");
  EXPECT_EQ(FormatDouble(1e-20), "1e-20");
  EXPECT_EQ(FormatDouble(300), "300");
  for (double v : {0.1, 1.0 / 3.0, -2.5e-7, 123456.789, 5e-324}) {
    EXPECT_EQ(ParseDouble(FormatDouble(v)), v);
  }
}

TEST(NumberFormat, StrictParsing) {
  EXPECT_FALSE(ParseDouble(""));
  EXPECT_FALSE(ParseDouble("1.0x"));
  EXPECT_FALSE(ParseDouble(" 1"));
  EXPECT_EQ(ParseInt("-42"), -42);
  EXPECT_FALSE(ParseInt("4.2"));
  EXPECT_FALSE(ParseInt("99999999999999999999"));
}

}  // namespace
}  // namespace auvsim
