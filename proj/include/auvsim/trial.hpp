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

#include <filesystem>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "auvsim/autopilot.hpp"
#include "auvsim/param_file.hpp"

namespace auvsim {

inline constexpr double kNeverSettled = std::numeric_limits<double>::infinity();

/// Heading-lock experiment: manual cruise, then engage and hold.
struct TrialConfig {
  double cruise_thrust = 0.30;
  double warmup_seconds = 20.0;
  /// Absolute setpoint in degrees. When unset the setpoint is the heading at
  /// engage plus heading_offset.
  std::optional<double> heading_setpoint;
  double heading_offset = 60.0;
  double initial_heading = 0.0;
  PidGains gains{5.0, 0.0, 0.0};
  double disturbance_yaw_moment = 0.0;  // N m, constant
  double duration = 60.0;               // s after engage
  double dt = 0.005;
  double control_period = kDefaultControlPeriod;
  double error_band = 2.0;  // deg

  void Validate() const;
};

struct TrialSample {
  double t = 0.0;  // s since engage
  double yaw = 0.0;
  double setpoint = 0.0;
  double error = 0.0;
  std::vector<double> commands;

  friend bool operator==(const TrialSample&, const TrialSample&) = default;
};

struct TrialRecord {
  TrialConfig config;
  std::string params_hash;
  double engage_time = 0.0;  // s of simulation time
  std::vector<TrialSample> samples;
  bool valid = true;
  std::string failure;
};

struct TrialMetrics {
  /// First time after which |error| stays inside the band for good.
  double settling_time = kNeverSettled;
  /// Mean |error| over the final 20 % of the record.
  double steady_state_error = 0.0;
  /// Sign changes of the error (setpoint crossings).
  int overshoot_count = 0;
  /// First time |error| enters the band.
  double time_to_band = kNeverSettled;
  /// Signed mean error over the final 20 %.
  double final_error = 0.0;
};

TrialRecord RunTrial(const VehicleConfig& vehicle, const TrialConfig& config);

/// Throws Error(kEmptyRecord) when there are no samples.
TrialMetrics ComputeMetrics(std::span<const TrialSample> samples,
                            double error_band);
TrialMetrics ComputeMetrics(const TrialRecord& record);

/// First sample time with |error| <= band, or kNeverSettled.
double TimeToBand(std::span<const TrialSample> samples, double band);

/// Yaw moment per (kp * degree of error) for small differential commands
/// about cruise, from the thrust-curve slope and allocation lever arms.
double LinearizedYawGain(const VehicleConfig& vehicle, double cruise_thrust);

struct CalibrationResult {
  double disturbance_yaw_moment = 0.0;  // signed, N m
  double measured_sse = 0.0;
  int trials = 0;
  /// Moment the linearized model needs for the same target error.
  double linearized_moment = 0.0;
};

/// Bisects the constant yaw disturbance until the trial at `kp` measures
/// `target_sse` degrees of steady-state error. The moment opposes the
/// commanded turn. Throws Error(kCalibrationFailed) if no bracket exists.
CalibrationResult CalibrateDisturbance(const VehicleConfig& vehicle,
                                       TrialConfig base, double kp,
                                       double target_sse,
                                       double tolerance = 0.02);

struct ComparisonRow {
  PidGains gains;
  TrialMetrics metrics;
  TrialRecord record;
  /// Time to reach the report's common band.
  double paired_time_to_band = kNeverSettled;
  /// paired_time_to_band of the first row minus this row's; positive is
  /// faster.
  double time_to_band_delta = 0.0;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
  /// Largest steady-state error among the rows plus the configured band, so
  /// every run is timed to the same distance from the setpoint.
  double common_band = 0.0;
};

/// One trial per gain set under an otherwise identical configuration.
ComparisonReport CompareGains(const VehicleConfig& vehicle,
                              const TrialConfig& base,
                              std::span<const PidGains> gains);

void WriteTrialCsv(const TrialRecord& record, std::ostream& out);
void WriteMetricsCsv(const ComparisonReport& report, std::ostream& out);

/// Writes metrics.csv and heading_kp<kp>[_n].csv into dir.
void WriteComparison(const ComparisonReport& report,
                     const std::filesystem::path& dir);

}  // namespace auvsim
