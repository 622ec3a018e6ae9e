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

#include "auvsim/trial.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <string>
#include <utility>

#include "auvsim/error.hpp"
#include "auvsim/number_format.hpp"
#include "auvsim/simulation.hpp"

namespace auvsim {
namespace {

void RequireConfig(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::kInvalidConfig, what);
}

std::int64_t TickCount(double seconds, double period) {
  return static_cast<std::int64_t>(std::llround(seconds / period));
}

std::string FormatMetric(double v) {
  return std::isinf(v) ? std::string("inf") : FormatDouble(v);
}

}  // namespace

void TrialConfig::Validate() const {
  RequireConfig(cruise_thrust >= 0.0 && cruise_thrust <= 1.0,
                "cruise thrust must lie in [0, 1]");
  RequireConfig(std::isfinite(warmup_seconds) && warmup_seconds >= 0.0,
                "warmup must be >= 0 s");
  RequireConfig(std::isfinite(duration) && duration > 0.0,
                "duration must be > 0 s");
  RequireConfig(dt > 0.0 && dt <= 0.1, "dt must lie in (0, 0.1] s");
  RequireConfig(control_period > 0.0, "control period must be > 0 s");
  const double ratio = control_period / dt;
  RequireConfig(std::abs(ratio - std::round(ratio)) < 1e-9 && ratio >= 1.0,
                "dt must divide the control period");
  RequireConfig(std::isfinite(error_band) && error_band > 0.0,
                "error band must be > 0 deg");
  RequireConfig(std::isfinite(disturbance_yaw_moment),
                "disturbance must be finite");
  RequireConfig(std::isfinite(heading_offset) && std::isfinite(initial_heading),
                "headings must be finite");
  RequireConfig(!heading_setpoint || std::isfinite(*heading_setpoint),
                "setpoint must be finite");
  gains.Validate();
}

TrialRecord RunTrial(const VehicleConfig& vehicle, const TrialConfig& config) {
  config.Validate();
  TrialRecord record;
  record.config = config;
  record.params_hash = vehicle.source_hash;

  try {
    SimulationOptions options;
    options.dt = config.dt;
    options.control_period = config.control_period;
    options.disturbance.mz = config.disturbance_yaw_moment;
    options.initial_heading_deg = config.initial_heading;
    Simulation sim(vehicle, options);

    // Manual phase: every thruster at the cruise setting.
    const std::vector<double> manual(sim.layout().thruster_count, config.cruise_thrust);
    sim.SetManualThrust(manual);
    for (std::int64_t i = 0, n = TickCount(config.warmup_seconds, config.control_period);
         i < n; ++i) {
      sim.AdvanceTick();
    }

    record.engage_time = sim.time();
    const double setpoint = config.heading_setpoint
                                ? Wrap360(*config.heading_setpoint)
                                : Wrap360(sim.HeadingDeg() + config.heading_offset);
    sim.SetCruiseThrust(config.cruise_thrust);
    sim.Engage(setpoint, config.gains);

    const std::int64_t n = TickCount(config.duration, config.control_period);
    record.samples.reserve(static_cast<std::size_t>(n));
    for (std::int64_t k = 0; k < n; ++k) {
      TrialSample sample;
      sample.t = static_cast<double>(k) * config.control_period;
      sample.yaw = sim.HeadingDeg();
      sample.setpoint = setpoint;
      sample.error = HeadingError(setpoint, sample.yaw);
      sample.commands = sim.AdvanceTick().per_thruster;
      record.samples.push_back(std::move(sample));
    }
  } catch (const Error& e) {
    record.valid = false;
    record.failure = std::string(ToString(e.kind())) + ": " + e.what();
  }
  return record;
}

double TimeToBand(std::span<const TrialSample> samples, double band) {
  for (const auto& s : samples) {
    if (std::abs(s.error) <= band) return s.t;
  }
  return kNeverSettled;
}

TrialMetrics ComputeMetrics(std::span<const TrialSample> samples,
                            double error_band) {
  if (samples.empty()) {
    throw Error(ErrorKind::kEmptyRecord, "trial record has no samples");
  }
  TrialMetrics m;
  const std::size_t n = samples.size();
  const std::size_t window = std::max<std::size_t>(1, (n + 4) / 5);

  double sum = 0.0, sum_abs = 0.0;
  for (std::size_t i = n - window; i < n; ++i) {
    sum += samples[i].error;
    sum_abs += std::abs(samples[i].error);
  }
  m.final_error = sum / static_cast<double>(window);
  m.steady_state_error = sum_abs / static_cast<double>(window);

  m.time_to_band = TimeToBand(samples, error_band);
  auto in_band = [&](const TrialSample& s) { return std::abs(s.error) <= error_band; };
  if (in_band(samples.back())) {
    std::size_t first = n - 1;
    while (first > 0 && in_band(samples[first - 1])) --first;
    m.settling_time = samples[first].t;
  }

  int last_sign = 0;
  for (const auto& s : samples) {
    const int sign = (s.error > 0.0) - (s.error < 0.0);
    if (sign == 0) continue;
    if (last_sign != 0 && sign != last_sign) ++m.overshoot_count;
    last_sign = sign;
  }
  return m;
}

TrialMetrics ComputeMetrics(const TrialRecord& record) {
  return ComputeMetrics(record.samples, record.config.error_band);
}

double LinearizedYawGain(const VehicleConfig& vehicle, double cruise_thrust) {
  const ThrusterParams& th = vehicle.thruster;
  if (cruise_thrust <= th.dead_zone) return 0.0;
  const double frac = (cruise_thrust - th.dead_zone) / (1.0 - th.dead_zone);
  const double slope = th.max_thrust * th.curve_exponent *
                       std::pow(frac, th.curve_exponent - 1.0) / (1.0 - th.dead_zone);
  const MixerLayout layout = MixerLayout::FromMounts(vehicle.allocation.mounts());
  const auto& b = vehicle.allocation.entries();
  double arm = 0.0;
  if (layout.port >= 0) arm += b(5, layout.port);
  if (layout.starboard >= 0) arm -= b(5, layout.starboard);
  return arm * slope / 100.0;
}

CalibrationResult CalibrateDisturbance(const VehicleConfig& vehicle,
                                       TrialConfig base, double kp,
                                       double target_sse, double tolerance) {
  if (!(std::isfinite(target_sse) && target_sse >= 0.0)) {
    throw Error(ErrorKind::kInvalidConfig, "target SSE must be >= 0");
  }
  if (!(kp > 0.0)) {
    throw Error(ErrorKind::kCalibrationFailed, "calibration needs kp > 0");
  }
  base.gains.kp = kp;
  CalibrationResult result;
  result.linearized_moment =
      target_sse * LinearizedYawGain(vehicle, base.cruise_thrust) * kp;
  if (target_sse == 0.0) return result;

  // Oppose the commanded turn so the vehicle settles short of the setpoint.
  const double sign = base.heading_offset < 0.0 ? 1.0 : -1.0;
  auto measure = [&](double magnitude) {
    TrialConfig cfg = base;
    cfg.disturbance_yaw_moment = sign * magnitude;
    const TrialRecord rec = RunTrial(vehicle, cfg);
    ++result.trials;
    if (!rec.valid) {
      throw Error(ErrorKind::kCalibrationFailed, "trial failed: " + rec.failure);
    }
    return ComputeMetrics(rec).steady_state_error;
  };

  const auto& b = vehicle.allocation.entries();
  const double max_moment = b.row(5).cwiseAbs().sum() * vehicle.thruster.max_thrust;
  double lo = 0.0;
  double hi = std::max(1.0, 1.25 * result.linearized_moment);
  double sse_hi = measure(hi);
  while (sse_hi < target_sse) {
    lo = hi;
    hi *= 2.0;
    if (hi > max_moment) {
      throw Error(ErrorKind::kCalibrationFailed,
                  "no disturbance within thruster authority reaches the target error");
    }
    sse_hi = measure(hi);
  }

  double best = hi, best_sse = sse_hi;
  for (int iter = 0; iter < 60 && std::abs(best_sse - target_sse) > tolerance; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double sse = measure(mid);
    if (std::abs(sse - target_sse) < std::abs(best_sse - target_sse)) {
      best = mid;
      best_sse = sse;
    }
    (sse < target_sse ? lo : hi) = mid;
  }
  if (std::abs(best_sse - target_sse) > tolerance) {
    throw Error(ErrorKind::kCalibrationFailed, "bisection did not converge");
  }
  result.disturbance_yaw_moment = sign * best;
  result.measured_sse = best_sse;
  return result;
}

ComparisonReport CompareGains(const VehicleConfig& vehicle,
                              const TrialConfig& base,
                              std::span<const PidGains> gains) {
  if (gains.size() < 2) {
    throw Error(ErrorKind::kInvalidConfig, "comparison needs at least two gain sets");
  }
  std::vector<std::future<TrialRecord>> runs;
  runs.reserve(gains.size());
  for (const PidGains& g : gains) {
    TrialConfig cfg = base;
    cfg.gains = g;
    cfg.Validate();
    runs.push_back(std::async(std::launch::async,
                              [&vehicle, cfg] { return RunTrial(vehicle, cfg); }));
  }

  ComparisonReport report;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    ComparisonRow row;
    row.gains = gains[i];
    row.record = runs[i].get();
    if (!row.record.valid) {
      throw Error(ErrorKind::kInvalidConfig, "trial failed: " + row.record.failure);
    }
    row.metrics = ComputeMetrics(row.record);
    report.rows.push_back(std::move(row));
  }
  // Pair the runs at one error level every gain actually reaches.
  double worst_sse = 0.0;
  for (const auto& row : report.rows) {
    worst_sse = std::max(worst_sse, row.metrics.steady_state_error);
  }
  report.common_band = worst_sse + base.error_band;
  for (auto& row : report.rows) {
    row.paired_time_to_band = TimeToBand(row.record.samples, report.common_band);
  }
  const double reference = report.rows.front().paired_time_to_band;
  for (auto& row : report.rows) {
    row.time_to_band_delta = reference - row.paired_time_to_band;
  }
  return report;
}

void WriteTrialCsv(const TrialRecord& record, std::ostream& out) {
  const TrialConfig& c = record.config;
  out << "# params_hash=" << record.params_hash << '\n'
      << "# kp=" << FormatDouble(c.gains.kp) << " ki=" << FormatDouble(c.gains.ki)
      << " kd=" << FormatDouble(c.gains.kd) << '\n'
      << "# cruise=" << FormatDouble(c.cruise_thrust)
      << " warmup=" << FormatDouble(c.warmup_seconds)
      << " duration=" << FormatDouble(c.duration)
      << " dt=" << FormatDouble(c.dt)
      << " control_period=" << FormatDouble(c.control_period) << '\n'
      << "# disturbance_yaw_moment=" << FormatDouble(c.disturbance_yaw_moment)
      << " engage_time=" << FormatDouble(record.engage_time)
      << " valid=" << (record.valid ? "true" : "false") << '\n';
  if (!record.valid) out << "# failure=" << record.failure << '\n';

  const std::size_t n_cmd =
      record.samples.empty() ? 0 : record.samples.front().commands.size();
  out << "t,yaw,setpoint,error";
  for (std::size_t i = 0; i < n_cmd; ++i) out << ",cmd" << i;
  out << '\n';
  for (const auto& s : record.samples) {
    out << FormatDouble(s.t) << ',' << FormatDouble(s.yaw) << ','
        << FormatDouble(s.setpoint) << ',' << FormatDouble(s.error);
    for (double c : s.commands) out << ',' << FormatDouble(c);
    out << '\n';
  }
}

void WriteMetricsCsv(const ComparisonReport& report, std::ostream& out) {
  out << "kp,ki,kd,settling_time,steady_state_error,overshoot_count,"
         "time_to_band,final_error,common_band,paired_time_to_band,"
         "time_to_band_delta\n";
  for (const auto& row : report.rows) {
    const auto& m = row.metrics;
    out << FormatDouble(row.gains.kp) << ',' << FormatDouble(row.gains.ki) << ','
        << FormatDouble(row.gains.kd) << ',' << FormatMetric(m.settling_time) << ','
        << FormatDouble(m.steady_state_error) << ',' << m.overshoot_count << ','
        << FormatMetric(m.time_to_band) << ',' << FormatDouble(m.final_error)
        << ',' << FormatDouble(report.common_band) << ','
        << FormatMetric(row.paired_time_to_band) << ','
        << (std::isnan(row.time_to_band_delta) ? std::string("nan")
                                               : FormatMetric(row.time_to_band_delta))
        << '\n';
  }
}

void WriteComparison(const ComparisonReport& report,
                     const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [](const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error(ErrorKind::kIo, "cannot write '" + p.string() + "'");
    return out;
  };
  {
    std::ofstream out = open(dir / "metrics.csv");
    WriteMetricsCsv(report, out);
  }
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto name = "heading_" + std::to_string(i) + "_kp" +
                      FormatDouble(report.rows[i].gains.kp) + ".csv";
    std::ofstream out = open(dir / name);
    WriteTrialCsv(report.rows[i].record, out);
  }
}

}  // namespace auvsim
