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

#include <CLI/CLI.hpp>
#include <nlohmann/json.hpp>

#include <atomic>
#include <csignal>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "auvsim/error.hpp"
#include "auvsim/number_format.hpp"
#include "auvsim/param_file.hpp"
#include "auvsim/serve.hpp"
#include "auvsim/telemetry.hpp"
#include "auvsim/telemetry_server.hpp"
#include "auvsim/trial.hpp"

namespace {

using auvsim::Error;
using auvsim::ErrorKind;
using json = nlohmann::json;

std::atomic<bool> g_stop{false};

void OnSignal(int) { g_stop = true; }

void PrintError(std::string_view kind, std::string_view message) {
  std::cerr << json{{"error", kind}, {"message", message}}.dump() << std::endl;
}

// inf and nan are not JSON numbers.
json Number(double v) {
  if (std::isfinite(v)) return v;
  return auvsim::FormatDouble(v);
}

json MetricsJson(const auvsim::TrialMetrics& m) {
  return json{{"settling_time", Number(m.settling_time)},
              {"steady_state_error", Number(m.steady_state_error)},
              {"overshoot_count", m.overshoot_count},
              {"time_to_band", Number(m.time_to_band)},
              {"final_error", Number(m.final_error)}};
}

struct Endpoint {
  std::string host;
  std::uint16_t port = 0;
};

Endpoint ParseEndpoint(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0) {
    throw Error(ErrorKind::kInvalidConfig, "expected HOST:PORT, got '" + text + "'");
  }
  const auto port = auvsim::ParseInt(std::string_view(text).substr(colon + 1));
  if (!port || *port < 0 || *port > 65535) {
    throw Error(ErrorKind::kInvalidConfig, "bad port in '" + text + "'");
  }
  return {text.substr(0, colon), static_cast<std::uint16_t>(*port)};
}

auvsim::VehicleConfig LoadParams(const std::string& path) {
  return path.empty() ? auvsim::DefaultVehicleConfig() : auvsim::LoadVehicleConfig(path);
}

std::ofstream OpenOut(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  return out;
}

struct TrialArgs {
  double kp = 5.0;
  double ki = 0.0;
  double kd = 0.0;
  std::optional<double> setpoint;
  double cruise_pct = 30.0;
  double duration = 60.0;
  double warmup = 20.0;
  double heading_offset = 60.0;
  double band = 2.0;
  std::optional<double> disturbance;
  std::optional<double> target_sse;
  double reference_kp = 5.0;
};

void AddTrialOptions(CLI::App* cmd, TrialArgs& a, bool with_gains) {
  if (with_gains) {
    cmd->add_option("--kp", a.kp, "proportional gain")->capture_default_str();
    cmd->add_option("--ki", a.ki, "integral gain")->capture_default_str();
    cmd->add_option("--kd", a.kd, "derivative gain")->capture_default_str();
  } else {
    cmd->add_option("--ki", a.ki, "integral gain for every run")->capture_default_str();
    cmd->add_option("--kd", a.kd, "derivative gain for every run")->capture_default_str();
  }
  cmd->add_option("--setpoint", a.setpoint, "absolute heading setpoint, deg");
  cmd->add_option("--cruise", a.cruise_pct, "cruise thrust, percent")
      ->capture_default_str();
  cmd->add_option("--duration", a.duration, "seconds recorded after engage")
      ->capture_default_str();
  cmd->add_option("--warmup", a.warmup, "seconds at cruise before engage")
      ->capture_default_str();
  cmd->add_option("--heading-offset", a.heading_offset,
                  "setpoint relative to the heading at engage, deg")
      ->capture_default_str();
  cmd->add_option("--band", a.band, "error band, deg")->capture_default_str();
  auto* d = cmd->add_option("--disturbance", a.disturbance, "constant yaw moment, N m");
  cmd->add_option("--target-sse", a.target_sse,
                  "calibrate the yaw disturbance so --reference-kp settles at this error")
      ->excludes(d);
  cmd->add_option("--reference-kp", a.reference_kp, "gain used for calibration")
      ->capture_default_str();
}

auvsim::TrialConfig MakeTrialConfig(const auvsim::VehicleConfig& vehicle,
                                    const TrialArgs& a, json& notes) {
  auvsim::TrialConfig c;
  c.gains = {a.kp, a.ki, a.kd};
  c.heading_setpoint = a.setpoint;
  c.cruise_thrust = a.cruise_pct / 100.0;
  c.duration = a.duration;
  c.warmup_seconds = a.warmup;
  c.heading_offset = a.heading_offset;
  c.error_band = a.band;
  if (a.disturbance) c.disturbance_yaw_moment = *a.disturbance;
  c.Validate();
  if (a.target_sse) {
    const auto cal = auvsim::CalibrateDisturbance(vehicle, c, a.reference_kp, *a.target_sse);
    c.disturbance_yaw_moment = cal.disturbance_yaw_moment;
    notes["calibrated_disturbance"] = cal.disturbance_yaw_moment;
  }
  return c;
}

int RunTrialCmd(const std::string& params, const TrialArgs& a, const std::string& out) {
  const auto vehicle = LoadParams(params);
  json summary;
  const auto config = MakeTrialConfig(vehicle, a, summary);
  const auto record = auvsim::RunTrial(vehicle, config);
  if (!record.valid) throw Error(ErrorKind::kInvalidConfig, "trial failed: " + record.failure);
  if (out.empty()) {
    auvsim::WriteTrialCsv(record, std::cout);
  } else {
    auto f = OpenOut(out);
    auvsim::WriteTrialCsv(record, f);
  }
  summary["metrics"] = MetricsJson(auvsim::ComputeMetrics(record));
  summary["samples"] = record.samples.size();
  summary["disturbance"] = config.disturbance_yaw_moment;
  (out.empty() ? std::cerr : std::cout) << summary.dump() << std::endl;
  return 0;
}

int RunCalibrateCmd(const std::string& params, const TrialArgs& a, double target, double kp) {
  const auto vehicle = LoadParams(params);
  TrialArgs base = a;
  base.disturbance.reset();
  base.target_sse.reset();
  json ignored;
  const auto config = MakeTrialConfig(vehicle, base, ignored);
  const auto cal = auvsim::CalibrateDisturbance(vehicle, config, kp, target);
  std::cout << json{{"kp", kp},
                    {"target_sse", target},
                    {"disturbance_yaw_moment", cal.disturbance_yaw_moment},
                    {"measured_sse", cal.measured_sse},
                    {"trials", cal.trials},
                    {"linearized_moment", cal.linearized_moment}}
                   .dump()
            << std::endl;
  return 0;
}

int RunCompareCmd(const std::string& params, TrialArgs a, const std::vector<double>& kps,
                  const std::string& out) {
  if (kps.empty()) throw Error(ErrorKind::kInvalidConfig, "--kp-list is empty");
  const auto vehicle = LoadParams(params);
  if (!a.disturbance && !a.target_sse) a.target_sse = 8.0;
  json summary;
  const auto base = MakeTrialConfig(vehicle, a, summary);
  std::vector<auvsim::PidGains> gains;
  for (double kp : kps) gains.push_back({kp, a.ki, a.kd});
  const auto report = auvsim::CompareGains(vehicle, base, gains);
  auvsim::WriteComparison(report, out);
  summary["disturbance"] = base.disturbance_yaw_moment;
  summary["common_band"] = report.common_band;
  json rows = json::array();
  for (const auto& row : report.rows) {
    json r = MetricsJson(row.metrics);
    r["kp"] = row.gains.kp;
    r["paired_time_to_band"] = Number(row.paired_time_to_band);
    r["time_to_band_delta"] = Number(row.time_to_band_delta);
    rows.push_back(r);
  }
  summary["runs"] = rows;
  std::cout << summary.dump() << std::endl;
  return 0;
}

struct ServeArgs {
  std::string listen = "127.0.0.1:5760";
  std::string ws;
  bool no_ws = false;
  double rate = 35.0;
  bool realtime = false;
  std::optional<double> duration;
  std::string csv;
  std::string command_log;
  std::size_t max_pending = 1 << 20;
};

int RunServeCmd(const std::string& params, const ServeArgs& a) {
  const auto vehicle = LoadParams(params);
  auvsim::StreamConfig stream;
  stream.rate_hz = a.rate;
  stream.Validate();
  const Endpoint tcp_ep = ParseEndpoint(a.listen);
  std::optional<Endpoint> ws_ep;
  if (!a.no_ws) {
    ws_ep = a.ws.empty()
                ? Endpoint{tcp_ep.host,
                           static_cast<std::uint16_t>(tcp_ep.port == 0 ? 0 : tcp_ep.port + 1)}
                : ParseEndpoint(a.ws);
  }

  auvsim::Simulation sim(vehicle, auvsim::SimulationOptions{});
  auvsim::CommandQueue queue;
  auvsim::ServerOptions server_options;
  server_options.thruster_count = vehicle.allocation.thruster_count();
  server_options.max_pending_bytes = a.max_pending;
  auvsim::TelemetryServer server(queue, server_options);
  json ready{{"event", "listening"}, {"tcp", server.ListenTcp(tcp_ep.host, tcp_ep.port)}};
  if (ws_ep) ready["websocket"] = server.ListenWebSocket(ws_ep->host, ws_ep->port);

  auvsim::ServeLoop loop(sim, queue, stream.rate_hz);
  loop.AddSink(&server);
  loop.SetReply([&server](std::uint64_t origin, const std::string& line) {
    server.Reply(origin, line);
  });
  std::ofstream csv_file;
  std::unique_ptr<auvsim::CsvFrameLog> csv;
  if (!a.csv.empty()) {
    csv_file = OpenOut(a.csv);
    csv = std::make_unique<auvsim::CsvFrameLog>(csv_file);
    loop.AddSink(csv.get());
  }
  std::ofstream log_file;
  if (!a.command_log.empty()) {
    log_file = OpenOut(a.command_log);
    loop.SetCommandLog(&log_file);
  }

  std::signal(SIGINT, OnSignal);
  std::signal(SIGTERM, OnSignal);
  server.Start();
  std::cout << ready.dump() << std::endl;
  loop.Run({a.realtime, a.duration}, &g_stop);
  loop.FinishLog();
  server.Stop();
  std::cout << json{{"event", "stopped"},
                    {"ticks", loop.ticks()},
                    {"frames", loop.frames()},
                    {"applied", loop.applied()},
                    {"rejected", loop.rejected()},
                    {"dropped_clients", server.dropped_clients()}}
                   .dump()
            << std::endl;
  return 0;
}

int RunReplayCmd(const std::string& params, const std::string& log, const std::string& out) {
  const auto vehicle = LoadParams(params);
  std::ifstream in(log, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + log);
  auto f = OpenOut(out);
  auvsim::CsvFrameLog csv(f);
  const auto frames = auvsim::ReplayCommandLog(in, vehicle, {&csv});
  std::cout << json{{"frames", frames}}.dump() << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Autonomous underwater vehicle heading-control simulator"};
  app.require_subcommand(1);
  std::string params;
  app.add_option("--params", params, "vehicle parameter file (built-in default if omitted)")
      ->check(CLI::ExistingFile);

  auto* trial = app.add_subcommand("trial", "run one closed-loop heading trial");
  TrialArgs trial_args;
  std::string trial_out;
  AddTrialOptions(trial, trial_args, true);
  trial->add_option("--out", trial_out, "heading trace CSV (stdout if omitted)");

  auto* calibrate = app.add_subcommand("calibrate", "fit the yaw disturbance to a target error");
  TrialArgs cal_args;
  double target_sse = 8.0;
  double cal_kp = 5.0;
  AddTrialOptions(calibrate, cal_args, false);
  calibrate->add_option("--kp", cal_kp, "proportional gain")->capture_default_str();

  auto* compare = app.add_subcommand("compare", "run the same trial over several gains");
  TrialArgs cmp_args;
  std::vector<double> kps{5.0, 10.0};
  std::string cmp_out = "compare_out";
  AddTrialOptions(compare, cmp_args, false);
  compare->add_option("--kp-list", kps, "proportional gains")->delimiter(',')
      ->capture_default_str();
  compare->add_option("--out", cmp_out, "output directory")->capture_default_str();

  auto* serve = app.add_subcommand("serve", "run the simulator and stream telemetry");
  ServeArgs serve_args;
  serve->add_option("--listen", serve_args.listen, "TCP line protocol HOST:PORT")
      ->envname("AUVSIM_LISTEN")
      ->capture_default_str();
  serve->add_option("--ws", serve_args.ws, "WebSocket HOST:PORT (default: listen port + 1)");
  serve->add_flag("--no-ws", serve_args.no_ws, "disable the WebSocket bridge");
  serve->add_option("--rate", serve_args.rate, "telemetry rate, Hz")
      ->envname("AUVSIM_RATE")
      ->capture_default_str();
  serve->add_flag("--realtime", serve_args.realtime, "pace ticks to the wall clock")
      ->envname("AUVSIM_REALTIME");
  serve->add_option("--duration", serve_args.duration, "stop after this many simulated seconds");
  serve->add_option("--csv", serve_args.csv, "also log every frame to this CSV");
  serve->add_option("--command-log", serve_args.command_log, "record commands for replay");
  serve->add_option("--max-pending", serve_args.max_pending,
                    "bytes a client may fall behind before it is dropped")
      ->capture_default_str();

  auto* replay = app.add_subcommand("replay", "rebuild a telemetry CSV from a command log");
  std::string replay_log;
  std::string replay_out;
  replay->add_option("--log", replay_log, "command log from serve")->required();
  replay->add_option("--out", replay_out, "telemetry CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    PrintError("InvalidArguments", e.what());
    return 2;
  }

  // Calibrate takes its target from its own flag.
  if (calibrate->parsed() && cal_args.target_sse) target_sse = *cal_args.target_sse;

  try {
    if (trial->parsed()) return RunTrialCmd(params, trial_args, trial_out);
    if (calibrate->parsed()) return RunCalibrateCmd(params, cal_args, target_sse, cal_kp);
    if (compare->parsed()) return RunCompareCmd(params, cmp_args, kps, cmp_out);
    if (serve->parsed()) return RunServeCmd(params, serve_args);
    if (replay->parsed()) return RunReplayCmd(params, replay_log, replay_out);
  } catch (const Error& e) {
    PrintError(auvsim::ToString(e.kind()), e.what());
    return 1;
  } catch (const std::exception& e) {
    PrintError("Internal", e.what());
    return 1;
  }
  return 0;
}
