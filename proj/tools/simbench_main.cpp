#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "simbench/config.hpp"
#include "simbench/errors.hpp"
#include "simbench/scenario.hpp"
#include "simbench/scope.hpp"
#include "simbench/server.hpp"
#include "simbench/simulation.hpp"

namespace fs = std::filesystem;
using namespace simbench;

namespace {

std::vector<std::string> split_signals(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int run_command(const std::string& scenario_path, const std::string& config_path,
                const std::string& out_dir, const std::string& trace_list) {
  const SimConfig cfg = resolve_config(config_path);
  const Scenario sc = load_scenario(scenario_path);

  std::vector<std::string> names;
  if (trace_list.empty()) {
    for (Signal s : all_signals()) names.emplace_back(signal_name(s));
  } else {
    names = split_signals(trace_list);
  }

  // Logic channels need the fast rate; the rest are sampled slowly.
  TraceConfig logic{{}, cfg.scope.logic_hz, sc.duration};
  TraceConfig analog{{}, cfg.scope.analog_hz, sc.duration};
  for (const auto& name : names) {
    (is_logic(signal_from_name(name)) ? logic : analog).signals.push_back(name);
  }
  std::vector<TraceConfig> traces;
  std::vector<std::string> files;
  if (!logic.signals.empty()) {
    traces.push_back(logic);
    files.emplace_back("scope_logic.csv");
  }
  if (!analog.signals.empty()) {
    traces.push_back(analog);
    files.emplace_back("scope_analog.csv");
  }

  const RunResult result = run_scenario(cfg, sc, traces);

  fs::create_directories(out_dir);
  for (std::size_t k = 0; k < traces.size(); ++k) {
    scope_export_csv(result.traces[k], fs::path(out_dir) / files[k]);
  }
  const fs::path log_path = fs::path(out_dir) / "telemetry.log";
  std::ofstream log(log_path, std::ios::binary | std::ios::trunc);
  if (!log) throw IoFailure("cannot write " + log_path.string());
  for (const auto& line : result.telemetry) log << line;
  log.flush();
  if (!log) throw IoFailure("write failed for " + log_path.string());

  std::cout << proto::format_status(result.final_status);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Digital twin of an encoder DC-motor actuator bench"};
  app.require_subcommand(1);

  std::string config_path;
  std::string scenario_path;
  std::string out_dir = "out";
  std::string trace_list;
  auto* run = app.add_subcommand("run", "Run a scenario headless and export traces");
  run->add_option("--scenario", scenario_path, "Scenario file")->required();
  run->add_option("--config", config_path, "Config file (default: $SIMBENCH_CONFIG or built-in)");
  run->add_option("--out", out_dir, "Output directory")->capture_default_str();
  run->add_option("--trace", trace_list, "Comma-separated signals (default: all)");

  int port = -1;
  int http_port = -1;
  std::string serve_out;
  std::string www_dir;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the bench in realtime");
  serve_cmd->add_option("--config", config_path, "Config file (default: $SIMBENCH_CONFIG or built-in)");
  serve_cmd->add_option("--port", port, "Stream protocol port (default 7777)");
  serve_cmd->add_option("--http", http_port, "Dashboard/WebSocket gateway port (default 8080)");
  serve_cmd->add_option("--www", www_dir, "Directory with the built dashboard");
  serve_cmd->add_option("--out", serve_out, "Flush recent scope history here on shutdown");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_command(scenario_path, config_path, out_dir, trace_list);

    SimConfig cfg = resolve_config(config_path);
    cfg.mode = Pace::Realtime;
    if (port >= 0) cfg.net.port = port;
    if (http_port >= 0) cfg.net.http_port = http_port;
    if (!www_dir.empty()) cfg.net.www_dir = www_dir;
    cfg.validate();
    return serve(cfg, ServeOptions{serve_out});
  } catch (const std::exception& e) {
    std::cerr << "simbench: error: " << e.what() << "\n";
    return 1;
  }
}
