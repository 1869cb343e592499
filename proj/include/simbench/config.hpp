#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "simbench/firmware.hpp"
#include "simbench/plant.hpp"

namespace simbench {

enum class Pace {
  Max,       // step as fast as possible
  Realtime,  // sleep to the wall clock
};

struct ScopeSettings {
  double logic_hz = 20000.0;
  double analog_hz = 1000.0;
  double serve_window = 60.0;  // s of history kept by `serve`
};

struct NetSettings {
  int port = 7777;
  int http_port = 8080;
  std::string www_dir;            // dashboard files; empty serves a stub page
  std::size_t max_pending = 256;  // queued outbound lines per client
};

/// Everything a run needs. Defaults match config/default.ini.
struct SimConfig {
  double dt_plant = 50e-6;
  double stream_hz = 20.0;
  Pace mode = Pace::Max;
  double realtime_factor = 1.0;  // sim seconds per wall second when pacing

  PlantParams plant;
  FirmwareConfig firmware;  // encoder and v_supply are derived from plant
  double setpoint_rpm = 60.0;
  double k_load = 0.002;     // N*m per degree of bend
  double initial_pos = 0.0;  // m

  ScopeSettings scope;
  NetSettings net;

  /// Recompute the fields derived from the plant block.
  void sync();
  /// Throws InvalidParams / ConfigError.
  void validate() const;

  std::uint64_t steps_per_tick() const;
  std::uint64_t steps_per_frame() const;
};

/// Parses the sectioned key = value format. Unknown sections or keys are
/// rejected. Throws ConfigError.
SimConfig parse_config(std::string_view text);
SimConfig load_config(const std::filesystem::path& path);

/// Config for the CLI: explicit path, else $SIMBENCH_CONFIG, else defaults.
SimConfig resolve_config(const std::string& explicit_path);

}  // namespace simbench
