#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "simbench/config.hpp"
#include "simbench/encoder.hpp"
#include "simbench/firmware.hpp"
#include "simbench/hbridge.hpp"
#include "simbench/plant.hpp"
#include "simbench/protocol.hpp"
#include "simbench/scenario.hpp"
#include "simbench/scope.hpp"

namespace simbench {

/// The single stepping context that owns all mutable bench state.
///
/// Time advances in plant steps of cfg.dt_plant. At each instant the caller
/// first applies pending commands, then calls prepare() (which runs the
/// firmware tick when one is due and resolves the bridge), observes, and
/// finally calls integrate() to move to the next instant.
class Simulation {
 public:
  /// Throws InvalidParams / ConfigError.
  explicit Simulation(SimConfig cfg);

  void prepare();
  void integrate();
  /// prepare() + integrate().
  void step();

  std::uint64_t step_index() const { return step_; }
  double time() const { return static_cast<double>(step_) * cfg_.dt_plant; }
  bool tick_due() const { return step_ % steps_per_tick_ == 0; }
  bool frame_due() const { return step_ % steps_per_frame_ == 0; }

  /// Parses and applies one protocol line; returns the reply line. Malformed
  /// or rejected lines leave the state untouched.
  std::string execute_line(std::string_view line);
  /// Throws ProtocolError (BadArg for an out-of-range setpoint).
  std::string execute(const Command& cmd);

  proto::StatusSnapshot status() const;
  proto::TelemetryFrame telemetry() const;
  Probe probe() const;

  const SimConfig& config() const { return cfg_; }
  const PlantState& plant() const { return plant_; }
  const FirmwareState& firmware() const { return firmware_; }
  const DecoderState& decoder() const { return decoder_; }
  const BridgeDrive& drive() const { return drive_; }
  double bend() const { return bend_; }
  double load_offset() const { return load_offset_; }
  LoadSpec load() const;
  bool streaming() const { return streaming_; }

 private:
  SimConfig cfg_;
  std::uint64_t steps_per_tick_;
  std::uint64_t steps_per_frame_;
  std::uint64_t step_ = 0;
  bool prepared_ = false;

  PlantState plant_;
  DecoderState decoder_;
  FirmwareState firmware_;
  BridgeDrive drive_;
  double bend_ = 0.0;
  double load_offset_ = 0.0;
  bool streaming_ = true;
};

struct RunResult {
  proto::StatusSnapshot final_status;
  std::vector<Trace> traces;
  std::vector<std::string> telemetry;  // "T ..." lines while streaming
  std::uint64_t steps = 0;
};

/// First plant step at or after t.
std::uint64_t event_step(double t, double dt_plant);

/// Runs a scenario headless. Outputs are a pure function of the inputs when
/// cfg.mode is Max. Command failures abort with a RunError naming the step.
RunResult run_scenario(const SimConfig& cfg, const Scenario& sc,
                       const std::vector<TraceConfig>& traces);

/// Convenience wrapper recording a single trace.
Trace scope_record(const TraceConfig& trace, const SimConfig& cfg, const Scenario& sc);

}  // namespace simbench
