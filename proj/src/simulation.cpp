#include "simbench/simulation.hpp"

#include <fmt/core.h>

#include <chrono>
#include <cmath>
#include <thread>

#include "simbench/errors.hpp"
#include "simbench/sensing.hpp"

namespace simbench {

namespace {

SimConfig synced(SimConfig cfg) {
  cfg.sync();
  cfg.validate();
  return cfg;
}

}  // namespace

Simulation::Simulation(SimConfig cfg)
    : cfg_(synced(std::move(cfg))),
      steps_per_tick_(cfg_.steps_per_tick()),
      steps_per_frame_(cfg_.steps_per_frame()) {
  plant_.pos = cfg_.initial_pos;
  decoder_ = DecoderState::from(encoder_emit(plant_.theta_m, cfg_.firmware.encoder));
  firmware_ = firmware_init(cfg_.firmware, cfg_.setpoint_rpm);
}

LoadSpec Simulation::load() const {
  return LoadSpec{pressure_to_load(bend_, cfg_.k_load).tau_ext + load_offset_};
}

void Simulation::prepare() {
  if (prepared_) return;
  if (tick_due()) {
    const int adc = sense_adc(bend_, cfg_.firmware.flex);
    BridgeInputs pins;
    std::tie(firmware_, pins) =
        firmware_tick(std::move(firmware_), adc, decoder_, cfg_.firmware, cfg_.firmware.tick_dt());
    drive_ = bridge_resolve(pins);
  }
  prepared_ = true;
}

void Simulation::integrate() {
  prepare();
  const Armature armature = drive_.mode == DriveMode::Coast ? Armature::Open : Armature::Closed;
  plant_ = plant_step(plant_, cfg_.plant, drive_.v_eff, load(), cfg_.dt_plant, armature);
  decoder_ = quad_decode(decoder_, encoder_emit(plant_.theta_m, cfg_.firmware.encoder)).first;
  ++step_;
  prepared_ = false;
}

void Simulation::step() {
  prepare();
  integrate();
}

std::string Simulation::execute(const Command& cmd) {
  struct Apply {
    Simulation& sim;

    std::string operator()(const proto::Ping&) const { return "PONG\n"; }
    std::string operator()(const proto::Press& c) const {
      sim.bend_ = c.bend;
      return "OK\n";
    }
    std::string operator()(const proto::Release&) const {
      sim.bend_ = 0.0;
      return "OK\n";
    }
    std::string operator()(const proto::SetRpm& c) const {
      try {
        sim.firmware_ = set_setpoint(sim.firmware_, c.rpm, sim.cfg_.firmware);
      } catch (const SetpointOutOfRange&) {
        throw BadArg();
      }
      return "OK\n";
    }
    std::string operator()(const proto::SetLoad& c) const {
      sim.load_offset_ = c.tau;
      return "OK\n";
    }
    std::string operator()(const proto::GetStatus&) const {
      return proto::format_status(sim.status());
    }
    std::string operator()(const proto::Stream& c) const {
      sim.streaming_ = c.on;
      return "OK\n";
    }
  };
  return std::visit(Apply{*this}, cmd);
}

std::string Simulation::execute_line(std::string_view line) {
  try {
    return execute(proto::parse_command(line));
  } catch (const ProtocolError& e) {
    return proto::error_reply(e);
  }
}

proto::StatusSnapshot Simulation::status() const {
  proto::StatusSnapshot s;
  s.t = time();
  s.rpm = firmware_.rpm_est;
  s.setpoint = firmware_.setpoint_rpm;
  s.duty = firmware_.pins.ena_duty;
  s.adc = firmware_.sense.adc;
  s.pressed = firmware_.sense.pressed;
  s.pos_mm = plant_.pos * 1000.0;
  if (s.duty == 0.0) {
    s.dir = proto::Direction::Stop;
  } else {
    s.dir = firmware_.direction() > 0 ? proto::Direction::Cw : proto::Direction::Ccw;
  }
  return s;
}

proto::TelemetryFrame Simulation::telemetry() const {
  return proto::TelemetryFrame{time(),
                               firmware_.rpm_est,
                               firmware_.pins.ena_duty,
                               firmware_.sense.adc,
                               decoder_.total_counts,
                               plant_.pos * 1000.0};
}

Probe Simulation::probe() const {
  const QuadState q = encoder_emit(plant_.theta_m, cfg_.firmware.encoder);
  const auto& flex = cfg_.firmware.flex;
  Probe p;
  p.v_bridge = drive_.v_eff;
  p.enc_a = q.a ? kLogicHigh : 0.0;
  p.enc_b = q.b ? kLogicHigh : 0.0;
  p.flex_node = divider_voltage(flex_resistance(bend_, flex), flex);
  p.pressed_5v = firmware_.sense.pressed ? kLogicHigh : 0.0;
  p.rpm = firmware_.rpm_est;
  p.duty = firmware_.pins.ena_duty;
  p.pos = plant_.pos * 1000.0;
  return p;
}

std::uint64_t event_step(double t, double dt_plant) {
  return static_cast<std::uint64_t>(std::ceil(t / dt_plant - 1e-9));
}

RunResult run_scenario(const SimConfig& cfg, const Scenario& sc,
                       const std::vector<TraceConfig>& traces) {
  Simulation sim(cfg);
  std::vector<ScopeRecorder> scopes;
  scopes.reserve(traces.size());
  for (const auto& tc : traces) scopes.emplace_back(tc, sim.config().dt_plant);

  const double dt = sim.config().dt_plant;
  const std::uint64_t total_steps = event_step(sc.duration, dt);
  RunResult result;

  using clock = std::chrono::steady_clock;
  const auto wall_start = clock::now();
  const bool paced = sim.config().mode == Pace::Realtime;

  std::size_t next_event = 0;
  for (std::uint64_t s = 0; s <= total_steps; ++s) {
    while (next_event < sc.events.size() && event_step(sc.events[next_event].t, dt) <= s) {
      const auto& ev = sc.events[next_event++];
      try {
        sim.execute(ev.command);
      } catch (const Error& e) {
        throw RunError(fmt::format("step {} (t={:.6f}): '{}' failed: {}", s, sim.time(), ev.line,
                                   e.what()));
      }
    }

    try {
      sim.prepare();
    } catch (const Error& e) {
      throw RunError(fmt::format("step {} (t={:.6f}): {}", s, sim.time(), e.what()));
    }

    if (!scopes.empty()) {
      const Probe p = sim.probe();
      for (auto& scope : scopes) scope.on_step(s, sim.time(), p);
    }
    if (sim.streaming() && sim.frame_due()) {
      result.telemetry.push_back(proto::format_telemetry(sim.telemetry()));
    }
    if (s == total_steps) break;

    try {
      sim.integrate();
    } catch (const Error& e) {
      throw RunError(fmt::format("step {} (t={:.6f}): {}", s, sim.time(), e.what()));
    }

    if (paced && s % 20 == 0) {
      const auto target = wall_start + std::chrono::duration_cast<clock::duration>(
                                           std::chrono::duration<double>(
                                               sim.time() / sim.config().realtime_factor));
      std::this_thread::sleep_until(target);
    }
  }

  result.final_status = sim.status();
  result.steps = total_steps;
  for (const auto& scope : scopes) result.traces.push_back(scope.trace());
  return result;
}

Trace scope_record(const TraceConfig& trace, const SimConfig& cfg, const Scenario& sc) {
  return run_scenario(cfg, sc, {trace}).traces.front();
}

}  // namespace simbench
