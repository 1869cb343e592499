#include "simbench/firmware.hpp"

#include <algorithm>
#include <cmath>

#include "simbench/errors.hpp"

namespace simbench {

void PidGains::validate() const {
  for (double g : {kp, ki, kd}) {
    if (!std::isfinite(g) || g < 0.0) throw InvalidParams("PID gains must be finite and >= 0");
  }
  if (!std::isfinite(u_min) || !std::isfinite(u_max) || u_min < 0.0 || u_max > 1.0 ||
      u_min >= u_max) {
    throw InvalidParams("PID output range must satisfy 0 <= u_min < u_max <= 1");
  }
}

void FirmwareConfig::validate() const {
  gains.validate();
  flex.validate();
  if (!(tick_hz > 0.0) || !std::isfinite(tick_hz)) throw InvalidParams("tick_hz must be > 0");
  if (!(rpm_window > 0.0) || !std::isfinite(rpm_window)) {
    throw InvalidParams("rpm_window must be > 0");
  }
  if (window_ticks() < 1) throw InvalidParams("rpm_window must span at least one tick");
  if (!(rpm_max > 0.0) || !std::isfinite(rpm_max)) throw InvalidParams("rpm_max must be > 0");
  if (!(bang_duty >= 0.0 && bang_duty <= 1.0)) throw InvalidParams("bang_duty must be in [0, 1]");
  if (!(v_supply > 0.0)) throw InvalidParams("v_supply must be > 0");
}

int FirmwareConfig::window_ticks() const {
  return static_cast<int>(std::lround(rpm_window * tick_hz));
}

FirmwareState firmware_init(const FirmwareConfig& cfg, double setpoint_rpm) {
  FirmwareState fw;
  fw.tick_hz = cfg.tick_hz;
  fw.rpm_window = cfg.rpm_window;
  fw.pins.v_supply = cfg.v_supply;
  return set_setpoint(std::move(fw), setpoint_rpm, cfg);
}

std::pair<FirmwareState, double> pid_step(double err, FirmwareState fw, const PidGains& g,
                                          double dt) {
  const double derivative = g.kd * (err - fw.prev_err) / dt;
  const double u = g.kp * err + fw.integ + derivative;
  const bool pushing_high = u >= g.u_max && err > 0.0;
  const bool pushing_low = u <= g.u_min && err < 0.0;
  if (!pushing_high && !pushing_low) {
    const double bound = g.u_max - g.u_min;
    fw.integ = std::clamp(fw.integ + g.ki * err * dt, -bound, bound);
  }
  fw.prev_err = err;
  return {std::move(fw), std::clamp(u, g.u_min, g.u_max)};
}

std::pair<FirmwareState, BridgeInputs> firmware_tick(FirmwareState fw, int adc,
                                                     const DecoderState& decoder,
                                                     const FirmwareConfig& cfg, double dt) {
  fw.sense = threshold_press(fw.sense, adc, cfg.flex);

  fw.count_history.push_back(decoder.total_counts);
  while (fw.count_history.size() > static_cast<std::size_t>(cfg.window_ticks()) + 1) {
    fw.count_history.pop_front();
  }
  fw.window_counts = fw.count_history.back() - fw.count_history.front();
  const auto spanned = static_cast<double>(fw.count_history.size() - 1);
  fw.rpm_est = spanned > 0 ? counts_to_rpm(fw.window_counts, spanned * dt, cfg.encoder) : 0.0;

  if (fw.setpoint_rpm > 0.0) {
    fw.pins.in1 = true;
    fw.pins.in2 = false;
  } else if (fw.setpoint_rpm < 0.0) {
    fw.pins.in1 = false;
    fw.pins.in2 = true;
  }
  fw.pins.v_supply = cfg.v_supply;

  if (!fw.sense.pressed) {
    fw.mode = FirmwareMode::Idle;
    fw.integ = 0.0;
    fw.prev_err = 0.0;
    fw.pins.ena_duty = 0.0;
    return {fw, fw.pins};
  }

  fw.mode = FirmwareMode::Run;
  double duty = 0.0;
  if (cfg.control == ControlMode::Bang) {
    duty = fw.setpoint_rpm != 0.0 ? cfg.bang_duty : 0.0;
  } else {
    const int dir = fw.direction();
    const double err = dir * fw.setpoint_rpm - dir * fw.rpm_est;
    std::tie(fw, duty) = pid_step(err, std::move(fw), cfg.gains, dt);
  }
  fw.pins.ena_duty = duty;
  return {fw, fw.pins};
}

FirmwareState set_setpoint(FirmwareState fw, double rpm, const FirmwareConfig& cfg) {
  if (!std::isfinite(rpm) || std::abs(rpm) > cfg.rpm_max) {
    throw SetpointOutOfRange("setpoint exceeds rpm_max");
  }
  fw.setpoint_rpm = rpm;
  return fw;
}

}  // namespace simbench
