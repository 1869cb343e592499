#pragma once

#include <cstdint>
#include <deque>
#include <utility>

#include "simbench/encoder.hpp"
#include "simbench/hbridge.hpp"
#include "simbench/sensing.hpp"

namespace simbench {

/// Speed loop gains in duty fraction per output-shaft RPM.
struct PidGains {
  double kp = 0.02;
  double ki = 0.1;
  double kd = 0.0;
  double u_min = 0.0;
  double u_max = 1.0;

  void validate() const;
};

enum class ControlMode {
  Pid,   // hold the setpoint
  Bang,  // fixed duty while pressed
};

enum class FirmwareMode { Idle, Run };

struct FirmwareConfig {
  PidGains gains;
  FlexParams flex;
  EncoderSpec encoder;
  double v_supply = 12.0;
  double tick_hz = 1000.0;
  double rpm_window = 0.1;  // s
  double rpm_max = 80.0;
  ControlMode control = ControlMode::Pid;
  double bang_duty = 1.0;

  void validate() const;
  double tick_dt() const { return 1.0 / tick_hz; }
  /// Number of ticks spanned by the speed estimation window.
  int window_ticks() const;
};

struct FirmwareState {
  FirmwareMode mode = FirmwareMode::Idle;
  double setpoint_rpm = 0.0;
  double rpm_est = 0.0;
  double integ = 0.0;
  double prev_err = 0.0;
  std::int64_t window_counts = 0;
  BridgeInputs pins{true, false, 0.0, 12.0};
  double tick_hz = 1000.0;
  double rpm_window = 0.1;
  SenseState sense;
  // Decoder totals sampled at the most recent window_ticks + 1 ticks.
  std::deque<std::int64_t> count_history;

  /// +1 for forward pins (IN1 high), -1 for reverse.
  int direction() const { return pins.in1 && !pins.in2 ? 1 : -1; }
};

FirmwareState firmware_init(const FirmwareConfig& cfg, double setpoint_rpm = 0.0);

/// One PID update. u = kp*err + integ + kd*(err - prev_err)/dt; the integral
/// only accumulates when u is not saturated in the direction of err, and is
/// bounded by +/-(u_max - u_min). Returns the clamped duty.
std::pair<FirmwareState, double> pid_step(double err, FirmwareState fw, const PidGains& g,
                                          double dt);

/// One firmware loop iteration:
///   1. update the pressed flag from the ADC sample,
///   2. refresh the trailing-window speed estimate from the decoder total,
///   3. Idle: duty 0 and PID memory cleared; Run: PID (or fixed duty) on the
///      speed error measured along the commanded direction,
///   4. direction pins follow the sign of the setpoint (held when it is 0).
std::pair<FirmwareState, BridgeInputs> firmware_tick(FirmwareState fw, int adc,
                                                     const DecoderState& decoder,
                                                     const FirmwareConfig& cfg, double dt);

/// Throws SetpointOutOfRange when |rpm| > rpm_max or rpm is not finite.
FirmwareState set_setpoint(FirmwareState fw, double rpm, const FirmwareConfig& cfg);

}  // namespace simbench
