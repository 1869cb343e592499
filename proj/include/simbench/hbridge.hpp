#pragma once

namespace simbench {

/// Logic side of one L298 channel. ENA carries the PWM duty.
struct BridgeInputs {
  bool in1 = false;
  bool in2 = false;
  double ena_duty = 0.0;
  double v_supply = 12.0;
};

enum class DriveMode { Drive, Brake, Coast };

struct BridgeDrive {
  DriveMode mode = DriveMode::Coast;
  double v_eff = 0.0;  // averaged motor terminal voltage; 0 when coasting
};

/// Averaged-PWM truth table:
///   duty == 0        -> Coast (armature open)
///   in1 != in2       -> Drive, v_eff = +/- v_supply * duty (+ for in1 high)
///   in1 == in2       -> Brake, v_eff = 0
/// Duty outside [0, 1] is clamped; a NaN duty is treated as 0.
BridgeDrive bridge_resolve(const BridgeInputs& in);

}  // namespace simbench
