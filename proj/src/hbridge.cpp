#include "simbench/hbridge.hpp"

#include <algorithm>
#include <cmath>

namespace simbench {

BridgeDrive bridge_resolve(const BridgeInputs& in) {
  const double duty = std::isnan(in.ena_duty) ? 0.0 : std::clamp(in.ena_duty, 0.0, 1.0);
  if (duty == 0.0) return {DriveMode::Coast, 0.0};
  if (in.in1 == in.in2) return {DriveMode::Brake, 0.0};
  const double magnitude = std::abs(in.v_supply) * duty;
  return {DriveMode::Drive, in.in1 ? magnitude : -magnitude};
}

}  // namespace simbench
