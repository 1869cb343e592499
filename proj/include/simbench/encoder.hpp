#pragma once

#include <cstdint>
#include <utility>

namespace simbench {

/// Two-channel Hall encoder on the motor shaft, decoded x4.
struct EncoderSpec {
  int lines_per_rev = 16;
  int counts_per_rev_x4 = 64;
  std::int64_t counts_per_output_rev = 8400;

  /// Encoder counts for the given gearbox; throws InvalidParams unless
  /// 4 * lines_per_rev * gear_ratio is a whole number of counts.
  static EncoderSpec make(int lines_per_rev, double gear_ratio);
};

struct QuadState {
  bool a = false;
  bool b = false;

  friend bool operator==(const QuadState&, const QuadState&) = default;
};

struct DecoderState {
  QuadState prev;
  std::int64_t total_counts = 0;
  std::uint64_t invalid_transitions = 0;

  /// A decoder primed with a real channel sample.
  static DecoderState from(QuadState sample) { return DecoderState{sample, 0, 0}; }
};

/// Channel levels for a motor shaft angle. With c the fractional electrical
/// cycle, A is high for c in [0, 0.5) and B for c in [0.25, 0.75), so B lags
/// A by a quarter cycle when the angle increases.
QuadState encoder_emit(double theta_m, const EncoderSpec& spec);

/// Gray-code x4 step. Forward order is (1,0) (1,1) (0,1) (0,0). A double flip
/// is counted in invalid_transitions and contributes 0.
std::pair<DecoderState, int> quad_decode(const DecoderState& state, QuadState curr);

/// Signed output-shaft RPM for a count delta over a window. Throws ZeroWindow
/// unless window > 0.
double counts_to_rpm(std::int64_t delta_counts, double window, const EncoderSpec& spec);

}  // namespace simbench
