#include "simbench/encoder.hpp"

#include <cmath>
#include <numbers>

#include "simbench/errors.hpp"

namespace simbench {

namespace {

// Position of a channel pair in the forward sequence.
int gray_index(QuadState s) {
  if (s.a) return s.b ? 1 : 0;
  return s.b ? 2 : 3;
}

}  // namespace

EncoderSpec EncoderSpec::make(int lines_per_rev, double gear_ratio) {
  if (lines_per_rev <= 0) throw InvalidParams("lines_per_rev must be > 0");
  if (!std::isfinite(gear_ratio) || gear_ratio <= 0.0) {
    throw InvalidParams("gear_ratio must be finite and > 0");
  }
  const int x4 = 4 * lines_per_rev;
  const double per_output = x4 * gear_ratio;
  if (per_output != std::floor(per_output)) {
    throw InvalidParams("counts per output revolution must be a whole number");
  }
  return EncoderSpec{lines_per_rev, x4, static_cast<std::int64_t>(per_output)};
}

QuadState encoder_emit(double theta_m, const EncoderSpec& spec) {
  if (!std::isfinite(theta_m)) throw NonFiniteInput("encoder_emit: non-finite angle");
  const double cycles = theta_m / (2.0 * std::numbers::pi) * spec.lines_per_rev;
  double quarter = std::fmod(std::floor(4.0 * cycles), 4.0);
  if (quarter < 0.0) quarter += 4.0;
  switch (static_cast<int>(quarter)) {
    case 0:
      return {true, false};
    case 1:
      return {true, true};
    case 2:
      return {false, true};
    default:
      return {false, false};
  }
}

std::pair<DecoderState, int> quad_decode(const DecoderState& state, QuadState curr) {
  DecoderState next = state;
  next.prev = curr;
  int delta = 0;
  switch ((gray_index(curr) - gray_index(state.prev) + 4) % 4) {
    case 1:
      delta = 1;
      break;
    case 3:
      delta = -1;
      break;
    case 2:
      ++next.invalid_transitions;
      break;
    default:
      break;
  }
  next.total_counts += delta;
  return {next, delta};
}

double counts_to_rpm(std::int64_t delta_counts, double window, const EncoderSpec& spec) {
  if (!(window > 0.0) || !std::isfinite(window)) {
    throw ZeroWindow("counts_to_rpm: window must be > 0");
  }
  return static_cast<double>(delta_counts) / static_cast<double>(spec.counts_per_output_rev) /
         window * 60.0;
}

}  // namespace simbench
