#include "simbench/sensing.hpp"

#include <cmath>

#include "simbench/errors.hpp"

namespace simbench {

void FlexParams::validate() const {
  if (!(r_flat > 0.0) || !std::isfinite(r_flat)) throw InvalidParams("r_flat must be > 0");
  if (!(k_bend > 0.0) || !std::isfinite(k_bend)) throw InvalidParams("k_bend must be > 0");
  if (!(r_fixed > 0.0) || !std::isfinite(r_fixed)) throw InvalidParams("r_fixed must be > 0");
  if (!(v_cc > 0.0) || !std::isfinite(v_cc)) throw InvalidParams("v_cc must be > 0");
  if (adc_bits < 1 || adc_bits > 24) throw InvalidParams("adc_bits must be in [1, 24]");
  if (press_off >= press_on) throw InvalidParams("press_off must be below press_on");
  if (press_on <= 0 || press_on >= (1 << adc_bits)) {
    throw InvalidParams("press_on must be inside the ADC range");
  }
  if (press_off < 0) throw InvalidParams("press_off must be >= 0");
}

double flex_resistance(double bend_deg, const FlexParams& p) {
  if (!std::isfinite(bend_deg)) throw NonFiniteInput("flex_resistance: non-finite bend");
  if (bend_deg < 0.0) throw NegativeBend("flex_resistance: bend must be >= 0");
  return p.r_flat + p.k_bend * bend_deg;
}

double divider_voltage(double r_flex, const FlexParams& p) {
  if (!(r_flex > 0.0)) throw InvalidParams("divider_voltage: r_flex must be > 0");
  return p.v_cc * r_flex / (r_flex + p.r_fixed);
}

int adc_quantize(double v, const FlexParams& p) {
  if (!std::isfinite(v)) throw NonFiniteInput("adc_quantize: non-finite voltage");
  const double full_scale = static_cast<double>(1 << p.adc_bits);
  const double code = std::floor(v / p.v_cc * full_scale);
  if (code <= 0.0) return 0;
  if (code >= p.adc_max()) return p.adc_max();
  return static_cast<int>(code);
}

SenseState threshold_press(const SenseState& state, int adc, const FlexParams& p) {
  SenseState next = state;
  next.adc = adc;
  if (adc >= p.press_on) {
    next.pressed = true;
  } else if (adc <= p.press_off) {
    next.pressed = false;
  }
  return next;
}

int sense_adc(double bend_deg, const FlexParams& p) {
  return adc_quantize(divider_voltage(flex_resistance(bend_deg, p), p), p);
}

}  // namespace simbench
