#pragma once

namespace simbench {

/// Flex sensor, divider and ADC. The flex element sits on the low side of
/// the divider so bending (higher resistance) raises the node voltage.
struct FlexParams {
  double r_flat = 25000.0;              // ohm at 0 deg
  double k_bend = 75000.0 / 90.0;       // ohm/deg, 100 kohm at 90 deg
  double r_fixed = 47000.0;             // ohm
  double v_cc = 5.0;                    // V
  int adc_bits = 10;
  int press_on = 528;                   // rising threshold, counts
  int press_off = 496;                  // falling threshold, counts

  void validate() const;
  int adc_max() const { return (1 << adc_bits) - 1; }
};

struct SenseState {
  double bend = 0.0; // deg
  int adc = 0;
  bool pressed = false;
};

/// R = r_flat + k_bend * bend. Throws NegativeBend for bend < 0.
double flex_resistance(double bend_deg, const FlexParams& p);

/// v_cc * r_flex / (r_flex + r_fixed). Throws InvalidParams for r_flex <= 0.
double divider_voltage(double r_flex, const FlexParams& p);

/// floor(v / v_cc * 2^bits) clamped to the converter range.
int adc_quantize(double v, const FlexParams& p);

/// Two-level comparator: sets pressed at adc >= press_on, clears it at
/// adc <= press_off, holds inside the band.
SenseState threshold_press(const SenseState& state, int adc, const FlexParams& p);

/// bend -> resistance -> divider -> ADC in one call.
int sense_adc(double bend_deg, const FlexParams& p);

}  // namespace simbench
