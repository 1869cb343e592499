#pragma once

namespace simbench {

/// Electromechanical constants of the geared brushed DC motor and the lead
/// screw it drives. Motor-side quantities refer to the motor shaft; the
/// gearbox divides speed by gear_ratio.
struct PlantParams {
  double v_supply = 12.0;     // V
  double r_armature = 2.0;    // ohm
  double l_armature = 1.0e-3; // H
  double k_e = 0.012;         // V*s/rad
  double k_t = 0.012;         // N*m/A
  double j_rotor = 1.0e-6;    // kg*m^2
  double b_visc = 1.0e-6;     // N*m*s/rad
  double gear_ratio = 131.25; // motor revs per output rev
  double gear_eff = 1.0;
  double lead = 0.008;        // m of travel per output rev
  double stroke_min = 0.0;    // m
  double stroke_max = 0.1;    // m

  /// Throws InvalidParams on the first violated invariant.
  void validate() const;

  /// Electrical time constant L/R; also the largest permitted step.
  double electrical_tau() const { return l_armature / r_armature; }

  /// J*R / (R*B + k_t*k_e), the first-order mechanical time constant.
  double mechanical_tau() const;
};

struct PlantState {
  double i = 0.0;       // armature current, A
  double omega_m = 0.0; // motor shaft speed, rad/s
  double theta_m = 0.0; // accumulated motor shaft angle, rad
  double pos = 0.0;     // actuator position, m
  bool at_stop = false;
};

/// Load torque at the output shaft.
struct LoadSpec {
  double tau_ext = 0.0; // N*m
};

enum class Armature {
  Closed,  // current flows through the applied voltage source
  Open,    // bridge coasting: no current path
};

/// Advance the plant by one semi-implicit Euler step: the current is updated
/// first and the new current drives the speed update. With an open armature
/// the current is held at zero and v_applied is ignored.
///
/// The actuator position is clamped to [stroke_min, stroke_max]. Hard stops
/// are inelastic: a step that would carry the position through a stop lands
/// on the stop with zero speed, and at_stop stays set while the net torque
/// keeps pushing into it.
///
/// Throws NonFiniteInput, StepTooLarge (dt <= 0 or dt > L/R) and
/// VoltageOutOfRange (|v_applied| > v_supply).
PlantState plant_step(const PlantState& state, const PlantParams& params, double v_applied,
                      const LoadSpec& load, double dt, Armature armature = Armature::Closed);

/// Closed-form equilibrium motor shaft speed in rad/s (unclamped, signed).
double steady_state_speed(const PlantParams& params, double v, double tau_ext);

/// Linear pressure model: tau_ext = k_load * bend.
LoadSpec pressure_to_load(double bend_deg, double k_load);

/// Output-shaft speed in RPM for a motor shaft speed in rad/s.
double output_rpm(const PlantParams& params, double omega_m);

}  // namespace simbench
