#include "simbench/plant.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "simbench/errors.hpp"

namespace simbench {

namespace {

void require_positive(double value, const char* name) {
  if (!std::isfinite(value) || value <= 0.0) {
    throw InvalidParams(std::string(name) + " must be finite and > 0");
  }
}

bool all_finite(std::initializer_list<double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace

void PlantParams::validate() const {
  require_positive(v_supply, "v_supply");
  require_positive(r_armature, "r_armature");
  require_positive(l_armature, "l_armature");
  require_positive(k_e, "k_e");
  require_positive(k_t, "k_t");
  require_positive(j_rotor, "j_rotor");
  require_positive(gear_ratio, "gear_ratio");
  require_positive(gear_eff, "gear_eff");
  require_positive(lead, "lead");
  if (!std::isfinite(b_visc) || b_visc < 0.0) {
    throw InvalidParams("b_visc must be finite and >= 0");
  }
  if (gear_eff > 1.0) throw InvalidParams("gear_eff must be <= 1");
  if (!std::isfinite(stroke_min) || stroke_min < 0.0) {
    throw InvalidParams("stroke_min must be finite and >= 0");
  }
  if (!std::isfinite(stroke_max) || stroke_max <= stroke_min) {
    throw InvalidParams("stroke_max must exceed stroke_min");
  }
  if (std::abs(k_e - k_t) > 1e-12 * std::max(k_e, k_t)) {
    throw InvalidParams("k_e and k_t must be equal in SI units");
  }
}

double PlantParams::mechanical_tau() const {
  return j_rotor * r_armature / (r_armature * b_visc + k_t * k_e);
}

PlantState plant_step(const PlantState& state, const PlantParams& params, double v_applied,
                      const LoadSpec& load, double dt, Armature armature) {
  if (!all_finite({state.i, state.omega_m, state.theta_m, state.pos, v_applied, load.tau_ext, dt})) {
    throw NonFiniteInput("plant_step: non-finite input");
  }
  if (dt <= 0.0 || dt > params.electrical_tau()) {
    throw StepTooLarge("plant_step: dt must be in (0, L/R]");
  }
  if (armature == Armature::Closed && std::abs(v_applied) > params.v_supply) {
    throw VoltageOutOfRange("plant_step: |v_applied| exceeds v_supply");
  }

  const double n = params.gear_ratio;
  PlantState next = state;

  if (armature == Armature::Open) {
    next.i = 0.0;
  } else {
    const double di = (v_applied - params.r_armature * state.i - params.k_e * state.omega_m) /
                      params.l_armature;
    next.i = state.i + dt * di;
  }

  const double torque = params.k_t * next.i - params.b_visc * state.omega_m -
                        load.tau_ext / (n * params.gear_eff);
  double omega = state.omega_m + dt * torque / params.j_rotor;

  const double travel_per_rad = params.lead / (2.0 * std::numbers::pi * n);
  const double pos_free = state.pos + omega * dt * travel_per_rad;

  if (omega > 0.0 && pos_free >= params.stroke_max) {
    next.theta_m = state.theta_m + (params.stroke_max - state.pos) / travel_per_rad;
    next.pos = params.stroke_max;
    next.omega_m = 0.0;
    next.at_stop = true;
  } else if (omega < 0.0 && pos_free <= params.stroke_min) {
    next.theta_m = state.theta_m + (params.stroke_min - state.pos) / travel_per_rad;
    next.pos = params.stroke_min;
    next.omega_m = 0.0;
    next.at_stop = true;
  } else {
    next.theta_m = state.theta_m + omega * dt;
    next.pos = pos_free;
    next.omega_m = omega;
    next.at_stop = false;
  }
  return next;
}

double steady_state_speed(const PlantParams& params, double v, double tau_ext) {
  params.validate();
  const double r = params.r_armature;
  const double num = params.k_t * v - r * tau_ext / (params.gear_ratio * params.gear_eff);
  return num / (r * params.b_visc + params.k_t * params.k_e);
}

LoadSpec pressure_to_load(double bend_deg, double k_load) {
  if (!std::isfinite(bend_deg) || !std::isfinite(k_load)) {
    throw NonFiniteInput("pressure_to_load: non-finite input");
  }
  if (bend_deg < 0.0) throw NegativeBend("pressure_to_load: bend must be >= 0");
  return LoadSpec{k_load * bend_deg};
}

double output_rpm(const PlantParams& params, double omega_m) {
  return omega_m / params.gear_ratio * 60.0 / (2.0 * std::numbers::pi);
}

}  // namespace simbench
