#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "simbench/errors.hpp"
#include "simbench/plant.hpp"

using namespace simbench;

namespace {

// Independent oracle: classic RK4 on the unclamped (i, omega) ODE pair.
struct Rk4Motor {
  PlantParams p;
  double v = 0.0;
  double tau = 0.0;

  void derivs(double i, double w, double& di, double& dw) const {
    di = (v - p.r_armature * i - p.k_e * w) / p.l_armature;
    dw = (p.k_t * i - p.b_visc * w - tau / (p.gear_ratio * p.gear_eff)) / p.j_rotor;
  }

  void run(double& i, double& w, double duration, double h) const {
    const int n = static_cast<int>(std::ceil(duration / h));
    for (int k = 0; k < n; ++k) {
      double a1, b1, a2, b2, a3, b3, a4, b4;
      derivs(i, w, a1, b1);
      derivs(i + 0.5 * h * a1, w + 0.5 * h * b1, a2, b2);
      derivs(i + 0.5 * h * a2, w + 0.5 * h * b2, a3, b3);
      derivs(i + h * a3, w + h * b3, a4, b4);
      i += h / 6.0 * (a1 + 2 * a2 + 2 * a3 + a4);
      w += h / 6.0 * (b1 + 2 * b2 + 2 * b3 + b4);
    }
  }
};

PlantParams long_stroke() {
  PlantParams p;
  p.stroke_max = 1.0e6;
  return p;
}

PlantState run_constant(const PlantParams& p, double v, double tau, double duration, double dt) {
  PlantState s;
  s.pos = 0.5 * (p.stroke_min + p.stroke_max);
  const auto steps = static_cast<long>(std::ceil(duration / dt));
  for (long k = 0; k < steps; ++k) s = plant_step(s, p, v, LoadSpec{tau}, dt);
  return s;
}

}  // namespace

TEST(PlantStep, RestStaysAtRest) {
  const PlantParams p;
  const PlantState s = plant_step(PlantState{}, p, 0.0, LoadSpec{}, 50e-6);
  EXPECT_EQ(s.i, 0.0);
  EXPECT_EQ(s.omega_m, 0.0);
  EXPECT_EQ(s.theta_m, 0.0);
  EXPECT_EQ(s.pos, 0.0);
  EXPECT_FALSE(s.at_stop);
}

TEST(PlantStep, TwelveVoltSteadyStateMatchesRk4AndClosedForm) {
  const PlantParams p = long_stroke();
  // Frozen from k_t*V / (R*B + k_t*k_e) with the default constants.
  constexpr double kExpected = 986.3013698630139;
  const PlantState s = run_constant(p, 12.0, 0.0, 0.3, 50e-6);

  double i = 0.0, w = 0.0;
  Rk4Motor{p, 12.0, 0.0}.run(i, w, 0.3, 1e-6);

  EXPECT_NEAR(w, kExpected, 1e-6 * kExpected);
  EXPECT_NEAR(s.omega_m, kExpected, 1e-6 * kExpected);
  EXPECT_NEAR(steady_state_speed(p, 12.0, 0.0), kExpected, 1e-9);
  EXPECT_NEAR(output_rpm(p, s.omega_m), 71.76, 0.01);
}

TEST(PlantStep, TransientTracksRk4Oracle) {
  const PlantParams p = long_stroke();
  PlantState s;
  double i = 0.0, w = 0.0;
  const Rk4Motor oracle{p, 12.0, 0.0};
  for (int ms = 1; ms <= 60; ++ms) {
    for (int k = 0; k < 20; ++k) s = plant_step(s, p, 12.0, LoadSpec{}, 50e-6);
    oracle.run(i, w, 1e-3, 1e-6);
    EXPECT_NEAR(s.omega_m, w, 0.01 * 986.3) << "at t=" << ms << " ms";
  }
}

TEST(PlantStep, InductanceFreeSurrogateIsFirstOrder) {
  // dt = L/R makes the current update algebraic: i = (v - k_e*w)/R.
  for (double b : {0.0, 1e-6}) {
    PlantParams p = long_stroke();
    p.l_armature = 1e-6;
    p.b_visc = b;
    const double dt = p.electrical_tau();
    const double tau = p.j_rotor * p.r_armature / (p.r_armature * b + p.k_t * p.k_e);
    if (b == 0.0) EXPECT_NEAR(tau, 13.9e-3, 0.05e-3);
    const double w_ss = steady_state_speed(p, 12.0, 0.0);

    PlantState s;
    double worst = 0.0;
    const int steps = static_cast<int>(5.0 * tau / dt);
    for (int k = 1; k <= steps; ++k) {
      s = plant_step(s, p, 12.0, LoadSpec{}, dt);
      const double analytic = w_ss * (1.0 - std::exp(-k * dt / tau));
      worst = std::max(worst, std::abs(s.omega_m - analytic));
    }
    EXPECT_LT(worst, 0.01 * w_ss) << "b=" << b;
  }
}

TEST(PlantStep, OpenArmatureCarriesNoCurrent) {
  const PlantParams p = long_stroke();
  PlantState s = run_constant(p, 12.0, 0.0, 0.1, 50e-6);
  const double w0 = s.omega_m;
  s = plant_step(s, p, 12.0, LoadSpec{}, 50e-6, Armature::Open);
  EXPECT_EQ(s.i, 0.0);
  EXPECT_LT(s.omega_m, w0);
  EXPECT_GT(s.omega_m, 0.99 * w0);
}

TEST(PlantStep, RejectsBadInputs) {
  const PlantParams p;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(plant_step(PlantState{}, p, nan, LoadSpec{}, 50e-6), NonFiniteInput);
  EXPECT_THROW(plant_step(PlantState{}, p, 0.0, LoadSpec{INFINITY}, 50e-6), NonFiniteInput);
  EXPECT_THROW(plant_step(PlantState{}, p, 0.0, LoadSpec{}, 1e-3), StepTooLarge);
  EXPECT_THROW(plant_step(PlantState{}, p, 0.0, LoadSpec{}, 0.0), StepTooLarge);
  EXPECT_THROW(plant_step(PlantState{}, p, 12.5, LoadSpec{}, 50e-6), VoltageOutOfRange);
  EXPECT_NO_THROW(plant_step(PlantState{}, p, 0.0, LoadSpec{}, p.electrical_tau()));
}

TEST(PlantParams, Validation) {
  EXPECT_NO_THROW(PlantParams{}.validate());
  PlantParams p;
  p.k_t = 0.013;
  EXPECT_THROW(p.validate(), InvalidParams);
  p = PlantParams{};
  p.gear_eff = 1.2;
  EXPECT_THROW(p.validate(), InvalidParams);
  p = PlantParams{};
  p.stroke_max = p.stroke_min;
  EXPECT_THROW(p.validate(), InvalidParams);
  p = PlantParams{};
  p.r_armature = 0.0;
  EXPECT_THROW(p.validate(), InvalidParams);
  p = PlantParams{};
  p.b_visc = 0.0;
  EXPECT_NO_THROW(p.validate());
}

TEST(SteadyStateSpeed, Examples) {
  const PlantParams p;
  EXPECT_EQ(steady_state_speed(p, 0.0, 0.0), 0.0);
  EXPECT_NEAR(steady_state_speed(p, 12.0, 0.0), 986.3, 0.05);
  const double root = p.k_t * 12.0 * p.gear_ratio * p.gear_eff / p.r_armature;
  EXPECT_EQ(steady_state_speed(p, 12.0, root), 0.0);
  EXPECT_LT(steady_state_speed(p, 0.0, 0.1), 0.0);
}

TEST(PressureToLoad, LinearMap) {
  EXPECT_EQ(pressure_to_load(0.0, 0.002).tau_ext, 0.0);
  EXPECT_NEAR(pressure_to_load(45.0, 0.002).tau_ext, 0.09, 1e-15);
  EXPECT_NEAR(pressure_to_load(90.0, 0.002).tau_ext, 0.18, 1e-15);
  EXPECT_THROW(pressure_to_load(-1.0, 0.002), NegativeBend);
  EXPECT_THROW(pressure_to_load(NAN, 0.002), NonFiniteInput);
}

TEST(PlantProperties, EquilibriumAgreementRandomParams) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    PlantParams p = long_stroke();
    p.r_armature = 1.0 + 4.0 * u(rng);
    p.l_armature = 0.5e-3 + 2e-3 * u(rng);
    p.k_e = p.k_t = 0.008 + 0.01 * u(rng);
    p.j_rotor = 0.5e-6 + 2e-6 * u(rng);
    p.b_visc = 2e-6 * u(rng);
    const double v = -12.0 + 24.0 * u(rng);
    const double tau = 0.2 * (u(rng) - 0.5);
    const double dt = std::min(50e-6, p.electrical_tau() / 10.0);
    const double horizon = 10.0 * std::max(p.mechanical_tau(), p.electrical_tau());
    const PlantState s = run_constant(p, v, tau, horizon, dt);
    const double expected = steady_state_speed(p, v, tau);
    EXPECT_LT(std::abs(s.omega_m - expected) / std::max(1.0, std::abs(expected)), 1e-3)
        << "trial " << trial;
  }
}

TEST(PlantProperties, PositionNeverLeavesStroke) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> volts(-12.0, 12.0);
  std::uniform_real_distribution<double> load(-0.5, 0.5);
  std::uniform_int_distribution<int> hold(1, 4000);
  PlantParams p;
  p.stroke_max = 0.002;  // short stroke so both stops get hit
  PlantState s;
  int hits = 0;
  for (int segment = 0; segment < 200; ++segment) {
    const double v = volts(rng);
    const double tau = load(rng);
    const int n = hold(rng);
    for (int k = 0; k < n; ++k) {
      s = plant_step(s, p, v, LoadSpec{tau}, 50e-6);
      ASSERT_GE(s.pos, p.stroke_min);
      ASSERT_LE(s.pos, p.stroke_max);
      if (s.at_stop) {
        ++hits;
        ASSERT_EQ(s.omega_m, 0.0);
      }
    }
  }
  EXPECT_GT(hits, 0);
}

TEST(PlantProperties, StopHoldsWhileDrivenIntoIt) {
  PlantParams p;
  PlantState s;  // starts on stroke_min
  for (int k = 0; k < 2000; ++k) {
    s = plant_step(s, p, -12.0, LoadSpec{}, 50e-6);
    ASSERT_TRUE(s.at_stop);
    ASSERT_EQ(s.pos, 0.0);
    ASSERT_EQ(s.omega_m, 0.0);
  }
  EXPECT_NEAR(s.i, -6.0, 1e-3);  // stalled: i -> -V/R
  for (int k = 0; k < 40; ++k) s = plant_step(s, p, 12.0, LoadSpec{}, 50e-6);
  EXPECT_FALSE(s.at_stop);
  EXPECT_GT(s.pos, 0.0);
}

TEST(PlantProperties, FrictionlessSpeedIsLinearInVoltage) {
  PlantParams p = long_stroke();
  p.b_visc = 0.0;
  const double horizon = 40.0 * p.mechanical_tau();
  const double w3 = run_constant(p, 3.0, 0.0, horizon, 50e-6).omega_m;
  const double w6 = run_constant(p, 6.0, 0.0, horizon, 50e-6).omega_m;
  EXPECT_NEAR(w6 / w3, 2.0, 2e-9);
}

TEST(PlantProperties, SteadyDirectionFollowsVoltage) {
  PlantParams p = long_stroke();
  p.stroke_min = 0.0;
  for (double v : {-12.0, -0.5, 0.5, 12.0}) {
    PlantState s;
    s.pos = 0.5e6;
    const auto steps = static_cast<long>(10.0 * p.mechanical_tau() / 50e-6);
    for (long k = 0; k < steps; ++k) s = plant_step(s, p, v, LoadSpec{}, 50e-6);
    EXPECT_EQ(std::signbit(s.omega_m), std::signbit(v)) << "v=" << v;
  }
}

TEST(PlantProperties, ThetaAndPositionStayConsistent) {
  PlantParams p;
  PlantState s;
  for (int k = 0; k < 20000; ++k) s = plant_step(s, p, 12.0, LoadSpec{0.05}, 50e-6);
  const double travel = s.theta_m / (2.0 * std::numbers::pi * p.gear_ratio) * p.lead;
  EXPECT_NEAR(s.pos, travel, 1e-12);
}
