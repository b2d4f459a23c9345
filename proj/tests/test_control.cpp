#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "maglev/control.hpp"
#include "maglev/plant.hpp"

using namespace maglev;

namespace {

const PlantParams kParams{};

}  // namespace

TEST_CASE("saturation clamps symmetrically") {
  CHECK(saturate(5.0, 30.0) == 5.0);
  CHECK(saturate(31.0, 30.0) == 30.0);
  CHECK(saturate(-31.0, 30.0) == -30.0);
}

TEST_CASE("desired flux falls back to the force-balance value") {
  IdaPbcConfig cfg;
  CHECK(cfg.desired_flux(kParams) == kParams.equilibrium_flux());
  cfg.lambda_star = 0.2;
  CHECK(cfg.desired_flux(kParams) == 0.2);
}

TEST_CASE("energy-shaping law reproduces the equilibrium input") {
  // with every error zeroed only the resistance feedforward survives
  const IdaPbcConfig cfg;
  const double q_star = 0.003;
  const PlantState x{kParams.equilibrium_flux(), q_star - kParams.c, 0.0};
  const double u = ida_pbc_state_feedback(x, q_star, kParams, cfg);
  CHECK(u == doctest::Approx(0.0810436174995667).epsilon(1e-13));
  CHECK(u == doctest::Approx(equilibrium_input(kParams, q_star)).epsilon(1e-13));
}

TEST_CASE("state feedback is the sensorless law fed with the truth") {
  const IdaPbcConfig cfg;
  const PlantState x{0.95 * kParams.equilibrium_flux(), -0.0035, 0.01};
  CHECK(ida_pbc_state_feedback(x, 0.002, kParams, cfg) ==
        ida_pbc_sensorless(x, kParams.R, output(x), 0.002, kParams, cfg));
}

TEST_CASE("large errors hit the actuator limits exactly") {
  const IdaPbcConfig cfg;
  // Kp*(q error) alone exceeds u_max for the first state, the momentum
  // term alone for the second
  const PlantState far_below{kParams.equilibrium_flux(), -0.2, 0.0};
  const PlantState far_above{kParams.equilibrium_flux(), -0.001, 0.1};
  const double u_lo =
      ida_pbc_sensorless(far_below, kParams.R, -1e-4, 0.003, kParams, cfg);
  const double u_hi =
      ida_pbc_sensorless(far_above, kParams.R, -1e-4, 0.003, kParams, cfg);
  CHECK(u_lo == cfg.u_max);
  CHECK(u_hi == -cfg.u_max);

  for (int j = 0; j < 50; ++j) {
    const PlantState x{0.02 * j, -0.001 - 1e-4 * j, 0.05 - 0.002 * j};
    const double u =
        ida_pbc_sensorless(x, kParams.R, output(x), 0.003, kParams, cfg);
    CHECK(std::abs(u) <= cfg.u_max);
  }
}

TEST_CASE("with zero gains only the resistance feedforward remains") {
  IdaPbcConfig cfg;
  cfg.Kp = 0.0;
  const double y = -4.2e-4;
  const double R_hat = 2.1;
  const PlantState x_hat{0.7, -0.004, 0.0};
  CHECK(ida_pbc_sensorless(x_hat, R_hat, y, 0.003, kParams, cfg) ==
        -R_hat / kParams.k * y);
}

TEST_CASE("flux-routed law: frozen equilibrium value") {
  BacksteppingController ctl;
  const double u = ctl.control(0.003, 0.0, 0.003, kParams.R, kParams, 1e-4);
  // R*(c - q*)*sqrt(2 m g / k), evaluated by hand
  CHECK(u == doctest::Approx(0.08104361749956668).epsilon(1e-13));
  CHECK(ctl.integral() == 0.0);

  // the same equilibrium voltage the energy-shaping law produces
  CHECK(u == doctest::Approx(equilibrium_input(kParams, 0.003)).epsilon(1e-12));
}

TEST_CASE("flux-routed law: zero demanded force gives zero voltage") {
  BacksteppingConfig cfg;
  cfg.gamma1 = 1.0;
  BacksteppingController ctl(cfg);
  const double p_mom = kParams.m * kParams.g_acc;  // cancels gravity exactly
  CHECK(ctl.control(0.003, p_mom, 0.003, kParams.R, kParams, 1e-4) == 0.0);
}

TEST_CASE("flux-routed law: negative demanded force flips the sign") {
  BacksteppingController ctl;
  const BacksteppingConfig& cfg = ctl.config();
  const double q = 0.004;  // above the setpoint
  const double q_star = 0.001;
  const double p_mom = 0.01;  // rising fast; momentum term dominates gravity
  const double force =
      2.0 / kParams.k *
      (kParams.m * kParams.g_acc - cfg.gamma1 * p_mom -
       cfg.gamma2 * kParams.m * (q - q_star));
  REQUIRE(force < 0.0);
  const double want = kParams.R * (kParams.c - q) * -std::sqrt(-force);
  CHECK(ctl.control(q, p_mom, q_star, kParams.R, kParams, 1e-4) ==
        doctest::Approx(want).epsilon(1e-13));
}

TEST_CASE("integral term accumulates past errors only") {
  BacksteppingController ctl;
  const double q = 0.0035;
  const double q_star = 0.003;
  const double dt = 0.01;
  const double u1 = ctl.control(q, 0.0, q_star, kParams.R, kParams, dt);
  const double u2 = ctl.control(q, 0.0, q_star, kParams.R, kParams, dt);
  const double u3 = ctl.control(q, 0.0, q_star, kParams.R, kParams, dt);
  CHECK(ctl.integral() == doctest::Approx(3.0 * dt * (q - q_star)).epsilon(1e-12));
  // the first sample sees an empty integral
  CHECK(u2 - u1 == doctest::Approx(-ctl.config().Ki * dt * (q - q_star)));
  CHECK(u3 - u2 == doctest::Approx(-ctl.config().Ki * dt * (q - q_star)));

  ctl.reset();
  CHECK(ctl.integral() == 0.0);
}

TEST_CASE("reference profile cycles through its levels") {
  const ReferenceProfile ref;
  CHECK(ref.at(0.0) == 0.003);
  CHECK(ref.at(1.999) == 0.003);
  CHECK(ref.at(2.0) == 0.001);
  CHECK(ref.at(3.9) == 0.001);
  CHECK(ref.at(4.0) == 0.003);

  ReferenceProfile delayed;
  delayed.start_offset = 0.5;
  CHECK(delayed.at(0.0) == 0.003);
  CHECK(delayed.at(2.4) == 0.003);
  CHECK(delayed.at(2.6) == 0.001);

  ReferenceProfile single;
  single.levels = {0.002};
  CHECK(single.at(0.0) == 0.002);
  CHECK(single.at(100.0) == 0.002);
}

TEST_CASE("reference profile validity") {
  ReferenceProfile ref;
  CHECK(ref.valid(kParams));
  ref.levels = {0.003, kParams.c};
  CHECK(!ref.valid(kParams));
  ref.levels = {};
  CHECK(!ref.valid(kParams));
  ref.levels = {0.003};
  ref.period = 0.0;
  CHECK(!ref.valid(kParams));
}
