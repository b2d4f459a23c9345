#pragma once

// Controllers and the position reference. The passivity-based law damps an
// energy-shaped error system and reads either estimated or true states; the
// flux-routed design with an integral term is kept as an alternative.

#include <cmath>
#include <vector>

#include "maglev/plant.hpp"

namespace maglev {

/// Gains of the energy-shaping controller.
struct IdaPbcConfig {
  double Kp = 200.7;        ///< proportional gain on the shaped error
  double alpha = 33.4;      ///< flux/position weighting
  double lambda_star = 0.0; ///< desired flux; 0 derives it from the plant
  double q_star = 0.003;    ///< fallback position setpoint [m]
  double u_max = 30.0;      ///< actuator saturation [V]

  [[nodiscard]] double desired_flux(const PlantParams& p) const {
    return lambda_star > 0.0 ? lambda_star : p.equilibrium_flux();
  }
};

[[nodiscard]] inline double saturate(double u, double u_max) {
  return u > u_max ? u_max : (u < -u_max ? -u_max : u);
}

/// Energy-shaping law on (flux, position, momentum) with resistance
/// compensation through the measured output. Saturated to [-u_max, u_max].
[[nodiscard]] inline double ida_pbc_law(double x1, double x2, double x3,
                                        double R, double y, double q_star,
                                        const PlantParams& p,
                                        const IdaPbcConfig& cfg) {
  const double lambda_star = cfg.desired_flux(p);
  const double u = -R / p.k * y -
                   cfg.Kp * ((x1 - lambda_star) / cfg.alpha +
                             (x2 + p.c - q_star)) -
                   (cfg.alpha / p.m + cfg.Kp) * x3;
  return saturate(u, cfg.u_max);
}

/// Sensorless wiring: all states and the resistance come from the observer.
[[nodiscard]] inline double ida_pbc_sensorless(const PlantState& x_hat,
                                               double R_hat, double y,
                                               double q_star,
                                               const PlantParams& p,
                                               const IdaPbcConfig& cfg) {
  return ida_pbc_law(x_hat.x1, x_hat.x2, x_hat.x3, R_hat, y, q_star, p, cfg);
}

/// Reference wiring on the true state, for baselines and co-simulation.
[[nodiscard]] inline double ida_pbc_state_feedback(const PlantState& x,
                                                   double q_star,
                                                   const PlantParams& p,
                                                   const IdaPbcConfig& cfg) {
  return ida_pbc_law(x.x1, x.x2, x.x3, p.R, output(x), q_star, p, cfg);
}

/// Gains of the flux-routed controller.
struct BacksteppingConfig {
  double Ki = 1.0;      ///< integral gain on the position error
  double gamma1 = 340.0;///< momentum feedback
  double gamma2 = 3.0;  ///< position feedback
  double p_star = 0.0;  ///< momentum setpoint [kg*m/s]
};

/// Flux-routed law: shapes the demanded force, converts it to the matching
/// coil voltage, and trims the position error with an integral term. Holds
/// the integral state, so one instance per run.
class BacksteppingController {
 public:
  explicit BacksteppingController(const BacksteppingConfig& cfg = {})
      : cfg_(cfg) {}

  /// One control sample; dt advances the error integral.
  double control(double q, double p_mom, double q_star, double R,
                 const PlantParams& p, double dt) {
    const double force = 2.0 / p.k *
                         (p.m * p.g_acc - cfg_.gamma1 * (p_mom - cfg_.p_star) -
                          cfg_.gamma2 * p.m * (q - q_star));
    const double root =
        force == 0.0 ? 0.0
                     : std::copysign(std::sqrt(std::abs(force)), force);
    const double u = R * (p.c - q) * root - cfg_.Ki * integral_;
    integral_ += dt * (q - q_star);
    return u;
  }

  void reset() { integral_ = 0.0; }
  [[nodiscard]] double integral() const { return integral_; }
  [[nodiscard]] const BacksteppingConfig& config() const { return cfg_; }

 private:
  BacksteppingConfig cfg_;
  double integral_ = 0.0;
};

/// Piecewise-constant position reference cycling through `levels`.
struct ReferenceProfile {
  std::vector<double> levels{0.003, 0.001};  ///< setpoints [m], all < c
  double period = 2.0;                       ///< plateau length [s]
  double start_offset = 0.0;                 ///< delay before cycling [s]

  [[nodiscard]] double at(double t) const {
    if (levels.empty()) return 0.0;
    if (t < start_offset || levels.size() == 1 || period <= 0.0)
      return levels.front();
    const auto idx = static_cast<std::size_t>((t - start_offset) / period);
    return levels[idx % levels.size()];
  }

  [[nodiscard]] bool valid(const PlantParams& p) const {
    if (levels.empty() || period <= 0.0 || start_offset < 0.0) return false;
    for (double q : levels)
      if (q >= p.c) return false;
    return true;
  }
};

}  // namespace maglev
