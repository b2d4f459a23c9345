#pragma once

// Levitated-ball plant: continuous-time dynamics, output map, current and
// measurement-noise models, and a classical fixed-step RK4 integrator.

#include <cmath>
#include <cstdint>

namespace maglev {

/// Physical constants of the 1-DOF levitated ball.
struct PlantParams {
  double m = 0.0844;     ///< ball mass [kg]
  double g_acc = 9.81;   ///< gravitational acceleration [m/s^2]
  double R = 2.52;       ///< coil resistance [Ohm]
  double c = 0.005;      ///< position of the magnet face, q < c [m]
  double k = 6404.2e-6;  ///< inductance constant [H*m]

  [[nodiscard]] bool valid() const {
    return m > 0.0 && g_acc > 0.0 && R > 0.0 && c > 0.0 && k > 0.0;
  }

  /// Flux at which the magnetic force balances gravity; any levitation
  /// equilibrium sits at this flux regardless of position.
  [[nodiscard]] double equilibrium_flux() const {
    return std::sqrt(2.0 * k * m * g_acc);
  }
};

/// State col(flux, shifted position, momentum). The ball stays strictly
/// below the magnet while x2 < 0; x2 = 0 means contact.
struct PlantState {
  double x1 = 0.0;  ///< flux linkage [Wb]
  double x2 = 0.0;  ///< q - c [m]
  double x3 = 0.0;  ///< momentum [kg*m/s]

  [[nodiscard]] bool finite() const {
    return std::isfinite(x1) && std::isfinite(x2) && std::isfinite(x3);
  }
};

/// Right-hand side of the plant ODE for input voltage u.
[[nodiscard]] inline PlantState dynamics(const PlantState& x, double u,
                                         const PlantParams& p) {
  return {p.R / p.k * x.x1 * x.x2 + u,
          x.x3 / p.m,
          x.x1 * x.x1 / (2.0 * p.k) - p.m * p.g_acc};
}

/// Average model seen by the control component alone (no probing ripple).
/// Identical vector field; kept separate so co-simulations read naturally.
[[nodiscard]] inline PlantState averaged_dynamics(const PlantState& xbar,
                                                  double u_C,
                                                  const PlantParams& p) {
  return dynamics(xbar, u_C, p);
}

/// Measured output y = x1*x2 = -k*i.
[[nodiscard]] inline double output(const PlantState& x) { return x.x1 * x.x2; }

/// Coil current reconstructed from the state.
[[nodiscard]] inline double current(const PlantState& x,
                                    const PlantParams& p) {
  return -x.x1 * x.x2 / p.k;
}

/// Constant input holding the ball still at shifted position x2s = q* - c.
[[nodiscard]] inline double equilibrium_input(const PlantParams& p,
                                              double q_star) {
  return -p.R / p.k * p.equilibrium_flux() * (q_star - p.c);
}

struct NoiseConfig {
  double amplitude = 0.0;      ///< half-range of the current noise [A]
  std::uint64_t seed = 1;      ///< draw sequence selector
  double hold_interval = 0.0;  ///< sample-and-hold period [s]; 0 = sim step
};

/// Sample-and-hold uniform current noise. The held value is a pure function
/// of (seed, interval index), so equal seeds and equal times reproduce the
/// same waveform no matter how the timeline is stepped or queried.
class CurrentNoise {
 public:
  CurrentNoise(const NoiseConfig& cfg, double default_hold)
      : cfg_(cfg),
        hold_(cfg.hold_interval > 0.0 ? cfg.hold_interval : default_hold) {}

  [[nodiscard]] double at(double t) const {
    if (cfg_.amplitude == 0.0) return 0.0;
    // guard absorbs rounding of t/hold at exact interval boundaries
    const auto idx =
        static_cast<std::uint64_t>(std::floor(t / hold_ + 1e-9));
    const double u01 = mix01(cfg_.seed ^ (idx * 0x9e3779b97f4a7c15ULL));
    return cfg_.amplitude * (2.0 * u01 - 1.0);
  }

  [[nodiscard]] double hold() const { return hold_; }

 private:
  // splitmix64 finalizer mapped onto [0, 1)
  static double mix01(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return static_cast<double>(x >> 11) * 0x1.0p-53;
  }

  NoiseConfig cfg_;
  double hold_;
};

/// Output sample corrupted by current noise: x1*x2 - k*nu(t).
[[nodiscard]] inline double measure(const PlantState& x, const PlantParams& p,
                                    const CurrentNoise& noise, double t) {
  return output(x) - p.k * noise.at(t);
}

/// One classical RK4 step of the plant under a time-varying input u(t).
/// The input callable is evaluated at the stage times, so a fast probing
/// component keeps its full resolution inside the step.
template <typename InputFn>
[[nodiscard]] PlantState rk4_step(const PlantState& x, double t, double h,
                                  const PlantParams& p, InputFn&& u) {
  const auto shift = [](const PlantState& a, const PlantState& d, double s) {
    return PlantState{a.x1 + s * d.x1, a.x2 + s * d.x2, a.x3 + s * d.x3};
  };
  const PlantState k1 = dynamics(x, u(t), p);
  const PlantState k2 = dynamics(shift(x, k1, 0.5 * h), u(t + 0.5 * h), p);
  const PlantState k3 = dynamics(shift(x, k2, 0.5 * h), u(t + 0.5 * h), p);
  const PlantState k4 = dynamics(shift(x, k3, h), u(t + h), p);
  return {x.x1 + h / 6.0 * (k1.x1 + 2.0 * k2.x1 + 2.0 * k3.x1 + k4.x1),
          x.x2 + h / 6.0 * (k1.x2 + 2.0 * k2.x2 + 2.0 * k3.x2 + k4.x2),
          x.x3 + h / 6.0 * (k1.x3 + 2.0 * k2.x3 + 2.0 * k3.x3 + k4.x3)};
}

}  // namespace maglev
