#pragma once

// Adaptive observer stack built on the virtual output: resistance
// identification through first-order filters, a flux observer that needs no
// magnetic model, and two interchangeable momentum observers.

#include <array>
#include <cmath>
#include <optional>

#include "maglev/plant.hpp"
#include "maglev/sigproc.hpp"
#include "maglev/vout.hpp"

namespace maglev {

/// Adaptation and correction gains for the whole observer stack.
struct ObserverGains {
  double gamma = 3.89e3;       ///< virtual-output adaptation gain
  double a = 500.0;            ///< resistance filter pole [1/s]
  double gamma_R = 500.0;      ///< resistance adaptation gain
  double gamma_lambda = 8000.0;///< flux correction gain
  double gamma_p = 30.0;       ///< momentum observer eigenvalue (first order)
  double ell = -1e-4;          ///< virtual-output projection ceiling [m]
  double c1 = 100.0;           ///< second-order momentum observer gain [1/s]
  double c2 = 100.0;           ///< second-order momentum observer gain [1/s]
  /// Second-order variant wiring. Default: the momentum row is driven by
  /// its own error (x2_hat - z2), so at rest it settles on a position-sized
  /// value rather than the momentum. Switch on to correct it with the
  /// position innovation (x2_hat - z1) instead, which is unit-consistent
  /// and recovers the true momentum.
  bool luenberger_z2_uses_z1 = false;
};

/// Overrides for observer initial conditions; unset fields fall back to the
/// documented defaults derived from the plant parameters.
struct ObserverInit {
  std::optional<double> R_hat0;  ///< default: half the true resistance
  std::optional<double> y_v0;    ///< default: -c (ball resting at q = 0)
};

/// Gradient identifier for the coil resistance. Three first-order filters
/// turn the flux balance into a linear regression Y_R = phi_R * R.
struct ResistanceEstimator {
  double v1 = 0.0;     ///< filtered input voltage
  double v2 = 0.0;     ///< filtered flux estimate y/y_v
  double phi_R = 0.0;  ///< regressor, filtered y/k
  double R_hat = 0.0;  ///< resistance estimate [Ohm]
  double a = 500.0;
  double gamma_R = 500.0;

  struct Regression {
    double Y_R;
    double phi_R;
  };

  struct Rates {
    double v1, v2, phi_R, R_hat;
  };

  /// Regression pair read off the current filter states. y_v_hat must be
  /// bounded away from zero.
  [[nodiscard]] Regression regression(double y, double y_v_hat) const {
    return {-v1 + a * (y / y_v_hat) - a * v2, phi_R};
  }

  /// Time derivatives of the filter states and the resistance estimate at
  /// an arbitrary evaluation point.
  [[nodiscard]] static Rates rates(double v1_value, double v2_value,
                                   double phi_R_value, double R_hat_value,
                                   double a_gain, double gamma_R_gain,
                                   double u, double y, double y_v_hat,
                                   double k) {
    const double flux_alg = y / y_v_hat;
    const double Y_R = -v1_value + a_gain * flux_alg - a_gain * v2_value;
    return {a_gain * (u - v1_value), a_gain * (flux_alg - v2_value),
            a_gain / k * y - a_gain * phi_R_value,
            gamma_R_gain * phi_R_value * (Y_R - phi_R_value * R_hat_value)};
  }

  /// Forms the regression pair at the current sample, then advances the
  /// filters one Euler step. The pair is returned so the gradient update
  /// can use the pre-step filter values.
  Regression filter_step(double u, double y, double y_v_hat, double h,
                         double k) {
    const Regression out = regression(y, y_v_hat);
    const Rates r = rates(v1, v2, phi_R, R_hat, a, gamma_R, u, y, y_v_hat, k);
    v1 += h * r.v1;
    v2 += h * r.v2;
    phi_R += h * r.phi_R;
    return out;
  }

  /// One gradient step on the resistance estimate.
  void update(const Regression& reg, double h) {
    R_hat += h * gamma_R * reg.phi_R * (reg.Y_R - reg.phi_R * R_hat);
  }
};

/// Flux observer with output injection through the virtual output. The
/// correction vanishes exactly when y = y_v_hat * x1_hat.
struct FluxObserver {
  double x1_hat = 0.0;
  double gamma_lambda = 8000.0;

  [[nodiscard]] double rate(double x1_value, double R_hat, double y, double u,
                            double y_v_hat, double k) const {
    return R_hat / k * y + u - gamma_lambda * (y - y_v_hat * x1_value);
  }

  void step(double R_hat, double y, double u, double y_v_hat, double h,
            double k) {
    x1_hat += h * rate(x1_hat, R_hat, y, u, y_v_hat, k);
  }
};

/// Direct flux reconstruction y / y_v_hat; no dynamics, noise passes
/// through unfiltered. Diagnostic companion to FluxObserver.
[[nodiscard]] inline double algebraic_flux(double y, double y_v_hat) {
  return y / y_v_hat;
}

struct PositionEstimate {
  double x2_hat;  ///< shifted position estimate
  double q_hat;   ///< absolute position estimate
};

/// The virtual output *is* the shifted position estimate.
[[nodiscard]] inline PositionEstimate position_estimate(double y_v_hat,
                                                        double c) {
  return {y_v_hat, y_v_hat + c};
}

/// Momentum observer in two flavours: a first-order design whose internal
/// state tracks x3 - gamma_p * y_v, and a second-order design whose momentum
/// row is driven by its own error (switchable to a cascade wiring corrected
/// by the position innovation).
struct MomentaObserver {
  enum class Variant { FirstOrder, SecondOrder };

  Variant variant = Variant::FirstOrder;

  // first-order design
  double z = 0.0;
  double gamma_p = 30.0;

  // second-order design
  double z1 = 0.0;
  double z2 = 0.0;
  double c1 = 100.0;
  double c2 = 100.0;
  bool z2_uses_z1 = false;

  struct Rates {
    double z, z1, z2;
  };

  /// Time derivatives at an arbitrary evaluation point; only the fields of
  /// the active variant are meaningful.
  [[nodiscard]] Rates rates(double z_value, double z1_value, double z2_value,
                            double x1_hat, double y_v_hat,
                            const PlantParams& p) const {
    const double force = x1_hat * x1_hat / (2.0 * p.k) - p.m * p.g_acc;
    if (variant == Variant::FirstOrder)
      return {-gamma_p / p.m * z_value + force -
                  gamma_p * gamma_p / p.m * y_v_hat,
              0.0, 0.0};
    const double innov2 =
        z2_uses_z1 ? (y_v_hat - z1_value) : (y_v_hat - z2_value);
    return {0.0, z2_value / p.m + c1 * (y_v_hat - z1_value),
            force + c2 * innov2};
  }

  void step(double x1_hat, double y_v_hat, const PlantParams& p, double h) {
    const Rates r = rates(z, z1, z2, x1_hat, y_v_hat, p);
    z += h * r.z;
    z1 += h * r.z1;
    z2 += h * r.z2;
  }

  /// Momentum estimate assembled from the internal state and the current
  /// virtual output; for the first-order design x3_hat - z = gamma_p * y_v.
  [[nodiscard]] double momentum(double y_v_hat) const {
    return variant == Variant::FirstOrder ? z + gamma_p * y_v_hat : z2;
  }
};

/// Per-sample diagnostics surfaced by the bundle for logging.
struct ObserverDiag {
  double Y = 0.0;         ///< regression signal of the virtual output
  double Y_R = 0.0;       ///< resistance regression signal at the sample
  double phi_R = 0.0;     ///< resistance regressor at the sample
  double y_v_used = 0.0;  ///< pre-update virtual output consumers read
  bool vout_warm = false;
};

/// The complete observer: virtual output, resistance, flux, and momentum,
/// advanced in that order, one Euler step per sample. Within one step every
/// consumer reads the virtual output as it was before the step (synchronous
/// semantics), so the result does not depend on the update order.
class ObserverBundle {
 public:
  ObserverBundle(const PlantParams& plant, const InjectionConfig& inj,
                 const ObserverGains& gains, double step, double y0,
                 MomentaObserver::Variant variant,
                 const ObserverInit& init = {});

  /// Advances every sub-estimator one step using the signals at time t:
  /// the applied voltage u (probe included), the measurement y, and the
  /// estimates as they stood before the call. Returns this sample's
  /// diagnostics.
  ObserverDiag step(double u, double y, double t);

  /// State estimate col(x1_hat, x2_hat, x3_hat) at the current step.
  [[nodiscard]] PlantState estimate() const;

  /// Internal state laid out as col(theta2, v1, v2, phi_R, R_hat, x1_hat, z)
  /// for the first-order momentum variant.
  [[nodiscard]] std::array<double, 7> chi() const;

  [[nodiscard]] bool finite() const;

  [[nodiscard]] const VoutEstimator& vout() const { return vout_; }
  [[nodiscard]] const ResistanceEstimator& resistance() const { return res_; }
  [[nodiscard]] const FluxObserver& flux() const { return flux_; }
  [[nodiscard]] const MomentaObserver& momenta() const { return mom_; }
  [[nodiscard]] double step_size() const { return step_; }

 private:
  PlantParams plant_;
  double step_;
  VoutEstimator vout_;
  ResistanceEstimator res_;
  FluxObserver flux_;
  MomentaObserver mom_;
};

}  // namespace maglev
