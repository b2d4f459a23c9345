#pragma once

// Virtual-output reconstruction: the delay/window comparison isolates the
// probing-synchronous component of the measured output, and a projected
// gradient estimator tracks its amplitude theta2 = epsilon * y_v.

#include "maglev/sigproc.hpp"

namespace maglev {

/// Gradient estimator of the virtual output y_v (the shifted position seen
/// through the probing ripple). Holds the delay line and running mean it
/// feeds internally; one instance per sampled signal.
class VoutEstimator {
 public:
  /// @param inj    probing shape; fixes delay d = n*eps and window 2d
  /// @param step   sample period, must divide d exactly
  /// @param gamma  adaptation gain
  /// @param ell    projection ceiling, y_v estimate stays <= ell < 0
  /// @param y_v0   initial virtual-output guess
  VoutEstimator(const InjectionConfig& inj, double step, double gamma,
                double ell, double y_v0)
      : inj_(inj),
        step_(step),
        gamma_(gamma),
        ell_(ell),
        theta2_(inj.epsilon * y_v0),
        delayed_(inj.delay(), step),
        windowed_(inj.window(), step) {
    project();
  }

  /// Pushes y(t) through both operators and returns the regression signal
  /// Y(t) = y(t - d) - windowed mean of y over [t - 2d, t].
  double build_Y(double y) {
    const double delayed = delayed_.step(y);
    const double mean = windowed_.step(y);
    last_Y_ = delayed - mean;
    return last_Y_;
  }

  /// One projected gradient step on theta2 against the regressor S(t - d).
  /// Call only once the operators are warmed up.
  void drem_update(double Y, double t) {
    theta2_ += step_ * drem_rate(theta2_, Y, delayed_regressor(t));
    project();
  }

  /// Gradient-flow rate of theta2 at an arbitrary evaluation point.
  [[nodiscard]] double drem_rate(double theta2_value, double Y,
                                 double Sd) const {
    return gamma_ * Sd * (Y - Sd * theta2_value);
  }

  /// Regressor S(t - d) seen by the gradient flow at time t.
  [[nodiscard]] double delayed_regressor(double t) const {
    return probe_primitive(t - inj_.delay(), inj_);
  }

  /// Clamps a candidate theta2 onto the physical side (y_v <= ell < 0).
  [[nodiscard]] double projected(double theta2_value) const {
    const double ceiling = inj_.epsilon * ell_;
    return theta2_value > ceiling ? ceiling : theta2_value;
  }

  /// Convenience: build Y, adapt once warm, return the current estimate.
  double step(double y, double t) {
    const double Y = build_Y(y);
    if (warmed_up()) drem_update(Y, t);
    return virtual_output();
  }

  [[nodiscard]] double virtual_output() const {
    return theta2_ / inj_.epsilon;
  }
  [[nodiscard]] double theta2() const { return theta2_; }
  [[nodiscard]] double last_Y() const { return last_Y_; }
  [[nodiscard]] bool warmed_up() const { return windowed_.full(); }
  [[nodiscard]] const InjectionConfig& injection() const { return inj_; }

 private:
  void project() { theta2_ = projected(theta2_); }

  InjectionConfig inj_;
  double step_;
  double gamma_;
  double ell_;
  double theta2_;
  double last_Y_ = 0.0;
  DelayLine delayed_;
  RunningIntegral windowed_;
};

}  // namespace maglev
