#pragma once

// Probing signal and the two sampled-data operators the virtual-output
// reconstruction is built from: a pure delay and a windowed running mean.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace maglev {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Probing-signal shape: amplitude, period, and the delay expressed in
/// whole periods. The operator delay is d = n*epsilon and the averaging
/// window is w = 2d, so both stay aligned with the probing phase.
struct InjectionConfig {
  double A0 = 1.0;              ///< probing amplitude [V]
  double epsilon = 1.0 / 300.0; ///< probing period [s]
  int n = 10;                   ///< delay in whole periods

  [[nodiscard]] double delay() const { return n * epsilon; }
  [[nodiscard]] double window() const { return 2.0 * delay(); }
  [[nodiscard]] bool valid() const {
    return A0 > 0.0 && epsilon > 0.0 && n >= 1;
  }
};

/// Probing voltage s(t), one sine per period epsilon.
[[nodiscard]] inline double probe(double t, const InjectionConfig& inj) {
  return inj.A0 * std::sin(kTwoPi * t / inj.epsilon);
}

/// Zero-mean scaled primitive S(t) of the probe: epsilon * dS/dt = s(t).
[[nodiscard]] inline double probe_primitive(double t,
                                            const InjectionConfig& inj) {
  return -(inj.A0 / kTwoPi) * std::cos(kTwoPi * t / inj.epsilon);
}

/// Integral of S^2 over one probing period: A0^2 * epsilon / (8 pi^2).
/// Sets the per-period contraction of the gradient estimator.
[[nodiscard]] inline double excitation_integral(const InjectionConfig& inj) {
  const double pi = kTwoPi / 2.0;
  return inj.A0 * inj.A0 * inj.epsilon / (8.0 * pi * pi);
}

namespace detail {

/// Number of sample steps covering `span`, rejecting spans that are not an
/// integer multiple of `step`.
[[nodiscard]] inline std::size_t aligned_steps(double span, double step,
                                               const char* what) {
  if (step <= 0.0 || span <= 0.0)
    throw std::invalid_argument(std::string(what) +
                                ": span and step must be positive");
  const double ratio = span / step;
  const auto steps = static_cast<std::size_t>(std::llround(ratio));
  if (steps == 0 || std::abs(ratio - static_cast<double>(steps)) >
                        1e-6 * (1.0 + static_cast<double>(steps)))
    throw std::invalid_argument(std::string(what) +
                                ": span is not a whole number of steps");
  return steps;
}

}  // namespace detail

/// Fixed-lag delay line over uniformly sampled input. Reads before the
/// buffer fills return the first sample (constant back-extension).
class DelayLine {
 public:
  DelayLine(double delay, double step)
      : lag_(detail::aligned_steps(delay, step, "DelayLine")),
        buf_(lag_ + 1, 0.0) {}

  /// Pushes v(t) and returns v(t - delay).
  double step(double v) {
    if (pushed_ == 0) buf_.assign(buf_.size(), v);  // pad with first sample
    head_ = (head_ + 1) % buf_.size();
    buf_[head_] = v;
    if (pushed_ <= lag_) ++pushed_;
    return buf_[(head_ + 1) % buf_.size()];
  }

  [[nodiscard]] bool full() const { return pushed_ > lag_; }
  [[nodiscard]] std::size_t lag_steps() const { return lag_; }

 private:
  std::size_t lag_;
  std::vector<double> buf_;
  std::size_t head_ = 0;
  std::size_t pushed_ = 0;
};

/// Windowed running mean (1/w) * integral over [t-w, t] of the input,
/// accumulated by trapezoid quadrature on the sample grid. Before the
/// window fills, the input is back-extended with its first sample, so the
/// output is the mean of that padded signal.
class RunningIntegral {
 public:
  RunningIntegral(double window, double step)
      : steps_(detail::aligned_steps(window, step, "RunningIntegral")),
        step_(step),
        window_(window),
        chi_(steps_ + 1, 0.0) {}

  /// Pushes v(t) and returns the windowed mean ending at t.
  double step(double v) {
    if (pushed_ == 0) {
      // virtual history: running integral of a constant-v past
      for (std::size_t j = 0; j < chi_.size(); ++j) {
        const std::size_t age = chi_.size() - 1 - j;
        chi_[j] = -static_cast<double>(age) * step_ * v;
      }
      head_ = chi_.size() - 1;
      prev_ = v;
      ++pushed_;
      return v;
    }
    const double chi_now = chi_[head_] + 0.5 * step_ * (prev_ + v);
    head_ = (head_ + 1) % chi_.size();
    chi_[head_] = chi_now;
    prev_ = v;
    if (pushed_ <= steps_) ++pushed_;
    return (chi_now - chi_[(head_ + 1) % chi_.size()]) / window_;
  }

  [[nodiscard]] bool full() const { return pushed_ > steps_; }
  [[nodiscard]] std::size_t window_steps() const { return steps_; }

 private:
  std::size_t steps_;
  double step_;
  double window_;
  std::vector<double> chi_;
  std::size_t head_ = 0;
  std::size_t pushed_ = 0;
  double prev_ = 0.0;
};

}  // namespace maglev
