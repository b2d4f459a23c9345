#pragma once

// Closed-loop runner and its reporting: fixed-step co-advance of plant,
// observer, and controller; per-plateau steady-state metrics; and the
// probing-period sweep with fitted error-scaling slopes.

#include <functional>
#include <string>
#include <vector>

#include "maglev/scenario.hpp"
#include "maglev/trajectory.hpp"

namespace maglev {

enum class SimStatus {
  Ok,        ///< ran to the configured duration
  Crashed,   ///< ball reached the magnet face (x2 >= 0)
  NonFinite  ///< a state or estimate stopped being a number
};

struct SimResult {
  TrajectoryLog log;
  SimStatus status = SimStatus::Ok;
  std::string message;  ///< diagnostic for non-Ok outcomes

  [[nodiscard]] bool ok() const { return status == SimStatus::Ok; }
};

/// Runs one scenario. The config is validated first; an invalid config
/// throws std::invalid_argument. A crash or numeric blow-up ends the run
/// early with the partial log and a diagnostic, never an exception.
[[nodiscard]] SimResult simulate(const ScenarioConfig& cfg);

/// Smallest forward-window excitation integral of the squared current:
/// min over t of the integral of i^2 over [t, t + window]. Positive values
/// certify persistent excitation over the log.
[[nodiscard]] double pe_metric(const TrajectoryLog& log, double window);

/// Steady-state figures for one reference plateau, taken over its final
/// fifth. `bias` entries are |time-average of the signed error| (noise
/// averages out); `rms` entries keep ripple and jitter in.
struct PlateauMetrics {
  double t_start = 0.0;
  double t_end = 0.0;
  double q_star = 0.0;
  bool skipped = false;  ///< plateau shorter than the observer warm-up

  double pos_est_bias = 0.0, pos_est_rms = 0.0;    ///< q_hat - q
  double flux_est_bias = 0.0, flux_est_rms = 0.0;  ///< x1_hat - x1
  double mom_est_bias = 0.0, mom_est_rms = 0.0;    ///< x3_hat - x3
  double resist_bias = 0.0, resist_rms = 0.0;      ///< R_hat - R
  double track_bias = 0.0, track_rms = 0.0;        ///< q - q_star

  /// First time (from plateau start) after which |q - q_star| stays inside
  /// max(1.5 * steady rms, 0.1 mm); negative if it never settles.
  double settling_time = -1.0;
};

struct RunMetrics {
  std::vector<PlateauMetrics> plateaus;

  // Means over the plateaus that start at or after `transient_skip`
  // (falling back to the last usable plateau when none qualify).
  double pos_est_bias = 0.0, pos_est_rms = 0.0;
  double flux_est_bias = 0.0, flux_est_rms = 0.0;
  double mom_est_bias = 0.0, mom_est_rms = 0.0;
  double resist_bias = 0.0, resist_rms = 0.0;
  double track_bias = 0.0, track_rms = 0.0;

  /// RMS jitter of the position estimate error over the steady windows,
  /// relative to the position-equivalent noise floor k*amp/(sqrt(3)*flux).
  /// Zero when the scenario is noiseless.
  double noise_amplification = 0.0;

  /// RMS of Y - S(t-d) * epsilon * x2(t-d) over the steady windows; the
  /// sampled regression identity should shrink with epsilon^2.
  double lemma_residual = 0.0;

  double pe_min = 0.0;  ///< pe_metric over the default 10-period window
  int used_plateaus = 0;
};

/// Computes per-plateau and aggregate metrics from a finished log.
/// `transient_skip` excludes the adaptation transient from the aggregates.
[[nodiscard]] RunMetrics run_metrics(const TrajectoryLog& log,
                                     const ScenarioConfig& cfg,
                                     double transient_skip = 3.0);

struct SweepEntry {
  double epsilon = 0.0;
  SimStatus status = SimStatus::Ok;
  std::string message;
  RunMetrics metrics;
};

/// Least-squares slope of log(err) against log(eps); the scaling exponent.
[[nodiscard]] double loglog_slope(const std::vector<double>& eps,
                                  const std::vector<double>& err);

struct SweepReport {
  std::vector<SweepEntry> entries;
  bool degenerate = false;  ///< fewer than two usable runs, slopes invalid

  double slope_pos_rms = 0.0;
  double slope_flux_rms = 0.0;
  double slope_mom_rms = 0.0;
  double slope_resist_rms = 0.0;
  double slope_track_rms = 0.0;
  double slope_lemma = 0.0;
};

/// Called after each sweep run with the entry and the full result, e.g. to
/// export the trajectory before it is discarded.
using SweepObserver =
    std::function<void(const SweepEntry&, const SimResult&)>;

/// Reruns the scenario for each probing period, holding every other
/// parameter fixed, and fits the error-scaling slopes.
[[nodiscard]] SweepReport epsilon_sweep(const ScenarioConfig& base,
                                        const std::vector<double>& epsilons,
                                        double transient_skip = 3.0,
                                        const SweepObserver& on_run = {});

}  // namespace maglev
