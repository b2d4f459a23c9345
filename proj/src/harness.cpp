#include "maglev/harness.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace maglev {
namespace {

std::string joined(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += "; ";
    out += p;
  }
  return out;
}

}  // namespace

SimResult simulate(const ScenarioConfig& cfg) {
  const auto problems = cfg.validate();
  if (!problems.empty())
    throw std::invalid_argument("invalid scenario: " + joined(problems));

  const double h = cfg.step_size();
  const auto total_steps =
      static_cast<long long>(std::llround(cfg.duration / h));

  const CurrentNoise noise(cfg.noise, h);
  PlantState x = cfg.resolved_initial_state();

  ObserverBundle observer(
      cfg.plant, cfg.injection, cfg.observer, h, measure(x, cfg.plant, noise, 0.0),
      cfg.momenta_variant == MomentaVariant::FirstOrder
          ? MomentaObserver::Variant::FirstOrder
          : MomentaObserver::Variant::SecondOrder,
      cfg.observer_init);
  BacksteppingController backstepping(cfg.backstepping);

  IdaPbcConfig ida = cfg.ida;
  ida.u_max = cfg.u_max;

  // trailing excitation integral of i^2 over ten probing periods
  const double pe_window = 10.0 * cfg.injection.epsilon;
  RunningIntegral pe_integral(pe_window, h);

  SimResult result;
  result.log.sample_step = h * cfg.log_stride;
  result.log.records.reserve(
      static_cast<std::size_t>(total_steps / cfg.log_stride) + 2);

  for (long long k = 0;; ++k) {
    const double t = static_cast<double>(k) * h;
    const double y = measure(x, cfg.plant, noise, t);
    const double i_true = current(x, cfg.plant);
    const double q_star = cfg.reference.at(t);
    const PlantState est = observer.estimate();
    const double R_hat = observer.resistance().R_hat;

    double u_C = 0.0;
    switch (cfg.controller) {
      case ControllerType::IdaSensorless:
        // until the delay/window operators fill, the position and momentum
        // estimates are placeholders; feeding them to the full law shoves
        // the ball into the magnet face. Hold the gain-zero limit of the
        // same law (resistive feedforward only) until the chain is live.
        u_C = observer.vout().warmed_up()
                  ? ida_pbc_sensorless(est, R_hat, y, q_star, cfg.plant, ida)
                  : -R_hat / cfg.plant.k * y;
        break;
      case ControllerType::IdaStateFeedback:
        u_C = ida_pbc_state_feedback(x, q_star, cfg.plant, ida);
        break;
      case ControllerType::Backstepping: {
        const double q = cfg.backstepping_uses_estimates ? est.x2 + cfg.plant.c
                                                         : x.x2 + cfg.plant.c;
        const double p_mom = cfg.backstepping_uses_estimates ? est.x3 : x.x3;
        const double R =
            cfg.backstepping_uses_estimates ? R_hat : cfg.plant.R;
        u_C = backstepping.control(q, p_mom, q_star, R, cfg.plant, h);
        break;
      }
    }
    u_C = saturate(u_C, cfg.u_max);

    const double s_now = probe(t, cfg.injection);
    const double u_now = u_C + s_now;
    const double pe_now = pe_integral.step(i_true * i_true) * pe_window;

    // the observer advances to t+h; its outputs Y, Y_R belong to time t
    const ObserverDiag diag = observer.step(u_now, y, t);

    if (k % cfg.log_stride == 0) {
      Record r;
      r.t = t;
      r.x1 = x.x1;
      r.x2 = x.x2;
      r.x3 = x.x3;
      r.y = y;
      r.i = i_true;
      r.u = u_now;
      r.u_C = u_C;
      r.s = s_now;
      r.y_v_hat = est.x2;
      r.x1_hat = est.x1;
      r.x2_hat = est.x2;
      r.x3_hat = est.x3;
      r.R_hat = R_hat;
      r.theta2_hat = observer.vout().theta2();
      r.Y = diag.Y;
      r.q_star = q_star;
      r.pe = pe_now;
      result.log.records.push_back(r);
    }

    if (k == total_steps) break;

    // u_C is held over the step; the probe keeps its waveform inside it
    x = rk4_step(x, t, h, cfg.plant,
                 [&](double tau) { return u_C + probe(tau, cfg.injection); });

    if (!x.finite() || !observer.finite()) {
      std::ostringstream msg;
      msg << "numeric overflow at t = " << t + h << " s";
      result.status = SimStatus::NonFinite;
      result.message = msg.str();
      break;
    }
    if (x.x2 >= 0.0) {
      std::ostringstream msg;
      msg << "ball reached the magnet face at t = " << t + h
          << " s (x2 = " << x.x2 << ")";
      result.status = SimStatus::Crashed;
      result.message = msg.str();
      break;
    }
  }
  return result;
}

double pe_metric(const TrajectoryLog& log, double window) {
  if (log.records.size() < 2 || window <= 0.0) return 0.0;
  const double dt = log.sample_step;
  const auto span = static_cast<std::size_t>(std::llround(window / dt));
  if (span == 0 || span >= log.records.size()) return 0.0;

  // trapezoid prefix sums of i^2 over the sample grid
  std::vector<double> prefix(log.records.size(), 0.0);
  for (std::size_t j = 1; j < log.records.size(); ++j) {
    const double a = log.records[j - 1].i, b = log.records[j].i;
    prefix[j] = prefix[j - 1] + 0.5 * dt * (a * a + b * b);
  }
  double best = prefix[span] - prefix[0];
  for (std::size_t j = 1; j + span < prefix.size(); ++j)
    best = std::min(best, prefix[j + span] - prefix[j]);
  return best;
}

namespace {

struct Window {
  std::size_t begin = 0, end = 0;  // record index range [begin, end)
};

double mean_of(const TrajectoryLog& log, const Window& w,
               double (*sel)(const Record&)) {
  double sum = 0.0;
  for (std::size_t j = w.begin; j < w.end; ++j) sum += sel(log.records[j]);
  return sum / static_cast<double>(w.end - w.begin);
}

double rms_of(const TrajectoryLog& log, const Window& w,
              double (*sel)(const Record&)) {
  double sum = 0.0;
  for (std::size_t j = w.begin; j < w.end; ++j) {
    const double v = sel(log.records[j]);
    sum += v * v;
  }
  return std::sqrt(sum / static_cast<double>(w.end - w.begin));
}

double err_pos(const Record& r) { return r.x2_hat - r.x2; }
double err_flux(const Record& r) { return r.x1_hat - r.x1; }
double err_mom(const Record& r) { return r.x3_hat - r.x3; }

}  // namespace

RunMetrics run_metrics(const TrajectoryLog& log, const ScenarioConfig& cfg,
                       double transient_skip) {
  RunMetrics out;
  if (log.records.size() < 2) return out;

  const double dt = log.sample_step;
  const double t_end = log.records.back().t;
  const double warm = cfg.injection.window();
  const double R_true = cfg.plant.R;
  const double c = cfg.plant.c;

  // plateau boundaries from the reference profile, clipped to the log
  std::vector<double> bounds{0.0};
  const auto& ref = cfg.reference;
  if (ref.levels.size() > 1 && ref.period > 0.0) {
    for (double b = ref.start_offset; b < t_end; b += ref.period)
      if (b > 0.0) bounds.push_back(b);
  }
  bounds.push_back(t_end);

  const auto index_at = [&](double t) {
    const auto j = static_cast<std::size_t>(std::llround(t / dt));
    return std::min(j, log.records.size() - 1);
  };

  std::vector<Window> steady_windows;
  std::vector<bool> aggregated;
  for (std::size_t b = 0; b + 1 < bounds.size(); ++b) {
    PlateauMetrics pm;
    pm.t_start = bounds[b];
    pm.t_end = bounds[b + 1];
    const double len = pm.t_end - pm.t_start;
    pm.q_star = ref.at(0.5 * (pm.t_start + pm.t_end));
    if (len <= warm) {
      pm.skipped = true;  // shorter than the operator warm-up
      out.plateaus.push_back(pm);
      aggregated.push_back(false);
      continue;
    }

    Window w;
    w.begin = index_at(pm.t_start + 0.8 * len);
    w.end = index_at(pm.t_end) + (b + 2 == bounds.size() ? 1 : 0);
    if (w.end <= w.begin + 1) {
      pm.skipped = true;
      out.plateaus.push_back(pm);
      aggregated.push_back(false);
      continue;
    }

    pm.pos_est_bias = std::abs(mean_of(log, w, err_pos));
    pm.pos_est_rms = rms_of(log, w, err_pos);
    pm.flux_est_bias = std::abs(mean_of(log, w, err_flux));
    pm.flux_est_rms = rms_of(log, w, err_flux);
    pm.mom_est_bias = std::abs(mean_of(log, w, err_mom));
    pm.mom_est_rms = rms_of(log, w, err_mom);

    double rsum = 0.0, rsq = 0.0;
    double tsum = 0.0, tsq = 0.0;
    for (std::size_t j = w.begin; j < w.end; ++j) {
      const Record& r = log.records[j];
      const double re = r.R_hat - R_true;
      const double te = (r.x2 + c) - r.q_star;
      rsum += re;
      rsq += re * re;
      tsum += te;
      tsq += te * te;
    }
    const auto count = static_cast<double>(w.end - w.begin);
    pm.resist_bias = std::abs(rsum / count);
    pm.resist_rms = std::sqrt(rsq / count);
    pm.track_bias = std::abs(tsum / count);
    pm.track_rms = std::sqrt(tsq / count);

    // settling: last escape from the tolerance band around q_star
    const double band = std::max(1.5 * pm.track_rms, 1e-4);
    const std::size_t p_begin = index_at(pm.t_start);
    const std::size_t p_end = w.end;
    double settled_at = pm.t_start;
    bool settles = true;
    for (std::size_t j = p_begin; j < p_end; ++j) {
      const Record& r = log.records[j];
      if (std::abs((r.x2 + c) - r.q_star) > band) {
        if (j + 1 == p_end) settles = false;
        settled_at = r.t + dt;
      }
    }
    pm.settling_time = settles ? settled_at - pm.t_start : -1.0;

    out.plateaus.push_back(pm);
    steady_windows.push_back(w);
    aggregated.push_back(true);
  }

  // aggregate over post-transient plateaus; fall back to the last usable
  std::vector<std::size_t> picks;
  for (std::size_t p = 0, wi = 0; p < out.plateaus.size(); ++p) {
    if (!aggregated[p]) continue;
    if (out.plateaus[p].t_start >= transient_skip) picks.push_back(wi);
    ++wi;
  }
  if (picks.empty() && !steady_windows.empty())
    picks.push_back(steady_windows.size() - 1);

  if (!picks.empty()) {
    std::size_t wi = 0, pi = 0;
    auto add = [&](const PlateauMetrics& pm) {
      out.pos_est_bias += pm.pos_est_bias;
      out.pos_est_rms += pm.pos_est_rms;
      out.flux_est_bias += pm.flux_est_bias;
      out.flux_est_rms += pm.flux_est_rms;
      out.mom_est_bias += pm.mom_est_bias;
      out.mom_est_rms += pm.mom_est_rms;
      out.resist_bias += pm.resist_bias;
      out.resist_rms += pm.resist_rms;
      out.track_bias += pm.track_bias;
      out.track_rms += pm.track_rms;
    };
    for (std::size_t p = 0; p < out.plateaus.size(); ++p) {
      if (!aggregated[p]) continue;
      if (std::find(picks.begin(), picks.end(), wi) != picks.end()) {
        add(out.plateaus[p]);
        ++pi;
      }
      ++wi;
    }
    const auto n = static_cast<double>(pi);
    out.pos_est_bias /= n;
    out.pos_est_rms /= n;
    out.flux_est_bias /= n;
    out.flux_est_rms /= n;
    out.mom_est_bias /= n;
    out.mom_est_rms /= n;
    out.resist_bias /= n;
    out.resist_rms /= n;
    out.track_bias /= n;
    out.track_rms /= n;
    out.used_plateaus = static_cast<int>(pi);
  }

  // noise amplification: estimate jitter over the steady windows against
  // the position-equivalent floor of the raw measurement noise
  if (cfg.noise.amplitude > 0.0 && !picks.empty()) {
    double sq = 0.0;
    std::size_t count = 0;
    std::size_t wi = 0;
    for (const Window& w : steady_windows) {
      const bool picked =
          std::find(picks.begin(), picks.end(), wi) != picks.end();
      ++wi;
      if (!picked) continue;
      const double mean = mean_of(log, w, err_pos);
      for (std::size_t j = w.begin; j < w.end; ++j) {
        const double v = err_pos(log.records[j]) - mean;
        sq += v * v;
        ++count;
      }
    }
    const double jitter = std::sqrt(sq / static_cast<double>(count));
    const double floor = cfg.plant.k * cfg.noise.amplitude /
                         (std::sqrt(3.0) * cfg.plant.equilibrium_flux());
    out.noise_amplification = jitter / floor;
  }

  // sampled regression identity over the steady windows
  {
    const long long lag_steps =
        static_cast<long long>(cfg.injection.n) * cfg.steps_per_period;
    if (lag_steps % cfg.log_stride == 0) {
      const auto lag_rows =
          static_cast<std::size_t>(lag_steps / cfg.log_stride);
      double sq = 0.0;
      std::size_t count = 0;
      std::size_t wi = 0;
      for (const Window& w : steady_windows) {
        const bool picked =
            std::find(picks.begin(), picks.end(), wi) != picks.end();
        ++wi;
        if (!picked) continue;
        for (std::size_t j = std::max(w.begin, lag_rows); j < w.end; ++j) {
          const Record& now = log.records[j];
          const Record& past = log.records[j - lag_rows];
          const double Sd = probe_primitive(past.t, cfg.injection);
          const double res =
              now.Y - Sd * cfg.injection.epsilon * past.x2;
          sq += res * res;
          ++count;
        }
      }
      if (count > 0)
        out.lemma_residual = std::sqrt(sq / static_cast<double>(count));
    }
  }

  out.pe_min = pe_metric(log, 10.0 * cfg.injection.epsilon);
  return out;
}

double loglog_slope(const std::vector<double>& eps,
                    const std::vector<double>& err) {
  if (eps.size() != err.size() || eps.size() < 2) return 0.0;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t n = 0;
  for (std::size_t j = 0; j < eps.size(); ++j) {
    if (!(eps[j] > 0.0) || !(err[j] > 0.0)) continue;
    const double lx = std::log(eps[j]), ly = std::log(err[j]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return 0.0;
  const auto dn = static_cast<double>(n);
  const double denom = dn * sxx - sx * sx;
  return denom == 0.0 ? 0.0 : (dn * sxy - sx * sy) / denom;
}

SweepReport epsilon_sweep(const ScenarioConfig& base,
                          const std::vector<double>& epsilons,
                          double transient_skip, const SweepObserver& on_run) {
  SweepReport report;
  std::vector<double> eps_ok;
  std::vector<double> pos, flux, mom, resist, track, lemma;

  for (const double eps : epsilons) {
    ScenarioConfig cfg = base;
    cfg.injection.epsilon = eps;
    SweepEntry entry;
    entry.epsilon = eps;
    const SimResult run = simulate(cfg);
    entry.status = run.status;
    entry.message = run.message;
    entry.metrics = run_metrics(run.log, cfg, transient_skip);
    if (run.ok() && entry.metrics.used_plateaus > 0) {
      eps_ok.push_back(eps);
      pos.push_back(entry.metrics.pos_est_rms);
      flux.push_back(entry.metrics.flux_est_rms);
      mom.push_back(entry.metrics.mom_est_rms);
      resist.push_back(entry.metrics.resist_rms);
      track.push_back(entry.metrics.track_rms);
      lemma.push_back(entry.metrics.lemma_residual);
    }
    if (on_run) on_run(entry, run);
    report.entries.push_back(std::move(entry));
  }

  report.degenerate = eps_ok.size() < 2;
  if (!report.degenerate) {
    report.slope_pos_rms = loglog_slope(eps_ok, pos);
    report.slope_flux_rms = loglog_slope(eps_ok, flux);
    report.slope_mom_rms = loglog_slope(eps_ok, mom);
    report.slope_resist_rms = loglog_slope(eps_ok, resist);
    report.slope_track_rms = loglog_slope(eps_ok, track);
    report.slope_lemma = loglog_slope(eps_ok, lemma);
  }
  return report;
}

}  // namespace maglev
