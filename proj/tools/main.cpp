// Command-line front end: single runs to CSV, probing-period sweeps, and
// config validation. Exit codes: 0 success, 1 run crashed or overflowed,
// 2 bad usage or config, 3 I/O failure.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "maglev/harness.hpp"
#include "maglev/scenario.hpp"
#include "maglev/trajectory.hpp"

namespace {

using namespace maglev;

constexpr int kExitOk = 0;
constexpr int kExitRunFailed = 1;
constexpr int kExitBadConfig = 2;
constexpr int kExitIo = 3;

/// Accepts "1/300" as well as plain decimals.
double parse_period(const std::string& text) {
  std::size_t used = 0;
  const auto slash = text.find('/');
  if (slash == std::string::npos) {
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::runtime_error("trailing characters");
    return v;
  }
  const double num = std::stod(text.substr(0, slash), &used);
  if (used != slash) throw std::runtime_error("bad numerator");
  const std::string den_text = text.substr(slash + 1);
  const double den = std::stod(den_text, &used);
  if (used != den_text.size() || den == 0.0)
    throw std::runtime_error("bad denominator");
  return num / den;
}

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::string observer;
  std::string controller;
  std::optional<double> duration;
  std::optional<double> noise_amp;
  std::optional<std::string> epsilon;

  void apply(ScenarioConfig& cfg) const {
    if (seed) cfg.noise.seed = *seed;
    if (!observer.empty()) {
      const auto v = momenta_from_string(observer);
      if (!v) throw std::runtime_error("unknown observer '" + observer + "'");
      cfg.momenta_variant = *v;
    }
    if (!controller.empty()) {
      const auto c = controller_from_string(controller);
      if (!c)
        throw std::runtime_error("unknown controller '" + controller + "'");
      cfg.controller = *c;
    }
    if (duration) cfg.duration = *duration;
    if (noise_amp) cfg.noise.amplitude = *noise_amp;
    if (epsilon) cfg.injection.epsilon = parse_period(*epsilon);
  }
};

void add_override_options(CLI::App* cmd, Overrides& ov) {
  cmd->add_option("--seed", ov.seed, "noise seed override");
  cmd->add_option("--observer", ov.observer,
                  "momentum observer: kkl | luenberger");
  cmd->add_option("--controller", ov.controller,
                  "ida-sensorless | ida-state | backstepping");
  cmd->add_option("--duration", ov.duration, "simulated time override [s]");
  cmd->add_option("--noise", ov.noise_amp,
                  "current-noise amplitude override [A]");
}

ScenarioConfig load_or_default(const std::string& path) {
  if (path.empty()) return default_scenario();
  return load_scenario(path);
}

/// Loads, overrides, and validates; nullopt (with messages) when unusable.
std::optional<ScenarioConfig> prepare(const std::string& config_path,
                                      const Overrides& ov) {
  ScenarioConfig cfg;
  try {
    cfg = load_or_default(config_path);
    ov.apply(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return std::nullopt;
  }
  const auto problems = cfg.validate();
  if (!problems.empty()) {
    for (const auto& p : problems) std::cerr << "error: " << p << "\n";
    return std::nullopt;
  }
  for (const auto& w : cfg.warnings()) std::cerr << "warning: " << w << "\n";
  return cfg;
}

void print_run_summary(const ScenarioConfig& cfg, const SimResult& res,
                       const RunMetrics& m) {
  std::printf("controller:        %s\n", to_string(cfg.controller).c_str());
  std::printf("observer variant:  %s\n",
              to_string(cfg.momenta_variant).c_str());
  std::printf("records:           %zu\n", res.log.size());
  if (!res.log.empty())
    std::printf("final time:        %.6g s\n", res.log.back().t);
  if (m.used_plateaus == 0) {
    std::printf("steady metrics:    none (no plateau past the warm-up)\n");
    return;
  }
  std::printf("steady plateaus:   %d\n", m.used_plateaus);
  std::printf("position est rms:  %.6g m\n", m.pos_est_rms);
  std::printf("flux est rms:      %.6g Wb\n", m.flux_est_rms);
  std::printf("momentum est rms:  %.6g kg*m/s\n", m.mom_est_rms);
  std::printf("resistance bias:   %.6g Ohm\n", m.resist_bias);
  std::printf("tracking rms:      %.6g m\n", m.track_rms);
  if (m.noise_amplification > 0.0)
    std::printf("noise gain:        %.4g x floor\n", m.noise_amplification);
  std::printf("excitation floor:  %.6g A^2*s\n", m.pe_min);
}

int cmd_sim(const std::string& config_path, const std::string& out_path,
            const Overrides& ov) {
  const auto cfg = prepare(config_path, ov);
  if (!cfg) return kExitBadConfig;

  const SimResult res = simulate(*cfg);
  if (!out_path.empty()) {
    try {
      export_csv(res.log, out_path);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitIo;
    }
  }
  print_run_summary(*cfg, res, run_metrics(res.log, *cfg));
  if (!res.ok()) {
    std::cerr << "run failed: " << res.message << "\n";
    return kExitRunFailed;
  }
  return kExitOk;
}

int cmd_sweep(const std::string& config_path,
              const std::vector<std::string>& eps_texts,
              const std::string& out_dir, double transient_skip,
              const Overrides& ov) {
  std::vector<double> eps;
  for (const auto& text : eps_texts) {
    try {
      eps.push_back(parse_period(text));
    } catch (const std::exception& e) {
      std::cerr << "error: cannot parse epsilon '" << text
                << "': " << e.what() << "\n";
      return kExitBadConfig;
    }
  }
  const auto cfg = prepare(config_path, ov);
  if (!cfg) return kExitBadConfig;

  try {
    if (!out_dir.empty()) std::filesystem::create_directories(out_dir);

    int idx = 0;
    const SweepObserver on_run = [&](const SweepEntry& entry,
                                     const SimResult& run) {
      if (!out_dir.empty()) {
        char name[64];
        std::snprintf(name, sizeof name, "run_%02d_eps_%.6g.csv", idx,
                      entry.epsilon);
        export_csv(run.log, out_dir + "/" + name);
      }
      ++idx;
      std::printf("eps = %-12.6g %s\n", entry.epsilon,
                  entry.status == SimStatus::Ok ? "ok"
                                                : entry.message.c_str());
    };

    const SweepReport rep = epsilon_sweep(*cfg, eps, transient_skip, on_run);

    if (!out_dir.empty()) {
      std::ofstream report(out_dir + "/report.csv");
      if (!report) throw std::runtime_error("cannot write " + out_dir +
                                            "/report.csv");
      report << std::setprecision(17);
      report << "epsilon,status,pos_est_rms,flux_est_rms,mom_est_rms,"
                "resist_rms,track_rms,lemma_residual,pe_min,used_plateaus\n";
      for (const auto& e : rep.entries) {
        const RunMetrics& m = e.metrics;
        report << e.epsilon << ','
               << (e.status == SimStatus::Ok ? "ok" : "failed") << ','
               << m.pos_est_rms << ',' << m.flux_est_rms << ','
               << m.mom_est_rms << ',' << m.resist_rms << ','
               << m.track_rms << ',' << m.lemma_residual << ','
               << m.pe_min << ',' << m.used_plateaus << '\n';
      }
    }

    if (rep.degenerate) {
      std::printf("sweep degenerate: fewer than two usable runs, "
                  "no slopes fitted\n");
    } else {
      std::printf("position rms slope:   %.4f\n", rep.slope_pos_rms);
      std::printf("flux rms slope:       %.4f\n", rep.slope_flux_rms);
      std::printf("momentum rms slope:   %.4f\n", rep.slope_mom_rms);
      std::printf("resistance rms slope: %.4f\n", rep.slope_resist_rms);
      std::printf("tracking rms slope:   %.4f\n", rep.slope_track_rms);
      std::printf("regression residual slope: %.4f\n", rep.slope_lemma);
    }

    for (const auto& e : rep.entries)
      if (e.status != SimStatus::Ok) {
        std::cerr << "run failed: eps = " << e.epsilon << ": " << e.message
                  << "\n";
        return kExitRunFailed;
      }
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
}

int cmd_validate(const std::string& config_path) {
  ScenarioConfig cfg;
  try {
    cfg = load_or_default(config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadConfig;
  }
  const auto problems = cfg.validate();
  for (const auto& p : problems) std::cerr << "error: " << p << "\n";
  for (const auto& w : cfg.warnings()) std::cerr << "warning: " << w << "\n";
  if (!problems.empty()) return kExitBadConfig;
  std::printf("config ok: %s controller, %s observer, duration %.6g s, "
              "eps %.6g s\n",
              to_string(cfg.controller).c_str(),
              to_string(cfg.momenta_variant).c_str(), cfg.duration,
              cfg.injection.epsilon);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sensorless magnetic levitation: simulation and sweeps"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string out_dir;
  std::vector<std::string> eps_texts;
  double transient_skip = 3.0;
  Overrides ov_sim, ov_sweep;

  CLI::App* sim = app.add_subcommand("sim", "run one scenario, write a CSV");
  sim->add_option("--config", config_path, "scenario config file")
      ->check(CLI::ExistingFile);
  sim->add_option("--out", out_path, "trajectory CSV path");
  sim->add_option("--epsilon", ov_sim.epsilon,
                  "probing period override, e.g. 1/300");
  add_override_options(sim, ov_sim);

  CLI::App* sweep =
      app.add_subcommand("sweep", "rerun over probing periods, fit slopes");
  sweep->add_option("--config", config_path, "scenario config file")
      ->check(CLI::ExistingFile);
  sweep->add_option("--epsilon", eps_texts,
                    "probing periods, e.g. 1/150,1/300,1/600")
      ->required()
      ->delimiter(',');
  sweep->add_option("--out-dir", out_dir, "directory for per-run CSVs");
  sweep->add_option("--transient-skip", transient_skip,
                    "ignore plateaus starting before this time [s]");
  add_override_options(sweep, ov_sweep);

  CLI::App* validate =
      app.add_subcommand("validate", "check a config and exit");
  validate->add_option("--config", config_path, "scenario config file")
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  if (sim->parsed()) return cmd_sim(config_path, out_path, ov_sim);
  if (sweep->parsed())
    return cmd_sweep(config_path, eps_texts, out_dir, transient_skip,
                     ov_sweep);
  return cmd_validate(config_path);
}
