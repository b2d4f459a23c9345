#include "maglev/scenario.hpp"

#include <cmath>
#include <stdexcept>

#include "maglev/config_file.hpp"

namespace maglev {

std::string to_string(ControllerType type) {
  switch (type) {
    case ControllerType::IdaSensorless: return "ida-sensorless";
    case ControllerType::IdaStateFeedback: return "ida-state";
    case ControllerType::Backstepping: return "backstepping";
  }
  return "?";
}

std::string to_string(MomentaVariant variant) {
  return variant == MomentaVariant::FirstOrder ? "kkl" : "luenberger";
}

std::optional<ControllerType> controller_from_string(
    const std::string& name) {
  if (name == "ida-sensorless") return ControllerType::IdaSensorless;
  if (name == "ida-state") return ControllerType::IdaStateFeedback;
  if (name == "backstepping") return ControllerType::Backstepping;
  return std::nullopt;
}

std::optional<MomentaVariant> momenta_from_string(const std::string& name) {
  if (name == "kkl") return MomentaVariant::FirstOrder;
  if (name == "luenberger") return MomentaVariant::SecondOrder;
  return std::nullopt;
}

std::vector<std::string> ScenarioConfig::validate() const {
  std::vector<std::string> bad;
  if (!plant.valid()) bad.push_back("plant: all parameters must be positive");
  if (!injection.valid())
    bad.push_back("injection: A0 > 0, epsilon > 0, n >= 1 required");
  if (steps_per_period < 2)
    bad.push_back("sim: steps_per_period must be at least 2");
  if (log_stride < 1) bad.push_back("sim: log_stride must be at least 1");
  if (duration < 0.0) bad.push_back("sim: duration must be >= 0");
  if (u_max <= 0.0) bad.push_back("sim: u_max must be positive");
  if (observer.gamma < 0.0 || observer.gamma_R < 0.0 ||
      observer.gamma_lambda < 0.0)
    bad.push_back("observer: adaptation gains must be >= 0");
  if (observer.a <= 0.0) bad.push_back("observer: filter pole a must be > 0");
  if (observer.ell >= 0.0)
    bad.push_back("observer: projection ceiling ell must be negative");
  if (observer.gamma_p <= 0.0)
    bad.push_back("observer: gamma_p must be positive");
  if (!reference.valid(plant))
    bad.push_back("reference: needs levels below c, period > 0, offset >= 0");
  if (noise.amplitude < 0.0) bad.push_back("noise: amplitude must be >= 0");
  if (noise.hold_interval < 0.0)
    bad.push_back("noise: hold_interval must be >= 0");
  if (observer_init.y_v0 && *observer_init.y_v0 >= 0.0)
    bad.push_back("observer: y_v0 must be negative");
  const PlantState x0 = resolved_initial_state();
  if (!(x0.x2 < 0.0))
    bad.push_back("sim: initial shifted position must be negative");
  return bad;
}

std::vector<std::string> ScenarioConfig::warnings() const {
  std::vector<std::string> notes;
  if (duration <= injection.window())
    notes.push_back(
        "duration does not exceed the operator warm-up window; "
        "steady-state metrics will be empty");
  if (reference.period <= injection.window())
    notes.push_back(
        "reference plateaus are shorter than the operator warm-up window");
  return notes;
}

ScenarioConfig default_scenario() { return {}; }

namespace {

ScenarioConfig from_config(ConfigFile cfg, const std::string& origin) {
  ScenarioConfig sc = default_scenario();

  sc.plant.m = cfg.number("plant", "m", sc.plant.m);
  sc.plant.g_acc = cfg.number("plant", "g_acc", sc.plant.g_acc);
  sc.plant.R = cfg.number("plant", "R", sc.plant.R);
  sc.plant.c = cfg.number("plant", "c", sc.plant.c);
  sc.plant.k = cfg.number("plant", "k", sc.plant.k);

  sc.injection.A0 = cfg.number("injection", "A0", sc.injection.A0);
  sc.injection.epsilon =
      cfg.number("injection", "epsilon", sc.injection.epsilon);
  sc.injection.n =
      static_cast<int>(cfg.integer("injection", "n", sc.injection.n));

  auto& ob = sc.observer;
  ob.gamma = cfg.number("observer", "gamma", ob.gamma);
  ob.a = cfg.number("observer", "a", ob.a);
  ob.gamma_R = cfg.number("observer", "gamma_R", ob.gamma_R);
  ob.gamma_lambda = cfg.number("observer", "gamma_lambda", ob.gamma_lambda);
  ob.gamma_p = cfg.number("observer", "gamma_p", ob.gamma_p);
  ob.ell = cfg.number("observer", "ell", ob.ell);
  ob.c1 = cfg.number("observer", "c1", ob.c1);
  ob.c2 = cfg.number("observer", "c2", ob.c2);
  ob.luenberger_z2_uses_z1 = cfg.boolean("observer", "luenberger_z2_uses_z1",
                                         ob.luenberger_z2_uses_z1);
  if (cfg.has("observer", "variant")) {
    const std::string name = cfg.text("observer", "variant", "kkl");
    const auto variant = momenta_from_string(name);
    if (!variant)
      throw std::runtime_error(origin + ": unknown observer.variant '" +
                               name + "' (kkl | luenberger)");
    sc.momenta_variant = *variant;
  }
  if (cfg.has("observer", "R_hat0"))
    sc.observer_init.R_hat0 = cfg.number("observer", "R_hat0", 0.0);
  if (cfg.has("observer", "y_v0"))
    sc.observer_init.y_v0 = cfg.number("observer", "y_v0", 0.0);

  if (cfg.has("controller", "type")) {
    const std::string name = cfg.text("controller", "type", "");
    const auto type = controller_from_string(name);
    if (!type)
      throw std::runtime_error(
          origin + ": unknown controller.type '" + name +
          "' (ida-sensorless | ida-state | backstepping)");
    sc.controller = *type;
  }
  sc.ida.Kp = cfg.number("controller", "Kp", sc.ida.Kp);
  sc.ida.alpha = cfg.number("controller", "alpha", sc.ida.alpha);
  sc.ida.lambda_star =
      cfg.number("controller", "lambda_star", sc.ida.lambda_star);
  sc.ida.q_star = cfg.number("controller", "q_star", sc.ida.q_star);
  sc.backstepping.Ki = cfg.number("controller", "Ki", sc.backstepping.Ki);
  sc.backstepping.gamma1 =
      cfg.number("controller", "gamma1", sc.backstepping.gamma1);
  sc.backstepping.gamma2 =
      cfg.number("controller", "gamma2", sc.backstepping.gamma2);
  sc.backstepping.p_star =
      cfg.number("controller", "p_star", sc.backstepping.p_star);
  sc.backstepping_uses_estimates = cfg.boolean(
      "controller", "use_estimates", sc.backstepping_uses_estimates);
  sc.u_max = cfg.number("controller", "u_max", sc.u_max);
  sc.ida.u_max = sc.u_max;

  sc.reference.levels =
      cfg.numbers("reference", "levels", sc.reference.levels);
  sc.reference.period =
      cfg.number("reference", "period", sc.reference.period);
  sc.reference.start_offset =
      cfg.number("reference", "start_offset", sc.reference.start_offset);

  sc.noise.amplitude = cfg.number("noise", "amplitude", sc.noise.amplitude);
  sc.noise.seed = cfg.unsigned_integer("noise", "seed", sc.noise.seed);
  sc.noise.hold_interval =
      cfg.number("noise", "hold_interval", sc.noise.hold_interval);

  sc.duration = cfg.number("sim", "duration", sc.duration);
  sc.steps_per_period = static_cast<int>(
      cfg.integer("sim", "steps_per_period", sc.steps_per_period));
  sc.log_stride =
      static_cast<int>(cfg.integer("sim", "log_stride", sc.log_stride));
  if (cfg.has("sim", "initial_state")) {
    const auto xs = cfg.numbers("sim", "initial_state", {});
    if (xs.size() != 3)
      throw std::runtime_error(origin +
                               ": sim.initial_state needs [x1, x2, x3]");
    sc.initial_state = PlantState{xs[0], xs[1], xs[2]};
  }

  const auto unknown = cfg.leftovers();
  if (!unknown.empty()) {
    std::string what = origin + ": unknown keys:";
    for (const auto& key : unknown) what += " " + key;
    throw std::runtime_error(what);
  }
  return sc;
}

}  // namespace

ScenarioConfig load_scenario(const std::string& path) {
  return from_config(ConfigFile::load(path), path);
}

ScenarioConfig parse_scenario(const std::string& text,
                              const std::string& origin) {
  return from_config(ConfigFile::parse(text, origin), origin);
}

}  // namespace maglev
