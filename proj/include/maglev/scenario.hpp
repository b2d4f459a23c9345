#pragma once

// Everything one closed-loop run needs, gathered into a single value type
// that can be defaulted, loaded from a sectioned config file, and swept.

#include <optional>
#include <string>
#include <vector>

#include "maglev/control.hpp"
#include "maglev/observer.hpp"
#include "maglev/plant.hpp"
#include "maglev/sigproc.hpp"

namespace maglev {

enum class ControllerType { IdaSensorless, IdaStateFeedback, Backstepping };
enum class MomentaVariant { FirstOrder, SecondOrder };

[[nodiscard]] std::string to_string(ControllerType type);
[[nodiscard]] std::string to_string(MomentaVariant variant);
[[nodiscard]] std::optional<ControllerType> controller_from_string(
    const std::string& name);
[[nodiscard]] std::optional<MomentaVariant> momenta_from_string(
    const std::string& name);

struct ScenarioConfig {
  PlantParams plant;
  InjectionConfig injection;
  ObserverGains observer;
  ObserverInit observer_init;
  MomentaVariant momenta_variant = MomentaVariant::FirstOrder;

  ControllerType controller = ControllerType::IdaStateFeedback;
  IdaPbcConfig ida;
  BacksteppingConfig backstepping;
  /// Feed the flux-routed controller estimated (q, p, R) instead of truth.
  bool backstepping_uses_estimates = true;

  ReferenceProfile reference;
  NoiseConfig noise;

  double duration = 10.0;      ///< simulated time [s]
  int steps_per_period = 200;  ///< integration steps per probing period
  int log_stride = 1;          ///< record every log_stride-th step
  double u_max = 30.0;         ///< saturation applied to every controller

  std::optional<PlantState> initial_state;  ///< default: rest at q = 0

  /// Integration step h = epsilon / steps_per_period. The probing period,
  /// the operator delay, and the averaging window are all exact multiples.
  [[nodiscard]] double step_size() const {
    return injection.epsilon / steps_per_period;
  }

  [[nodiscard]] PlantState resolved_initial_state() const {
    if (initial_state) return *initial_state;
    // rest on the ground, flux centered on the probed waveform so the
    // averaged trajectory starts on the equilibrium instead of an O(eps)
    // offset beside it
    return {plant.equilibrium_flux() +
                injection.epsilon * probe_primitive(0.0, injection),
            -plant.c, 0.0};
  }

  /// Fatal configuration problems; empty means runnable.
  [[nodiscard]] std::vector<std::string> validate() const;

  /// Non-fatal observations (e.g. duration shorter than the operator
  /// warm-up, so steady-state metrics will be empty).
  [[nodiscard]] std::vector<std::string> warnings() const;
};

/// The documented baseline scenario; every field carries its default.
[[nodiscard]] ScenarioConfig default_scenario();

/// Loads a scenario from a sectioned key/value file on top of the baseline
/// defaults. Unknown keys are an error. Throws std::runtime_error.
[[nodiscard]] ScenarioConfig load_scenario(const std::string& path);

/// Same, parsing an in-memory config text.
[[nodiscard]] ScenarioConfig parse_scenario(const std::string& text,
                                            const std::string& origin);

}  // namespace maglev
