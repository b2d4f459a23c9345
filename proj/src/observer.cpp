#include "maglev/observer.hpp"

namespace maglev {

ObserverBundle::ObserverBundle(const PlantParams& plant,
                               const InjectionConfig& inj,
                               const ObserverGains& gains, double step,
                               double y0, MomentaObserver::Variant variant,
                               const ObserverInit& init)
    : plant_(plant),
      step_(step),
      vout_(inj, step, gains.gamma, gains.ell,
            init.y_v0.value_or(-plant.c)) {
  const double y_v0 = init.y_v0.value_or(-plant.c);

  res_.a = gains.a;
  res_.gamma_R = gains.gamma_R;
  res_.R_hat = init.R_hat0.value_or(0.5 * plant.R);
  // filters start at their fixed points for the initial sample (steady
  // flux at the initial resistance guess), so the regression error opens
  // at zero instead of O(a * x1)
  res_.v1 = -res_.R_hat / plant.k * y0;
  res_.v2 = y0 / y_v0;
  res_.phi_R = y0 / plant.k;

  flux_.gamma_lambda = gains.gamma_lambda;
  flux_.x1_hat = y0 / y_v0;

  mom_.variant = variant;
  mom_.gamma_p = gains.gamma_p;
  mom_.z = -gains.gamma_p * y_v0;
  mom_.c1 = gains.c1;
  mom_.c2 = gains.c2;
  mom_.z2_uses_z1 = gains.luenberger_z2_uses_z1;
  mom_.z1 = y_v0;
  mom_.z2 = 0.0;
}

ObserverDiag ObserverBundle::step(double u, double y, double t) {
  // every consumer below reads the estimate as it was before this step
  const double y_v = vout_.virtual_output();

  ObserverDiag diag;
  diag.y_v_used = y_v;
  diag.Y = vout_.build_Y(y);
  diag.vout_warm = vout_.warmed_up();
  if (diag.vout_warm) vout_.drem_update(diag.Y, t);

  const auto reg = res_.filter_step(u, y, y_v, step_, plant_.k);
  diag.Y_R = reg.Y_R;
  diag.phi_R = reg.phi_R;
  res_.update(reg, step_);

  flux_.step(res_.R_hat, y, u, y_v, step_, plant_.k);
  mom_.step(flux_.x1_hat, y_v, plant_, step_);
  return diag;
}

PlantState ObserverBundle::estimate() const {
  const double y_v = vout_.virtual_output();
  return {flux_.x1_hat, y_v, mom_.momentum(y_v)};
}

std::array<double, 7> ObserverBundle::chi() const {
  return {vout_.theta2(), res_.v1,       res_.v2, res_.phi_R,
          res_.R_hat,     flux_.x1_hat, mom_.z};
}

bool ObserverBundle::finite() const {
  for (double v : chi())
    if (!std::isfinite(v)) return false;
  if (mom_.variant == MomentaObserver::Variant::SecondOrder)
    return std::isfinite(mom_.z1) && std::isfinite(mom_.z2);
  return true;
}

}  // namespace maglev
