#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "maglev/sigproc.hpp"
#include "maglev/vout.hpp"

using namespace maglev;

namespace {

const InjectionConfig kInj{};  // A0=1, eps=1/300, n=10

double default_step() { return kInj.epsilon / 200.0; }

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto n = static_cast<double>(x.size());
  for (size_t j = 0; j < x.size(); ++j) {
    sx += x[j];
    sy += y[j];
    sxx += x[j] * x[j];
    sxy += x[j] * y[j];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("constant input produces zero regressand") {
  const double h = default_step();
  VoutEstimator est(kInj, h, 3.89e3, -1e-4, -0.003);
  for (int j = 0; j <= 25 * 200; ++j) {
    const double Y = est.build_Y(-0.5);
    CHECK(std::abs(Y) < 1e-11);
  }
}

TEST_CASE("regressand isolates the modulated component") {
  // y = th1 + S(t) * th2 with constants: after warm-up Y == S(t-d) * th2
  const double h = default_step();
  const double th1 = -0.4;
  const double th2 = 1.0 / 300.0 * -0.003;
  VoutEstimator est(kInj, h, 0.0, -1e-4, -0.003);
  const long long total = 25 * 200;
  for (long long j = 0; j <= total; ++j) {
    const double t = j * h;
    const double y = th1 + probe_primitive(t, kInj) * th2;
    const double Y = est.build_Y(y);
    if (t >= kInj.window()) {
      const double want = probe_primitive(t - kInj.delay(), kInj) * th2;
      CHECK(Y == doctest::Approx(want).epsilon(1e-10));
    }
  }
}

TEST_CASE("estimate is frozen while warming up and with zero gain") {
  const double h = default_step();

  VoutEstimator warm(kInj, h, 3.89e3, -1e-4, -0.003);
  long long j = 0;
  while (!warm.warmed_up()) {
    const double t = j * h;
    warm.step(-0.5 + 0.1 * probe_primitive(t, kInj), t);
    if (!warm.warmed_up()) CHECK(warm.virtual_output() == -0.003);
    ++j;
    REQUIRE(j < 100000);
  }
  const double wsteps = kInj.window() / h;
  CHECK(static_cast<double>(j) >= wsteps - 1.0);
  CHECK(static_cast<double>(j) <= wsteps + 2.0);

  VoutEstimator off(kInj, h, 0.0, -1e-4, -0.003);
  for (long long i = 0; i <= 30 * 200; ++i) {
    const double t = i * h;
    off.step(-0.5 + 0.1 * probe_primitive(t, kInj), t);
  }
  CHECK(off.virtual_output() == -0.003);
}

TEST_CASE("matched estimate stays put") {
  // when theta2_hat already equals the modulation gain the update vanishes
  const double h = default_step();
  const double y_v = -0.004;
  const double th2 = kInj.epsilon * y_v;
  VoutEstimator est(kInj, h, 3.89e3, -1e-4, y_v);
  for (long long j = 0; j <= 30 * 200; ++j) {
    const double t = j * h;
    est.step(-0.2 + probe_primitive(t, kInj) * th2, t);
  }
  CHECK(est.virtual_output() == doctest::Approx(y_v).epsilon(1e-9));
}

TEST_CASE("estimation error decays at the predicted rate") {
  const double h = default_step();
  const double gamma = 3.89e3;
  const double y_v = -0.003;
  const double th2 = kInj.epsilon * y_v;
  VoutEstimator est(kInj, h, gamma, -1e-4, -0.001);

  std::vector<double> ts, logerr;
  for (long long j = 0; j <= 90 * 200; ++j) {
    const double t = j * h;
    est.step(-0.2 + probe_primitive(t, kInj) * th2, t);
    // sample once per period, after warm-up, while the error is clean
    if (j % 200 == 0 && t > kInj.window() + 1e-9) {
      const double err = std::abs(est.theta2() - th2);
      if (err > 1e-14) {
        ts.push_back(t);
        logerr.push_back(std::log(err));
      }
    }
  }
  REQUIRE(ts.size() > 20);
  const double rate = -fit_slope(ts, logerr);
  // gamma * A0^2 * eps / (8 pi^2) / eps = 49.2674... for these gains
  CHECK(rate == doctest::Approx(49.26742554608674).epsilon(0.15));
}

TEST_CASE("projection keeps the estimate away from zero") {
  const double h = default_step();
  const double ell = -1e-4;

  SUBCASE("initial value above the ceiling is clamped") {
    VoutEstimator est(kInj, h, 3.89e3, ell, -1e-5);
    CHECK(est.virtual_output() == ell);
  }

  SUBCASE("updates never cross the ceiling") {
    // the input drives the estimate toward -5e-5, above the ceiling
    const double th2 = kInj.epsilon * -5e-5;
    VoutEstimator est(kInj, h, 3.89e3, ell, -0.003);
    for (long long j = 0; j <= 60 * 200; ++j) {
      const double t = j * h;
      est.step(probe_primitive(t, kInj) * th2, t);
      CHECK(est.virtual_output() <= ell + 1e-15);
    }
    CHECK(est.virtual_output() == doctest::Approx(ell).epsilon(1e-9));
  }
}

TEST_CASE("virtual output is the estimate scaled by the probing period") {
  const double h = default_step();
  VoutEstimator est(kInj, h, 3.89e3, -1e-4, -0.002);
  CHECK(est.virtual_output() == est.theta2() / kInj.epsilon);
  for (long long j = 0; j <= 25 * 200; ++j) {
    const double t = j * h;
    est.step(-0.3 + probe_primitive(t, kInj) * kInj.epsilon * -0.004, t);
  }
  CHECK(est.virtual_output() == est.theta2() / kInj.epsilon);
}
