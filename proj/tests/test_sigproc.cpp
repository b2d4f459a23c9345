#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "maglev/sigproc.hpp"

using namespace maglev;

namespace {

const InjectionConfig kInj{};  // A0=1, eps=1/300, n=10

/// Simpson quadrature on [a, b] with an even panel count.
template <typename F>
double simpson(F f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double acc = f(a) + f(b);
  for (int j = 1; j < panels; ++j) acc += f(a + j * h) * (j % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

}  // namespace

TEST_CASE("probe waveform values and periodicity") {
  CHECK(probe(0.0, kInj) == 0.0);
  CHECK(probe(kInj.epsilon / 4.0, kInj) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(probe(kInj.epsilon / 2.0, kInj)) < 1e-9);
  for (int j = 0; j < 8; ++j) {
    const double t = 0.137 + 0.01 * j;
    CHECK(probe(t + kInj.epsilon, kInj) ==
          doctest::Approx(probe(t, kInj)).epsilon(1e-9));
  }
}

TEST_CASE("probe primitive: frozen value and derivative relation") {
  CHECK(probe_primitive(0.0, kInj) ==
        doctest::Approx(-0.15915494309189535).epsilon(1e-14));

  // eps * dS/dt == s, checked by central differences at shrinking steps;
  // sampled at the probe peaks, where the truncation term also peaks (at
  // the zero crossings both sides vanish and only roundoff would remain)
  for (int j : {3, 150, 510}) {
    const double t = (j + 0.25) * kInj.epsilon;
    const auto residual = [&](double dt) {
      const double deriv =
          (probe_primitive(t + dt, kInj) - probe_primitive(t - dt, kInj)) /
          (2.0 * dt);
      return std::abs(kInj.epsilon * deriv - probe(t, kInj));
    };
    const double r1 = residual(1e-5);
    const double r2 = residual(5e-6);
    CHECK(r1 < 2e-2);
    CHECK(r1 / r2 > 3.0);  // second-order shrink confirms the relation
    CHECK(r1 / r2 < 5.0);
  }

  // zero mean over one period
  const double mean = simpson([&](double t) { return probe_primitive(t, kInj); },
                              0.2, 0.2 + kInj.epsilon, 512);
  CHECK(std::abs(mean) < 1e-15);
}

TEST_CASE("per-period energy of the primitive") {
  // frozen closed form for A0=1, eps=1/300
  CHECK(excitation_integral(kInj) ==
        doctest::Approx(4.221715985097408e-05).epsilon(1e-14));

  // quadrature over a period agrees, wherever the window starts
  for (double t0 : {0.0, 0.077, 1.23}) {
    const double q = simpson(
        [&](double t) {
          const double S = probe_primitive(t, kInj);
          return S * S;
        },
        t0, t0 + kInj.epsilon, 512);
    CHECK(q == doctest::Approx(excitation_integral(kInj)).epsilon(1e-10));
  }

  InjectionConfig big = kInj;
  big.A0 = 2.0;
  CHECK(excitation_integral(big) ==
        doctest::Approx(4.0 * excitation_integral(kInj)).epsilon(1e-14));
  InjectionConfig slow = kInj;
  slow.epsilon = 2.0 * kInj.epsilon;
  CHECK(excitation_integral(slow) ==
        doctest::Approx(2.0 * excitation_integral(kInj)).epsilon(1e-14));
}

TEST_CASE("delay of a whole number of periods leaves the primitive unchanged") {
  for (int j = 0; j < 10; ++j) {
    const double t = 0.04 + 0.0137 * j;
    CHECK(probe_primitive(t - kInj.delay(), kInj) ==
          doctest::Approx(probe_primitive(t, kInj)).epsilon(1e-9));
  }
}

TEST_CASE("delay line") {
  const double h = 1e-3;

  SUBCASE("misaligned delay is rejected") {
    CHECK_THROWS_AS(DelayLine(10.5 * h, h), std::invalid_argument);
    CHECK_NOTHROW(DelayLine(10.0 * h, h));
  }

  SUBCASE("constant input passes through immediately") {
    DelayLine d(5 * h, h);
    for (int j = 0; j < 20; ++j) CHECK(d.step(3.25) == 3.25);
  }

  SUBCASE("history pads with the first sample") {
    DelayLine d(3 * h, h);
    CHECK(d.step(7.0) == 7.0);
    CHECK(d.step(8.0) == 7.0);
    CHECK(d.step(9.0) == 7.0);
    CHECK(!d.full());
    CHECK(d.step(10.0) == 7.0);
    CHECK(d.full());
    CHECK(d.step(11.0) == 8.0);
  }

  SUBCASE("delayed sequence is the input shifted by lag_steps") {
    DelayLine d(7 * h, h);
    CHECK(d.lag_steps() == 7);
    std::vector<double> in, out;
    for (int j = 0; j < 40; ++j) {
      in.push_back(std::sin(0.3 * j) + 0.01 * j);
      out.push_back(d.step(in.back()));
    }
    for (int j = 7; j < 40; ++j) CHECK(out[j] == in[j - 7]);
  }
}

TEST_CASE("running window mean") {
  const double h = 1e-3;

  SUBCASE("misaligned window is rejected") {
    CHECK_THROWS_AS(RunningIntegral(10.3 * h, h), std::invalid_argument);
  }

  SUBCASE("constant input gives the constant immediately") {
    RunningIntegral z(10 * h, h);
    for (int j = 0; j < 30; ++j)
      CHECK(z.step(-2.5) == doctest::Approx(-2.5).epsilon(1e-13));
  }

  SUBCASE("a ramp averages to its window midpoint") {
    const double w = 20 * h;
    RunningIntegral z(w, h);
    double got = 0.0;
    for (int j = 0; j <= 100; ++j) got = z.step(j * h);
    // trapezoids are exact on linear input: mean of t over [t-w, t]
    CHECK(got == doctest::Approx(100 * h - w / 2.0).epsilon(1e-10));
  }

  SUBCASE("window spanning whole periods of the primitive yields zero") {
    const double step = kInj.epsilon / 200.0;
    RunningIntegral z(kInj.window(), step);
    double got = 1.0;
    const int total = 30 * 200;
    for (int j = 0; j <= total; ++j)
      got = z.step(probe_primitive(j * step, kInj));
    CHECK(std::abs(got) < 1e-12);
  }

  SUBCASE("operator is linear") {
    RunningIntegral za(8 * h, h), zb(8 * h, h), zc(8 * h, h);
    for (int j = 0; j < 50; ++j) {
      const double va = std::sin(0.4 * j);
      const double vb = std::cos(0.9 * j) + 0.02 * j;
      const double a = za.step(va);
      const double b = zb.step(vb);
      const double c = zc.step(2.0 * va - 3.0 * vb);
      CHECK(c == doctest::Approx(2.0 * a - 3.0 * b).epsilon(1e-12));
    }
  }
}

TEST_CASE("window mean recovers the slow part of a probed signal") {
  // r(t) = rbar(t) + eps * S(t) * rv(t); the window mean tracks a lagged
  // rbar with an error that shrinks about fourfold when eps halves.
  const auto residual = [](double eps) {
    InjectionConfig inj{1.0, eps, 2};
    const double w = inj.window();
    const double h = eps / 200.0;
    RunningIntegral z(w, h);
    double worst = 0.0;
    const auto steps = static_cast<long long>(std::llround(1.0 / h));
    for (long long j = 0; j <= steps; ++j) {
      const double t = j * h;
      const double rbar = 1.0 + 0.1 * std::sin(2.0 * t);
      const double rv = 2.0 + 0.05 * std::cos(t);
      const double got = z.step(rbar + eps * probe_primitive(t, inj) * rv);
      if (t >= w) {
        const double tm = t - w / 2.0;
        const double want = 1.0 + 0.1 * std::sin(2.0 * tm);
        worst = std::max(worst, std::abs(got - want));
      }
    }
    return worst;
  };

  const double coarse = residual(0.02);
  const double fine = residual(0.01);
  CHECK(coarse / fine > 2.5);
  CHECK(coarse / fine < 6.0);
}
