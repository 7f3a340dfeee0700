#include "avglab/average.hpp"

#include <cmath>
#include <thread>
#include <vector>

#include "avglab/catalog.hpp"
#include "avglab/errors.hpp"
#include "doctest.h"

using namespace avglab;

namespace {

constexpr double kPi = 3.141592653589793;

StateVec scalar(double v) {
  StateVec x(1);
  x[0] = v;
  return x;
}

FieldSpec sin2_field() {
  return FieldSpec::make_pointwise(
      1, [](double t, const StateVec& x) { return StateVec(std::sin(t) * std::sin(t) * x); },
      kPi);
}

FieldSpec quasi_field() {
  return FieldSpec::make_pointwise(1, [](double t, const StateVec&) {
    return scalar(std::sin(t) + std::sin(std::sqrt(2.0) * t));
  });
}

// Oscillates forever on a logarithmic clock: sliding means keep drifting.
FieldSpec drifting_field() {
  return FieldSpec::make_pointwise(
      1, [](double t, const StateVec&) { return scalar(std::sin(0.49 * std::log(1.0 + t))); });
}

FieldSpec delayed_damping_field() {
  return FieldSpec::make_pointwise_delay(
      1, 1.0, {1.0},
      [](double t, const StateVec&, const std::vector<StateVec>& d) {
        return StateVec(-(1.0 - std::cos(2.0 * t)) * d[0]);
      },
      kPi);
}

}  // namespace

TEST_CASE("periodic average of sin^2 damping is half the state") {
  const AverageEstimate est = average_periodic(sin2_field(), scalar(2.0), kPi);
  CHECK(est.value[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(est.horizon == kPi);
  CHECK(est.mode == AverageMode::Periodic);
  CHECK(est.residual <= 1e-10);
}

TEST_CASE("composite Simpson integrates cubics exactly") {
  const FieldSpec cubic = FieldSpec::make_pointwise(
      1, [](double t, const StateVec&) { return scalar(t * t * t - t); }, 2.0);
  // mean of t^3 - t over [0, 2] is 2 - 1 = 1
  const AverageEstimate est = average_periodic(cubic, scalar(0.0), 2.0, 16);
  CHECK(est.value[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(est.residual <= 1e-14);
}

TEST_CASE("periodic quadrature validates its panel count") {
  CHECK_THROWS_AS((void)average_periodic(sin2_field(), scalar(1.0), kPi, 15), ConfigError);
  CHECK_THROWS_AS((void)average_periodic(sin2_field(), scalar(1.0), kPi, 8), ConfigError);
  CHECK_THROWS_AS((void)average_periodic(sin2_field(), scalar(1.0), -1.0), ConfigError);
}

TEST_CASE("average argument dimension is checked") {
  StateVec wrong(2);
  wrong << 1.0, 2.0;
  CHECK_THROWS_AS((void)average_periodic(sin2_field(), wrong, kPi), ConfigError);
}

TEST_CASE("pointwise fields read a segment argument at theta = 0") {
  const HistorySegment seg = HistorySegment::from_callable(
      [](double th) { return scalar(2.0 + th); }, 1.0);  // seg(0) = 2
  const AverageEstimate at_seg = average_periodic(sin2_field(), seg, kPi);
  const AverageEstimate at_pt = average_periodic(sin2_field(), scalar(2.0), kPi);
  CHECK(at_seg.value[0] == at_pt.value[0]);
}

TEST_CASE("periodic averaging is linear in the field") {
  const FieldSpec f = sin2_field();
  const FieldSpec g = FieldSpec::make_pointwise(
      1, [](double t, const StateVec&) { return scalar(std::cos(t)); }, kPi);
  const FieldSpec combo = FieldSpec::make_pointwise(
      1,
      [](double t, const StateVec& x) {
        const double s2 = std::sin(t) * std::sin(t) * x[0];
        return scalar(3.0 * s2 - 2.0 * std::cos(t));
      },
      kPi);
  const StateVec x = scalar(1.7);
  const double lhs = average_periodic(combo, x, kPi).value[0];
  const double rhs =
      3.0 * average_periodic(f, x, kPi).value[0] - 2.0 * average_periodic(g, x, kPi).value[0];
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("doubling estimator finds the quasi-periodic mean near zero") {
  const AverageEstimate est = average_cesaro(quasi_field(), scalar(0.0), 1e-2);
  CHECK(std::abs(est.value[0]) <= 1e-2);
  CHECK(est.mode == AverageMode::Cesaro);
  CHECK(est.residual <= 1e-2);
  // horizon is T0 times a power of two and took a few doublings to settle
  CHECK(est.horizon >= 128.0);
  CHECK(est.horizon <= 2048.0);
}

TEST_CASE("doubling estimator agrees with the period rule on periodic fields") {
  const double tol = 1e-4;
  const StateVec x = scalar(2.0);
  const AverageEstimate slow = average_cesaro(sin2_field(), x, tol);
  const AverageEstimate exact = average_periodic(sin2_field(), x, kPi);
  CHECK(std::abs(slow.value[0] - exact.value[0]) <= 2.0 * tol);
}

TEST_CASE("the long-time mean does not depend on where the window starts") {
  const double tol = 1e-4;
  const StateVec x = scalar(1.0);
  const AverageEstimate a = average_cesaro(sin2_field(), x, tol, 1.0, 1e6, 0.0);
  const AverageEstimate b = average_cesaro(sin2_field(), x, tol, 1.0, 1e6, kPi / 3.0);
  CHECK(std::abs(a.value[0] - b.value[0]) <= 2.0 * tol);
}

TEST_CASE("a drifting mean is reported, not silently accepted") {
  try {
    (void)average_cesaro(drifting_field(), scalar(0.0), 1e-4, 1.0, 1e4);
    FAIL("expected NoAverageError");
  } catch (const NoAverageError& e) {
    CHECK(e.horizon <= 1e4);
    CHECK(e.horizon > 1e3);  // it did try a long window before giving up
    REQUIRE(e.last.size() == 1);
    REQUIRE(e.previous.size() == 1);
    CHECK(std::abs(e.last[0] - e.previous[0]) > 1e-4);
  }
}

TEST_CASE("one quiet doubling alone is not accepted") {
  // Flat at 0 on [0, 2): the first doubling is perfectly quiet, and a
  // single-diff rule would stop right there and report 0. The mass on [2, 4)
  // then pulls the true mean to 1/2, where the estimate settles for good.
  const FieldSpec plateau = FieldSpec::make_pointwise(1, [](double t, const StateVec&) {
    if (t < 2.0) return scalar(0.0);
    if (t < 4.0) return scalar(1.0);
    return scalar(0.5);
  });
  const AverageEstimate est = average_cesaro(plateau, scalar(0.0), 1e-3);
  CHECK(std::abs(est.value[0] - 0.5) <= 0.05);
  CHECK(est.horizon >= 8.0);  // kept doubling past the early false plateau
}

TEST_CASE("cesaro preconditions") {
  const FieldSpec f = sin2_field();
  const StateVec x = scalar(1.0);
  CHECK_THROWS_AS((void)average_cesaro(f, x, -1.0), ConfigError);
  CHECK_THROWS_AS((void)average_cesaro(f, x, 1e-4, 0.5), ConfigError);        // T0 >= 1
  CHECK_THROWS_AS((void)average_cesaro(f, x, 1e-4, 2.0, 7.0), ConfigError);   // T_max >= 4*T0
  const FieldSpec flat =
      FieldSpec::make_pointwise(1, [](double, const StateVec&) { return scalar(5.0); });
  CHECK(average_cesaro(flat, x, 1e-2, 2.0, 8.0).value[0] == doctest::Approx(5.0));
}

TEST_CASE("start probes agree on an almost periodic field") {
  const AverageEstimate est = average_almost_periodic(quasi_field(), scalar(0.0), 1e-2);
  CHECK(std::abs(est.value[0]) <= 1e-2);
  CHECK(est.residual <= 2e-2);  // max pairwise spread across probes
  CHECK(est.mode == AverageMode::AlmostPeriodic);
}

TEST_CASE("start probes expose a field that settles differently per start") {
  // Flat 0 early, flat 1 late: probes near 0 accept the early plateau, the
  // 10*pi probe accepts the late one.
  const FieldSpec step = FieldSpec::make_pointwise(
      1, [](double t, const StateVec&) { return scalar(t < 30.0 ? 0.0 : 1.0); });
  try {
    (void)average_almost_periodic(step, scalar(0.0), 1e-3);
    FAIL("expected NotAlmostPeriodicError");
  } catch (const NotAlmostPeriodicError& e) {
    CHECK(e.spread > 0.5);
  }
}

TEST_CASE("default probes are pinned") {
  const std::vector<double>& p = default_probes();
  REQUIRE(p.size() == 4);
  CHECK(p[0] == 0.0);
  CHECK(p[1] == 1.0);
  CHECK(p[2] == doctest::Approx(2.718281828459045).epsilon(1e-15));
  CHECK(p[3] == doctest::Approx(10.0 * kPi).epsilon(1e-15));
}

TEST_CASE("estimate_average dispatches on the configured mode") {
  AverageConfig cfg;
  cfg.mode = AverageMode::Periodic;
  const AverageEstimate per = estimate_average(sin2_field(), FieldArg(scalar(2.0)), cfg);
  CHECK(per.value[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(per.residual <= default_average_tol(AverageMode::Periodic));

  cfg.mode = AverageMode::Cesaro;
  cfg.tol = 1e-2;
  const AverageEstimate ces = estimate_average(quasi_field(), FieldArg(scalar(0.0)), cfg);
  CHECK(std::abs(ces.value[0]) <= 1e-2);

  cfg.mode = AverageMode::Periodic;
  CHECK_THROWS_AS((void)estimate_average(quasi_field(), FieldArg(scalar(0.0)), cfg),
                  ConfigError);  // no declared period
}

TEST_CASE("mode names round-trip") {
  for (AverageMode m : {AverageMode::Periodic, AverageMode::Cesaro, AverageMode::AlmostPeriodic})
    CHECK(average_mode_from_string(to_string(m)) == m);
  CHECK_FALSE(average_mode_from_string("sometimes").has_value());
}

TEST_CASE("per-mode default tolerances are pinned") {
  CHECK(default_average_tol(AverageMode::Periodic) == 1e-6);
  CHECK(default_average_tol(AverageMode::Cesaro) == 1e-4);
  CHECK(default_average_tol(AverageMode::AlmostPeriodic) == 1e-3);
}

TEST_CASE("lift_constant_history pins the whole window to the state") {
  const HistorySegment seg = lift_constant_history(scalar(4.0), 2.0);
  CHECK(seg.delay_span() == 2.0);
  CHECK(seg.eval(-1.3)[0] == 4.0);
  CHECK(seg.eval(0.0)[0] == 4.0);
}

TEST_CASE("averaging the delayed damping field keeps its kind and drops the period") {
  AverageConfig cfg;  // periodic by default; the field declares period pi
  const FieldSpec avg = build_averaged_field(delayed_damping_field(), cfg);
  CHECK(avg.kind == FieldKind::PointwiseDelay);
  CHECK(avg.dim == 1);
  CHECK(avg.history_span == 1.0);
  CHECK_FALSE(avg.period.has_value());
  // mean of 1 - cos(2t) over a period is 1, so the average field is -x(t-1)
  StateVec x = scalar(0.3);
  std::vector<StateVec> delayed = {scalar(5.0)};
  CHECK(avg.pointwise_delay(0.0, x, delayed)[0] == doctest::Approx(-5.0).epsilon(1e-9));
}

TEST_CASE("averaging a functional field keeps the whole-segment reading") {
  const FieldSpec f = FieldSpec::make_functional(
      1, 1.0,
      [](double t, const HistorySegment& seg) {
        return StateVec(-(1.0 - std::cos(2.0 * t)) * seg.eval(-1.0));
      },
      kPi);
  AverageConfig cfg;
  const FieldSpec avg = build_averaged_field(f, cfg);
  CHECK(avg.kind == FieldKind::Functional);
  const HistorySegment seg =
      HistorySegment::from_callable([](double th) { return scalar(1.0 + th); }, 1.0);
  // seg(-1) = 0, so the averaged field vanishes there
  CHECK(std::abs(avg.functional(0.0, seg)[0]) <= 1e-9);
}

TEST_CASE("memoized averaged fields return identical bits on repeat and across threads") {
  AverageConfig cfg;
  const FieldSpec avg = build_averaged_field_lifted(delayed_damping_field(), cfg);
  CHECK(avg.kind == FieldKind::PointwiseOde);
  const StateVec x = scalar(1.23456789);
  const double first = avg.pointwise(0.0, x)[0];
  CHECK(avg.pointwise(17.0, x)[0] == first);  // autonomous and memoized

  std::vector<double> seen(8, 0.0);
  std::vector<std::thread> pool;
  for (int i = 0; i < 8; ++i)
    pool.emplace_back([&, i] { seen[i] = avg.pointwise(0.0, x)[0]; });
  for (auto& th : pool) th.join();
  for (double v : seen) CHECK(v == first);
}

TEST_CASE("the lifted average of delayed damping is plain damping") {
  AverageConfig cfg;
  const FieldSpec g = build_averaged_field_lifted(delayed_damping_field(), cfg);
  for (double v : {-2.0, -0.5, 0.0, 1.0, 3.25})
    CHECK(g.pointwise(0.0, scalar(v))[0] == doctest::Approx(-v).epsilon(1e-9));
}

TEST_CASE("the averaged field is continuous: sampled difference quotients stay bounded") {
  AverageConfig cfg;
  const FieldSpec g = build_averaged_field_lifted(delayed_damping_field(), cfg);
  double worst = 0.0;
  for (int i = 0; i < 40; ++i) {
    const double a = -2.0 + 0.1 * i;
    const double b = a + 1e-4;
    const double q = std::abs(g.pointwise(0.0, scalar(b))[0] - g.pointwise(0.0, scalar(a))[0]) /
                     1e-4;
    worst = std::max(worst, q);
  }
  CHECK(worst <= 1.5);  // the true field has slope exactly 1
}

TEST_CASE("averaged_counterpart maps each fast class to its limit equation") {
  AverageConfig cfg;

  const ProblemSpec fast_ode = make_problem("linear-osc-ode", 0.05);
  const ProblemSpec avg_ode = averaged_counterpart(fast_ode, cfg);
  CHECK(avg_ode.equation_class == EquationClass::AveragedOde);
  CHECK_FALSE(avg_ode.epsilon.has_value());
  CHECK(avg_ode.x0[0] == fast_ode.x0[0]);
  CHECK(avg_ode.field.pointwise(0.0, scalar(2.0))[0] == doctest::Approx(2.0).epsilon(1e-9));

  const ProblemSpec nf = make_problem("delay-normal-form", 0.05);
  const ProblemSpec nf_avg = averaged_counterpart(nf, cfg);
  CHECK(nf_avg.equation_class == EquationClass::AveragedOde);
  CHECK(nf_avg.field.kind == FieldKind::PointwiseOde);
  CHECK(nf_avg.r == 0.0);
  CHECK(nf_avg.x0[0] == nf.phi->eval(0.0)[0]);  // lift starts from phi(0)

  const ProblemSpec nf_scaled = averaged_counterpart(nf, cfg, /*scaled=*/true);
  CHECK(nf_scaled.equation_class == EquationClass::AveragedRfdeScaled);
  CHECK(nf_scaled.epsilon == nf.epsilon);
  CHECK(nf_scaled.r == nf.r);
  REQUIRE(nf_scaled.phi.has_value());

  const ProblemSpec rfde = make_problem("delay-fast-rfde", 0.01);
  const ProblemSpec rfde_avg = averaged_counterpart(rfde, cfg);
  CHECK(rfde_avg.equation_class == EquationClass::AveragedRfde);
  CHECK_FALSE(rfde_avg.epsilon.has_value());
  CHECK(rfde_avg.r == rfde.r);
}

TEST_CASE("averaged_counterpart rejects senseless requests") {
  AverageConfig cfg;
  const ProblemSpec fast_ode = make_problem("linear-osc-ode", 0.05);
  CHECK_THROWS_AS((void)averaged_counterpart(fast_ode, cfg, /*scaled=*/true), ConfigError);
  const ProblemSpec avg_ode = averaged_counterpart(fast_ode, cfg);
  CHECK_THROWS_AS((void)averaged_counterpart(avg_ode, cfg), ConfigError);
}
