#include "avglab/config.hpp"

#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "avglab/errors.hpp"
#include "avglab/field.hpp"
#include "doctest.h"

using namespace avglab;

namespace {

struct Caught {
  bool thrown = false;
  std::string what;
  std::optional<int> line;
};

template <typename Fn>
Caught run_catching(Fn&& fn) {
  Caught c;
  try {
    fn();
  } catch (const ConfigError& e) {
    c.thrown = true;
    c.what = e.what();
    c.line = e.line;
  }
  return c;
}

bool has(const std::string& text, const std::string& needle) {
  return text.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("a full expression config fills every field of the run spec") {
  const std::string ini = R"(# exercises every known key
[problem]
class = fast_ode
d = 2
field = (1 - cos(2*t)) * x1 ; -x2 + sin(t)
epsilon = 0.05
L = 2.5
x0 = 1, -0.5
period = 2*pi

[integrator]
h = 5e-4
blow_up_bound = 1e6
max_nodes = 200000

[average]
mode = periodic
tol = 1e-7
T0 = 2
T_max = 1e5
n_quad = 128
probes = 0; 1; 2.5

[sweep]
epsilons = 0.1, 0.05; 0.025
jobs = 3
compare_scaled = false

[output]
path = out.csv
verbosity = 2
)";
  const RunSpec rs = load_run_spec(ini);
  CHECK(rs.problem.equation_class == EquationClass::FastOde);
  CHECK(rs.problem.field.dim == 2);
  CHECK(rs.problem.field.kind == FieldKind::PointwiseOde);
  REQUIRE(rs.problem.field.period.has_value());
  CHECK(*rs.problem.field.period == doctest::Approx(2 * 3.141592653589793));
  REQUIRE(rs.problem.epsilon.has_value());
  CHECK(*rs.problem.epsilon == 0.05);
  CHECK(rs.problem.horizon == 2.5);
  CHECK(rs.problem.r == 0.0);
  REQUIRE(rs.problem.x0.size() == 2);
  CHECK(rs.problem.x0[0] == 1.0);
  CHECK(rs.problem.x0[1] == -0.5);
  // field evaluates: first component vanishes at t = 0, second is -x2 + sin t
  const StateVec v = eval_field(rs.problem.field, 0.0, rs.problem.x0);
  CHECK(v[0] == doctest::Approx(0.0));
  CHECK(v[1] == doctest::Approx(0.5));

  CHECK(rs.integrator.h == 5e-4);
  CHECK(rs.integrator.blow_up_bound == 1e6);
  CHECK(rs.integrator.max_nodes == 200000);

  CHECK(rs.average.mode == AverageMode::Periodic);
  CHECK(rs.average.tol == 1e-7);
  CHECK(rs.average.T0 == 2.0);
  CHECK(rs.average.T_max == 1e5);
  CHECK(rs.average.n_quad == 128);
  REQUIRE(rs.average.probes.size() == 3);
  CHECK(rs.average.probes[2] == 2.5);

  REQUIRE(rs.sweep_epsilons.size() == 3);
  CHECK(rs.sweep_epsilons[1] == 0.05);
  CHECK(rs.jobs == 3);
  CHECK_FALSE(rs.compare_scaled);
  CHECK(rs.out_path == "out.csv");
  CHECK(rs.verbosity == 2);
  CHECK(rs.catalog_name.empty());
}

TEST_CASE("a minimal config leaves library defaults in place") {
  const RunSpec rs = load_run_spec(
      "[problem]\n"
      "class = averaged_ode\n"
      "field = -x1\n"
      "x0 = 1\n"
      "L = 1\n");
  CHECK(rs.problem.equation_class == EquationClass::AveragedOde);
  CHECK_FALSE(rs.problem.epsilon.has_value());
  CHECK(rs.integrator.h == 1e-3);
  CHECK(rs.integrator.blow_up_bound == 1e8);
  CHECK(rs.integrator.max_nodes == 10'000'000);
  CHECK(rs.average.mode == AverageMode::Periodic);
  CHECK(rs.average.tol == 0.0);
  CHECK(rs.average.T0 == 1.0);
  CHECK(rs.average.T_max == 1e6);
  CHECK(rs.average.n_quad == 64);
  CHECK(rs.average.probes.empty());
  CHECK(rs.sweep_epsilons.empty());
  CHECK_FALSE(rs.compare_scaled);
  CHECK(rs.jobs == 0);
  CHECK(rs.verbosity == 1);
  CHECK(rs.out_path.empty());
  CHECK(rs.catalog_name.empty());
}

TEST_CASE("a delay config builds phi from a theta expression") {
  const RunSpec rs = load_run_spec(
      "[problem]\n"
      "class = rfde_normal_form\n"
      "field = -(1 - cos(2*t)) * xd1\n"
      "epsilon = 0.01\n"
      "r = 1\n"
      "L = 1\n"
      "phi = theta^2\n");
  CHECK(rs.problem.equation_class == EquationClass::RfdeNormalForm);
  CHECK(rs.problem.field.kind == FieldKind::PointwiseDelay);
  REQUIRE(rs.problem.field.delay_offsets.size() == 1);
  CHECK(rs.problem.field.delay_offsets[0] == 1.0);
  CHECK(rs.problem.r == 1.0);
  REQUIRE(rs.problem.phi.has_value());
  CHECK(rs.problem.phi->delay_span() == 1.0);
  // interpolation and the difference-stencil slopes are exact on quadratics
  CHECK(rs.problem.phi->eval(-0.5)[0] == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(rs.problem.phi->eval_derivative(-0.5)[0] == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(rs.problem.phi->eval(0.0)[0] == doctest::Approx(0.0));
}

TEST_CASE("a catalog config inherits the entry's defaults") {
  const RunSpec rs = load_run_spec(
      "[problem]\n"
      "catalog = linear-osc-ode\n"
      "epsilon = 0.05\n");
  CHECK(rs.catalog_name == "linear-osc-ode");
  CHECK(rs.problem.equation_class == EquationClass::FastOde);
  CHECK(*rs.problem.epsilon == 0.05);
  CHECK(rs.problem.horizon == 1.0);                 // entry default
  CHECK(rs.average.mode == AverageMode::Periodic);  // entry default

  const RunSpec quasi = load_run_spec(
      "[problem]\n"
      "catalog = quasi-periodic-ode\n"
      "epsilon = 0.05\n"
      "L = 3\n");
  CHECK(quasi.average.mode == AverageMode::Cesaro);  // entry default
  CHECK(quasi.problem.horizon == 3.0);               // config wins over entry

  const RunSpec forced = load_run_spec(
      "[problem]\n"
      "catalog = quasi-periodic-ode\n"
      "epsilon = 0.05\n"
      "[average]\n"
      "mode = almost_periodic\n");
  CHECK(forced.average.mode == AverageMode::AlmostPeriodic);  // explicit wins
}

TEST_CASE("catalog configs reject keys that would fight the entry") {
  const auto c = run_catching([] {
    (void)load_run_spec(
        "[problem]\n"
        "catalog = linear-osc-ode\n"
        "epsilon = 0.1\n"
        "field = -x1\n");
  });
  REQUIRE(c.thrown);
  CHECK(has(c.what, "conflicts with catalog"));
  CHECK(c.line == 4);
}

TEST_CASE("d is a declarative dimension check") {
  const std::string base =
      "[problem]\n"
      "class = averaged_ode\n"
      "field = -x1 ; -x2\n"
      "x0 = 1, 2\n"
      "L = 1\n";
  CHECK(load_run_spec(base + "d = 2\n").problem.field.dim == 2);

  const auto mismatch = run_catching([&] { (void)load_run_spec(base + "d = 3\n"); });
  REQUIRE(mismatch.thrown);
  CHECK(has(mismatch.what, "d = 3"));
  CHECK(has(mismatch.what, "2 component(s)"));
  CHECK(mismatch.line == 6);

  CHECK_THROWS_AS((void)load_run_spec(base + "d = 0\n"), ConfigError);

  // also checked against catalog entries
  const std::string cat =
      "[problem]\n"
      "catalog = linear-osc-ode\n"
      "epsilon = 0.1\n";
  CHECK(load_run_spec(cat + "d = 1\n").problem.field.dim == 1);
  CHECK_THROWS_AS((void)load_run_spec(cat + "d = 2\n"), ConfigError);
}

TEST_CASE("initial data must match the equation class") {
  const auto phi_on_point = run_catching([] {
    (void)load_run_spec(
        "[problem]\n"
        "class = averaged_ode\n"
        "field = -x1\n"
        "x0 = 1\n"
        "L = 1\n"
        "phi = 1\n");
  });
  REQUIRE(phi_on_point.thrown);
  CHECK(has(phi_on_point.what, "phi belongs to delay classes"));
  CHECK(phi_on_point.line == 6);

  const auto x0_on_delay = run_catching([] {
    (void)load_run_spec(
        "[problem]\n"
        "class = fast_rfde\n"
        "field = -xd1\n"
        "epsilon = 0.1\n"
        "r = 1\n"
        "L = 1\n"
        "phi = 1\n"
        "x0 = 1\n");
  });
  REQUIRE(x0_on_delay.thrown);
  CHECK(has(x0_on_delay.what, "x0 belongs to point classes"));
  CHECK(x0_on_delay.line == 8);

  CHECK_THROWS_AS((void)load_run_spec("[problem]\n"
                                      "class = fast_rfde\n"
                                      "field = -xd1\n"
                                      "epsilon = 0.1\n"
                                      "r = 1\n"
                                      "L = 1\n"),
                  ConfigError);  // missing phi
  CHECK_THROWS_AS((void)load_run_spec("[problem]\n"
                                      "class = averaged_ode\n"
                                      "field = -x1\n"
                                      "L = 1\n"),
                  ConfigError);  // missing x0
}

TEST_CASE("the ini reader pins down the offending line") {
  auto expect_line = [](const std::string& ini, int line, const std::string& fragment) {
    CAPTURE(ini);
    const auto c = run_catching([&] { (void)load_run_spec(ini); });
    REQUIRE(c.thrown);
    CHECK(has(c.what, fragment));
    CHECK(c.line == line);
  };
  expect_line("[problem\n", 1, "closing ']'");
  expect_line("[problems]\n", 1, "unknown section");
  expect_line("[problem]\nwat = 1\n", 2, "unknown key 'wat'");
  expect_line("h = 1e-3\n", 1, "key before any [section]");
  expect_line("[integrator]\nh\n", 2, "expected 'key = value'");
  expect_line("[integrator]\n= 3\n", 2, "empty key");
  expect_line("[integrator]\nh = 1e-3\n\nh = 1e-4\n", 4, "first set on line 2");
  expect_line("[integrator]\nh = bananas\n", 2, "bad number");
  expect_line("[integrator]\nh = 1/0\n", 2, "finite");
  expect_line("[integrator]\nh =\n", 2, "empty number");
}

TEST_CASE("numeric and enum keys are range checked") {
  const std::string prob =
      "[problem]\n"
      "class = averaged_ode\n"
      "field = -x1\n"
      "x0 = 1\n"
      "L = 1\n";
  auto expect_line = [](const std::string& ini, int line, const std::string& fragment) {
    const auto c = run_catching([&] { (void)load_run_spec(ini); });
    REQUIRE(c.thrown);
    CHECK(has(c.what, fragment));
    CHECK(c.line == line);
  };
  expect_line("[problem]\nclass = averaged_ode\nfield = -x1\nx0 = 1\nL = -1\n", 5,
              "L must be positive");
  expect_line("[problem]\nclass = rfde_normal_form\nfield = -xd1\nepsilon = 0.1\nr = -0.5\n"
              "L = 1\nphi = 1\n",
              5, "r must be nonnegative");
  expect_line("[problem]\nclass = fast_ode\nfield = x1\nepsilon = 0.1\nx0 = 1\nL = 1\n"
              "period = 0\n",
              7, "period must be positive");
  expect_line(prob + "[output]\nverbosity = 3\n", 7, "verbosity must be 0, 1, or 2");
  expect_line(prob + "[sweep]\njobs = 0\n", 7, "jobs must be at least 1");
  expect_line(prob + "[integrator]\nmax_nodes = 1\n", 7, "max_nodes");
  expect_line(prob + "[integrator]\nmax_nodes = 2.5\n", 7, "integer");
  expect_line(prob + "[average]\nmode = sometimes\n", 7, "unknown average mode");
  expect_line("[problem]\nclass = slow_ode\nfield = -x1\nx0 = 1\nL = 1\n", 2,
              "unknown equation class");

  CHECK(load_run_spec(prob + "[output]\nverbosity = 0\n").verbosity == 0);
  CHECK(load_run_spec(prob + "[output]\nverbosity = 2\n").verbosity == 2);
}

TEST_CASE("expression problems still need their epsilon and horizon") {
  // fast class without epsilon: rejected by the final problem validation
  CHECK_THROWS_AS((void)load_run_spec("[problem]\n"
                                      "class = fast_ode\n"
                                      "field = -x1\n"
                                      "x0 = 1\n"
                                      "L = 1\n"),
                  ConfigError);
  const auto no_l = run_catching([] {
    (void)load_run_spec(
        "[problem]\n"
        "class = averaged_ode\n"
        "field = -x1\n"
        "x0 = 1\n");
  });
  REQUIRE(no_l.thrown);
  CHECK(has(no_l.what, "horizon"));
  // catalog fast entries insist on an epsilon source too
  const auto no_eps = run_catching([] {
    (void)load_run_spec(
        "[problem]\n"
        "catalog = linear-osc-ode\n");
  });
  REQUIRE(no_eps.thrown);
  CHECK(has(no_eps.what, "needs epsilon"));
  CHECK_THROWS_AS((void)load_run_spec(""), ConfigError);  // no [problem] at all
}

TEST_CASE("field and phi expression errors carry their config line") {
  const auto bad_field = run_catching([] {
    (void)load_run_spec(
        "[problem]\n"
        "class = averaged_ode\n"
        "field = 1 + * 2\n"
        "x0 = 1\n"
        "L = 1\n");
  });
  REQUIRE(bad_field.thrown);
  CHECK(has(bad_field.what, "bad field expression"));
  CHECK(bad_field.line == 3);

  // xd without a positive r is a parse-level rejection
  const auto xd_no_r = run_catching([] {
    (void)load_run_spec(
        "[problem]\n"
        "class = averaged_ode\n"
        "field = -xd1\n"
        "x0 = 1\n"
        "L = 1\n");
  });
  REQUIRE(xd_no_r.thrown);
  CHECK(has(xd_no_r.what, "bad field expression"));

  const auto bad_phi = run_catching([] {
    (void)load_run_spec(
        "[problem]\n"
        "class = fast_rfde\n"
        "field = -xd1\n"
        "epsilon = 0.1\n"
        "r = 1\n"
        "L = 1\n"
        "phi = theta +\n");
  });
  REQUIRE(bad_phi.thrown);
  CHECK(has(bad_phi.what, "bad phi expression"));
  CHECK(bad_phi.line == 7);

  const auto phi_dim = run_catching([] {
    (void)load_run_spec(
        "[problem]\n"
        "class = fast_rfde\n"
        "field = -xd1\n"
        "epsilon = 0.1\n"
        "r = 1\n"
        "L = 1\n"
        "phi = 1 ; 2\n");
  });
  REQUIRE(phi_dim.thrown);
  CHECK(has(phi_dim.what, "phi has 2 component(s)"));
}

TEST_CASE("numbers accept constant expressions") {
  const RunSpec rs = load_run_spec(
      "[problem]\n"
      "class = fast_ode\n"
      "field = -x1\n"
      "epsilon = pi/100\n"
      "x0 = 1\n"
      "L = sqrt(4)\n");
  CHECK(*rs.problem.epsilon == doctest::Approx(0.031415926535897934));
  CHECK(rs.problem.horizon == doctest::Approx(2.0));
}

TEST_CASE("command line overrides beat the file") {
  const std::string ini =
      "[problem]\n"
      "class = fast_ode\n"
      "field = -x1\n"
      "epsilon = 0.05\n"
      "x0 = 1\n"
      "L = 1\n"
      "[output]\n"
      "path = file.csv\n";
  CliOverrides cli;
  cli.epsilon = 0.02;
  cli.horizon = 4.0;
  cli.out = "cli.csv";
  cli.jobs = 7;
  const RunSpec rs = load_run_spec(ini, cli);
  CHECK(*rs.problem.epsilon == 0.02);
  CHECK(rs.problem.horizon == 4.0);
  CHECK(rs.out_path == "cli.csv");
  CHECK(rs.jobs == 7);

  // --L can supply a horizon the file omitted
  const RunSpec no_l = load_run_spec(
      "[problem]\nclass = averaged_ode\nfield = -x1\nx0 = 1\n",
      [] { CliOverrides c; c.horizon = 2.0; return c; }());
  CHECK(no_l.problem.horizon == 2.0);

  // --epsilon is rejected when the class has none
  CliOverrides eps_only;
  eps_only.epsilon = 0.1;
  const auto c = run_catching([&] {
    (void)load_run_spec("[problem]\nclass = averaged_ode\nfield = -x1\nx0 = 1\nL = 1\n", eps_only);
  });
  REQUIRE(c.thrown);
  CHECK(has(c.what, "--epsilon"));

  CliOverrides bad_jobs;
  bad_jobs.jobs = 0;
  CHECK_THROWS_AS((void)load_run_spec(ini, bad_jobs), ConfigError);
}

TEST_CASE("load_run_spec_file reports unreadable paths") {
  CHECK_THROWS_AS((void)load_run_spec_file("/nonexistent/avglab.ini"), ConfigError);
}

TEST_CASE("mangled configs either load or throw ConfigError, never crash") {
  const std::vector<std::string> pieces = {
      "[problem]\n",    "[integrator]\n", "[average]\n",        "[sweep]\n",
      "[output]\n",     "[garbage]\n",    "class = fast_ode\n", "class = averaged_ode\n",
      "field = -x1\n",  "field = ((\n",   "x0 = 1\n",           "x0 = a, b\n",
      "phi = theta\n",  "epsilon = 0.1\n", "epsilon = -2\n",    "L = 1\n",
      "L = 0\n",        "r = 1\n",        "h = 1e-3\n",         "h = nope\n",
      "mode = cesaro\n", "tol = 1e-5\n",  "jobs = 2\n",         "verbosity = 1\n",
      "epsilons = 0.1, 0.05, 0.025\n",    "= 5\n",              "d = 1\n",
      "max_nodes = 100\n",                "probes = 1; 2\n",    "period = pi\n",
  };
  std::mt19937 rng(20260814u);
  int loaded = 0;
  for (int iter = 0; iter < 400; ++iter) {
    std::string ini;
    const int n = 1 + static_cast<int>(rng() % 10);
    for (int k = 0; k < n; ++k) ini += pieces[rng() % pieces.size()];
    try {
      (void)load_run_spec(ini);
      ++loaded;
    } catch (const ConfigError&) {
      // expected for most random assemblies
    }
  }
  CHECK(loaded >= 0);  // reaching here means nothing crashed or leaked another type
}
