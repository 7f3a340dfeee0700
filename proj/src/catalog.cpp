#include "avglab/catalog.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "avglab/errors.hpp"
#include "avglab/expr.hpp"

namespace avglab {

namespace {

constexpr double kPi = std::numbers::pi;

StateVec s1(double v) {
  StateVec x(1);
  x[0] = v;
  return x;
}

std::vector<CatalogEntry> build_entries() {
  std::vector<CatalogEntry> es;

  {
    CatalogEntry e;
    e.name = "linear-osc-ode";
    e.description = "scalar fast ODE with pi-periodic growth rate (1 - cos) x; averaged flow e^t";
    e.equation_class = EquationClass::FastOde;
    e.field = FieldSpec::make_pointwise(
        1, [](double t, const StateVec& x) { return s1((1.0 - std::cos(2.0 * t)) * x[0]); }, kPi);
    e.averaged_field =
        FieldSpec::make_pointwise(1, [](double, const StateVec& x) { return s1(x[0]); });
    e.field_text = {"(1 - cos(2*t)) * x1"};
    e.average_mode = AverageMode::Periodic;
    e.horizon = 1.0;
    e.x0 = s1(1.0);
    e.exact = [](double t, double eps) {
      return s1(std::exp(t - (eps / 2.0) * std::sin(2.0 * t / eps)));
    };
    e.exact_averaged = [](double t) { return s1(std::exp(t)); };
    es.push_back(std::move(e));
  }

  {
    CatalogEntry e;
    e.name = "damped-forced-ode";
    e.description = "damped scalar ODE driven by a fast sine; averaged flow e^-t";
    e.equation_class = EquationClass::FastOde;
    e.field = FieldSpec::make_pointwise(
        1, [](double t, const StateVec& x) { return s1(-x[0] + std::sin(t)); }, 2.0 * kPi);
    e.averaged_field =
        FieldSpec::make_pointwise(1, [](double, const StateVec& x) { return s1(-x[0]); });
    e.field_text = {"-x1 + sin(t)"};
    e.average_mode = AverageMode::Periodic;
    e.horizon = 1.0;
    e.x0 = s1(1.0);
    e.exact = [](double t, double eps) {
      const double k = 1.0 / eps;
      return s1(std::exp(-t) +
                (std::sin(k * t) - k * std::cos(k * t) + k * std::exp(-t)) / (1.0 + k * k));
    };
    e.exact_averaged = [](double t) { return s1(std::exp(-t)); };
    es.push_back(std::move(e));
  }

  {
    CatalogEntry e;
    e.name = "quasi-periodic-ode";
    e.description = "drift-free quasi-periodic forcing sin + sin(sqrt(2) .); average is 0";
    e.equation_class = EquationClass::FastOde;
    e.field = FieldSpec::make_pointwise(1, [](double t, const StateVec&) {
      return s1(std::sin(t) + std::sin(std::sqrt(2.0) * t));
    });
    e.averaged_field =
        FieldSpec::make_pointwise(1, [](double, const StateVec&) { return s1(0.0); });
    e.field_text = {"sin(t) + sin(sqrt(2)*t)"};
    e.average_mode = AverageMode::Cesaro;
    e.horizon = 1.0;
    e.x0 = s1(0.0);
    e.exact = [](double t, double eps) {
      const double root2 = std::sqrt(2.0);
      return s1(eps * (1.0 - std::cos(t / eps)) +
                (eps / root2) * (1.0 - std::cos(root2 * t / eps)));
    };
    e.exact_averaged = [](double t) {
      (void)t;
      return s1(0.0);
    };
    es.push_back(std::move(e));
  }

  const auto delayed_damping = [](double t, const StateVec&, const std::vector<StateVec>& d) {
    return s1(-(1.0 - std::cos(2.0 * t)) * d[0][0]);
  };

  {
    CatalogEntry e;
    e.name = "delay-normal-form";
    e.description =
        "compressed-window delay equation with pi-periodic delayed damping; lifted average -y";
    e.equation_class = EquationClass::RfdeNormalForm;
    e.field = FieldSpec::make_pointwise_delay(1, 1.0, {1.0}, delayed_damping, kPi);
    e.averaged_field =
        FieldSpec::make_pointwise(1, [](double, const StateVec& x) { return s1(-x[0]); });
    e.field_text = {"-(1 - cos(2*t)) * xd1"};
    e.phi_text = "1";
    e.average_mode = AverageMode::Periodic;
    e.r = 1.0;
    e.horizon = 1.0;
    e.phi = HistorySegment::constant(s1(1.0), 1.0);
    e.exact_averaged = [](double t) { return s1(std::exp(-t)); };
    es.push_back(std::move(e));
  }

  {
    CatalogEntry e;
    e.name = "delay-fast-rfde";
    e.description =
        "fixed-delay equation with pi-periodic delayed damping; averaged delayed exponential";
    e.equation_class = EquationClass::FastRfde;
    e.field = FieldSpec::make_pointwise_delay(1, 1.0, {1.0}, delayed_damping, kPi);
    e.averaged_field = FieldSpec::make_pointwise_delay(
        1, 1.0, {1.0},
        [](double, const StateVec&, const std::vector<StateVec>& d) { return s1(-d[0][0]); });
    e.field_text = {"-(1 - cos(2*t)) * xd1"};
    e.phi_text = "1";
    e.average_mode = AverageMode::Periodic;
    e.r = 1.0;
    e.horizon = 2.0;
    e.phi = HistorySegment::constant(s1(1.0), 1.0);
    e.exact_averaged = [](double t) { return s1(delayed_exponential(t, 1.0)); };
    es.push_back(std::move(e));
  }

  return es;
}

// Five-point derivative stencil, O(h^4); h is chosen so the stencil error at
// fast-time rates ~1/0.1 stays two decades under the check tolerance.
constexpr double kStencilH = 5e-4;
constexpr double kCheckTol = 1e-8;
constexpr double kCheckEps = 0.1;

StateVec stencil(const std::function<StateVec(double)>& g, double t) {
  return (-g(t + 2.0 * kStencilH) + 8.0 * g(t + kStencilH) - 8.0 * g(t - kStencilH) +
          g(t - 2.0 * kStencilH)) /
         (12.0 * kStencilH);
}

[[noreturn]] void check_failed(const CatalogEntry& e, const std::string& what, double t,
                               double err) {
  std::ostringstream os;
  os << "catalog self-check failed for '" << e.name << "': " << what << " at t = " << t
     << " (|mismatch| = " << err << ")";
  throw InternalError(os.str());
}

void check_entry(const CatalogEntry& e) {
  // Closed fast solution must satisfy the fast equation.
  if (e.exact) {
    for (double t : {0.3, 0.7}) {
      const StateVec lhs = stencil([&](double u) { return e.exact(u, kCheckEps); }, t);
      const StateVec rhs = eval_field(e.field, t / kCheckEps, e.exact(t, kCheckEps));
      const double err = (lhs - rhs).norm();
      if (!(err <= kCheckTol)) check_failed(e, "exact solution vs fast field", t, err);
    }
  }

  // Closed averaged solution must satisfy the averaged equation. The fixed
  // delay entry feeds a real history segment; its check points sit inside
  // smooth pieces (the delayed exponential has kinks at integers).
  if (e.exact_averaged) {
    const bool delayed = e.averaged_field.kind != FieldKind::PointwiseOde;
    const double check_points[2] = {delayed ? 0.4 : 0.3, delayed ? 1.5 : 0.7};
    for (double t : check_points) {
      const StateVec lhs = stencil([&](double u) { return e.exact_averaged(u); }, t);
      StateVec rhs;
      if (delayed) {
        const HistorySegment seg = HistorySegment::from_callable(
            [&](double theta) { return e.exact_averaged(t + theta); }, e.r);
        rhs = eval_field(e.averaged_field, t, seg);
      } else {
        rhs = eval_field(e.averaged_field, t, e.exact_averaged(t));
      }
      const double err = (lhs - rhs).norm();
      if (!(err <= kCheckTol)) check_failed(e, "averaged solution vs averaged field", t, err);
    }
  }

  // Published expression text must evaluate identically to the native field.
  const FieldSpec from_text =
      make_expr_field(e.field_text, e.field.history_span,
                      e.field.period);
  for (double t : {0.0, 0.37, 2.9}) {
    const StateVec x = s1(0.8);
    const HistorySegment seg = HistorySegment::constant(x, e.field.history_span);
    const double err = (eval_field(from_text, t, seg) - eval_field(e.field, t, seg)).norm();
    if (!(err <= 1e-15)) check_failed(e, "expression text vs native field", t, err);
  }
}

}  // namespace

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = [] {
    std::vector<CatalogEntry> es = build_entries();
    for (const CatalogEntry& e : es) check_entry(e);
    return es;
  }();
  return entries;
}

const CatalogEntry& catalog_entry(std::string_view name) {
  for (const CatalogEntry& e : catalog())
    if (e.name == name) return e;
  std::string names;
  for (const CatalogEntry& e : catalog()) {
    if (!names.empty()) names += ", ";
    names += e.name;
  }
  throw ConfigError("unknown catalog entry '" + std::string(name) + "'; available: " + names);
}

ProblemSpec make_problem(const CatalogEntry& e, double epsilon, double horizon) {
  ProblemSpec p;
  p.equation_class = e.equation_class;
  p.field = e.field;
  p.horizon = horizon > 0.0 ? horizon : e.horizon;
  if (needs_epsilon(e.equation_class)) p.epsilon = epsilon;
  if (is_delay_class(e.equation_class)) {
    p.r = e.r;
    p.phi = e.phi;
  } else {
    p.x0 = e.x0;
  }
  validate_problem(p);
  return p;
}

ProblemSpec make_problem(std::string_view name, double epsilon, double horizon) {
  return make_problem(catalog_entry(name), epsilon, horizon);
}

double delayed_exponential(double t, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("tau must be positive and finite");
  if (!std::isfinite(t)) throw ConfigError("t must be finite");
  if (t <= 0.0) return 1.0;
  if (t / tau > 150.0)
    throw DomainError("delayed exponential series is only evaluated for t/tau <= 150");
  double y = 0.0;
  double factorial = 1.0;
  double sign = 1.0;
  for (int k = 0;; ++k) {
    const double u = t - (k - 1.0) * tau;
    if (u < 0.0) break;
    if (k > 0) factorial *= k;
    y += sign * std::pow(u, k) / factorial;
    sign = -sign;
  }
  return y;
}

}  // namespace avglab
