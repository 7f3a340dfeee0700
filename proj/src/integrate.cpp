#include "avglab/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "avglab/detail/hermite.hpp"
#include "avglab/errors.hpp"

namespace avglab {

namespace {

/// Physical time per theta unit of the history window.
double window_scale(const ProblemSpec& p) {
  switch (p.equation_class) {
    case EquationClass::RfdeNormalForm:
    case EquationClass::AveragedRfdeScaled:
      return *p.epsilon;
    default:
      return 1.0;
  }
}

bool is_fast_class(EquationClass c) {
  return c == EquationClass::FastOde || c == EquationClass::RfdeNormalForm ||
         c == EquationClass::FastRfde;
}

/// Growing node store with the same Hermite evaluation Trajectory uses;
/// solvers read history from it while the trajectory is still partial.
class NodeBuffer {
 public:
  void push(double t, StateVec x, StateVec dx) {
    times.push_back(t);
    states.push_back(std::move(x));
    derivs.push_back(std::move(dx));
  }

  [[nodiscard]] double t_back() const { return times.back(); }

  [[nodiscard]] std::size_t interval_index(double t) const {
    auto it = std::upper_bound(times.begin(), times.end(), t);
    std::size_t i = (it == times.begin()) ? 0 : static_cast<std::size_t>(it - times.begin()) - 1;
    if (i >= times.size() - 1) i = times.size() - 2;
    while (i + 1 < times.size() - 1 && times[i + 1] <= times[i]) ++i;
    while (i > 0 && times[i + 1] <= times[i]) --i;
    return i;
  }

  [[nodiscard]] StateVec query(double t) const {
    const double tol = 1e-9 * std::max(1.0, std::abs(times.back()) + std::abs(times.front()));
    if (t < times.front() - tol || t > times.back() + tol)
      throw InternalError("history read outside the computed interval");
    t = std::clamp(t, times.front(), times.back());
    const std::size_t i = interval_index(t);
    if (t == times[i]) return states[i];
    if (t == times[i + 1]) return states[i + 1];
    const auto w = detail::hermite_value_weights(times[i], times[i + 1], t);
    return w.w0 * states[i] + w.w1 * states[i + 1] + w.wm0 * derivs[i] + w.wm1 * derivs[i + 1];
  }

  [[nodiscard]] StateVec query_derivative(double t) const {
    t = std::clamp(t, times.front(), times.back());
    const std::size_t i = interval_index(t);
    if (t == times[i] && !(i > 0 && times[i] == times[i - 1])) {
      // exact node hit: prefer the stored slope (right-hand one at breakpoints)
      std::size_t j = i;
      if (j + 1 < times.size() && times[j + 1] == t) ++j;
      return derivs[j];
    }
    const auto w = detail::hermite_derivative_weights(times[i], times[i + 1], t);
    return w.w0 * states[i] + w.w1 * states[i + 1] + w.wm0 * derivs[i] + w.wm1 * derivs[i + 1];
  }

  std::vector<double> times;
  std::vector<StateVec> states;
  std::vector<StateVec> derivs;
};

/// Stage-time history segment: completed steps come from the interpolant,
/// the sliver between the last node and the stage time (when the window
/// reaches it) is the chord to the stage state, exact at theta = 0.
HistorySegment stage_history(const NodeBuffer& buf, double completed_t, const StateVec& x_n,
                             double s, const StateVec& y_tip, double r, double scale) {
  if (r == 0.0) return HistorySegment::constant(y_tip, 0.0);
  const int n = HistorySegment::kDefaultSamples;
  std::vector<double> thetas(n);
  std::vector<StateVec> values, slopes;
  values.reserve(n);
  slopes.reserve(n);
  for (int i = 0; i < n; ++i) {
    double th = -r + r * static_cast<double>(i) / (n - 1);
    if (i == n - 1) th = 0.0;
    thetas[static_cast<std::size_t>(i)] = th;
    const double u = s + scale * th;
    if (u <= completed_t) {
      values.push_back(buf.query(u));
      slopes.push_back(scale * buf.query_derivative(u));
    } else {
      const double w = (u - completed_t) / (s - completed_t);
      values.push_back((1.0 - w) * x_n + w * y_tip);
      slopes.push_back(scale / (s - completed_t) * (y_tip - x_n));
    }
  }
  return HistorySegment::from_samples(r, std::move(thetas), std::move(values), std::move(slopes));
}

/// Field evaluation for one RK stage of a delay solve. Pointwise-delay reads
/// go straight to the interpolant; the step cap guarantees they never touch
/// the step being assembled, which is asserted, not assumed.
StateVec eval_stage(const FieldSpec& f, double tau, const NodeBuffer& buf, double completed_t,
                    const StateVec& x_n, double s, const StateVec& y, double r, double scale) {
  switch (f.kind) {
    case FieldKind::PointwiseOde:
      return f.pointwise(tau, y);
    case FieldKind::PointwiseDelay: {
      std::vector<StateVec> delayed;
      delayed.reserve(f.delay_offsets.size());
      for (double d : f.delay_offsets) {
        const double u = s - scale * d;
        if (u > completed_t + 1e-9 * std::max(1.0, std::abs(completed_t)))
          throw InternalError("delay window touches the active step; step cap violated");
        delayed.push_back(buf.query(u));
      }
      return f.pointwise_delay(tau, y, delayed);
    }
    case FieldKind::Functional:
      return f.functional(tau, stage_history(buf, completed_t, x_n, s, y, r, scale));
  }
  throw InternalError("unknown field kind");
}

void check_state(const StateVec& x, double t, double bound) {
  if (!all_finite(x) || x.norm() > bound) throw BlowUpError(t, bound);
}

std::size_t step_count(double L, double h) {
  return static_cast<std::size_t>(std::ceil(L / h - 1e-9));
}

Trajectory solve_pointwise(const ProblemSpec& p, const IntegratorConfig& cfg) {
  const double h = effective_step(p, cfg);
  const std::size_t n = step_count(p.horizon, h);
  const bool fast = is_fast_class(p.equation_class);
  const double eps = fast ? *p.epsilon : 1.0;
  const auto rhs = [&](double t, const StateVec& x) {
    return p.field.pointwise(fast ? t / eps : t, x);
  };

  NodeBuffer buf;
  buf.times.reserve(n + 1);
  buf.states.reserve(n + 1);
  buf.derivs.reserve(n + 1);
  check_state(p.x0, 0.0, cfg.blow_up_bound);
  buf.push(0.0, p.x0, rhs(0.0, p.x0));
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * h;
    const double t1 = (i + 1 == n) ? p.horizon : t + h;
    const StateVec& x = buf.states.back();
    const StateVec& k1 = buf.derivs.back();
    const StateVec k2 = rhs(t + 0.5 * h, x + (0.5 * h) * k1);
    const StateVec k3 = rhs(t + 0.5 * h, x + (0.5 * h) * k2);
    const StateVec k4 = rhs(t1, x + h * k3);
    StateVec x1 = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    check_state(x1, t1, cfg.blow_up_bound);
    StateVec d1 = rhs(t1, x1);
    buf.push(t1, std::move(x1), std::move(d1));
  }
  return Trajectory(std::move(buf.times), buf.states, buf.derivs);
}

Trajectory solve_delay(const ProblemSpec& p, const IntegratorConfig& cfg) {
  const double h = effective_step(p, cfg);
  const std::size_t n = step_count(p.horizon, h);
  const bool fast = is_fast_class(p.equation_class);
  const double eps = fast ? *p.epsilon : 1.0;
  const double scale = window_scale(p);
  const auto tau_of = [&](double t) { return fast ? t / eps : t; };
  const HistorySegment& phi = *p.phi;

  NodeBuffer buf;
  const std::size_t n_init = phi.thetas().size();
  buf.times.reserve(n + n_init + 2);
  buf.states.reserve(n + n_init + 2);
  buf.derivs.reserve(n + n_init + 2);

  // Lay the initial interval: x(t) = phi(t/scale) on [-scale*r, 0]. Node
  // slopes are phi'(theta)/scale; without derivative data, finite differences
  // of the samples stand in.
  if (p.r > 0.0) {
    const auto& th = phi.thetas();
    const auto& vals = phi.values();
    for (std::size_t i = 0; i < n_init; ++i) {
      StateVec slope(vals[i].size());
      if (phi.has_derivatives()) {
        slope = phi.derivatives()[i];
      } else if (n_init == 1) {
        slope.setZero();
      } else if (i == 0) {
        slope = (vals[1] - vals[0]) / (th[1] - th[0]);
      } else if (i + 1 == n_init) {
        slope = (vals[i] - vals[i - 1]) / (th[i] - th[i - 1]);
      } else {
        slope = (vals[i + 1] - vals[i - 1]) / (th[i + 1] - th[i - 1]);
      }
      buf.push(scale * th[i], vals[i], slope / scale);
    }
  }

  // The solution's slope genuinely jumps at t = 0: keep phi's slope on the
  // left patch and start the integrated part from the field's value via a
  // breakpoint node (same time, same state).
  const StateVec x_start = phi.eval(0.0);
  check_state(x_start, 0.0, cfg.blow_up_bound);
  {
    StateVec d0 = p.r > 0.0
                      ? eval_stage(p.field, tau_of(0.0), buf, 0.0, x_start, 0.0, x_start, p.r,
                                   scale)
                      : eval_field(p.field, tau_of(0.0), x_start);
    buf.push(0.0, x_start, std::move(d0));
  }

  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * h;
    const double t1 = (i + 1 == n) ? p.horizon : t + h;
    const double hm = t1 - t;
    const StateVec x = buf.states.back();
    const StateVec k1 = buf.derivs.back();
    const StateVec k2 = eval_stage(p.field, tau_of(t + 0.5 * hm), buf, t, x, t + 0.5 * hm,
                                   x + (0.5 * hm) * k1, p.r, scale);
    const StateVec k3 = eval_stage(p.field, tau_of(t + 0.5 * hm), buf, t, x, t + 0.5 * hm,
                                   x + (0.5 * hm) * k2, p.r, scale);
    const StateVec k4 = eval_stage(p.field, tau_of(t1), buf, t, x, t1, x + hm * k3, p.r, scale);
    StateVec x1 = x + (hm / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    check_state(x1, t1, cfg.blow_up_bound);
    StateVec d1 = eval_stage(p.field, tau_of(t1), buf, t, x, t1, x1, p.r, scale);
    buf.push(t1, std::move(x1), std::move(d1));
  }
  return Trajectory(std::move(buf.times), buf.states, buf.derivs);
}

void require_class(const ProblemSpec& p, EquationClass a,
                   std::optional<EquationClass> b = std::nullopt) {
  if (p.equation_class == a || (b && p.equation_class == *b)) return;
  throw ConfigError("solver does not handle equation class '" +
                    std::string(to_string(p.equation_class)) + "'");
}

}  // namespace

double effective_step(const ProblemSpec& p, const IntegratorConfig& cfg) {
  validate_problem(p);
  if (!(cfg.h > 0.0) || !std::isfinite(cfg.h)) throw ConfigError("step h must be positive");
  if (!(cfg.blow_up_bound > 0.0)) throw ConfigError("blow_up_bound must be positive");
  double h = cfg.h;
  if (is_fast_class(p.equation_class)) {
    const double eps = *p.epsilon;
    h = std::min(h, p.field.period ? eps * *p.field.period / 20.0 : eps / 10.0);
  }
  const double rphys = window_scale(p) * p.r;
  if (is_delay_class(p.equation_class) && rphys > 0.0) h = std::min(h, rphys / 2.0);
  const std::size_t n = step_count(p.horizon, h);
  const std::size_t n_init = p.phi ? p.phi->thetas().size() + 1 : 1;
  if (n + n_init > cfg.max_nodes)
    throw ConfigError("solve would need " + std::to_string(n + n_init) +
                      " nodes, above max_nodes = " + std::to_string(cfg.max_nodes));
  return p.horizon / static_cast<double>(n);
}

Trajectory solve_fast_ode(const ProblemSpec& p, const IntegratorConfig& cfg) {
  require_class(p, EquationClass::FastOde);
  return solve_pointwise(p, cfg);
}

Trajectory solve_averaged_ode(const ProblemSpec& p, const IntegratorConfig& cfg) {
  require_class(p, EquationClass::AveragedOde);
  return solve_pointwise(p, cfg);
}

Trajectory solve_rfde_normal_form(const ProblemSpec& p, const IntegratorConfig& cfg) {
  require_class(p, EquationClass::RfdeNormalForm);
  return solve_delay(p, cfg);
}

Trajectory solve_fast_rfde(const ProblemSpec& p, const IntegratorConfig& cfg) {
  require_class(p, EquationClass::FastRfde);
  return solve_delay(p, cfg);
}

Trajectory solve_averaged_rfde(const ProblemSpec& p, const IntegratorConfig& cfg) {
  require_class(p, EquationClass::AveragedRfde, EquationClass::AveragedRfdeScaled);
  return solve_delay(p, cfg);
}

Trajectory solve(const ProblemSpec& p, const IntegratorConfig& cfg) {
  switch (p.equation_class) {
    case EquationClass::FastOde: return solve_fast_ode(p, cfg);
    case EquationClass::AveragedOde: return solve_averaged_ode(p, cfg);
    case EquationClass::RfdeNormalForm: return solve_rfde_normal_form(p, cfg);
    case EquationClass::FastRfde: return solve_fast_rfde(p, cfg);
    case EquationClass::AveragedRfde:
    case EquationClass::AveragedRfdeScaled: return solve_averaged_rfde(p, cfg);
  }
  throw InternalError("unknown equation class");
}

}  // namespace avglab
