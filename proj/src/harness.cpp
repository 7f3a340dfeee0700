#include "avglab/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "avglab/errors.hpp"

namespace avglab {

namespace {

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_ms(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

double sup_on_comb(const Trajectory& a, const std::function<StateVec(double)>& ref, double t0,
                   double t1, std::size_t n_samples, double gap_hint) {
  if (!(t1 > t0)) throw ConfigError("sup_error needs a window with t1 > t0");
  if (n_samples < 1000) throw ConfigError("sup_error needs at least 1000 samples");
  const double gap = std::min(a.max_node_gap(t0, t1), gap_hint);
  std::size_t n = n_samples;
  if (gap > 0.0) {
    // Ten samples per node interval: the grid maximum then misses the true
    // sup by at most (gap/10) times the local Lipschitz constant.
    const double needed = std::ceil(10.0 * (t1 - t0) / gap);
    if (needed > 2e7) throw ConfigError("sup_error sampling comb would exceed 2e7 points");
    n = std::max<std::size_t>(n, static_cast<std::size_t>(needed));
  }
  double sup = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n);
    const double err = (a.query(t) - ref(t)).norm();
    if (std::isnan(err)) return err;
    sup = std::max(sup, err);
  }
  return sup;
}

}  // namespace

double sup_error(const Trajectory& a, const std::function<StateVec(double)>& ref, double t0,
                 double t1, std::size_t n_samples) {
  return sup_on_comb(a, ref, t0, t1, n_samples, std::numeric_limits<double>::infinity());
}

double sup_error(const Trajectory& a, const Trajectory& b, double t0, double t1,
                 std::size_t n_samples) {
  if (a.dim() != b.dim()) throw ConfigError("sup_error between different dimensions");
  return sup_on_comb(
      a, [&b](double t) { return b.query(t); }, t0, t1, n_samples, b.max_node_gap(t0, t1));
}

double sup_error(const Trajectory& a, const Trajectory& b) {
  const double t0 = std::max(a.t_start(), b.t_start());
  const double t1 = std::min(a.t_end(), b.t_end());
  return sup_error(a, b, t0, t1);
}

SweepReport epsilon_sweep(const ProblemSpec& fast, const std::vector<double>& epsilons,
                          const SweepOptions& opt) {
  if (epsilons.size() < 3)
    throw ConfigError("epsilon sweep needs at least 3 values to show a trend");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0) || !std::isfinite(epsilons[i]))
      throw ConfigError("sweep epsilons must be positive and finite");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
      throw ConfigError("sweep epsilons must be strictly decreasing");
  }
  if (!needs_epsilon(fast.equation_class))
    throw ConfigError("epsilon sweep needs a fast problem class");
  if (opt.compare_scaled && fast.equation_class != EquationClass::RfdeNormalForm)
    throw ConfigError("compare_scaled applies only to rfde_normal_form problems");

  ProblemSpec base = fast;
  base.epsilon = epsilons.front();
  validate_problem(base);

  // The averaged counterpart does not depend on epsilon: build and solve once.
  const ProblemSpec averaged = averaged_counterpart(base, opt.average, false);
  const Trajectory avg_traj = solve(averaged, opt.integrator);

  // The scaled comparison shares one memo cache across rows.
  FieldSpec scaled_field;
  if (opt.compare_scaled) scaled_field = build_averaged_field(base.field, opt.average);

  SweepReport report;
  report.has_scaled = opt.compare_scaled;
  report.label = opt.label;
  report.horizon = base.horizon;
  report.requested_h = opt.integrator.h;
  report.mode = opt.average.mode;
  report.tol = opt.average.tol > 0.0 ? opt.average.tol : default_average_tol(opt.average.mode);
  report.rows.resize(epsilons.size());
  std::vector<std::exception_ptr> row_error(epsilons.size());

  const auto run_row = [&](std::size_t i) {
    SweepRow& row = report.rows[i];
    row.epsilon = epsilons[i];
    const auto t_begin = std::chrono::steady_clock::now();
    try {
      ProblemSpec p = base;
      p.epsilon = epsilons[i];
      try {
        const Trajectory traj = solve(p, opt.integrator);
        row.sup_err = sup_error(traj, avg_traj, 0.0, p.horizon);
        if (opt.compare_scaled) {
          ProblemSpec sp = p;
          sp.equation_class = EquationClass::AveragedRfdeScaled;
          sp.field = scaled_field;
          const Trajectory straj = solve(sp, opt.integrator);
          row.sup_err_scaled = sup_error(traj, straj, 0.0, p.horizon);
        }
      } catch (const BlowUpError&) {
        row.blow_up = true;
      }
    } catch (...) {
      row_error[i] = std::current_exception();
    }
    row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                            t_begin)
                      .count();
  };

  const int jobs = std::max(1, std::min(opt.jobs, 64));
  if (jobs == 1) {
    for (std::size_t i = 0; i < epsilons.size(); ++i) run_row(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const std::size_t n_threads = std::min<std::size_t>(jobs, epsilons.size());
    pool.reserve(n_threads);
    for (std::size_t k = 0; k < n_threads; ++k)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < report.rows.size(); i = next.fetch_add(1))
          run_row(i);
      });
    for (auto& th : pool) th.join();
  }
  for (const auto& err : row_error)
    if (err) std::rethrow_exception(err);

  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    const double prev = report.rows[i - 1].sup_err;
    const double cur = report.rows[i].sup_err;
    if (std::isfinite(prev) && prev > 0.0 && std::isfinite(cur))
      report.rows[i].ratio_prev = cur / prev;
  }
  return report;
}

std::string sweep_csv(const SweepReport& report) {
  std::string out = "epsilon,sup_error,ratio_prev,blow_up,wall_ms\n";
  for (const SweepRow& r : report.rows) {
    out += fmt_g(r.epsilon);
    out += ',';
    out += fmt_g(r.sup_err);
    out += ',';
    out += fmt_g(r.ratio_prev);
    out += ',';
    out += r.blow_up ? '1' : '0';
    out += ',';
    out += fmt_ms(r.wall_ms);
    out += '\n';
  }
  return out;
}

std::string sweep_table(const SweepReport& report) {
  std::ostringstream os;
  if (!report.label.empty())
    os << report.label << "  (L = " << report.horizon << ", h = " << report.requested_h
       << ", average " << to_string(report.mode) << " tol " << report.tol << ")\n";
  const auto line = [&os, &report](const std::string& a, const std::string& b,
                                   const std::string& c, const std::string& d,
                                   const std::string& e, const std::string& f) {
    os << "  ";
    os.width(12);
    os << a;
    os.width(14);
    os << b;
    os.width(12);
    os << c;
    if (report.has_scaled) {
      os.width(14);
      os << f;
    }
    os.width(9);
    os << d;
    os.width(12);
    os << e;
    os << '\n';
  };
  line("epsilon", "sup_error", "ratio", "blow_up", "wall_ms", "scaled_err");
  char buf[40];
  const auto short_g = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return std::string(buf);
  };
  for (const SweepRow& r : report.rows)
    line(short_g(r.epsilon), short_g(r.sup_err), short_g(r.ratio_prev), r.blow_up ? "yes" : "no",
         fmt_ms(r.wall_ms), short_g(r.sup_err_scaled));
  return os.str();
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t";
  for (Eigen::Index c = 0; c < traj.dim(); ++c) out += ",x" + std::to_string(c + 1);
  out += '\n';
  for (std::size_t i = 0; i < traj.node_count(); ++i) {
    out += fmt_g(traj.node_time(i));
    const StateVec x = traj.node_state(i);
    for (Eigen::Index c = 0; c < x.size(); ++c) {
      out += ',';
      out += fmt_g(x[c]);
    }
    out += '\n';
  }
  return out;
}

std::vector<double> strobe_grid(double t_end, double alpha, int n_points) {
  if (n_points < 2) throw ConfigError("stroboscopic grid needs at least 2 points");
  const double limit = t_end - alpha;
  if (!(limit > 0.0))
    throw ConfigError("horizon is shorter than alpha; nothing to measure");
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(n_points));
  for (int i = 0; i < n_points; ++i)
    grid.push_back(limit * static_cast<double>(i) / static_cast<double>(n_points - 1));
  return grid;
}

StroboscopicReport stroboscopic_residual(const Trajectory& traj, const FieldSpec& field_avg,
                                         double epsilon, const std::vector<double>& t_grid) {
  validate_field(field_avg);
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw ConfigError("stroboscopic residual needs a positive epsilon");
  if (t_grid.empty()) throw ConfigError("stroboscopic grid is empty");
  if (traj.dim() != field_avg.dim)
    throw ConfigError("trajectory and averaged field dimensions differ");

  StroboscopicReport rep;
  rep.alpha = std::sqrt(epsilon);

  for (const double t : t_grid) {
    if (t < traj.t_start() || t + rep.alpha > traj.t_end()) {
      std::cerr << "stroboscopic residual: skipping t = " << t
                << " (t + alpha leaves the trajectory)\n";
      ++rep.skipped;
      continue;
    }
    try {
      const StateVec chord = (traj.query(t + rep.alpha) - traj.query(t)) / rep.alpha;
      StateVec favg;
      if (field_avg.kind == FieldKind::PointwiseOde) {
        favg = eval_field(field_avg, t, traj.query(t));
      } else {
        // The fixed-window comparison reads the plain history x_t; the
        // compressed-window regime is compared against its lifted pointwise
        // field instead, so no eps-scaled window appears here.
        const HistorySegment seg = trajectory_history(traj, t, field_avg.history_span, 1.0);
        favg = eval_field(field_avg, t, seg);
      }
      const double res = (chord - favg).norm();
      if (!std::isfinite(res)) {
        std::cerr << "stroboscopic residual: skipping t = " << t << " (non-finite value)\n";
        ++rep.skipped;
        continue;
      }
      rep.times.push_back(t);
      rep.residuals.push_back(res);
      rep.max_residual = std::isnan(rep.max_residual) ? res : std::max(rep.max_residual, res);
    } catch (const DomainError& e) {
      std::cerr << "stroboscopic residual: skipping t = " << t << " (" << e.what() << ")\n";
      ++rep.skipped;
    }
  }
  return rep;
}

namespace {

// Standard-sequence engine mapped to [0,1) by hand so the stream of states is
// bit-identical across standard libraries.
double canonical_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

GuardReport hypothesis_guard(const FieldSpec& f, const GuardBox& box, double t_horizon) {
  validate_field(f);
  if (box.lo.size() != f.dim || box.hi.size() != f.dim)
    throw ConfigError("guard box corners must match the field dimension");
  for (Eigen::Index c = 0; c < box.lo.size(); ++c)
    if (!(box.lo[c] <= box.hi[c])) throw ConfigError("guard box needs lo <= hi per component");
  if (!(t_horizon > 0.0) || !std::isfinite(t_horizon))
    throw ConfigError("guard horizon must be positive and finite");
  if (box.n_states < 2 || box.n_times < 8) throw ConfigError("guard needs >= 2 states, >= 8 times");

  // Corners first so box extremes are always probed, then seeded uniforms.
  std::mt19937_64 rng(box.seed);
  std::vector<StateVec> states;
  states.reserve(static_cast<std::size_t>(box.n_states));
  states.push_back(box.lo);
  states.push_back(box.hi);
  for (int i = 2; i < box.n_states; ++i) {
    StateVec x(f.dim);
    for (Eigen::Index c = 0; c < x.size(); ++c)
      x[c] = box.lo[c] + (box.hi[c] - box.lo[c]) * canonical_unit(rng);
    states.push_back(std::move(x));
  }

  GuardReport rep;
  double early_max = 0.0;
  double late_max = 0.0;
  for (int j = 0; j < box.n_times; ++j) {
    const double t = t_horizon * static_cast<double>(j) / static_cast<double>(box.n_times - 1);
    StateVec prev_val;
    bool have_prev = false;
    double at_this_time = 0.0;
    for (int i = 0; i < box.n_states; ++i) {
      const StateVec v = eval_field(f, t, states[static_cast<std::size_t>(i)]);
      if (!all_finite(v)) {
        rep.rejected = true;
        have_prev = false;
        continue;
      }
      const double norm = v.norm();
      rep.max_norm = std::max(rep.max_norm, norm);
      at_this_time = std::max(at_this_time, norm);
      if (have_prev) {
        const double dx =
            (states[static_cast<std::size_t>(i)] - states[static_cast<std::size_t>(i - 1)]).norm();
        if (dx > 0.0)
          rep.continuity_quotient = std::max(rep.continuity_quotient, (v - prev_val).norm() / dx);
      }
      prev_val = v;
      have_prev = true;
    }
    if (4 * j < box.n_times) early_max = std::max(early_max, at_this_time);
    if (4 * (box.n_times - 1 - j) < box.n_times) late_max = std::max(late_max, at_this_time);
  }
  rep.grows_with_time = late_max > 2.0 * early_max + 1e-9;

  std::ostringstream os;
  os << "sampled " << box.n_states << " states x " << box.n_times << " times on [0, " << t_horizon
     << "]: max |f| = " << rep.max_norm << ", continuity quotient <= " << rep.continuity_quotient
     << (rep.grows_with_time ? ", norms grow with time" : ", no time growth")
     << (rep.rejected ? ", non-finite values seen" : "") << "; evidence, not proof";
  rep.summary = os.str();
  return rep;
}

}  // namespace avglab
