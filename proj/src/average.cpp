#include "avglab/average.hpp"

#include <cmath>
#include <cstring>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <unordered_map>
#include <utility>

#include "avglab/errors.hpp"

namespace avglab {

namespace {

using SeriesFn = std::function<StateVec(double)>;

// Quadrature panels for the limit mean are capped at this width so slow
// horizons never under-resolve an oscillation of period ~1.
constexpr double kPanelWidth = 0.05;

// Refinement ceiling for the periodic rule; past this the Simpson residual is
// dominated by roundoff and doubling further cannot help.
constexpr int kMaxPanels = 1 << 17;

SeriesFn make_series(const FieldSpec& f, const FieldArg& x) {
  validate_field(f);
  if (const auto* v = std::get_if<StateVec>(&x)) {
    if (v->size() != f.dim)
      throw ConfigError("average argument has dimension " + std::to_string(v->size()) +
                        ", field expects " + std::to_string(f.dim));
    StateVec point = *v;
    return [f, point](double t) { return eval_field(f, t, point); };
  }
  const auto& seg = std::get<HistorySegment>(x);
  if (seg.dim() != f.dim)
    throw ConfigError("average argument has dimension " + std::to_string(seg.dim()) +
                      ", field expects " + std::to_string(f.dim));
  HistorySegment copy = seg;
  return [f, copy](double t) { return eval_field(f, t, copy); };
}

AverageEstimate series_periodic(const SeriesFn& g, Eigen::Index dim, double T, int n_quad) {
  if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("averaging period must be positive and finite");
  if (n_quad < 16 || n_quad % 2 != 0)
    throw ConfigError("n_quad must be even and at least 16, got " + std::to_string(n_quad));

  // One shared grid of 2*n_quad+1 samples feeds both the n_quad-panel rule and
  // its half-resolution sibling, so the residual costs no extra evaluations.
  const int fine = 2 * n_quad;
  std::vector<StateVec> gv;
  gv.reserve(static_cast<std::size_t>(fine) + 1);
  for (int i = 0; i <= fine; ++i) gv.push_back(g(T * i / fine));

  const auto simpson = [&](int stride) {
    const int panel = 2 * stride;
    const double w = T * panel / fine;
    StateVec s = StateVec::Zero(dim);
    for (int i = 0; i + panel <= fine; i += panel)
      s += (w / 6.0) * (gv[static_cast<std::size_t>(i)] +
                        4.0 * gv[static_cast<std::size_t>(i + stride)] +
                        gv[static_cast<std::size_t>(i + panel)]);
    return s;
  };

  AverageEstimate est;
  est.value = simpson(1) / T;
  est.residual = (est.value - simpson(2) / T).norm();
  est.horizon = T;
  est.mode = AverageMode::Periodic;
  return est;
}

// Integral of g over [a, b] by per-panel Simpson, panels no wider than
// kPanelWidth; endpoint samples are shared between neighbours.
StateVec integrate_chunk(const SeriesFn& g, Eigen::Index dim, double a, double b) {
  const int m = std::max(1, static_cast<int>(std::ceil((b - a) / kPanelWidth - 1e-9)));
  const double w = (b - a) / m;
  StateVec s = StateVec::Zero(dim);
  StateVec left = g(a);
  for (int i = 0; i < m; ++i) {
    const StateVec mid = g(a + (i + 0.5) * w);
    StateVec right = g(a + (i + 1.0) * w);
    s += (w / 6.0) * (left + 4.0 * mid + right);
    left = std::move(right);
  }
  return s;
}

AverageEstimate series_cesaro(const SeriesFn& g, Eigen::Index dim, double tol, double T0,
                              double T_max, double start) {
  if (!(tol > 0.0) || !std::isfinite(tol)) throw ConfigError("average tolerance must be positive");
  if (!(T0 >= 1.0) || !std::isfinite(T0)) throw ConfigError("T0 must be at least 1");
  if (!(T_max >= 4.0 * T0))
    throw ConfigError("T_max must be at least 4*T0 so the estimate can be doubled twice");
  if (!std::isfinite(start)) throw ConfigError("averaging start point must be finite");

  StateVec integral = integrate_chunk(g, dim, start, start + T0);
  double T = T0;
  StateVec prev = integral / T;
  StateVec before_prev = prev;
  int quiet = 0;

  while (2.0 * T <= T_max * (1.0 + 1e-12)) {
    integral += integrate_chunk(g, dim, start + T, start + 2.0 * T);
    T *= 2.0;
    StateVec cur = integral / T;
    const double diff = (cur - prev).norm();
    if (diff < tol) {
      // One quiet doubling is not evidence: a mean drifting like log T moves
      // little per doubling long before it settles. Demand two in a row.
      if (++quiet >= 2) {
        AverageEstimate est;
        est.value = std::move(cur);
        est.horizon = T;
        est.residual = diff;
        est.mode = AverageMode::Cesaro;
        return est;
      }
    } else {
      quiet = 0;
    }
    before_prev = std::move(prev);
    prev = std::move(cur);
  }
  throw NoAverageError(prev, before_prev, T);
}

AverageEstimate series_almost(const SeriesFn& g, Eigen::Index dim, double tol,
                              const std::vector<double>& probes, double T0, double T_max) {
  if (probes.empty()) throw ConfigError("almost-periodic averaging needs at least one start probe");
  std::vector<AverageEstimate> ests;
  ests.reserve(probes.size());
  for (double s : probes) ests.push_back(series_cesaro(g, dim, tol, T0, T_max, s));

  double spread = 0.0;
  for (std::size_t i = 0; i < ests.size(); ++i)
    for (std::size_t j = i + 1; j < ests.size(); ++j)
      spread = std::max(spread, (ests[i].value - ests[j].value).norm());
  if (spread > 10.0 * tol) throw NotAlmostPeriodicError(spread, tol);

  AverageEstimate est;
  est.value = ests.front().value;
  est.horizon = ests.front().horizon;
  est.residual = spread;
  est.mode = AverageMode::AlmostPeriodic;
  return est;
}

AverageEstimate run_series(const SeriesFn& g, Eigen::Index dim, const AverageConfig& cfg,
                           std::optional<double> declared_period) {
  const double tol = cfg.tol > 0.0 ? cfg.tol : default_average_tol(cfg.mode);
  switch (cfg.mode) {
    case AverageMode::Periodic: {
      if (!declared_period)
        throw ConfigError("periodic averaging requires a field with a declared period");
      const double T = *declared_period;
      if (cfg.n_quad < 16 || cfg.n_quad % 2 != 0)
        throw ConfigError("n_quad must be even and at least 16, got " + std::to_string(cfg.n_quad));
      int n = std::max(cfg.n_quad, static_cast<int>(std::ceil(T / kPanelWidth)));
      if (n % 2 != 0) ++n;
      AverageEstimate est = series_periodic(g, dim, T, n);
      while (est.residual > tol && n < kMaxPanels) {
        n *= 2;
        est = series_periodic(g, dim, T, n);
      }
      return est;
    }
    case AverageMode::Cesaro:
      return series_cesaro(g, dim, tol, cfg.T0, cfg.T_max, 0.0);
    case AverageMode::AlmostPeriodic:
      return series_almost(g, dim, tol, cfg.probes.empty() ? default_probes() : cfg.probes,
                           cfg.T0, cfg.T_max);
  }
  throw InternalError("unhandled average mode");
}

std::string state_key(const StateVec& x) {
  std::string key(sizeof(double) * static_cast<std::size_t>(x.size()), '\0');
  if (!key.empty()) std::memcpy(key.data(), x.data(), key.size());
  return key;
}

struct MemoCache {
  std::mutex mu;
  std::unordered_map<std::string, StateVec> map;
};

// Compute happens outside the lock: concurrent misses on the same key may
// duplicate work but land identical bits (evaluators are pure), so the first
// insert wins and every caller sees the same value.
StateVec memoized(const std::shared_ptr<MemoCache>& cache, std::string key,
                  const std::function<StateVec()>& compute) {
  {
    std::lock_guard<std::mutex> lock(cache->mu);
    auto it = cache->map.find(key);
    if (it != cache->map.end()) return it->second;
  }
  StateVec fresh = compute();
  std::lock_guard<std::mutex> lock(cache->mu);
  auto [it, inserted] = cache->map.emplace(std::move(key), std::move(fresh));
  return it->second;
}

}  // namespace

std::string_view to_string(AverageMode m) {
  switch (m) {
    case AverageMode::Periodic: return "periodic";
    case AverageMode::Cesaro: return "cesaro";
    case AverageMode::AlmostPeriodic: return "almost_periodic";
  }
  return "?";
}

std::optional<AverageMode> average_mode_from_string(std::string_view s) {
  if (s == "periodic") return AverageMode::Periodic;
  if (s == "cesaro") return AverageMode::Cesaro;
  if (s == "almost_periodic") return AverageMode::AlmostPeriodic;
  return std::nullopt;
}

double default_average_tol(AverageMode m) {
  switch (m) {
    case AverageMode::Periodic: return 1e-6;
    case AverageMode::Cesaro: return 1e-4;
    case AverageMode::AlmostPeriodic: return 1e-3;
  }
  return 1e-6;
}

const std::vector<double>& default_probes() {
  static const std::vector<double> probes = {0.0, 1.0, std::numbers::e, 10.0 * std::numbers::pi};
  return probes;
}

AverageEstimate average_periodic(const FieldSpec& f, const FieldArg& x, double T, int n_quad) {
  return series_periodic(make_series(f, x), f.dim, T, n_quad);
}

AverageEstimate average_cesaro(const FieldSpec& f, const FieldArg& x, double tol, double T0,
                               double T_max, double start) {
  return series_cesaro(make_series(f, x), f.dim, tol, T0, T_max, start);
}

AverageEstimate average_almost_periodic(const FieldSpec& f, const FieldArg& x, double tol,
                                        const std::vector<double>& probes, double T0,
                                        double T_max) {
  if (!(tol > 0.0) || !std::isfinite(tol)) throw ConfigError("average tolerance must be positive");
  return series_almost(make_series(f, x), f.dim, tol, probes, T0, T_max);
}

AverageEstimate estimate_average(const FieldSpec& f, const FieldArg& x, const AverageConfig& cfg) {
  return run_series(make_series(f, x), f.dim, cfg, f.period);
}

HistorySegment lift_constant_history(const StateVec& x, double r) {
  return HistorySegment::constant(x, r);
}

FieldSpec build_averaged_field(const FieldSpec& f, const AverageConfig& cfg) {
  validate_field(f);
  auto cache = std::make_shared<MemoCache>();
  FieldSpec out;
  out.kind = f.kind;
  out.dim = f.dim;
  out.history_span = f.history_span;
  out.delay_offsets = f.delay_offsets;
  out.period = std::nullopt;  // the average is autonomous by construction

  switch (f.kind) {
    case FieldKind::PointwiseOde:
      out.pointwise = [f, cfg, cache](double, const StateVec& x) {
        return memoized(cache, state_key(x),
                        [&] { return estimate_average(f, FieldArg(x), cfg).value; });
      };
      break;
    case FieldKind::PointwiseDelay:
      // The average depends on the segment only through the values the field
      // reads, so the averaged field stays pointwise-delay and the memo key is
      // exactly those values.
      out.pointwise_delay = [f, cfg, cache](double, const StateVec& x,
                                            const std::vector<StateVec>& delayed) {
        std::string key = state_key(x);
        for (const auto& d : delayed) key += state_key(d);
        return memoized(cache, std::move(key), [&] {
          SeriesFn g = [&](double tau) { return f.pointwise_delay(tau, x, delayed); };
          return run_series(g, f.dim, cfg, f.period).value;
        });
      };
      break;
    case FieldKind::Functional:
      out.functional = [f, cfg, cache](double, const HistorySegment& seg) {
        return memoized(cache, seg.bit_pattern_key(),
                        [&] { return estimate_average(f, FieldArg(seg), cfg).value; });
      };
      break;
  }
  validate_field(out);
  return out;
}

FieldSpec build_averaged_field_lifted(const FieldSpec& f, const AverageConfig& cfg) {
  validate_field(f);
  if (f.kind == FieldKind::PointwiseOde) return build_averaged_field(f, cfg);
  auto cache = std::make_shared<MemoCache>();
  // eval_field at a bare state sees the constant lift, which is exactly the
  // reduction this builder implements.
  FieldSpec out = FieldSpec::make_pointwise(
      f.dim, [f, cfg, cache](double, const StateVec& x) {
        return memoized(cache, state_key(x),
                        [&] { return estimate_average(f, FieldArg(x), cfg).value; });
      });
  return out;
}

ProblemSpec averaged_counterpart(const ProblemSpec& fast, const AverageConfig& cfg, bool scaled) {
  validate_problem(fast);
  if (scaled && fast.equation_class != EquationClass::RfdeNormalForm)
    throw ConfigError("scaled averaging applies only to rfde_normal_form problems");
  ProblemSpec out;
  out.horizon = fast.horizon;
  switch (fast.equation_class) {
    case EquationClass::FastOde:
      out.equation_class = EquationClass::AveragedOde;
      out.field = build_averaged_field(fast.field, cfg);
      out.x0 = fast.x0;
      break;
    case EquationClass::RfdeNormalForm:
      if (scaled) {
        out.equation_class = EquationClass::AveragedRfdeScaled;
        out.field = build_averaged_field(fast.field, cfg);
        out.epsilon = fast.epsilon;
        out.r = fast.r;
        out.phi = fast.phi;
      } else {
        out.equation_class = EquationClass::AveragedOde;
        out.field = build_averaged_field_lifted(fast.field, cfg);
        out.x0 = fast.phi->eval(0.0);
      }
      break;
    case EquationClass::FastRfde:
      out.equation_class = EquationClass::AveragedRfde;
      out.field = build_averaged_field(fast.field, cfg);
      out.r = fast.r;
      out.phi = fast.phi;
      break;
    case EquationClass::AveragedOde:
    case EquationClass::AveragedRfde:
    case EquationClass::AveragedRfdeScaled:
      throw ConfigError("problem is already an averaged equation");
  }
  validate_problem(out);
  return out;
}

}  // namespace avglab
