#include "avglab/field.hpp"

#include "avglab/errors.hpp"

namespace avglab {

FieldSpec FieldSpec::make_pointwise(int dim, PointwiseFn f, std::optional<double> period) {
  FieldSpec spec;
  spec.kind = FieldKind::PointwiseOde;
  spec.dim = dim;
  spec.period = period;
  spec.pointwise = std::move(f);
  validate_field(spec);
  return spec;
}

FieldSpec FieldSpec::make_pointwise_delay(int dim, double r, std::vector<double> offsets,
                                          PointwiseDelayFn f, std::optional<double> period) {
  FieldSpec spec;
  spec.kind = FieldKind::PointwiseDelay;
  spec.dim = dim;
  spec.history_span = r;
  spec.delay_offsets = std::move(offsets);
  spec.period = period;
  spec.pointwise_delay = std::move(f);
  validate_field(spec);
  return spec;
}

FieldSpec FieldSpec::make_functional(int dim, double r, FunctionalFn f,
                                     std::optional<double> period) {
  FieldSpec spec;
  spec.kind = FieldKind::Functional;
  spec.dim = dim;
  spec.history_span = r;
  spec.period = period;
  spec.functional = std::move(f);
  validate_field(spec);
  return spec;
}

void validate_field(const FieldSpec& f) {
  if (f.dim < 1) throw ConfigError("field dimension must be >= 1");
  if (f.period && !(*f.period > 0.0)) throw ConfigError("declared period must be > 0");
  switch (f.kind) {
    case FieldKind::PointwiseOde:
      if (!f.pointwise) throw ConfigError("pointwise field lacks an evaluator");
      if (f.history_span != 0.0 || !f.delay_offsets.empty())
        throw ConfigError("a pointwise ODE field reads no history");
      return;
    case FieldKind::PointwiseDelay:
      if (!f.pointwise_delay) throw ConfigError("delay field lacks an evaluator");
      if (!(f.history_span > 0.0)) throw ConfigError("delay field needs history span r > 0");
      if (f.delay_offsets.empty()) throw ConfigError("delay field declares no offsets");
      for (double d : f.delay_offsets)
        if (!(d > 0.0) || d > f.history_span + 1e-12)
          throw ConfigError("delay offsets must lie in (0, r]");
      return;
    case FieldKind::Functional:
      if (!f.functional) throw ConfigError("functional field lacks an evaluator");
      if (!(f.history_span >= 0.0)) throw ConfigError("functional field needs history span >= 0");
      return;
  }
  throw ConfigError("unknown field kind");
}

StateVec eval_field(const FieldSpec& f, double t, const StateVec& x) {
  switch (f.kind) {
    case FieldKind::PointwiseOde:
      return f.pointwise(t, x);
    case FieldKind::PointwiseDelay: {
      std::vector<StateVec> delayed(f.delay_offsets.size(), x);
      return f.pointwise_delay(t, x, delayed);
    }
    case FieldKind::Functional:
      return f.functional(t, HistorySegment::constant(x, f.history_span));
  }
  throw InternalError("unknown field kind");
}

StateVec eval_field(const FieldSpec& f, double t, const HistorySegment& seg) {
  switch (f.kind) {
    case FieldKind::PointwiseOde:
      return f.pointwise(t, seg.eval(0.0));
    case FieldKind::PointwiseDelay: {
      std::vector<StateVec> delayed;
      delayed.reserve(f.delay_offsets.size());
      for (double d : f.delay_offsets) delayed.push_back(seg.eval(-d));
      return f.pointwise_delay(t, seg.eval(0.0), delayed);
    }
    case FieldKind::Functional:
      return f.functional(t, seg);
  }
  throw InternalError("unknown field kind");
}

}  // namespace avglab
