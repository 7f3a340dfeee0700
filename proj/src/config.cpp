#include "avglab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "avglab/catalog.hpp"
#include "avglab/errors.hpp"
#include "avglab/expr.hpp"

namespace avglab {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Value {
  std::string text;
  int line = 0;
};

using Section = std::map<std::string, Value>;

const std::map<std::string, std::vector<std::string>>& known_keys() {
  static const std::map<std::string, std::vector<std::string>> keys = {
      {"problem", {"catalog", "class", "d", "field", "epsilon", "L", "r", "x0", "phi", "period"}},
      {"integrator", {"h", "blow_up_bound", "max_nodes"}},
      {"average", {"mode", "tol", "T0", "T_max", "n_quad", "probes"}},
      {"sweep", {"epsilons", "jobs", "compare_scaled"}},
      {"output", {"path", "verbosity"}},
  };
  return keys;
}

std::map<std::string, Section> parse_ini(const std::string& text) {
  std::map<std::string, Section> sections;
  std::istringstream in(text);
  std::string raw;
  std::string current;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("section header is missing its closing ']'", line_no);
      current = trim(line.substr(1, line.size() - 2));
      if (!known_keys().count(current))
        throw ConfigError("unknown section [" + current + "]", line_no);
      sections[current];  // remember even if empty
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected 'key = value' or a [section] header", line_no);
    if (current.empty()) throw ConfigError("key before any [section] header", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", line_no);
    const auto& allowed = known_keys().at(current);
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError("unknown key '" + key + "' in [" + current + "]", line_no);
    auto [it, inserted] = sections[current].emplace(key, Value{value, line_no});
    if (!inserted)
      throw ConfigError("duplicate key '" + key + "' (first set on line " +
                            std::to_string(it->second.line) + ")",
                        line_no);
  }
  return sections;
}

// Scalar config numbers are constant expressions: no time variable, no state.
double parse_number_value(const std::string& text, int line) {
  if (trim(text).empty()) throw ConfigError("empty number", line);
  try {
    const ParsedExpr p = parse_field_expr(text, 0, false, "");
    const StateVec none;
    const double v = eval_expr(*p.root, 0.0, none, none);
    if (!std::isfinite(v)) throw ConfigError("number does not evaluate to a finite value", line);
    return v;
  } catch (const ParseError& e) {
    throw ConfigError(std::string("bad number: ") + e.what(), line);
  }
}

std::vector<std::string> split_any(const std::string& text, const char* seps) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t pos = text.find_first_of(seps, start);
    if (pos == std::string::npos) {
      parts.push_back(text.substr(start));
      break;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

std::vector<double> parse_number_list(const std::string& text, int line) {
  std::vector<double> out;
  for (const std::string& part : split_any(text, ",;")) out.push_back(parse_number_value(part, line));
  return out;
}

bool parse_bool(const std::string& text, int line) {
  if (text == "true" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "no" || text == "0") return false;
  throw ConfigError("expected a boolean (true/false/yes/no/1/0), got '" + text + "'", line);
}

int parse_int(const std::string& text, int line) {
  const double v = parse_number_value(text, line);
  const double r = std::nearbyint(v);
  if (std::abs(v - r) > 1e-9 || std::abs(r) > 2e9)
    throw ConfigError("expected an integer, got '" + text + "'", line);
  return static_cast<int>(r);
}

const Value* find(const Section* s, const std::string& key) {
  if (!s) return nullptr;
  auto it = s->find(key);
  return it == s->end() ? nullptr : &it->second;
}

// phi expressions are functions of theta on [-r, 0]; they land on the
// standard uniform grid with five-point-stencil slopes so the history
// interpolates smoothly.
HistorySegment phi_from_text(const std::string& text, int line, int dim, double r) {
  std::vector<ParsedExpr> comps;
  try {
    for (const std::string& part : split_any(text, ";")) comps.push_back(parse_field_expr(part, 0, false, "theta"));
  } catch (const ParseError& e) {
    throw ConfigError(std::string("bad phi expression: ") + e.what(), line);
  }
  if (static_cast<int>(comps.size()) != dim)
    throw ConfigError("phi has " + std::to_string(comps.size()) + " component(s), field expects " +
                          std::to_string(dim),
                      line);
  auto shared = std::make_shared<std::vector<ParsedExpr>>(std::move(comps));
  const StateVec none;
  const auto value_at = [shared, none](double theta) {
    StateVec v(static_cast<Eigen::Index>(shared->size()));
    for (std::size_t c = 0; c < shared->size(); ++c)
      v[static_cast<Eigen::Index>(c)] = eval_expr(*(*shared)[c].root, theta, none, none);
    return v;
  };
  const double h = 1e-4 * std::max(1.0, r);
  // explicit return type: the Eigen expression must collapse before the
  // operand temporaries go away
  const auto slope_at = [value_at, h](double theta) -> StateVec {
    return (-value_at(theta + 2.0 * h) + 8.0 * value_at(theta + h) - 8.0 * value_at(theta - h) +
            value_at(theta - 2.0 * h)) /
           (12.0 * h);
  };
  if (r == 0.0) return HistorySegment::constant(value_at(0.0), 0.0);
  return HistorySegment::from_callable_with_derivative(value_at, slope_at, r);
}

}  // namespace

RunSpec load_run_spec(const std::string& text, const CliOverrides& cli) {
  const auto sections = parse_ini(text);
  const auto section = [&sections](const char* name) -> const Section* {
    auto it = sections.find(name);
    return it == sections.end() ? nullptr : &it->second;
  };

  RunSpec spec;

  // [integrator]
  if (const Section* s = section("integrator")) {
    if (const Value* v = find(s, "h")) spec.integrator.h = parse_number_value(v->text, v->line);
    if (const Value* v = find(s, "blow_up_bound"))
      spec.integrator.blow_up_bound = parse_number_value(v->text, v->line);
    if (const Value* v = find(s, "max_nodes")) {
      const double n = parse_number_value(v->text, v->line);
      if (!(n >= 2.0) || n > 9e15 || n != std::floor(n))
        throw ConfigError("max_nodes must be an integer >= 2", v->line);
      spec.integrator.max_nodes = static_cast<std::size_t>(n);
    }
  }

  // [average]
  if (const Section* s = section("average")) {
    if (const Value* v = find(s, "mode")) {
      const auto mode = average_mode_from_string(v->text);
      if (!mode)
        throw ConfigError("unknown average mode '" + v->text +
                              "' (periodic, cesaro, almost_periodic)",
                          v->line);
      spec.average.mode = *mode;
    }
    if (const Value* v = find(s, "tol")) spec.average.tol = parse_number_value(v->text, v->line);
    if (const Value* v = find(s, "T0")) spec.average.T0 = parse_number_value(v->text, v->line);
    if (const Value* v = find(s, "T_max"))
      spec.average.T_max = parse_number_value(v->text, v->line);
    if (const Value* v = find(s, "n_quad")) spec.average.n_quad = parse_int(v->text, v->line);
    if (const Value* v = find(s, "probes"))
      spec.average.probes = parse_number_list(v->text, v->line);
  }

  // [sweep]
  if (const Section* s = section("sweep")) {
    if (const Value* v = find(s, "epsilons"))
      spec.sweep_epsilons = parse_number_list(v->text, v->line);
    if (const Value* v = find(s, "jobs")) {
      spec.jobs = parse_int(v->text, v->line);
      if (spec.jobs < 1) throw ConfigError("jobs must be at least 1", v->line);
    }
    if (const Value* v = find(s, "compare_scaled"))
      spec.compare_scaled = parse_bool(v->text, v->line);
  }

  // [output]
  if (const Section* s = section("output")) {
    if (const Value* v = find(s, "path")) spec.out_path = v->text;
    if (const Value* v = find(s, "verbosity")) {
      spec.verbosity = parse_int(v->text, v->line);
      if (spec.verbosity < 0 || spec.verbosity > 2)
        throw ConfigError("verbosity must be 0, 1, or 2", v->line);
    }
  }

  // [problem]
  const Section* prob = section("problem");
  if (!prob) throw ConfigError("config needs a [problem] section");

  double horizon = 0.0;
  if (const Value* v = find(prob, "L")) {
    horizon = parse_number_value(v->text, v->line);
    if (!(horizon > 0.0)) throw ConfigError("L must be positive", v->line);
  }
  std::optional<double> epsilon;
  if (const Value* v = find(prob, "epsilon"))
    epsilon = parse_number_value(v->text, v->line);

  if (const Value* cat = find(prob, "catalog")) {
    for (const char* key : {"class", "field", "r", "x0", "phi", "period"})
      if (const Value* v = find(prob, key))
        throw ConfigError(std::string("key '") + key + "' conflicts with catalog = " + cat->text,
                          v->line);
    const CatalogEntry& entry = catalog_entry(trim(cat->text));
    spec.catalog_name = entry.name;
    const double eps = cli.epsilon ? *cli.epsilon
                       : epsilon   ? *epsilon
                                   : 0.0;
    if (needs_epsilon(entry.equation_class) && !(eps > 0.0))
      throw ConfigError("catalog entry '" + entry.name +
                        "' needs epsilon (config key or --epsilon)");
    spec.problem = make_problem(entry, eps, cli.horizon ? *cli.horizon : horizon);
    spec.average.mode = find(section("average"), "mode") ? spec.average.mode : entry.average_mode;
  } else {
    const Value* cls = find(prob, "class");
    if (!cls) throw ConfigError("[problem] needs either catalog = <entry> or class = <equation class>");
    const auto eq = equation_class_from_string(cls->text);
    if (!eq)
      throw ConfigError("unknown equation class '" + cls->text + "'", cls->line);
    spec.problem.equation_class = *eq;

    const Value* fld = find(prob, "field");
    if (!fld) throw ConfigError("[problem] needs field = <expr>[; <expr>...]", cls->line);

    double r = 0.0;
    if (const Value* v = find(prob, "r")) {
      r = parse_number_value(v->text, v->line);
      if (r < 0.0) throw ConfigError("r must be nonnegative", v->line);
    }
    std::optional<double> period;
    if (const Value* v = find(prob, "period")) {
      period = parse_number_value(v->text, v->line);
      if (!(*period > 0.0)) throw ConfigError("period must be positive", v->line);
    }
    try {
      spec.problem.field = make_expr_field(split_any(fld->text, ";"), r, period);
    } catch (const ParseError& e) {
      throw ConfigError(std::string("bad field expression: ") + e.what(), fld->line);
    }
    spec.problem.r = is_delay_class(*eq) ? r : 0.0;
    spec.problem.horizon = cli.horizon ? *cli.horizon : horizon;
    spec.problem.epsilon = epsilon;

    if (is_delay_class(*eq)) {
      const Value* phi = find(prob, "phi");
      if (!phi) throw ConfigError("delay classes need phi = <expr in theta>", cls->line);
      spec.problem.phi = phi_from_text(phi->text, phi->line, spec.problem.field.dim, r);
      if (const Value* v = find(prob, "x0"))
        throw ConfigError("x0 belongs to point classes; delay classes take phi", v->line);
    } else {
      const Value* x0 = find(prob, "x0");
      if (!x0) throw ConfigError("point classes need x0 = <number list>", cls->line);
      const std::vector<double> vals = parse_number_list(x0->text, x0->line);
      spec.problem.x0 = Eigen::Map<const Eigen::VectorXd>(vals.data(),
                                                          static_cast<Eigen::Index>(vals.size()));
      if (const Value* v = find(prob, "phi"))
        throw ConfigError("phi belongs to delay classes; point classes take x0", v->line);
    }
  }

  // d is declarative: when present it must agree with the field's component count.
  if (const Value* v = find(prob, "d")) {
    const int d = parse_int(v->text, v->line);
    if (d < 1) throw ConfigError("d must be a positive integer", v->line);
    if (d != spec.problem.field.dim)
      throw ConfigError("d = " + std::to_string(d) + " but the field has " +
                            std::to_string(spec.problem.field.dim) + " component(s)",
                        v->line);
  }

  if (cli.epsilon) {
    if (!needs_epsilon(spec.problem.equation_class))
      throw ConfigError("--epsilon given, but this problem class takes no epsilon");
    spec.problem.epsilon = *cli.epsilon;
  }
  if (cli.horizon) spec.problem.horizon = *cli.horizon;
  if (spec.problem.horizon <= 0.0)
    throw ConfigError("problem needs a horizon: set L in [problem] or pass --L");
  if (cli.out) spec.out_path = *cli.out;
  if (cli.jobs) {
    if (*cli.jobs < 1) throw ConfigError("--jobs must be at least 1");
    spec.jobs = *cli.jobs;
  }

  validate_problem(spec.problem);
  return spec;
}

RunSpec load_run_spec_file(const std::string& path, const CliOverrides& cli) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_run_spec(buf.str(), cli);
}

}  // namespace avglab
