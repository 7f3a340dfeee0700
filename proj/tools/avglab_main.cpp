#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "avglab/catalog.hpp"
#include "avglab/config.hpp"
#include "avglab/expr.hpp"
#include "avglab/harness.hpp"

namespace {

using namespace avglab;

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_out(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write to '" + path + "'");
  out << content;
  if (!out.flush()) throw ConfigError("short write to '" + path + "'");
}

std::string join_csv(const StateVec& v) {
  std::string s;
  for (Eigen::Index c = 0; c < v.size(); ++c) {
    if (c) s += ',';
    s += fmt_g(v[c]);
  }
  return s;
}

int cmd_solve(const RunSpec& rs) {
  const Trajectory traj = solve(rs.problem, rs.integrator);
  if (rs.verbosity > 0)
    std::cerr << "solved " << to_string(rs.problem.equation_class) << " on [0, "
              << rs.problem.horizon << "], step " << effective_step(rs.problem, rs.integrator)
              << ", " << traj.node_count() << " nodes\n";
  write_out(rs.out_path, trajectory_csv(traj));
  return 0;
}

int cmd_average(const RunSpec& rs) {
  const FieldArg arg = is_delay_class(rs.problem.equation_class)
                           ? FieldArg(*rs.problem.phi)
                           : FieldArg(rs.problem.x0);
  const AverageEstimate est = estimate_average(rs.problem.field, arg, rs.average);
  std::string out;
  out += "mode = " + std::string(to_string(est.mode)) + "\n";
  out += "value = " + join_csv(est.value) + "\n";
  out += "horizon = " + fmt_g(est.horizon) + "\n";
  out += "residual = " + fmt_g(est.residual) + "\n";
  write_out(rs.out_path, out);
  return 0;
}

int cmd_sweep(const RunSpec& rs) {
  if (rs.sweep_epsilons.empty())
    throw ConfigError("sweep needs epsilons = <list> in a [sweep] section");
  SweepOptions opt;
  opt.integrator = rs.integrator;
  opt.average = rs.average;
  opt.jobs = rs.jobs > 0 ? rs.jobs
                         : std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
  opt.compare_scaled = rs.compare_scaled;
  opt.label = rs.catalog_name.empty() ? std::string(to_string(rs.problem.equation_class))
                                      : rs.catalog_name;
  const SweepReport report = epsilon_sweep(rs.problem, rs.sweep_epsilons, opt);
  if (rs.verbosity > 0) std::cerr << sweep_table(report);
  write_out(rs.out_path, sweep_csv(report));
  return 0;
}

int cmd_strobe(const RunSpec& rs) {
  if (!rs.problem.epsilon)
    throw ConfigError("strobe measures a fast solve against its averaged field; set epsilon");
  const double eps = *rs.problem.epsilon;
  const Trajectory traj = solve(rs.problem, rs.integrator);
  // The compressed-window class is measured against its lifted pointwise field.
  const FieldSpec averaged =
      rs.problem.equation_class == EquationClass::RfdeNormalForm
          ? build_averaged_field_lifted(rs.problem.field, rs.average)
          : build_averaged_field(rs.problem.field, rs.average);
  const std::vector<double> grid = strobe_grid(rs.problem.horizon, std::sqrt(eps));
  const StroboscopicReport rep = stroboscopic_residual(traj, averaged, eps, grid);
  if (rs.verbosity > 0)
    std::cerr << "alpha = " << rep.alpha << ", max residual = " << rep.max_residual
              << ", skipped = " << rep.skipped << "\n";
  std::string out = "t,residual\n";
  for (std::size_t i = 0; i < rep.times.size(); ++i)
    out += fmt_g(rep.times[i]) + "," + fmt_g(rep.residuals[i]) + "\n";
  write_out(rs.out_path, out);
  return 0;
}

int cmd_catalog(const std::string& name) {
  if (name.empty()) {
    for (const CatalogEntry& e : catalog()) {
      std::printf("%-18s %-16s r=%-4g L=%-4g %s\n", e.name.c_str(),
                  std::string(to_string(e.equation_class)).c_str(), e.r, e.horizon,
                  e.description.c_str());
    }
    return 0;
  }
  const CatalogEntry& e = catalog_entry(name);
  std::printf("name:        %s\n", e.name.c_str());
  std::printf("description: %s\n", e.description.c_str());
  std::printf("class:       %s\n", std::string(to_string(e.equation_class)).c_str());
  std::printf("dim:         %d\n", e.field.dim);
  std::printf("field:       ");
  for (std::size_t i = 0; i < e.field_text.size(); ++i)
    std::printf("%s%s", i ? "; " : "", e.field_text[i].c_str());
  std::printf("\n");
  if (e.field.period) std::printf("period:      %.17g\n", *e.field.period);
  if (!e.phi_text.empty()) std::printf("phi:         %s\n", e.phi_text.c_str());
  std::printf("r:           %g\n", e.r);
  std::printf("horizon:     %g\n", e.horizon);
  std::printf("average:     %s\n", std::string(to_string(e.average_mode)).c_str());
  std::printf("closed forms:%s%s\n", e.exact ? " fast" : "",
              e.exact_averaged ? " averaged" : "");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"averaging laboratory for fast-oscillating ODEs and delay equations"};
  app.require_subcommand(1);

  std::string config_path;
  std::string catalog_name;
  double eps_val = 0.0;
  double horizon_val = 0.0;
  std::string out_val;
  int jobs_val = 1;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "INI problem description")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--epsilon", eps_val, "override the problem epsilon");
    cmd->add_option("--L", horizon_val, "override the horizon");
    cmd->add_option("--out", out_val, "write results here instead of stdout");
    cmd->add_option("--jobs", jobs_val, "parallel rows for sweeps");
  };

  CLI::App* solve_cmd = app.add_subcommand("solve", "integrate the problem, emit t,x1,... CSV");
  add_common(solve_cmd);
  CLI::App* average_cmd =
      app.add_subcommand("average", "estimate the averaged field at the initial state");
  add_common(average_cmd);
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "solve across epsilons, emit the convergence CSV");
  add_common(sweep_cmd);
  CLI::App* strobe_cmd = app.add_subcommand(
      "strobe", "finite-difference defect of the averaged equation along a fast solve");
  add_common(strobe_cmd);
  CLI::App* catalog_cmd = app.add_subcommand("catalog", "list built-in problems");
  catalog_cmd->add_option("name", catalog_name, "show one entry in detail");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (catalog_cmd->parsed()) return cmd_catalog(catalog_name);

    // each subcommand owns its copy of the shared flags; ask the one that ran
    CLI::App* active = solve_cmd->parsed()     ? solve_cmd
                       : average_cmd->parsed() ? average_cmd
                       : sweep_cmd->parsed()   ? sweep_cmd
                                               : strobe_cmd;
    CliOverrides cli;
    if (active->count("--epsilon")) cli.epsilon = eps_val;
    if (active->count("--L")) cli.horizon = horizon_val;
    if (active->count("--out")) cli.out = out_val;
    if (active->count("--jobs")) cli.jobs = jobs_val;
    const RunSpec rs = load_run_spec_file(config_path, cli);

    if (solve_cmd->parsed()) return cmd_solve(rs);
    if (average_cmd->parsed()) return cmd_average(rs);
    if (sweep_cmd->parsed()) return cmd_sweep(rs);
    if (strobe_cmd->parsed()) return cmd_strobe(rs);
    std::cerr << "error: no subcommand\n";
    return 1;
  } catch (const BlowUpError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NoAverageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const NotAlmostPeriodicError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
}
