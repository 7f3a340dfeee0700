#pragma once

#include <optional>
#include <string>
#include <vector>

#include "avglab/harness.hpp"

namespace avglab {

/// Command-line values that take precedence over the config file.
struct CliOverrides {
  std::optional<double> epsilon;
  std::optional<double> horizon;
  std::optional<std::string> out;
  std::optional<int> jobs;
};

/// Everything a run needs, assembled from one INI config plus overrides.
struct RunSpec {
  ProblemSpec problem;
  IntegratorConfig integrator;
  AverageConfig average;
  std::vector<double> sweep_epsilons;  // empty unless [sweep] epsilons given
  bool compare_scaled = false;
  int jobs = 0;  // 0 resolves to the core count at the point of use
  int verbosity = 1;  // 0 silences progress chatter on stderr
  std::string out_path;  // empty writes to stdout
  std::string catalog_name;  // set when [problem] came from the catalog
};

/// Parse an INI text. Sections are [problem], [integrator], [average],
/// [sweep], [output]; unknown sections, unknown keys, and duplicate keys are
/// ConfigErrors carrying the line number. Lines whose first non-blank char is
/// '#' are comments ('#' is not special elsewhere: ';' separates expression
/// components inside values, so there are no inline comments).
///
/// Scalar numbers are constant expressions ("pi/4", "1e-3"); lists split on
/// ',' or ';'. A [problem] either names `catalog = <entry>` (combinable only
/// with epsilon and L) or spells out class/field/... with initial histories
/// given as expressions in `theta`, sampled onto the standard history grid.
[[nodiscard]] RunSpec load_run_spec(const std::string& text, const CliOverrides& cli = {});

/// Same from a file path.
[[nodiscard]] RunSpec load_run_spec_file(const std::string& path, const CliOverrides& cli = {});

}  // namespace avglab
