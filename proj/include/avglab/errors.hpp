#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "avglab/types.hpp"

namespace avglab {

/// Common base so callers can catch everything this library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Query outside the domain an object was built on (segment theta, trajectory
/// time, history window escaping the computed interval).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid user input: malformed config text, precondition violations on
/// numeric parameters, unknown names. Carries the config line when known.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what, std::optional<int> line = std::nullopt)
      : Error(line ? "line " + std::to_string(*line) + ": " + what : what), line(line) {}
  std::optional<int> line;
};

/// Numerical escape: a solution left the guard ball or went non-finite.
class BlowUpError : public Error {
 public:
  BlowUpError(double escape_time, double bound)
      : Error("solution exceeded bound " + std::to_string(bound) + " at t = " +
              std::to_string(escape_time)),
        escape_time(escape_time),
        bound(bound) {}
  double escape_time;
  double bound;
};

/// The doubling estimator hit T_max without two consecutive quiet doublings.
/// Carries the last two iterates so callers can report how far apart they are.
class NoAverageError : public Error {
 public:
  NoAverageError(StateVec last, StateVec previous, double horizon)
      : Error("no limit average detected up to T = " + std::to_string(horizon)),
        last(std::move(last)),
        previous(std::move(previous)),
        horizon(horizon) {}
  StateVec last;
  StateVec previous;
  double horizon;
};

/// Start-point probes of the sliding average disagree beyond 10x tolerance.
class NotAlmostPeriodicError : public Error {
 public:
  NotAlmostPeriodicError(double spread, double tol)
      : Error("start-point probes disagree by " + std::to_string(spread) +
              " (allowed 10*tol = " + std::to_string(10 * tol) + ")"),
        spread(spread) {}
  double spread;
};

/// A bug surfaced (broken internal invariant), as opposed to bad input.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace avglab
