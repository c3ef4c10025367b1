#ifndef MAGNLS_ERRORS_HPP
#define MAGNLS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace magnls {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid parameter value (p < 1 norms, m = 0 truncation, bad config ranges).
class InvalidParameter : public Error {
public:
  explicit InvalidParameter(const std::string& what) : Error(what) {}
};

/// Operands live on different grids or have incompatible dimension.
class DimensionError : public Error {
public:
  explicit DimensionError(const std::string& what) : Error(what) {}
};

/// Configuration file problem; carries the offending section/key.
class ConfigError : public Error {
public:
  ConfigError(std::string section, std::string key, const std::string& what)
      : Error("[" + section + "] " + key + ": " + what),
        section(std::move(section)), key(std::move(key)) {}
  std::string section;
  std::string key;
};

/// The iterative Crank-Nicolson solve failed to reach tolerance.
class SolverDivergence : public Error {
public:
  SolverDivergence(double residual, int iterations)
      : Error("linear solve did not converge: residual " +
              std::to_string(residual) + " after " +
              std::to_string(iterations) + " iterations"),
        residual(residual), iterations(iterations) {}
  double residual;
  int iterations;
};

/// Requested run cannot be performed honestly at the given resolution.
class ResolutionError : public Error {
public:
  ResolutionError(const std::string& what, int required_n)
      : Error(what), required_n(required_n) {}
  int required_n;
};

} // namespace magnls

#endif
