#ifndef THINHOM_ERRORS_HPP
#define THINHOM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace thinhom {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid profile, mesh parameters or a failed geometric lookup.
class MeshError : public Error {
public:
  using Error::Error;
};

/// Non-finite values encountered while assembling on a triangle/element.
class AssemblyError : public Error {
public:
  AssemblyError(const std::string& what, long element)
      : Error(what + " (element " + std::to_string(element) + ")"), element_(element) {}
  long element() const noexcept { return element_; }

private:
  long element_;
};

/// Newton or linear solver failure (stagnation, non-convergence, indefiniteness).
class SolverError : public Error {
public:
  using Error::Error;
};

/// Invalid configuration value or unparsable configuration file.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// File could not be read or written.
class IoError : public Error {
public:
  using Error::Error;
};

} // namespace thinhom

#endif // THINHOM_ERRORS_HPP
