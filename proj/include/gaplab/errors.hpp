#ifndef GAPLAB_ERRORS_HPP
#define GAPLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gaplab {

// Every failure mode gets its own type so callers can react selectively
// (the coupling stepper catches BoundaryError, the CLI catches ParseError,
// tests assert on exact types). All carry a human-readable message.

struct PoleError : std::runtime_error {
  explicit PoleError(const std::string& m) : std::runtime_error(m) {}
};

struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& m) : std::runtime_error(m) {}
};

struct AntipodalError : std::runtime_error {
  explicit AntipodalError(const std::string& m) : std::runtime_error(m) {}
};

struct CoincidentError : std::runtime_error {
  explicit CoincidentError(const std::string& m) : std::runtime_error(m) {}
};

struct ConvergenceError : std::runtime_error {
  explicit ConvergenceError(const std::string& m) : std::runtime_error(m) {}
};

struct DegenerateError : std::runtime_error {
  explicit DegenerateError(const std::string& m) : std::runtime_error(m) {}
};

struct BoundaryError : std::runtime_error {
  explicit BoundaryError(const std::string& m) : std::runtime_error(m) {}
};

struct StuckError : std::runtime_error {
  explicit StuckError(const std::string& m) : std::runtime_error(m) {}
};

struct InsufficientSamplesError : std::runtime_error {
  explicit InsufficientSamplesError(const std::string& m)
      : std::runtime_error(m) {}
};

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& m) : std::runtime_error(m) {}
};

struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& m) : std::runtime_error(m) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& m) : std::runtime_error(m) {}
};

}  // namespace gaplab

#endif
