#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sdemle {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid configuration or arguments (bad bounds, delta out of range, ...).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// Simulation state became non-finite or exceeded the divergence guard.
class SimulationDiverged : public Error {
 public:
  SimulationDiverged(const std::string& msg, std::size_t step)
      : Error(msg + " (step " + std::to_string(step) + ")"), step_index(step) {}
  std::size_t step_index;
};

/// Density truncation search failed: the drift does not pull back to the bulk.
class ErgodicityViolation : public Error {
 public:
  explicit ErgodicityViolation(const std::string& msg) : Error(msg) {}
};

/// Fisher information (quadrature or empirical) is numerically singular.
class DegenerateInformation : public Error {
 public:
  explicit DegenerateInformation(const std::string& msg) : Error(msg) {}
};

/// Learning window too short for a preliminary estimate.
class InsufficientData : public Error {
 public:
  explicit InsufficientData(const std::string& msg) : Error(msg) {}
};

/// Moment preliminary hit a degenerate statistic (e.g. zero second moment).
class DegeneratePreliminary : public Error {
 public:
  explicit DegeneratePreliminary(const std::string& msg) : Error(msg) {}
};

/// Requested tau lies outside [tau_delta, 1] or the path horizon.
class WindowError : public Error {
 public:
  explicit WindowError(const std::string& msg) : Error(msg) {}
};

/// Adaptive quadrature failed to converge.
class QuadratureFailure : public Error {
 public:
  explicit QuadratureFailure(const std::string& msg) : Error(msg) {}
};

}  // namespace sdemle
