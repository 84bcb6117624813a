#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdemle/vec.hpp"

namespace sdemle {

/// Uniform-grid discrete observation record of one trajectory on [0, T].
struct SamplePath {
  double t0 = 0.0;
  double h = 0.0;
  std::vector<double> values;  // X_0 ... X_N
  std::optional<ParamVec> theta_true;
  std::uint64_t seed = 0;

  std::size_t n_steps() const { return values.empty() ? 0 : values.size() - 1; }
  double horizon() const { return h * static_cast<double>(n_steps()); }
  double time_at(std::size_t j) const { return t0 + h * static_cast<double>(j); }

  void validate() const;  // throws ConfigError on malformed records
};

/// CSV serialization (columns t,x; leading comment line carries metadata).
void write_path_csv(const SamplePath& path, const std::string& file);
SamplePath read_path_csv(const std::string& file);

/// Compact binary record: header (h, N, seed, theta), payload of 64-bit
/// floats. Round trips bit-exactly.
void write_path_binary(const SamplePath& path, const std::string& file);
SamplePath read_path_binary(const std::string& file);

}  // namespace sdemle
