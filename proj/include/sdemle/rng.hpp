#pragma once

#include <array>
#include <cstdint>

namespace sdemle {

/// Philox-style 4x32 counter-based block cipher, 10 rounds. Stateless: the
/// j-th variate of a keyed stream is a pure function of (key, stream, j), so
/// replicate streams are independent and order-insensitive under parallel
/// execution.
std::array<std::uint32_t, 4> philox4x32(std::uint64_t key, std::uint64_t ctr_hi,
                                        std::uint64_t ctr_lo);

/// Random-access stream of iid variates keyed by (seed, stream).
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  /// Uniform draw in the open interval (0, 1).
  double uniform(std::uint64_t i) const;

  /// Standard normal draw (Box-Muller on one counter block).
  double normal(std::uint64_t i) const;

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
};

/// Per-replicate seed derivation: seed XOR replicate index.
inline std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t replicate) {
  return seed ^ replicate;
}

}  // namespace sdemle
