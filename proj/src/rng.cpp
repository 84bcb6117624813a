#include "sdemle/rng.hpp"

#include <cmath>
#include <numbers>

namespace sdemle {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline double u64_to_unit(std::uint64_t u) {
  // 53 mantissa bits, shifted into the open interval (0,1)
  return (static_cast<double>(u >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::uint64_t key, std::uint64_t ctr_hi,
                                        std::uint64_t ctr_lo) {
  std::uint32_t k0 = static_cast<std::uint32_t>(key);
  std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
  std::array<std::uint32_t, 4> x{
      static_cast<std::uint32_t>(ctr_lo), static_cast<std::uint32_t>(ctr_lo >> 32),
      static_cast<std::uint32_t>(ctr_hi), static_cast<std::uint32_t>(ctr_hi >> 32)};
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, x[0], hi0, lo0);
    mulhilo(kMul1, x[2], hi1, lo1);
    x = {hi1 ^ x[1] ^ k0, lo1, hi0 ^ x[3] ^ k1, lo0};
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return x;
}

double CounterRng::uniform(std::uint64_t i) const {
  const auto b = philox4x32(seed_, stream_, i);
  return u64_to_unit((static_cast<std::uint64_t>(b[0]) << 32) | b[1]);
}

double CounterRng::normal(std::uint64_t i) const {
  const auto b = philox4x32(seed_, stream_, i);
  const double u1 = u64_to_unit((static_cast<std::uint64_t>(b[0]) << 32) | b[1]);
  const double u2 = u64_to_unit((static_cast<std::uint64_t>(b[2]) << 32) | b[3]);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace sdemle
