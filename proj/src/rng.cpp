#include "fracwave/rng.hpp"

#include <cmath>
#include <numbers>

namespace fracwave {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

std::array<std::uint32_t, 4> make_counter(std::uint64_t realization, int l, int m, DrawRole role) {
  // m is offset so negative orders map to distinct words.
  return {static_cast<std::uint32_t>(l), static_cast<std::uint32_t>(m + 0x40000000),
          static_cast<std::uint32_t>(realization),
          (static_cast<std::uint32_t>(realization >> 32) << 4) ^ static_cast<std::uint32_t>(role)};
}

double to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 21) ^ (lo >> 11);
  const std::uint64_t b53 = bits & ((1ULL << 53) - 1);
  return (static_cast<double>(b53) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

double RngStream::uniform(std::uint64_t realization, int l, int m, DrawRole role) const {
  const auto out = philox4x32(make_counter(realization, l, m, role),
                              {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
  return to_unit(out[0], out[1]);
}

double RngStream::normal(std::uint64_t realization, int l, int m, DrawRole role) const {
  const auto out = philox4x32(make_counter(realization, l, m, role),
                              {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
  // Box-Muller, cosine branch.
  const double u1 = to_unit(out[0], out[1]);
  const double u2 = to_unit(out[2], out[3]);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace fracwave
