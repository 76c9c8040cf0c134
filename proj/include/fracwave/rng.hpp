#pragma once

#include <array>
#include <cstdint>

namespace fracwave {

enum class DrawRole : std::uint32_t { initial = 1, noise = 2, aux = 3 };

/// Philox4x32-10 block function.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Keyed standard-normal stream: the draw for (seed, realization, l, m, role)
/// is a pure function of those values, so any evaluation order or thread count
/// reproduces it exactly.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  double normal(std::uint64_t realization, int l, int m, DrawRole role) const;
  /// Uniform in (0, 1) with 53 random bits.
  double uniform(std::uint64_t realization, int l, int m, DrawRole role) const;

 private:
  std::uint64_t seed_;
};

}  // namespace fracwave
