#ifndef PVFIT_RNG_HPP
#define PVFIT_RNG_HPP

#include <concepts>
#include <cstdint>
#include <random>

namespace pvfit {

/// Anything that yields uniform variates for the evolutionary operators.
/// Tests substitute scripted streams through this interface.
template <class R>
concept UniformSource = requires(R& r, std::size_t n) {
  { r.unit() } -> std::convertible_to<double>;
  { r.index(n) } -> std::convertible_to<std::size_t>;
};

/// Seeded uniform stream on top of std::mt19937_64. The engine's output
/// sequence is pinned by the language standard, and the mappings below avoid
/// std::uniform_*_distribution (whose algorithms are implementation-defined),
/// so a seed reproduces the same run on every platform.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1), 53 random bits.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform index in [0, n).
  std::size_t index(std::size_t n) {
    const auto k = static_cast<std::size_t>(unit() * static_cast<double>(n));
    return k < n ? k : n - 1;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pvfit

#endif  // PVFIT_RNG_HPP
