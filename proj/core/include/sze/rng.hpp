#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace sze {

/// Seeded generator with platform-independent draws.
///
/// std::uniform_*_distribution and std::shuffle are implementation defined,
/// which would make CSV outputs differ between standard libraries. Every
/// draw here is derived from the raw 64-bit engine output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream for a sub-task, keyed by the parent seed and `stream`.
  static Rng derive(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). `bound` must be positive.
  std::size_t index(std::size_t bound);

  /// Uniform real in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double normal();

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 finalizer; used to mix seeds and stream ids.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace sze
