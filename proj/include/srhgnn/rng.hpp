#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace srhgnn {

/// Seeded generator whose derived draws are identical on every platform.
///
/// std::uniform_*_distribution are implementation defined, so all draws here
/// are built directly on the raw 64-bit output of mt19937_64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Child generator for a named stream; the same (root, name) pair always
  /// yields the same sequence.
  static Rng stream(std::uint64_t root_seed, std::string_view name,
                    std::uint64_t index = 0);

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n). n must be positive.
  std::size_t index(std::size_t n);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller.
  double normal();

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[index(i)]);
    }
  }

  /// Uniform random permutation of {0..n-1}.
  std::vector<std::size_t> permutation(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t mix_seed(std::uint64_t root, std::string_view name,
                       std::uint64_t index);

}  // namespace srhgnn
