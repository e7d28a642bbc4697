#pragma once

// Deterministic randomness helpers. std::mt19937_64 is fully specified by the
// standard, but the distributions are not, so bounded draws and shuffles are
// implemented here to keep generated instances byte-identical everywhere.

#include <cstdint>
#include <random>
#include <vector>

namespace ripcert {

class Prng {
 public:
  explicit Prng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, n) by rejection; n must be positive.
  std::uint64_t bounded(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  bool coin() { return (engine_() & 1u) != 0; }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(bounded(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // Uniform in [-1, 1] with 53 random bits; for test-matrix generation.
  double unit_real() {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return 2.0 * u - 1.0;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ripcert
