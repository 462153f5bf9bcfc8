#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <utility>

namespace quermass {

// Deterministic random source.  All distributions are drawn through the
// hand-rolled methods below rather than <random> distribution objects, whose
// output is implementation-defined; results are therefore reproducible for a
// given seed across compilers.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + uniform01() * (b - a); }

  // Index uniform on [0, n); modulo bias is below 1e-15 for any n used here.
  std::size_t uniform_index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

  // Pair of independent standard normals (Box-Muller).
  std::pair<double, double> normal2() {
    double u1 = uniform01();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log1p(-u1));
    double a = 6.283185307179586476925286766559 * u2;
    return {r * std::cos(a), r * std::sin(a)};
  }

 private:
  std::mt19937_64 engine_;
};

// Derives an independent stream seed from a master seed, a stream name and a
// counter.  Each replicate / task gets its own generator so that results do
// not depend on scheduling order.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream, std::uint64_t index);

}  // namespace quermass
