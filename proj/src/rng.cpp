#include "quermass/rng.hpp"

namespace quermass {

namespace {

// SplitMix64 finaliser; full 64-bit avalanche.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::string_view stream, std::uint64_t index) {
  std::uint64_t h = 0xCBF29CE484222325ull;  // FNV-1a over the stream name
  for (char c : stream) h = (h ^ static_cast<unsigned char>(c)) * 0x100000001B3ull;
  return mix(mix(master ^ h) + index);
}

}  // namespace quermass
