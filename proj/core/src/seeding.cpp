#include "ghzqec/seeding.hpp"

namespace ghzqec {

namespace {
constexpr uint64_t kGamma = 0x9E3779B97F4A7C15ull;
}

uint64_t splitmix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

uint64_t derive_seed(uint64_t master, uint64_t index) { return splitmix64(master + (index + 1) * kGamma); }

uint64_t derive_seed(uint64_t master, uint64_t a, uint64_t b) { return derive_seed(derive_seed(master, a), b); }

std::mt19937_64 make_rng(uint64_t master, uint64_t index) {
  return std::mt19937_64(derive_seed(master, index));
}

}  // namespace ghzqec
