#pragma once

#include <cstdint>
#include <random>

namespace ghzqec {

// SplitMix64 finalizer; a bijection on 64-bit words.
uint64_t splitmix64(uint64_t x);

// Counter-based stream id: splitmix64(master + (index + 1) * golden gamma).
// Distinct indices under one master never collide.
uint64_t derive_seed(uint64_t master, uint64_t index);

// Two-level derivation, e.g. (master, point) then (point seed, shot).
uint64_t derive_seed(uint64_t master, uint64_t a, uint64_t b);

std::mt19937_64 make_rng(uint64_t master, uint64_t index);

}  // namespace ghzqec
