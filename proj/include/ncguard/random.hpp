#pragma once

#include <cstdint>
#include <random>

#include <gmpxx.h>

namespace ncguard {

/// Every randomized routine takes its stream explicitly so runs replay from a seed.
using Rng = std::mt19937_64;

inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(rng);
}

/// Uniform in [0, bound) for an arbitrary-precision bound (rejection on whole words).
mpz_class uniform_below(Rng& rng, const mpz_class& bound);

/// Uniform integer with exactly `bits` bits (top bit set).
mpz_class random_bits_exact(Rng& rng, unsigned bits);

}  // namespace ncguard
