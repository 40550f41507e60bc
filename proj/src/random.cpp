#include "ncguard/random.hpp"

#include "ncguard/field.hpp"

namespace ncguard {

namespace {

mpz_class random_words(Rng& rng, std::size_t words) {
  mpz_class r = 0;
  for (std::size_t i = 0; i < words; ++i) {
    r <<= 64;
    const std::uint64_t w = rng();
    r += mpz_class(static_cast<unsigned long>(w >> 32)) * mpz_class(4294967296UL) +
         mpz_class(static_cast<unsigned long>(w & 0xffffffffu));
  }
  return r;
}

}  // namespace

mpz_class uniform_below(Rng& rng, const mpz_class& bound) {
  require(bound > 0, Errc::InvalidArgument, "empty range");
  const unsigned bits = bit_length(bound);
  const std::size_t words = (bits + 63) / 64;
  const unsigned excess = static_cast<unsigned>(words * 64 - bits);
  for (;;) {
    mpz_class r = random_words(rng, words);
    r >>= excess;
    if (r < bound) return r;
  }
}

mpz_class random_bits_exact(Rng& rng, unsigned bits) {
  require(bits >= 1, Errc::InvalidArgument, "bits must be positive");
  const std::size_t words = (bits + 63) / 64;
  mpz_class r = random_words(rng, words);
  r >>= static_cast<unsigned>(words * 64 - bits);
  mpz_setbit(r.get_mpz_t(), bits - 1);
  return r;
}

}  // namespace ncguard
