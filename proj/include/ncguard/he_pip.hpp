#pragma once

// Benaloh additively homomorphic encryption with plaintext space Z_r (r the
// coding field modulus), and the private inner product exchange built on it:
// the controller sends Enc(r_1..r_L), the source answers prod c_i^{v_i}, and
// the controller decrypts r . v without the source learning r.

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <gmpxx.h>

#include "ncguard/random.hpp"

namespace ncguard {

class Transcript;

/// Largest block size accepted; decryption is a discrete log in a group of order r.
inline constexpr std::uint64_t kMaxBlockSize = std::uint64_t{1} << 20;

struct BenalohPublicKey {
  mpz_class N;
  mpz_class y;
  std::uint64_t r = 0;

  unsigned modulus_bits() const;
  /// Fixed wire width of a ciphertext: ceil(|N| / 8).
  std::size_t ciphertext_bytes() const;
};

class BenalohKeyPair {
 public:
  BenalohKeyPair(BenalohPublicKey pk, mpz_class p, mpz_class q);

  const BenalohPublicKey& pk() const { return pk_; }
  const mpz_class& phi() const { return phi_; }

  /// Throws DecryptionFailure when c is not a unit mod N.
  std::uint64_t decrypt(const mpz_class& c) const;

 private:
  struct DlogTable;

  BenalohPublicKey pk_;
  mpz_class p_, q_, phi_, exp_;  // exp_ = phi / r
  std::shared_ptr<const DlogTable> dlog_;
};

/// N = p q' with |p| = |q'| = modulus_bits / 2, r | p - 1, gcd(r, (p-1)/r) = 1,
/// gcd(r, q' - 1) = 1. r must be a prime no larger than 2^20.
BenalohKeyPair benaloh_keygen(std::uint64_t r, unsigned modulus_bits, Rng& rng);

/// y^m u^r mod N with u uniform in Z_N^*.
mpz_class he_enc(const BenalohPublicKey& pk, std::uint64_t m, Rng& rng);
std::uint64_t he_dec(const BenalohKeyPair& kp, const mpz_class& c);
/// Enc(m1) * Enc(m2) -> Enc(m1 + m2)
mpz_class he_add(const BenalohPublicKey& pk, const mpz_class& c1, const mpz_class& c2);
/// Enc(m)^k -> Enc(k m)
mpz_class he_scale(const BenalohPublicKey& pk, const mpz_class& c, std::uint64_t k);
/// Multiply by a fresh encryption of zero.
mpz_class he_rerandomize(const BenalohPublicKey& pk, const mpz_class& c, Rng& rng);

std::vector<mpz_class> pip_encrypt(const BenalohPublicKey& pk, std::span<const std::uint64_t> r, Rng& rng);
/// Source side: prod enc_r[i]^{v[i]}, re-randomized.
mpz_class pip_respond(const BenalohPublicKey& pk, std::span<const mpz_class> enc_r,
                      std::span<const std::uint64_t> v, Rng& rng);
std::uint64_t pip_finish(const BenalohKeyPair& kp, const mpz_class& w);

/// One complete exchange; logs the encrypted vector and the reply when a
/// transcript is given.
std::uint64_t pip_round(const BenalohKeyPair& kp, std::span<const std::uint64_t> r,
                        std::span<const std::uint64_t> v, Rng& rng, Transcript* log = nullptr);

}  // namespace ncguard
