#pragma once

// Discrete-log homomorphic hash over a Schnorr subgroup of Z_P^*, plus the
// per-packet commitment pairs (homomorphic hash, SHA-256 digest) used by the
// hash-based detector.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <gmpxx.h>

#include "ncguard/bytes.hpp"
#include "ncguard/coding.hpp"

namespace ncguard {

struct HdlParams {
  mpz_class P;  // group prime, q | P - 1
  mpz_class q;  // subgroup order, equal to the coding field modulus
  std::vector<mpz_class> gens;

  std::size_t n() const { return gens.size(); }
  /// Wire width of one group element.
  std::size_t element_bytes() const;
};

/// Group prime size for a security level: 1024 bits up to 160, 2048 up to 224,
/// 3072 beyond.
unsigned hdl_group_bits(unsigned lambda);

/// P = k*q + 1 prime with exactly `p_bits` bits. Throws ParameterGenFailure
/// after a bounded number of candidates.
mpz_class find_group_prime(const mpz_class& q, unsigned p_bits, Rng& rng);

/// n generators h^((P-1)/q) of the order-q subgroup, rejecting 1.
std::vector<mpz_class> derive_generators(const mpz_class& P, const mpz_class& q, std::size_t n, Rng& rng);

/// Setup for a given field modulus q. Requires q > 2^lambda. `p_bits` = 0
/// selects hdl_group_bits(lambda).
HdlParams hdl_setup(unsigned lambda, std::size_t n, const mpz_class& q, Rng& rng, unsigned p_bits = 0);

/// Setup over an existing group (P, q), e.g. the toy group P = 23, q = 11.
HdlParams hdl_setup_group(const mpz_class& P, const mpz_class& q, std::size_t n, Rng& rng);

/// Validates explicit parameters (primality, q | P-1, generator orders).
HdlParams hdl_from_generators(const mpz_class& P, const mpz_class& q, std::vector<mpz_class> gens);

/// |q| = 256, |P| = 2048 with a fresh random q.
HdlParams hdl_setup_nist_like(std::size_t n, Rng& rng);

/// prod g_i^{v_i} mod P.
mpz_class hdl_hash(const HdlParams& pp, std::span<const mpz_class> data);
mpz_class hdl_hash(const HdlParams& pp, const GfVector& data);

/// prod g_i^{y_i} == prod h_k^{beta_k} (mod P).
bool hdl_test(const HdlParams& pp, std::span<const mpz_class> data, std::span<const mpz_class> beta,
              std::span<const mpz_class> hashes);
bool hdl_test(const HdlParams& pp, const GfVector& data, const GfVector& beta,
              std::span<const mpz_class> hashes);

/// SHA-256 of the big-endian symbol encoding of a data vector.
Digest traditional_hash(const GfVector& data);
Digest traditional_hash(std::span<const std::uint8_t> bytes);

struct CommitmentEntry {
  std::size_t i = 0, j = 0;
  mpz_class h;
  Digest hbar{};
};

/// One entry per source packet, indexed by position g*i + j.
class HashCommitment {
 public:
  HashCommitment(SpaceId id, std::vector<CommitmentEntry> entries);
  static HashCommitment build(const HdlParams& pp, const SourceSpace& space);

  const SpaceId& gen_id() const { return id_; }
  std::size_t size() const { return entries_.size(); }
  const CommitmentEntry& at(std::size_t position) const;
  const std::vector<CommitmentEntry>& entries() const { return entries_; }
  std::vector<mpz_class> hashes() const;

  /// Line-delimited records {gen_id, i, j, h, hbar}, h as big-endian hex.
  void write_jsonl(std::ostream& out) const;
  static HashCommitment read_jsonl(std::istream& in, const GenerationParams& params);

 private:
  SpaceId id_;
  std::vector<CommitmentEntry> entries_;
};

}  // namespace ncguard
