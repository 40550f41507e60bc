#pragma once

// Controller-driven commitment protocols:
//   CPK - the controller learns encrypted inner products of its per-source
//         vectors with every source packet, then hands each packet padding
//         symbols that make it orthogonal to every other source's vector;
//         those vectors become the multi-source MAC keys.
//   PM  - the controller issues SpaceMac tags t = r . v without revealing r.
// Plus the SpaceMac scheme and its forgery game.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ncguard/coding.hpp"
#include "ncguard/he_pip.hpp"
#include "ncguard/intermac.hpp"
#include "ncguard/prf.hpp"
#include "ncguard/transcript.hpp"

namespace ncguard {

/// How the controller learns an inner product with a source's private vector.
/// Benaloh is the private exchange; Clear hands the vector over unencrypted and
/// exists for fields above the Benaloh block-size limit.
class IpChannel {
 public:
  static IpChannel benaloh(BenalohKeyPair kp);
  static IpChannel clear(Gf field);

  bool is_private() const { return kp_.has_value(); }
  std::size_t element_bytes() const;
  const BenalohKeyPair& keypair() const;

  struct Offer {
    std::vector<mpz_class> items;
  };

  /// Controller -> source; logged as an encrypted vector.
  Offer offer(std::span<const std::uint64_t> r, const std::string& to, Rng& rng, Transcript* log) const;
  /// Source -> controller; logged as an encrypted inner product.
  mpz_class respond(const Offer& offer, std::span<const std::uint64_t> v, const std::string& from, Rng& rng,
                    Transcript* log) const;
  /// Throws DecryptionFailure on a malformed reply.
  std::uint64_t finish(const mpz_class& reply) const;
  /// Logs the public key once per recipient (private channel only).
  void announce(const std::string& to, Transcript* log) const;

 private:
  IpChannel(std::optional<BenalohKeyPair> kp, Gf field) : kp_(std::move(kp)), field_(field) {}

  std::optional<BenalohKeyPair> kp_;
  Gf field_;
};

enum class SourceBehavior { Honest, Malformed, Withhold };

std::string source_label(std::size_t i);

// ---------------------------------------------------------------- CPK

/// Controller vector of source i: r^(c) = F(k, id, i, c[, epoch]), c in [0, width).
GfVector cpk_vector(const Prf& prf, const SpaceId& id, std::size_t i, std::size_t width, const Gf& f,
                    std::uint64_t epoch);

struct CpkOptions {
  /// Behaviour per original source index; missing entries are honest.
  std::vector<SourceBehavior> behavior;
  std::uint64_t max_epochs = 64;
};

struct CpkResult {
  GenerationParams params;                // padded layout over the participating sources
  std::vector<std::size_t> participants;  // original indices, in layout order
  std::vector<std::size_t> excluded;
  std::vector<Packet> packets;            // padded source packets, by position
  KeySet keys;                            // k_p = r_p
  std::uint64_t epoch = 0;

  SourceSpace space() const { return SourceSpace(params, packets); }
};

/// data[i][j]: data vector of packet (i, j). Malformed or withheld replies
/// exclude the source and the protocol restarts over the rest.
CpkResult cpk_run(const PrfKey& k, const SpaceId& id, const Gf& field,
                  const std::vector<std::vector<GfVector>>& data, const IpChannel& channel, Rng& rng,
                  Transcript* log = nullptr, const CpkOptions& opts = {});

/// Padding for one packet given the learned inner products: solves
/// r_a[n + l] x_l = -(ip_a + r_a[n + s - 1 + pos]) over the other sources a.
/// Throws SingularPaddingSystem when the coefficient block is singular.
GfVector solve_padding(std::span<const GfVector> others, std::span<const std::uint64_t> ips, std::size_t n,
                       std::size_t s, std::size_t pos);

// ---------------------------------------------------------------- SpaceMac

/// r^(c) = F(k, id, c) for c = 1..width (slot 0), F(k, id, c, slot) otherwise.
GfVector spacemac_vector(const Prf& prf, const SpaceId& id, std::size_t width, const Gf& f,
                         std::size_t slot = 0);

Tag spacemac_mac_with(std::span<const GfVector> r, const Packet& y);
Tag spacemac_mac(const PrfKey& k, const Packet& y, std::size_t slots = 1);
Tag spacemac_combine(std::span<const Tag> tags, std::span<const std::uint64_t> coeffs, const Gf& field);
bool spacemac_verify(const PrfKey& k, const Packet& y, const Tag& t);

/// Per-generation verifier holding the derived vectors.
class SpaceMacVerifier {
 public:
  SpaceMacVerifier(const PrfKey& k, const SpaceId& id, const GenerationParams& params, std::size_t slots = 1);
  Tag mac(const Packet& y) const { return spacemac_mac_with(r_, y); }
  bool verify(const Packet& y, const Tag& t) const;
  bool verify(const Packet& y) const { return verify(y, y.tag); }
  const std::vector<GfVector>& vectors() const { return r_; }

 private:
  SpaceId id_;
  std::vector<GfVector> r_;
};

// ---------------------------------------------------------------- PM

struct PmOptions {
  std::vector<SourceBehavior> behavior;
};

struct PmResult {
  GenerationParams params;
  std::vector<std::optional<Tag>> tags;  // by position; empty when withheld
  std::vector<std::size_t> missing;      // positions without a tag
};

PmResult pm_run(const PrfKey& k, const SpaceId& id, const Gf& field, const std::vector<std::vector<GfVector>>& data,
                const IpChannel& channel, Rng& rng, Transcript* log = nullptr, const PmOptions& opts = {});

// ---------------------------------------------------------------- game 2

enum class TagIssuance { Pm, Direct };

struct Game2Config {
  std::uint64_t q = 251;
  std::size_t s = 2, g = 1, n = 2;
  std::size_t tags = 1;
  TagIssuance issuance = TagIssuance::Pm;
  unsigned modulus_bits = 256;  // Benaloh modulus for PM issuance
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
};

/// Each trial issues the source tags under a fresh key, then scores a random
/// packet outside the source space with a random tag.
GameResult attack_game_2(const Game2Config& cfg);

}  // namespace ncguard
