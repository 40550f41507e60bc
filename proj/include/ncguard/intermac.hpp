#pragma once

// Multi-source homomorphic MAC. Source p's key is a random vector in the null
// space of every other source's committed packets, so tags from different
// sources add up and a receiver checks a combination against the sum of keys.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ncguard/coding.hpp"
#include "ncguard/prf.hpp"

namespace ncguard {

/// Per-slot sum of the keys of a subset of sources.
struct KeySum {
  std::vector<std::size_t> subset;
  std::vector<GfVector> slots;
};

class KeySet {
 public:
  /// keys[p][slot]; every key has the same length and every source the same slot count.
  explicit KeySet(std::vector<std::vector<GfVector>> keys);

  std::size_t sources() const { return keys_.size(); }
  std::size_t slots() const { return keys_.front().size(); }
  std::size_t dim() const { return keys_.front().front().size(); }
  const Gf& field() const { return keys_.front().front().field(); }
  const GfVector& key(std::size_t p, std::size_t slot = 0) const;

  KeySum sum(std::span<const std::size_t> subset) const;
  KeySum full_sum() const;

 private:
  std::vector<std::vector<GfVector>> keys_;
};

/// Rows = complete symbol vectors of all committed packets not owned by source p.
GfMatrix foreign_matrix(const SourceSpace& space, std::size_t p);

/// Null-space basis of foreign_matrix(space, p): n + pad + g vectors when the
/// committed packets are independent. Throws DegenerateSpace otherwise.
std::vector<GfVector> key_basis(const SourceSpace& space, std::size_t p);

/// sum_i r_i * b_i.
GfVector key_from_basis(std::span<const GfVector> basis, std::span<const std::uint64_t> r);

/// PRF counters for coefficient i of source p's key in a tag slot.
std::vector<std::uint64_t> gen_counters(std::size_t p, std::size_t i, std::size_t slot);

/// Keys for all sources, r_i drawn from the PRF under (id, p, i[, slot]).
KeySet gen(const SpaceId& id, const PrfKey& key, const SourceSpace& committed, std::size_t tag_slots = 1);
/// Same, with the per-source bases already computed.
KeySet gen_from_bases(const SpaceId& id, const Prf& prf, const std::vector<std::vector<GfVector>>& bases,
                      std::size_t tag_slots = 1);

/// One slot per key: t = k . v over the complete symbol vector.
std::uint64_t sign(const GfVector& key, const Packet& v);
Tag sign(const KeySet& keys, std::size_t p, const Packet& v);

/// Slot-wise linear combination.
Tag combine_tags(std::span<const Tag> tags, std::span<const std::uint64_t> coeffs, const Gf& field);

/// Combine packets and their tags with the same coefficients.
Packet combine_signed(std::span<const Packet> packets, std::span<const std::uint64_t> coeffs);

bool verify(const KeySum& key_sum, const Packet& y, const Tag& t);
inline bool verify(const KeySum& key_sum, const Packet& y) { return verify(key_sum, y, y.tag); }

/// Sum over `subset`, which must hold at least M + 1 sources.
KeySum partial_key_sum(const KeySet& keys, std::span<const std::size_t> subset, std::size_t max_malicious);

/// Key distribution file: one JSON record per node {node, subset, slots: [[...]]}.
void write_key_sums(std::ostream& out, const std::vector<std::pair<std::string, KeySum>>& sums);
std::vector<std::pair<std::string, KeySum>> read_key_sums(std::istream& in, const Gf& field);

enum class ForgeryStrategy { RandomTag, Algebraic };

struct GameConfig {
  std::uint64_t q = 251;
  std::size_t s = 2, g = 1, n = 2;
  std::size_t tags = 1;
  std::size_t withheld = 0;  // index of the key the adversary never sees
  ForgeryStrategy strategy = ForgeryStrategy::RandomTag;
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
};

struct GameResult {
  std::uint64_t trials = 0;
  std::uint64_t wins = 0;
  double expected = 0;  // q^-tags

  double rate() const { return trials ? double(wins) / double(trials) : 0.0; }
  /// sqrt(p (1 - p) / T) at the expected rate.
  double sigma() const;
  bool within_sigmas(double k) const;
};

/// Forgery attempts against fresh committed spaces and PRF keys; a trial is won
/// when the forged packet lies outside the source space and verifies against
/// the full key sum.
GameResult attack_game_1(const GameConfig& cfg);

}  // namespace ncguard
