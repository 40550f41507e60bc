#pragma once

// Inter-session packet model: augmentation, combination at intermediate nodes,
// decoding at receivers and the span-membership oracle that decides whether a
// packet is corrupted.
//
// Indices are zero-based throughout: source i in [0, s), packet j in [0, g),
// and the unit coding coefficient of packet (i, j) sits at position g*i + j.

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ncguard/bytes.hpp"
#include "ncguard/field.hpp"
#include "ncguard/linalg.hpp"

namespace ncguard {

/// Identifier of a (source space, generation) pair. Fixed 16-byte width.
struct SpaceId {
  std::array<std::uint8_t, 16> bytes{};

  static SpaceId derive(std::string_view label);
  static SpaceId random(Rng& rng);
  static SpaceId from_hex(std::string_view hex);
  std::string hex() const;

  auto operator<=>(const SpaceId&) const = default;
};

struct GenerationParams {
  Gf field;
  std::size_t s;
  std::size_t g;
  std::size_t n;
  std::size_t pad = 0;

  GenerationParams(Gf field, std::size_t s, std::size_t g, std::size_t n, std::size_t pad = 0);

  std::size_t m() const { return s * g; }
  std::size_t width() const { return n + pad + m(); }
  std::size_t position(std::size_t i, std::size_t j) const { return g * i + j; }
  std::size_t source_of(std::size_t position) const { return position / g; }

  bool operator==(const GenerationParams&) const = default;
};

/// Tag slots appended to a packet by the MAC schemes (one field element per slot).
struct Tag {
  std::vector<std::uint64_t> slots;
  bool operator==(const Tag&) const = default;
};

/// Symbol layout: data (n) | padding (pad) | global coding coefficients (m).
class Packet {
 public:
  Packet(SpaceId id, const GenerationParams& params);
  Packet(SpaceId id, const GenerationParams& params, GfVector symbols);

  const SpaceId& gen_id() const { return id_; }
  const Gf& field() const { return sym_.field(); }
  std::size_t n() const { return n_; }
  std::size_t pad() const { return pad_; }
  std::size_t m() const { return m_; }

  const GfVector& symbols() const { return sym_; }
  GfVector& symbols() { return sym_; }

  GfVector data() const { return slice(0, n_); }
  GfVector padding() const { return slice(n_, pad_); }
  GfVector aug() const { return slice(n_ + pad_, m_); }
  void set_data(const GfVector& data);
  void set_padding(const GfVector& padding);

  /// Position of the single 1 when the coefficients form a unit vector.
  std::optional<std::size_t> unit_position() const;

  Tag tag;

  bool operator==(const Packet& o) const {
    return id_ == o.id_ && n_ == o.n_ && pad_ == o.pad_ && sym_ == o.sym_ && tag == o.tag;
  }

 private:
  GfVector slice(std::size_t off, std::size_t len) const;

  SpaceId id_;
  std::size_t n_, pad_, m_;
  GfVector sym_;
};

/// Source packet (i, j): the data followed by zero padding and the unit vector at g*i + j.
Packet augment(const GfVector& data, std::size_t i, std::size_t j, const GenerationParams& params,
               const SpaceId& id);

/// Symbol-wise linear combination; tags are left empty (see the MAC modules).
Packet combine(std::span<const Packet> packets, std::span<const std::uint64_t> coeffs);

struct Recovered {
  std::size_t position;
  GfVector data;
};

/// Every source packet whose unit coefficient row is reachable by row reduction,
/// ordered by position.
std::vector<Recovered> decode(std::span<const Packet> received, const GenerationParams& params);

enum class SpanMode { WholePacket, DataOnly };

/// The committed source packets and the spans they define.
class SourceSpace {
 public:
  /// data[i][j] is the data vector of packet (i, j). Padding is zero.
  static SourceSpace from_data(const SpaceId& id, const GenerationParams& params,
                               const std::vector<std::vector<GfVector>>& data);
  /// Basis given as complete packets (e.g. padded ones), ordered by position.
  SourceSpace(const GenerationParams& params, std::vector<Packet> basis);

  const GenerationParams& params() const { return params_; }
  const SpaceId& id() const { return basis_.front().gen_id(); }
  const std::vector<Packet>& basis() const { return basis_; }
  const Packet& packet(std::size_t i, std::size_t j) const { return basis_[params_.position(i, j)]; }
  std::size_t rank() const { return whole_.dimension(); }

  bool contains(const Packet& p, SpanMode mode) const;

 private:
  GenerationParams params_;
  std::vector<Packet> basis_;
  SpanChecker<Gf> whole_;
  SpanChecker<Gf> data_only_;
};

bool in_span(const Packet& p, const SourceSpace& space, SpanMode mode);

/// Wire form: gen_id || symbols || tag slots, each symbol big-endian in
/// ceil(|q|/8) bytes.
Bytes serialize(const Packet& p);
Packet deserialize(std::span<const std::uint8_t> bytes, const GenerationParams& params,
                   std::size_t tag_slots);
std::size_t wire_size(const GenerationParams& params, std::size_t tag_slots);

}  // namespace ncguard
