#pragma once

// Keyed pseudo-random function mapping (key, space id, small counters) to a
// uniform field element.
//
// Input encoding (injective):
//   id (16) || domain (1) || arity (1) || counters (8 bytes BE each) || attempt (4 BE)
// The first 16 bytes of HMAC-SHA256 over that input are read as a 128-bit
// integer; values at or above floor(2^128 / q) * q are rejected and the attempt
// counter is incremented, so the output is exactly uniform on [0, q).

#include <array>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <span>

#include "ncguard/coding.hpp"
#include "ncguard/field.hpp"

namespace ncguard {

struct PrfKey {
  std::array<std::uint8_t, 32> bytes{};

  static PrfKey random(Rng& rng);
  bool operator==(const PrfKey&) const = default;
};

/// Separates the uses of one controller key.
enum class PrfDomain : std::uint8_t {
  InterMacGen = 1,
  Cpk = 2,
  SpaceMac = 3,
  Generic = 0xff,
};

class Prf {
 public:
  explicit Prf(const PrfKey& key);

  std::uint64_t eval(const SpaceId& id, PrfDomain domain, std::span<const std::uint64_t> counters,
                     const Gf& field) const;
  std::uint64_t eval(const SpaceId& id, PrfDomain domain, std::initializer_list<std::uint64_t> counters,
                     const Gf& field) const {
    return eval(id, domain, std::span<const std::uint64_t>(counters.begin(), counters.size()), field);
  }

  /// Raw 32-byte HMAC-SHA256 of `msg` under the key.
  std::array<std::uint8_t, 32> mac(std::span<const std::uint8_t> msg) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

/// Convenience one-shot form.
std::uint64_t prf_eval(const PrfKey& key, const SpaceId& id, std::span<const std::uint64_t> counters,
                       const Gf& field);

}  // namespace ncguard
