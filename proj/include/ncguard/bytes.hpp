#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace ncguard {

using Bytes = std::vector<std::uint8_t>;
using Digest = std::array<std::uint8_t, 32>;

Digest sha256(std::span<const std::uint8_t> data);

std::string to_hex(std::span<const std::uint8_t> data);
Bytes from_hex(std::string_view hex);

void append_be(Bytes& out, std::uint64_t value, std::size_t width);
/// Big-endian, left-padded to exactly `width` bytes.
void append_be(Bytes& out, const mpz_class& value, std::size_t width);
std::uint64_t read_be_u64(std::span<const std::uint8_t> in);
mpz_class read_be_mpz(std::span<const std::uint8_t> in);

std::string mpz_to_hex(const mpz_class& v);
mpz_class mpz_from_hex(std::string_view hex);

}  // namespace ncguard
