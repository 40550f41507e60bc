#include "ncguard/bytes.hpp"

#include <openssl/evp.h>

#include "ncguard/errors.hpp"

namespace ncguard {

Digest sha256(std::span<const std::uint8_t> data) {
  Digest d{};
  unsigned len = 0;
  require(EVP_Digest(data.data(), data.size(), d.data(), &len, EVP_sha256(), nullptr) == 1 &&
              len == d.size(),
          Errc::InvalidArgument, "sha256 failed");
  return d;
}

std::string to_hex(std::span<const std::uint8_t> data) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s;
  s.reserve(data.size() * 2);
  for (auto b : data) {
    s.push_back(digits[b >> 4]);
    s.push_back(digits[b & 15]);
  }
  return s;
}

Bytes from_hex(std::string_view hex) {
  require(hex.size() % 2 == 0, Errc::InvalidArgument, "odd-length hex string");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    fail(Errc::InvalidArgument, std::string("bad hex digit '") + c + "'");
  };
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
  return out;
}

void append_be(Bytes& out, std::uint64_t value, std::size_t width) {
  for (std::size_t i = width; i-- > 0;) out.push_back(i < 8 ? static_cast<std::uint8_t>(value >> (8 * i)) : 0);
}

void append_be(Bytes& out, const mpz_class& value, std::size_t width) {
  require(value >= 0, Errc::InvalidArgument, "negative integer on the wire");
  const std::size_t len = (mpz_sizeinbase(value.get_mpz_t(), 2) + 7) / 8;
  require(value == 0 || len <= width, Errc::InvalidArgument, "integer wider than its field");
  Bytes buf(width, 0);
  if (value != 0) {
    std::size_t written = 0;
    mpz_export(buf.data() + (width - len), &written, 1, 1, 1, 0, value.get_mpz_t());
  }
  out.insert(out.end(), buf.begin(), buf.end());
}

std::uint64_t read_be_u64(std::span<const std::uint8_t> in) {
  std::uint64_t v = 0;
  for (auto b : in) v = v << 8 | b;
  return v;
}

mpz_class read_be_mpz(std::span<const std::uint8_t> in) {
  mpz_class v;
  mpz_import(v.get_mpz_t(), in.size(), 1, 1, 1, 0, in.data());
  return v;
}

std::string mpz_to_hex(const mpz_class& v) { return v.get_str(16); }

mpz_class mpz_from_hex(std::string_view hex) { return mpz_class(std::string(hex), 16); }

}  // namespace ncguard
