#include "ncguard/prf.hpp"

#include <openssl/evp.h>

namespace ncguard {

namespace {

struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* c) const { EVP_MD_CTX_free(c); }
};
using MdCtx = std::unique_ptr<EVP_MD_CTX, MdCtxDeleter>;

MdCtx new_ctx() {
  MdCtx c(EVP_MD_CTX_new());
  require(c != nullptr, Errc::InvalidArgument, "EVP_MD_CTX_new failed");
  return c;
}

}  // namespace

PrfKey PrfKey::random(Rng& rng) {
  PrfKey k;
  for (auto& b : k.bytes) b = static_cast<std::uint8_t>(rng());
  return k;
}

// HMAC with the inner and outer pads absorbed once at key setup.
struct Prf::Impl {
  MdCtx inner;
  MdCtx outer;
};

Prf::Prf(const PrfKey& key) {
  auto impl = std::make_shared<Impl>(Impl{new_ctx(), new_ctx()});
  std::array<std::uint8_t, 64> ipad{}, opad{};
  for (std::size_t i = 0; i < 64; ++i) {
    const std::uint8_t k = i < key.bytes.size() ? key.bytes[i] : 0;
    ipad[i] = k ^ 0x36;
    opad[i] = k ^ 0x5c;
  }
  require(EVP_DigestInit_ex(impl->inner.get(), EVP_sha256(), nullptr) == 1 &&
              EVP_DigestUpdate(impl->inner.get(), ipad.data(), ipad.size()) == 1 &&
              EVP_DigestInit_ex(impl->outer.get(), EVP_sha256(), nullptr) == 1 &&
              EVP_DigestUpdate(impl->outer.get(), opad.data(), opad.size()) == 1,
          Errc::InvalidArgument, "HMAC key setup failed");
  impl_ = std::move(impl);
}

std::array<std::uint8_t, 32> Prf::mac(std::span<const std::uint8_t> msg) const {
  thread_local MdCtx work = new_ctx();
  std::array<std::uint8_t, 32> inner{}, out{};
  unsigned len = 0;
  bool ok = EVP_MD_CTX_copy_ex(work.get(), impl_->inner.get()) == 1 &&
            EVP_DigestUpdate(work.get(), msg.data(), msg.size()) == 1 &&
            EVP_DigestFinal_ex(work.get(), inner.data(), &len) == 1 &&
            EVP_MD_CTX_copy_ex(work.get(), impl_->outer.get()) == 1 &&
            EVP_DigestUpdate(work.get(), inner.data(), inner.size()) == 1 &&
            EVP_DigestFinal_ex(work.get(), out.data(), &len) == 1;
  require(ok, Errc::InvalidArgument, "HMAC evaluation failed");
  return out;
}

std::uint64_t Prf::eval(const SpaceId& id, PrfDomain domain, std::span<const std::uint64_t> counters,
                        const Gf& field) const {
  require(counters.size() <= 8, Errc::InvalidArgument, "too many PRF counters");
  std::array<std::uint8_t, 16 + 2 + 8 * 8 + 4> msg{};
  std::size_t len = 0;
  for (auto b : id.bytes) msg[len++] = b;
  msg[len++] = static_cast<std::uint8_t>(domain);
  msg[len++] = static_cast<std::uint8_t>(counters.size());
  for (auto c : counters)
    for (int s = 56; s >= 0; s -= 8) msg[len++] = static_cast<std::uint8_t>(c >> s);
  const std::size_t attempt_at = len;
  len += 4;

  using u128 = unsigned __int128;
  const u128 q = field.modulus();
  const u128 limit = (~u128{0} / q) * q;
  for (std::uint32_t attempt = 0;; ++attempt) {
    for (int k = 0; k < 4; ++k) msg[attempt_at + k] = static_cast<std::uint8_t>(attempt >> (24 - 8 * k));
    const auto d = mac({msg.data(), len});
    u128 x = 0;
    for (int k = 0; k < 16; ++k) x = x << 8 | d[k];
    if (x < limit) return static_cast<std::uint64_t>(x % q);
  }
}

std::uint64_t prf_eval(const PrfKey& key, const SpaceId& id, std::span<const std::uint64_t> counters,
                       const Gf& field) {
  return Prf(key).eval(id, PrfDomain::Generic, counters, field);
}

}  // namespace ncguard
