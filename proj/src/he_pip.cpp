#include "ncguard/he_pip.hpp"

#include <cmath>
#include <optional>
#include <unordered_map>

#include "ncguard/errors.hpp"
#include "ncguard/field.hpp"
#include "ncguard/transcript.hpp"

namespace ncguard {

namespace {

mpz_class powm(const mpz_class& b, const mpz_class& e, const mpz_class& m) {
  cost::count_exp();
  mpz_class r;
  mpz_powm(r.get_mpz_t(), b.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
  return r;
}

mpz_class from_u64(std::uint64_t x) { return mpz_class(static_cast<unsigned long>(x)); }

std::uint64_t low_word(const mpz_class& z) { return z == 0 ? 0 : mpz_getlimbn(z.get_mpz_t(), 0); }

bool is_unit(const mpz_class& c, const mpz_class& N) {
  if (c <= 0 || c >= N) return false;
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), c.get_mpz_t(), N.get_mpz_t());
  return g == 1;
}

/// Uniform in [lo, hi].
mpz_class uniform_range(Rng& rng, const mpz_class& lo, const mpz_class& hi) {
  return lo + uniform_below(rng, hi - lo + 1);
}

mpz_class random_unit(const mpz_class& N, Rng& rng) {
  for (;;) {
    mpz_class u = uniform_below(rng, N);
    if (is_unit(u, N)) return u;
  }
}

}  // namespace

unsigned BenalohPublicKey::modulus_bits() const { return bit_length(N); }
std::size_t BenalohPublicKey::ciphertext_bytes() const { return (modulus_bits() + 7) / 8; }

// Baby-step/giant-step in the order-r subgroup generated by x = y^(phi/r). With
// r <= 2^16 the baby steps cover the whole group, i.e. a plain lookup table.
struct BenalohKeyPair::DlogTable {
  mpz_class N;
  std::uint64_t r = 0;
  std::uint64_t step = 0;
  std::unordered_multimap<std::uint64_t, std::uint32_t> index;
  std::vector<mpz_class> baby;
  mpz_class giant;  // x^(-step)

  DlogTable(const mpz_class& x, const mpz_class& N_, std::uint64_t r_) : N(N_), r(r_) {
    step = r <= (std::uint64_t{1} << 16) ? r : static_cast<std::uint64_t>(std::ceil(std::sqrt(double(r))));
    baby.reserve(step);
    mpz_class cur = 1;
    for (std::uint64_t j = 0; j < step; ++j) {
      index.emplace(low_word(cur), static_cast<std::uint32_t>(j));
      baby.push_back(cur);
      cur = cur * x % N;
    }
    // cur = x^step; giant = its inverse
    mpz_invert(giant.get_mpz_t(), cur.get_mpz_t(), N.get_mpz_t());
  }

  std::optional<std::uint64_t> log(mpz_class z) const {
    const std::uint64_t rounds = (r + step - 1) / step;
    for (std::uint64_t i = 0; i < rounds; ++i) {
      auto [lo, hi] = index.equal_range(low_word(z));
      for (auto it = lo; it != hi; ++it)
        if (baby[it->second] == z) {
          const std::uint64_t m = i * step + it->second;
          if (m < r) return m;
        }
      z = z * giant % N;
    }
    return std::nullopt;
  }
};

BenalohKeyPair::BenalohKeyPair(BenalohPublicKey pk, mpz_class p, mpz_class q)
    : pk_(std::move(pk)), p_(std::move(p)), q_(std::move(q)) {
  require(pk_.N == p_ * q_, Errc::InvalidArgument, "N must equal p q");
  phi_ = (p_ - 1) * (q_ - 1);
  const mpz_class r = from_u64(pk_.r);
  require(phi_ % r == 0, Errc::InvalidArgument, "r must divide phi(N)");
  exp_ = phi_ / r;
  mpz_class x;
  mpz_powm(x.get_mpz_t(), pk_.y.get_mpz_t(), exp_.get_mpz_t(), pk_.N.get_mpz_t());
  require(x != 1, Errc::InvalidArgument, "y^(phi/r) must not be 1");
  dlog_ = std::make_shared<const DlogTable>(x, pk_.N, pk_.r);
}

std::uint64_t BenalohKeyPair::decrypt(const mpz_class& c) const {
  if (!is_unit(c, pk_.N)) fail(Errc::DecryptionFailure, "ciphertext is not a unit mod N");
  auto m = dlog_->log(powm(c, exp_, pk_.N));
  if (!m) fail(Errc::DecryptionFailure, "ciphertext outside the plaintext subgroup");
  return *m;
}

BenalohKeyPair benaloh_keygen(std::uint64_t r, unsigned modulus_bits, Rng& rng) {
  require(r >= 3 && r <= kMaxBlockSize, Errc::InvalidArgument, "block size must lie in [3, 2^20]");
  require(is_probable_prime(from_u64(r)), Errc::InvalidArgument, "block size must be prime");
  require(modulus_bits % 2 == 0 && modulus_bits >= 64, Errc::InvalidArgument,
          "modulus size must be even and at least 64 bits");
  const unsigned half = modulus_bits / 2;
  require(bit_length(r) + 4 < half, Errc::InvalidArgument, "modulus too small for the block size");
  const mpz_class R = from_u64(r);
  // primes in [2^(h-1) + 2^(h-2), 2^h) so that |p q'| is exactly modulus_bits
  mpz_class lo = 0, hi = 0;
  mpz_setbit(lo.get_mpz_t(), half - 1);
  mpz_setbit(lo.get_mpz_t(), half - 2);
  mpz_setbit(hi.get_mpz_t(), half);
  hi -= 1;

  constexpr int kMaxAttempts = 1000000;
  mpz_class p;
  for (int a = 0;; ++a) {
    require(a < kMaxAttempts, Errc::ParameterGenFailure, "no prime p = r k + 1 found");
    const mpz_class k = uniform_range(rng, (lo - 1 + R - 1) / R, (hi - 1) / R);
    if (k % R == 0) continue;  // gcd(r, (p-1)/r) = 1
    p = R * k + 1;
    if (p >= lo && p <= hi && is_probable_prime(p)) break;
  }
  mpz_class q;
  for (int a = 0;; ++a) {
    require(a < kMaxAttempts, Errc::ParameterGenFailure, "no prime q' found");
    q = uniform_range(rng, lo, hi);
    mpz_setbit(q.get_mpz_t(), 0);
    if (q > hi || q == p) continue;
    if ((q - 1) % R == 0) continue;  // gcd(r, q'-1) = 1 since r is prime
    if (is_probable_prime(q)) break;
  }
  BenalohPublicKey pk;
  pk.N = p * q;
  pk.r = r;
  const mpz_class exp = (p - 1) * (q - 1) / R;
  for (int a = 0;; ++a) {
    require(a < 10000, Errc::ParameterGenFailure, "no suitable y found");
    pk.y = random_unit(pk.N, rng);
    mpz_class x;
    mpz_powm(x.get_mpz_t(), pk.y.get_mpz_t(), exp.get_mpz_t(), pk.N.get_mpz_t());
    if (x != 1) break;
  }
  return BenalohKeyPair(std::move(pk), std::move(p), std::move(q));
}

mpz_class he_enc(const BenalohPublicKey& pk, std::uint64_t m, Rng& rng) {
  require(m < pk.r, Errc::InvalidArgument, "plaintext must lie in [0, r)");
  const mpz_class u = random_unit(pk.N, rng);
  return powm(pk.y, from_u64(m), pk.N) * powm(u, from_u64(pk.r), pk.N) % pk.N;
}

std::uint64_t he_dec(const BenalohKeyPair& kp, const mpz_class& c) { return kp.decrypt(c); }

mpz_class he_add(const BenalohPublicKey& pk, const mpz_class& c1, const mpz_class& c2) {
  return c1 * c2 % pk.N;
}

mpz_class he_scale(const BenalohPublicKey& pk, const mpz_class& c, std::uint64_t k) {
  return powm(c, from_u64(k), pk.N);
}

mpz_class he_rerandomize(const BenalohPublicKey& pk, const mpz_class& c, Rng& rng) {
  return he_add(pk, c, he_enc(pk, 0, rng));
}

std::vector<mpz_class> pip_encrypt(const BenalohPublicKey& pk, std::span<const std::uint64_t> r, Rng& rng) {
  std::vector<mpz_class> out;
  out.reserve(r.size());
  for (auto x : r) out.push_back(he_enc(pk, x, rng));
  return out;
}

mpz_class pip_respond(const BenalohPublicKey& pk, std::span<const mpz_class> enc_r,
                      std::span<const std::uint64_t> v, Rng& rng) {
  require(enc_r.size() == v.size(), Errc::DimMismatch, "vector lengths differ");
  mpz_class w = 1;
  for (std::size_t i = 0; i < v.size(); ++i) {
    require(v[i] < pk.r, Errc::InvalidArgument, "source symbol outside the plaintext space");
    if (v[i] == 0) continue;
    w = w * he_scale(pk, enc_r[i], v[i]) % pk.N;
  }
  return he_rerandomize(pk, w, rng);
}

std::uint64_t pip_finish(const BenalohKeyPair& kp, const mpz_class& w) { return kp.decrypt(w); }

std::uint64_t pip_round(const BenalohKeyPair& kp, std::span<const std::uint64_t> r,
                        std::span<const std::uint64_t> v, Rng& rng, Transcript* log) {
  const auto& pk = kp.pk();
  const auto enc = pip_encrypt(pk, r, rng);
  if (log) log->record(MsgKind::EncryptedVector, "controller", "source", enc.size(),
                       encode_elements(enc, pk.ciphertext_bytes()));
  const auto w = pip_respond(pk, enc, v, rng);
  if (log) log->record(MsgKind::EncryptedInnerProduct, "source", "controller", 1,
                       encode_elements(std::span(&w, 1), pk.ciphertext_bytes()));
  return pip_finish(kp, w);
}

}  // namespace ncguard
