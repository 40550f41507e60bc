#include "ncguard/field.hpp"

#include <bit>

namespace ncguard {

bool is_probable_prime(const mpz_class& n, int reps) {
  return n >= 2 && mpz_probab_prime_p(n.get_mpz_t(), reps) > 0;
}

unsigned bit_length(const mpz_class& n) {
  return n == 0 ? 0u : static_cast<unsigned>(mpz_sizeinbase(n.get_mpz_t(), 2));
}

unsigned bit_length(std::uint64_t n) { return static_cast<unsigned>(std::bit_width(n)); }

WordField::WordField(std::uint64_t q) : q_(q), small_(q < (std::uint64_t{1} << 32)) {
  require(q >= 2 && q < (std::uint64_t{1} << 63), Errc::InvalidArgument,
          "word modulus must lie in [2, 2^63), got " + std::to_string(q));
  require(is_probable_prime(mpz_class(std::to_string(q))), Errc::InvalidArgument,
          "modulus " + std::to_string(q) + " is not prime");
}

WordField::value_type WordField::pow(value_type a, std::uint64_t e) const {
  value_type result = 1 % q_;
  value_type base = a % q_;
  while (e > 0) {
    if (e & 1) result = mul(result, base);
    base = mul(base, base);
    e >>= 1;
  }
  return result;
}

WordField::value_type WordField::inv(value_type a) const {
  require(a % q_ != 0, Errc::ZeroInverse, "inverse of zero");
  // extended Euclid on signed 128-bit to stay exact for q < 2^63
  __int128 t = 0, new_t = 1;
  __int128 r = q_, new_r = a % q_;
  while (new_r != 0) {
    const __int128 quot = r / new_r;
    t -= quot * new_t;
    std::swap(t, new_t);
    r -= quot * new_r;
    std::swap(r, new_r);
  }
  if (t < 0) t += q_;
  return static_cast<value_type>(t);
}

BigField::BigField(const mpz_class& q) : q_(std::make_shared<const mpz_class>(q)) {
  require(q >= 2, Errc::InvalidArgument, "modulus must be >= 2");
  require(is_probable_prime(q, 40), Errc::InvalidArgument, "modulus is not prime");
}

BigField::value_type BigField::pow(const value_type& a, std::uint64_t e) const {
  mpz_class r;
  mpz_class ex(std::to_string(e));
  mpz_powm(r.get_mpz_t(), a.get_mpz_t(), ex.get_mpz_t(), q_->get_mpz_t());
  return r;
}

BigField::value_type BigField::inv(const value_type& a) const {
  mpz_class r;
  require(mpz_invert(r.get_mpz_t(), a.get_mpz_t(), q_->get_mpz_t()) != 0, Errc::ZeroInverse,
          "inverse of zero");
  return r;
}

}  // namespace ncguard
