#pragma once

// Prime-field arithmetic with two interchangeable backends:
//   WordField - moduli below 2^63, machine-word arithmetic (simulation speed)
//   BigField  - arbitrary-precision moduli (homomorphic hashing, large-field profiles)
// Both satisfy the PrimeField concept, which the linear algebra is written against.

#include <concepts>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <initializer_list>
#include <vector>

#include <gmpxx.h>

#include "ncguard/cost.hpp"
#include "ncguard/errors.hpp"
#include "ncguard/random.hpp"

namespace ncguard {

bool is_probable_prime(const mpz_class& n, int reps = 64);
unsigned bit_length(const mpz_class& n);
unsigned bit_length(std::uint64_t n);

class WordField {
 public:
  using value_type = std::uint64_t;

  /// Throws InvalidArgument unless q is a prime in [2, 2^63).
  explicit WordField(std::uint64_t q);

  std::uint64_t modulus() const { return q_; }
  mpz_class modulus_mpz() const { return mpz_class(std::to_string(q_)); }
  unsigned bits() const { return bit_length(q_); }
  /// Fixed wire width of one symbol.
  std::size_t symbol_bytes() const { return (bits() + 7) / 8; }

  value_type zero() const { return 0; }
  value_type one() const { return 1; }
  value_type reduce(std::uint64_t x) const { return x % q_; }
  value_type from_signed(std::int64_t x) const {
    auto r = x % static_cast<std::int64_t>(q_);
    return static_cast<value_type>(r < 0 ? r + static_cast<std::int64_t>(q_) : r);
  }
  std::uint64_t to_u64(value_type a) const { return a; }

  value_type add(value_type a, value_type b) const {
    value_type s = a + b;  // q < 2^63 so no overflow
    return s >= q_ ? s - q_ : s;
  }
  value_type sub(value_type a, value_type b) const { return a >= b ? a - b : a + q_ - b; }
  value_type neg(value_type a) const { return a == 0 ? 0 : q_ - a; }
  value_type mul(value_type a, value_type b) const {
    cost::count_mult();
    if (small_) return (a * b) % q_;
    return static_cast<value_type>((static_cast<unsigned __int128>(a) * b) % q_);
  }
  value_type pow(value_type a, std::uint64_t e) const;
  value_type inv(value_type a) const;

  value_type random(Rng& rng) const { return uniform_below(rng, q_); }
  value_type random_nonzero(Rng& rng) const { return 1 + uniform_below(rng, q_ - 1); }

  bool is_zero(value_type a) const { return a == 0; }
  bool operator==(const WordField& o) const { return q_ == o.q_; }

 private:
  std::uint64_t q_;
  bool small_;
};

class BigField {
 public:
  using value_type = mpz_class;

  /// Throws InvalidArgument unless q is a (probable) prime >= 2.
  explicit BigField(const mpz_class& q);

  const mpz_class& modulus() const { return *q_; }
  const mpz_class& modulus_mpz() const { return *q_; }
  unsigned bits() const { return bit_length(*q_); }
  std::size_t symbol_bytes() const { return (bits() + 7) / 8; }

  value_type zero() const { return 0; }
  value_type one() const { return 1; }
  value_type reduce(const mpz_class& x) const {
    mpz_class r;
    mpz_mod(r.get_mpz_t(), x.get_mpz_t(), q_->get_mpz_t());
    return r;
  }
  value_type from_signed(std::int64_t x) const { return reduce(mpz_class(std::to_string(x))); }
  std::uint64_t to_u64(const value_type& a) const { return mpz_get_ui(a.get_mpz_t()); }

  value_type add(const value_type& a, const value_type& b) const {
    mpz_class s = a + b;
    if (s >= *q_) s -= *q_;
    return s;
  }
  value_type sub(const value_type& a, const value_type& b) const {
    mpz_class s = a - b;
    if (s < 0) s += *q_;
    return s;
  }
  value_type neg(const value_type& a) const { return a == 0 ? mpz_class(0) : mpz_class(*q_ - a); }
  value_type mul(const value_type& a, const value_type& b) const {
    cost::count_mult();
    return reduce(a * b);
  }
  value_type pow(const value_type& a, std::uint64_t e) const;
  value_type inv(const value_type& a) const;

  value_type random(Rng& rng) const { return uniform_below(rng, *q_); }
  value_type random_nonzero(Rng& rng) const { return 1 + uniform_below(rng, *q_ - 1); }

  bool is_zero(const value_type& a) const { return a == 0; }
  bool operator==(const BigField& o) const { return q_ == o.q_ || *q_ == *o.q_; }

 private:
  std::shared_ptr<const mpz_class> q_;
};

template <class F>
concept PrimeField = requires(const F f, const typename F::value_type& a, std::uint64_t e, Rng& rng) {
  { f.add(a, a) } -> std::convertible_to<typename F::value_type>;
  { f.sub(a, a) } -> std::convertible_to<typename F::value_type>;
  { f.mul(a, a) } -> std::convertible_to<typename F::value_type>;
  { f.neg(a) } -> std::convertible_to<typename F::value_type>;
  { f.inv(a) } -> std::convertible_to<typename F::value_type>;
  { f.pow(a, e) } -> std::convertible_to<typename F::value_type>;
  { f.random(rng) } -> std::convertible_to<typename F::value_type>;
  { f.is_zero(a) } -> std::same_as<bool>;
  { f == f } -> std::same_as<bool>;
};

/// A field element bound to its field; mixing fields throws ModulusMismatch.
template <PrimeField F>
class Element {
 public:
  using value_type = typename F::value_type;

  Element(F field, const value_type& v) : field_(std::move(field)), value_(field_.reduce(v)) {}

  const F& field() const { return field_; }
  const value_type& value() const { return value_; }

  Element operator+(const Element& o) const { return {field_, field_.add(value_, same(o).value_), Raw{}}; }
  Element operator-(const Element& o) const { return {field_, field_.sub(value_, same(o).value_), Raw{}}; }
  Element operator*(const Element& o) const { return {field_, field_.mul(value_, same(o).value_), Raw{}}; }
  Element operator/(const Element& o) const {
    return {field_, field_.mul(value_, field_.inv(same(o).value_)), Raw{}};
  }
  Element operator-() const { return {field_, field_.neg(value_), Raw{}}; }
  Element inv() const { return {field_, field_.inv(value_), Raw{}}; }
  Element pow(std::uint64_t e) const { return {field_, field_.pow(value_, e), Raw{}}; }

  bool operator==(const Element& o) const { return field_ == o.field_ && value_ == o.value_; }

 private:
  struct Raw {};
  Element(F field, value_type v, Raw) : field_(std::move(field)), value_(std::move(v)) {}
  const Element& same(const Element& o) const {
    require(field_ == o.field_, Errc::ModulusMismatch, "operands from different fields");
    return o;
  }

  F field_;
  value_type value_;
};

/// Dense vector over a prime field. Values are kept reduced.
template <PrimeField F>
class Vector {
 public:
  using value_type = typename F::value_type;

  Vector(F field, std::size_t n) : field_(std::move(field)), v_(n, field_.zero()) {}
  Vector(F field, std::vector<value_type> values) : field_(std::move(field)), v_(std::move(values)) {
    for (auto& x : v_) x = field_.reduce(x);
  }
  Vector(F field, std::initializer_list<value_type> values)
      : Vector(std::move(field), std::vector<value_type>(values)) {}

  const F& field() const { return field_; }
  std::size_t size() const { return v_.size(); }
  const value_type& operator[](std::size_t i) const { return v_[i]; }
  void set(std::size_t i, const value_type& x) { v_[i] = field_.reduce(x); }
  Element<F> at(std::size_t i) const { return Element<F>(field_, v_.at(i)); }
  const std::vector<value_type>& values() const { return v_; }
  /// Caller keeps entries reduced.
  std::vector<value_type>& raw() { return v_; }

  bool is_zero() const {
    for (const auto& x : v_)
      if (!field_.is_zero(x)) return false;
    return true;
  }

  bool operator==(const Vector& o) const { return field_ == o.field_ && v_ == o.v_; }

 private:
  F field_;
  std::vector<value_type> v_;
};

template <PrimeField F>
void check_compatible(const Vector<F>& a, const Vector<F>& b) {
  require(a.field() == b.field(), Errc::ModulusMismatch, "vectors over different fields");
  require(a.size() == b.size(), Errc::DimMismatch,
          "vector lengths " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
}

template <PrimeField F>
typename F::value_type dot(const Vector<F>& a, const Vector<F>& b) {
  check_compatible(a, b);
  const F& f = a.field();
  typename F::value_type acc = f.zero();
  for (std::size_t i = 0; i < a.size(); ++i) acc = f.add(acc, f.mul(a[i], b[i]));
  return acc;
}

template <PrimeField F>
Vector<F> operator+(const Vector<F>& a, const Vector<F>& b) {
  check_compatible(a, b);
  Vector<F> out = a;
  for (std::size_t i = 0; i < a.size(); ++i) out.raw()[i] = a.field().add(a[i], b[i]);
  return out;
}

template <PrimeField F>
Vector<F> operator-(const Vector<F>& a, const Vector<F>& b) {
  check_compatible(a, b);
  Vector<F> out = a;
  for (std::size_t i = 0; i < a.size(); ++i) out.raw()[i] = a.field().sub(a[i], b[i]);
  return out;
}

template <PrimeField F>
Vector<F> scale(const Vector<F>& a, const typename F::value_type& c) {
  Vector<F> out = a;
  for (auto& x : out.raw()) x = a.field().mul(x, c);
  return out;
}

/// acc += c * x
template <PrimeField F>
void axpy(Vector<F>& acc, const typename F::value_type& c, const Vector<F>& x) {
  check_compatible(acc, x);
  const F& f = acc.field();
  for (std::size_t i = 0; i < x.size(); ++i) acc.raw()[i] = f.add(acc[i], f.mul(c, x[i]));
}

template <PrimeField F>
Vector<F> random_vector(const F& field, std::size_t n, Rng& rng) {
  Vector<F> v(field, n);
  for (auto& x : v.raw()) x = field.random(rng);
  return v;
}

/// Dense row-major matrix over a prime field.
template <PrimeField F>
class Matrix {
 public:
  using value_type = typename F::value_type;

  Matrix(F field, std::size_t rows, std::size_t cols)
      : field_(std::move(field)), rows_(rows), cols_(cols), a_(rows * cols, field_.zero()) {}

  static Matrix from_rows(const F& field, std::size_t cols, const std::vector<Vector<F>>& rows) {
    Matrix m(field, rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      require(rows[i].field() == field, Errc::ModulusMismatch, "row over a different field");
      require(rows[i].size() == cols, Errc::DimMismatch, "ragged rows");
      for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  static Matrix identity(const F& field, std::size_t n) {
    Matrix m(field, n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = field.one();
    return m;
  }

  const F& field() const { return field_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  value_type& operator()(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
  const value_type& operator()(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }

  std::span<value_type> row(std::size_t r) { return {a_.data() + r * cols_, cols_}; }
  std::span<const value_type> row(std::size_t r) const { return {a_.data() + r * cols_, cols_}; }

  Vector<F> row_vector(std::size_t r) const {
    auto s = row(r);
    return Vector<F>(field_, std::vector<value_type>(s.begin(), s.end()));
  }

  void swap_rows(std::size_t r1, std::size_t r2) {
    if (r1 == r2) return;
    for (std::size_t c = 0; c < cols_; ++c) std::swap(a_[r1 * cols_ + c], a_[r2 * cols_ + c]);
  }

  /// M * x^T
  Vector<F> apply(const Vector<F>& x) const {
    require(x.field() == field_, Errc::ModulusMismatch, "vector over a different field");
    require(x.size() == cols_, Errc::DimMismatch, "matrix-vector shape");
    Vector<F> out(field_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
      value_type acc = field_.zero();
      for (std::size_t c = 0; c < cols_; ++c) acc = field_.add(acc, field_.mul((*this)(r, c), x[c]));
      out.raw()[r] = acc;
    }
    return out;
  }

  bool operator==(const Matrix& o) const {
    return field_ == o.field_ && rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
  }

 private:
  F field_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<value_type> a_;
};

using Gf = WordField;
using GfVector = Vector<WordField>;
using GfMatrix = Matrix<WordField>;

}  // namespace ncguard
