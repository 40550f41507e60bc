#pragma once

// Row reduction and the derived operations. Pivot choice is "first nonzero at or
// below the current row", so every result is deterministic for a given input.

#include <algorithm>
#include <cstddef>
#include <vector>

#include "ncguard/field.hpp"

namespace ncguard {

template <PrimeField F>
struct RrefResult {
  Matrix<F> reduced;
  std::size_t rank = 0;
  std::vector<std::size_t> pivot_cols;
};

/// Reduced row-echelon form of the first `limit_cols` columns (all columns by
/// default); trailing columns are carried along, which is how augmented systems
/// and decoding are handled.
template <PrimeField F>
RrefResult<F> rref(Matrix<F> m, std::size_t limit_cols = static_cast<std::size_t>(-1)) {
  const F f = m.field();
  const std::size_t cols = m.cols();
  const std::size_t pivot_limit = std::min(limit_cols, cols);
  std::size_t rank = 0;
  std::vector<std::size_t> pivots;
  for (std::size_t c = 0; c < pivot_limit && rank < m.rows(); ++c) {
    std::size_t p = rank;
    while (p < m.rows() && f.is_zero(m(p, c))) ++p;
    if (p == m.rows()) continue;
    m.swap_rows(p, rank);
    auto prow = m.row(rank);
    if (prow[c] != f.one()) {
      const auto s = f.inv(prow[c]);
      for (std::size_t j = c; j < cols; ++j) prow[j] = f.mul(prow[j], s);
    }
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (r == rank) continue;
      auto row = m.row(r);
      if (f.is_zero(row[c])) continue;
      const auto factor = row[c];
      for (std::size_t j = c; j < cols; ++j) row[j] = f.sub(row[j], f.mul(factor, prow[j]));
    }
    pivots.push_back(c);
    ++rank;
  }
  return {std::move(m), rank, std::move(pivots)};
}

template <PrimeField F>
std::size_t rank(const Matrix<F>& m) {
  return rref(m).rank;
}

/// Basis of { z : M z^T = 0 }, one vector per free column (cols - rank vectors).
template <PrimeField F>
std::vector<Vector<F>> null_space_basis(const Matrix<F>& m) {
  const F& f = m.field();
  auto r = rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto c : r.pivot_cols) is_pivot[c] = true;
  std::vector<Vector<F>> basis;
  basis.reserve(m.cols() - r.rank);
  for (std::size_t free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    Vector<F> z(f, m.cols());
    z.raw()[free] = f.one();
    for (std::size_t i = 0; i < r.rank; ++i) z.raw()[r.pivot_cols[i]] = f.neg(r.reduced(i, free));
    basis.push_back(std::move(z));
  }
  return basis;
}

/// Unique solution of A x = b. Throws Inconsistent when no solution exists and
/// Singular when the solution is not unique.
template <PrimeField F>
Vector<F> solve_linear(const Matrix<F>& a, const Vector<F>& b) {
  const F& f = a.field();
  require(b.field() == f, Errc::ModulusMismatch, "rhs over a different field");
  require(b.size() == a.rows(), Errc::DimMismatch, "rhs length must equal row count");
  Matrix<F> aug(f, a.rows(), a.cols() + 1);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) aug(r, c) = a(r, c);
    aug(r, a.cols()) = b[r];
  }
  auto red = rref(std::move(aug), a.cols());
  for (std::size_t r = red.rank; r < a.rows(); ++r)
    if (!f.is_zero(red.reduced(r, a.cols()))) fail(Errc::Inconsistent, "system has no solution");
  if (red.rank < a.cols()) fail(Errc::Singular, "system is underdetermined");
  Vector<F> x(f, a.cols());
  for (std::size_t i = 0; i < red.rank; ++i) x.raw()[red.pivot_cols[i]] = red.reduced(i, a.cols());
  return x;
}

/// True iff v lies in the row space of m.
template <PrimeField F>
bool in_row_space(const Matrix<F>& m, const Vector<F>& v) {
  require(v.size() == m.cols(), Errc::DimMismatch, "vector length must equal column count");
  require(v.field() == m.field(), Errc::ModulusMismatch, "vector over a different field");
  if (v.is_zero()) return true;
  Matrix<F> ext(m.field(), m.rows() + 1, m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) ext(r, c) = m(r, c);
  for (std::size_t c = 0; c < m.cols(); ++c) ext(m.rows(), c) = v[c];
  return rref(std::move(ext)).rank == rref(m).rank;
}

/// Precomputed reduced basis of a row space for repeated membership queries.
template <PrimeField F>
class SpanChecker {
 public:
  explicit SpanChecker(const Matrix<F>& rows) : basis_(rref(rows)) {}

  std::size_t dimension() const { return basis_.rank; }

  bool contains(const Vector<F>& v) const {
    const auto& m = basis_.reduced;
    require(v.size() == m.cols(), Errc::DimMismatch, "vector length must equal column count");
    require(v.field() == m.field(), Errc::ModulusMismatch, "vector over a different field");
    const F& f = m.field();
    auto w = v.values();
    for (std::size_t i = 0; i < basis_.rank; ++i) {
      const std::size_t c = basis_.pivot_cols[i];
      if (f.is_zero(w[c])) continue;
      const auto factor = w[c];
      auto row = m.row(i);
      for (std::size_t j = c; j < w.size(); ++j) w[j] = f.sub(w[j], f.mul(factor, row[j]));
    }
    for (const auto& x : w)
      if (!f.is_zero(x)) return false;
    return true;
  }

 private:
  RrefResult<F> basis_;
};

}  // namespace ncguard
