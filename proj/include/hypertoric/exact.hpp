#pragma once

// Exact integer and rational linear algebra on GMP numbers.

#include <gmpxx.h>

#include <cassert>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hypertoric {

using Integer = mpz_class;
using Rational = mpq_class;
using RatVector = std::vector<Rational>;
using IntVector = std::vector<Integer>;

/// Dense row-major matrix over Integer or Rational.
template <class T>
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  Matrix(std::initializer_list<std::initializer_list<long>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      assert(r.size() == cols_);
      for (long v : r) data_.emplace_back(v);
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  T& operator()(std::size_t r, std::size_t c) {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }
  const T& operator()(std::size_t r, std::size_t c) const {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }

  std::vector<T> row(std::size_t r) const {
    return std::vector<T>(data_.begin() + r * cols_, data_.begin() + (r + 1) * cols_);
  }
  std::vector<T> col(std::size_t c) const {
    std::vector<T> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(a, c), (*this)(b, c));
  }
  void swap_cols(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t r = 0; r < rows_; ++r) std::swap((*this)(r, a), (*this)(r, b));
  }

  bool is_zero() const {
    for (const auto& v : data_)
      if (v != 0) return false;
    return true;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    assert(a.cols_ == b.rows_);
    Matrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        if (a(i, k) == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += a(i, k) * b(k, j);
      }
    return out;
  }

  std::vector<T> operator*(std::span<const T> v) const {
    assert(v.size() == cols_);
    std::vector<T> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out[i] += (*this)(i, j) * v[j];
    return out;
  }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using IntMatrix = Matrix<Integer>;
using RatMatrix = Matrix<Rational>;

RatMatrix to_rational(const IntMatrix& m);

/// Builds a matrix whose columns are the given vectors (all of equal length `rows`).
IntMatrix from_columns(std::size_t rows, const std::vector<IntVector>& columns);

struct HermiteForm {
  IntMatrix H;
  IntMatrix U;
};

/// Row-style Hermite normal form: H = U*M, U unimodular, pivots positive and
/// entries above each pivot reduced into [0, pivot).
HermiteForm hermite_normal_form(const IntMatrix& M);

struct SmithForm {
  IntMatrix D; ///< diagonal, d1 | d2 | ..., non-negative
  IntMatrix U; ///< rows x rows, unimodular
  IntMatrix V; ///< cols x cols, unimodular
  std::size_t rank = 0;
};

/// Smith normal form with transforms: D = U*M*V.
SmithForm smith_normal_form(const IntMatrix& M);

/// Columns form the HNF-canonical Z-basis of {v in Z^cols : M v = 0}.
IntMatrix integer_kernel_basis(const IntMatrix& M);

std::size_t rank(const IntMatrix& M);
std::size_t rank(const RatMatrix& M);

Integer determinant(const IntMatrix& M);

/// Reduced row echelon form over Q; returns pivot columns.
std::vector<std::size_t> row_reduce(RatMatrix& M);

/// Basis (as columns) of the rational nullspace of M.
RatMatrix rational_kernel(const RatMatrix& M);

/// Some x with M x = b, or nullopt when the system is inconsistent.
std::optional<RatVector> solve_rational(const RatMatrix& M, std::span<const Rational> b);
std::optional<RatVector> solve_rational(const IntMatrix& M, std::span<const Rational> b);

/// Integer solution z of M z = b (b rational) via Smith form, or nullopt.
std::optional<IntVector> solve_integer(const IntMatrix& M, std::span<const Rational> b);

struct LatticeWitness {
  RatVector subspace_coeffs; ///< w with v = subspace*w + lattice*z
  IntVector lattice_coeffs;  ///< z
};

/// Decides v in span_Q(subspace columns) + lattice*Z^m exactly; on success returns a witness.
std::optional<LatticeWitness> lattice_membership_witness(std::span<const Rational> v,
                                                         const IntMatrix& lattice,
                                                         const IntMatrix& subspace);

bool lattice_membership(std::span<const Rational> v, const IntMatrix& lattice,
                        const IntMatrix& subspace);

/// Primitive integer vector parallel to a nonzero rational vector (first nonzero entry sign kept).
IntVector primitive_integer_vector(std::span<const Rational> v);

Rational parse_rational(const std::string& text);
std::string to_string(const Rational& r);

} // namespace hypertoric
