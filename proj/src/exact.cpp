#include "hypertoric/exact.hpp"

#include "hypertoric/errors.hpp"

#include <algorithm>
#include <numeric>

namespace hypertoric {

namespace {

// row_a <- s*row_a + t*row_b ; row_b <- u*row_a + v*row_b (simultaneously)
template <class T>
void combine_rows(Matrix<T>& m, std::size_t a, std::size_t b, const Integer& s, const Integer& t,
                  const Integer& u, const Integer& v) {
  for (std::size_t c = 0; c < m.cols(); ++c) {
    T x = m(a, c);
    T y = m(b, c);
    m(a, c) = s * x + t * y;
    m(b, c) = u * x + v * y;
  }
}

template <class T>
void add_row_multiple(Matrix<T>& m, std::size_t target, std::size_t source, const Integer& factor) {
  if (factor == 0) return;
  for (std::size_t c = 0; c < m.cols(); ++c) m(target, c) += factor * m(source, c);
}

template <class T>
void add_col_multiple(Matrix<T>& m, std::size_t target, std::size_t source, const Integer& factor) {
  if (factor == 0) return;
  for (std::size_t r = 0; r < m.rows(); ++r) m(r, target) += factor * m(r, source);
}

void negate_row(IntMatrix& m, std::size_t r) {
  for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = -m(r, c);
}

} // namespace

RatMatrix to_rational(const IntMatrix& m) {
  RatMatrix out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = Rational(m(r, c));
  return out;
}

IntMatrix from_columns(std::size_t rows, const std::vector<IntVector>& columns) {
  IntMatrix m(rows, columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    assert(columns[c].size() == rows);
    for (std::size_t r = 0; r < rows; ++r) m(r, c) = columns[c][r];
  }
  return m;
}

HermiteForm hermite_normal_form(const IntMatrix& M) {
  IntMatrix H = M;
  IntMatrix U = IntMatrix::identity(M.rows());
  std::size_t pivot_row = 0;
  for (std::size_t col = 0; col < H.cols() && pivot_row < H.rows(); ++col) {
    std::size_t first = pivot_row;
    while (first < H.rows() && H(first, col) == 0) ++first;
    if (first == H.rows()) continue;
    H.swap_rows(pivot_row, first);
    U.swap_rows(pivot_row, first);
    for (std::size_t r = pivot_row + 1; r < H.rows(); ++r) {
      if (H(r, col) == 0) continue;
      Integer a = H(pivot_row, col);
      Integer b = H(r, col);
      Integer g, s, t;
      mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
      Integer u = -b / g;
      Integer v = a / g;
      combine_rows(H, pivot_row, r, s, t, u, v);
      combine_rows(U, pivot_row, r, s, t, u, v);
    }
    if (H(pivot_row, col) < 0) {
      negate_row(H, pivot_row);
      negate_row(U, pivot_row);
    }
    const Integer pivot = H(pivot_row, col);
    for (std::size_t r = 0; r < pivot_row; ++r) {
      Integer q;
      mpz_fdiv_q(q.get_mpz_t(), H(r, col).get_mpz_t(), pivot.get_mpz_t());
      add_row_multiple(H, r, pivot_row, -q);
      add_row_multiple(U, r, pivot_row, -q);
    }
    ++pivot_row;
  }
  return {std::move(H), std::move(U)};
}

SmithForm smith_normal_form(const IntMatrix& M) {
  IntMatrix D = M;
  IntMatrix U = IntMatrix::identity(M.rows());
  IntMatrix V = IntMatrix::identity(M.cols());
  const std::size_t limit = std::min(M.rows(), M.cols());
  std::size_t t = 0;

  auto move_smallest = [&](bool whole_block) {
    // Moves the smallest nonzero |entry| (in the block, or in row/col t) to (t, t).
    std::size_t bi = 0, bj = 0;
    bool found = false;
    Integer best;
    for (std::size_t i = t; i < D.rows(); ++i)
      for (std::size_t j = t; j < D.cols(); ++j) {
        if (!whole_block && i != t && j != t) continue;
        if (D(i, j) == 0) continue;
        Integer a = abs(D(i, j));
        if (!found || a < best) {
          best = a;
          bi = i;
          bj = j;
          found = true;
        }
      }
    if (!found) return false;
    D.swap_rows(t, bi);
    U.swap_rows(t, bi);
    D.swap_cols(t, bj);
    V.swap_cols(t, bj);
    return true;
  };

  while (t < limit) {
    if (!move_smallest(true)) break;
    for (;;) {
      bool clean = true;
      for (std::size_t i = t + 1; i < D.rows(); ++i) {
        if (D(i, t) == 0) continue;
        Integer q = D(i, t) / D(t, t);
        add_row_multiple(D, i, t, -q);
        add_row_multiple(U, i, t, -q);
        if (D(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < D.cols(); ++j) {
        if (D(t, j) == 0) continue;
        Integer q = D(t, j) / D(t, t);
        add_col_multiple(D, j, t, -q);
        add_col_multiple(V, j, t, -q);
        if (D(t, j) != 0) clean = false;
      }
      if (!clean) {
        move_smallest(false);
        continue;
      }
      bool divisible = true;
      for (std::size_t i = t + 1; i < D.rows() && divisible; ++i)
        for (std::size_t j = t + 1; j < D.cols(); ++j)
          if (D(i, j) % D(t, t) != 0) {
            add_row_multiple(D, t, i, Integer(1));
            add_row_multiple(U, t, i, Integer(1));
            divisible = false;
            break;
          }
      if (divisible) break;
    }
    if (D(t, t) < 0) {
      negate_row(D, t);
      negate_row(U, t);
    }
    ++t;
  }
  return {std::move(D), std::move(U), std::move(V), t};
}

IntMatrix integer_kernel_basis(const IntMatrix& M) {
  const std::size_t n = M.cols();
  auto [H, U] = hermite_normal_form(M.transpose());
  std::size_t r = 0;
  while (r < H.rows()) {
    bool zero = true;
    for (std::size_t c = 0; c < H.cols(); ++c)
      if (H(r, c) != 0) {
        zero = false;
        break;
      }
    if (zero) break;
    ++r;
  }
  const std::size_t dim = n - r;
  IntMatrix K(dim, n);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t c = 0; c < n; ++c) K(i, c) = U(r + i, c);
  // Canonical representative of the lattice: its own row HNF.
  IntMatrix canonical = hermite_normal_form(K).H;
  return canonical.transpose();
}

std::vector<std::size_t> row_reduce(RatMatrix& M) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < M.cols() && row < M.rows(); ++col) {
    std::size_t p = row;
    while (p < M.rows() && M(p, col) == 0) ++p;
    if (p == M.rows()) continue;
    M.swap_rows(row, p);
    Rational inv = 1 / M(row, col);
    for (std::size_t c = col; c < M.cols(); ++c) M(row, c) *= inv;
    for (std::size_t r = 0; r < M.rows(); ++r) {
      if (r == row || M(r, col) == 0) continue;
      Rational f = M(r, col);
      for (std::size_t c = col; c < M.cols(); ++c) M(r, c) -= f * M(row, c);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

std::size_t rank(const RatMatrix& M) {
  RatMatrix copy = M;
  return row_reduce(copy).size();
}

std::size_t rank(const IntMatrix& M) { return rank(to_rational(M)); }

Integer determinant(const IntMatrix& M) {
  assert(M.rows() == M.cols());
  const std::size_t n = M.rows();
  if (n == 0) return 1;
  IntMatrix A = M;
  Integer sign = 1;
  Integer prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (A(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && A(p, k) == 0) ++p;
      if (p == n) return 0;
      A.swap_rows(k, p);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        Integer num = A(i, j) * A(k, k) - A(i, k) * A(k, j);
        mpz_divexact(A(i, j).get_mpz_t(), num.get_mpz_t(), prev.get_mpz_t());
      }
    prev = A(k, k);
  }
  return sign * A(n - 1, n - 1);
}

RatMatrix rational_kernel(const RatMatrix& M) {
  RatMatrix R = M;
  auto pivots = row_reduce(R);
  std::vector<bool> is_pivot(M.cols(), false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<std::size_t> free_cols;
  for (std::size_t c = 0; c < M.cols(); ++c)
    if (!is_pivot[c]) free_cols.push_back(c);
  RatMatrix K(M.cols(), free_cols.size());
  for (std::size_t f = 0; f < free_cols.size(); ++f) {
    K(free_cols[f], f) = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) K(pivots[r], f) = -R(r, free_cols[f]);
  }
  return K;
}

std::optional<RatVector> solve_rational(const RatMatrix& M, std::span<const Rational> b) {
  assert(b.size() == M.rows());
  RatMatrix aug(M.rows(), M.cols() + 1);
  for (std::size_t r = 0; r < M.rows(); ++r) {
    for (std::size_t c = 0; c < M.cols(); ++c) aug(r, c) = M(r, c);
    aug(r, M.cols()) = b[r];
  }
  auto pivots = row_reduce(aug);
  if (!pivots.empty() && pivots.back() == M.cols()) return std::nullopt;
  RatVector x(M.cols());
  for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug(r, M.cols());
  return x;
}

std::optional<RatVector> solve_rational(const IntMatrix& M, std::span<const Rational> b) {
  return solve_rational(to_rational(M), b);
}

std::optional<IntVector> solve_integer(const IntMatrix& M, std::span<const Rational> b) {
  assert(b.size() == M.rows());
  SmithForm snf = smith_normal_form(M);
  RatVector ub(M.rows());
  for (std::size_t i = 0; i < M.rows(); ++i)
    for (std::size_t j = 0; j < M.rows(); ++j) ub[i] += Rational(snf.U(i, j)) * b[j];
  IntVector y(M.cols());
  for (std::size_t i = 0; i < M.rows(); ++i) {
    if (i < snf.rank) {
      Rational q = ub[i] / Rational(snf.D(i, i));
      if (q.get_den() != 1) return std::nullopt;
      y[i] = q.get_num();
    } else if (ub[i] != 0) {
      return std::nullopt;
    }
  }
  IntVector z(M.cols());
  for (std::size_t i = 0; i < M.cols(); ++i)
    for (std::size_t j = 0; j < M.cols(); ++j) z[i] += snf.V(i, j) * y[j];
  return z;
}

IntVector primitive_integer_vector(std::span<const Rational> v) {
  Integer lcm_den = 1;
  for (const auto& x : v) mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), x.get_den_mpz_t());
  IntVector out(v.size());
  Integer g = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    Rational scaled = v[i] * Rational(lcm_den);
    out[i] = scaled.get_num();
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), out[i].get_mpz_t());
  }
  if (g != 0)
    for (auto& x : out) x /= g;
  return out;
}

std::optional<LatticeWitness> lattice_membership_witness(std::span<const Rational> v,
                                                         const IntMatrix& lattice,
                                                         const IntMatrix& subspace) {
  const std::size_t dim = v.size();
  assert(lattice.rows() == dim);
  assert(subspace.cols() == 0 || subspace.rows() == dim);

  // Rows of P span the annihilator of the subspace; membership reduces to
  // (P*lattice) z = P v over the integers.
  IntMatrix P;
  if (subspace.cols() == 0) {
    P = IntMatrix::identity(dim);
  } else {
    RatMatrix ann = rational_kernel(to_rational(subspace.transpose()));
    P = IntMatrix(ann.cols(), dim);
    for (std::size_t r = 0; r < ann.cols(); ++r) {
      auto prim = primitive_integer_vector(ann.col(r));
      for (std::size_t c = 0; c < dim; ++c) P(r, c) = prim[c];
    }
  }
  IntMatrix A = P * lattice;
  RatVector pv(P.rows());
  for (std::size_t r = 0; r < P.rows(); ++r)
    for (std::size_t c = 0; c < dim; ++c) pv[r] += Rational(P(r, c)) * v[c];
  if (P.rows() == 0) {
    LatticeWitness w;
    w.lattice_coeffs.assign(lattice.cols(), 0);
    w.subspace_coeffs = *solve_rational(subspace, v);
    return w;
  }
  auto z = solve_integer(A, pv);
  if (!z) return std::nullopt;
  RatVector rest(v.begin(), v.end());
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < lattice.cols(); ++c) rest[r] -= Rational(lattice(r, c) * (*z)[c]);
  LatticeWitness w;
  w.lattice_coeffs = std::move(*z);
  if (subspace.cols() == 0) {
    w.subspace_coeffs = {};
  } else {
    auto sol = solve_rational(subspace, rest);
    assert(sol);
    w.subspace_coeffs = std::move(*sol);
  }
  return w;
}

bool lattice_membership(std::span<const Rational> v, const IntMatrix& lattice,
                        const IntMatrix& subspace) {
  return lattice_membership_witness(v, lattice, subspace).has_value();
}

Rational parse_rational(const std::string& text) {
  std::string t;
  for (char ch : text)
    if (ch != ' ') t.push_back(ch);
  if (t.empty()) throw Error(Error::Kind::InvalidArgument, "empty rational");
  auto valid_int = [](const std::string& s) {
    std::size_t i = (s.size() > 0 && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
      if (s[i] < '0' || s[i] > '9') return false;
    return true;
  };
  auto slash = t.find('/');
  std::string num = t.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : t.substr(slash + 1);
  if (!num.empty() && num[0] == '+') num.erase(0, 1);
  if (!valid_int(num) || !valid_int(den))
    throw Error(Error::Kind::InvalidArgument, "not an exact fraction p/q: '" + text + "'");
  Integer d(den);
  if (d == 0) throw Error(Error::Kind::InvalidArgument, "zero denominator in '" + text + "'");
  Rational r{Integer(num), d};
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& r) { return r.get_str(); }

} // namespace hypertoric
