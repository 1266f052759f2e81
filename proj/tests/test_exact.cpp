#include "hypertoric/exact.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace hypertoric;

namespace {

IntMatrix random_matrix(std::mt19937& rng, std::size_t r, std::size_t c, long bound) {
  std::uniform_int_distribution<long> dist(-bound, bound);
  IntMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = dist(rng);
  return m;
}

bool is_row_hnf(const IntMatrix& H) {
  std::size_t lead = 0;
  bool zero_rows = false;
  for (std::size_t r = 0; r < H.rows(); ++r) {
    std::size_t c = 0;
    while (c < H.cols() && H(r, c) == 0) ++c;
    if (c == H.cols()) {
      zero_rows = true;
      continue;
    }
    if (zero_rows) return false;
    if (r > 0 && c < lead) return false;
    if (H(r, c) <= 0) return false;
    for (std::size_t above = 0; above < r; ++above)
      if (H(above, c) < 0 || H(above, c) >= H(r, c)) return false;
    lead = c + 1;
  }
  return true;
}

} // namespace

TEST(Hermite, AlreadyReduced) {
  IntMatrix M{{1, 1}, {0, 0}};
  auto [H, U] = hermite_normal_form(M);
  EXPECT_EQ(H, M);
  EXPECT_EQ(U, IntMatrix::identity(2));
}

TEST(Hermite, GcdColumn) {
  auto [H, U] = hermite_normal_form(IntMatrix{{2}, {4}});
  EXPECT_EQ(H, (IntMatrix{{2}, {0}}));
  EXPECT_EQ(abs(determinant(U)), 1);
  EXPECT_EQ(U * (IntMatrix{{2}, {4}}), H);
}

TEST(Hermite, TwoByThree) {
  IntMatrix M{{1, 2, 3}, {4, 5, 6}};
  auto [H, U] = hermite_normal_form(M);
  EXPECT_EQ(U * M, H);
  EXPECT_EQ(abs(determinant(U)), 1);
  EXPECT_EQ(H, (IntMatrix{{1, 2, 3}, {0, 3, 6}}));
  EXPECT_TRUE(is_row_hnf(H));
}

TEST(Hermite, RandomRoundTrip) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t r = 1 + rng() % 8, c = 1 + rng() % 8;
    IntMatrix M = random_matrix(rng, r, c, 9);
    auto [H, U] = hermite_normal_form(M);
    ASSERT_EQ(U * M, H);
    ASSERT_EQ(abs(determinant(U)), 1);
    ASSERT_TRUE(is_row_hnf(H));
  }
}

TEST(Smith, RoundTrip) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    IntMatrix M = random_matrix(rng, 1 + rng() % 5, 1 + rng() % 5, 6);
    SmithForm s = smith_normal_form(M);
    ASSERT_EQ(s.U * M * s.V, s.D);
    ASSERT_EQ(abs(determinant(s.U)), 1);
    ASSERT_EQ(abs(determinant(s.V)), 1);
    for (std::size_t i = 0; i + 1 < s.rank; ++i) ASSERT_TRUE(s.D(i + 1, i + 1) % s.D(i, i) == 0);
    ASSERT_EQ(s.rank, rank(M));
  }
}

TEST(Kernel, SmallExamples) {
  EXPECT_EQ(integer_kernel_basis(IntMatrix{{1, -1}}), (IntMatrix{{1}, {1}}));
  EXPECT_EQ(integer_kernel_basis(IntMatrix{{1, 1}}), (IntMatrix{{1}, {-1}}));
}

namespace {

void expect_saturated_kernel(const IntMatrix& M, const IntMatrix& K) {
  ASSERT_TRUE((M * K).is_zero());
  ASSERT_EQ(K.cols(), M.cols() - rank(M));
  // Saturation: all invariant factors of K are 1.
  SmithForm s = smith_normal_form(K);
  ASSERT_EQ(s.rank, K.cols());
  for (std::size_t i = 0; i < s.rank; ++i) ASSERT_EQ(s.D(i, i), 1);
}

} // namespace

TEST(Kernel, TwoPlaneExample) {
  IntMatrix M{{0, 0, 1, 1, 1}, {1, 1, 0, 0, -1}};
  IntMatrix K = integer_kernel_basis(M);
  EXPECT_EQ(K.cols(), 3u);
  expect_saturated_kernel(M, K);
}

TEST(Kernel, RandomSaturated) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    IntMatrix M = random_matrix(rng, 1 + rng() % 4, 2 + rng() % 5, 5);
    IntMatrix K = integer_kernel_basis(M);
    if (K.cols() == 0) continue;
    expect_saturated_kernel(M, K);
    EXPECT_EQ(integer_kernel_basis(M), K);
  }
}

TEST(Solve, Rational) {
  RatVector b{3, 4};
  auto x = solve_rational(IntMatrix::identity(2), b);
  ASSERT_TRUE(x);
  EXPECT_EQ(*x, b);

  RatVector five{5};
  auto y = solve_rational(IntMatrix{{1, 1}}, five);
  ASSERT_TRUE(y);
  EXPECT_EQ((*y)[0] + (*y)[1], 5);

  RatVector bad{0, 1};
  EXPECT_FALSE(solve_rational(IntMatrix{{1, 1}, {1, 1}}, bad));
}

TEST(Lattice, Trivial) {
  RatVector zero{0, 0};
  EXPECT_TRUE(lattice_membership(zero, IntMatrix{{2, 0}, {0, 3}}, IntMatrix(2, 0)));
  RatVector half{Rational(1, 2)};
  EXPECT_FALSE(lattice_membership(half, IntMatrix{{1}}, IntMatrix(1, 0)));
  RatVector halves{Rational(1, 2), Rational(1, 2)};
  EXPECT_TRUE(lattice_membership(halves, IntMatrix::identity(2), IntMatrix{{1}, {1}}));
}

TEST(Lattice, AgreesWithBruteForce) {
  std::mt19937 rng(5);
  std::uniform_int_distribution<long> small(-2, 2);
  for (int trial = 0; trial < 200; ++trial) {
    IntMatrix L = random_matrix(rng, 3, 3, 2);
    std::size_t sdim = rng() % 2;
    IntMatrix S = random_matrix(rng, 3, sdim, 2);
    RatVector v(3);
    for (auto& x : v) x = Rational(small(rng), 1 + rng() % 3);
    for (auto& x : v) x.canonicalize();

    bool brute = false;
    for (long z0 = -3; z0 <= 3 && !brute; ++z0)
      for (long z1 = -3; z1 <= 3 && !brute; ++z1)
        for (long z2 = -3; z2 <= 3 && !brute; ++z2) {
          RatVector w(3);
          for (std::size_t i = 0; i < 3; ++i) w[i] = v[i] - L(i, 0) * z0 - L(i, 1) * z1 - L(i, 2) * z2;
          if (sdim == 0) {
            brute = w[0] == 0 && w[1] == 0 && w[2] == 0;
          } else {
            brute = solve_rational(S, w).has_value();
          }
        }
    auto witness = lattice_membership_witness(v, L, S);
    if (brute) ASSERT_TRUE(witness) << "trial " << trial;
    if (witness) {
      for (std::size_t i = 0; i < 3; ++i) {
        Rational acc = 0;
        for (std::size_t j = 0; j < sdim; ++j) acc += S(i, j) * witness->subspace_coeffs[j];
        for (std::size_t j = 0; j < 3; ++j) acc += L(i, j) * witness->lattice_coeffs[j];
        ASSERT_EQ(acc, v[i]);
      }
    }
    // Independent oracle for full-rank lattices without subspace: L^{-1} v integral.
    if (sdim == 0 && determinant(L) != 0) {
      auto z = solve_rational(L, v);
      bool integral = true;
      for (const auto& x : *z) integral = integral && x.get_den() == 1;
      ASSERT_EQ(integral, witness.has_value());
    }
  }
}

TEST(Parse, Rationals) {
  EXPECT_EQ(parse_rational("1/3"), Rational(1, 3));
  EXPECT_EQ(parse_rational("-4/6"), Rational(-2, 3));
  EXPECT_EQ(parse_rational("7"), Rational(7));
  EXPECT_THROW(parse_rational("1/0"), std::exception);
  EXPECT_THROW(parse_rational("x"), std::exception);
}
