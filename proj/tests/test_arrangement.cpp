#include "hypertoric/arrangement.hpp"
#include "hypertoric/errors.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace hypertoric;

namespace {

std::vector<IndexSet> supports(const std::vector<Circuit>& cs) {
  std::vector<IndexSet> out;
  for (const auto& c : cs) out.push_back(c.support);
  return out;
}

// Minimal dependent subsets by exhaustive search over all subsets.
std::vector<IndexSet> brute_force_circuits(const IntMatrix& a) {
  const std::size_t n = a.cols();
  std::vector<IndexSet> dependent_minimal;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    IndexSet s;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) s.push_back(i);
    if (rank(columns(a, s)) == s.size()) continue;
    bool minimal = true;
    for (std::size_t drop = 0; drop < s.size() && minimal; ++drop) {
      IndexSet t = s;
      t.erase(t.begin() + drop);
      if (!t.empty() && rank(columns(a, t)) < t.size()) minimal = false;
    }
    if (minimal) dependent_minimal.push_back(s);
  }
  std::sort(dependent_minimal.begin(), dependent_minimal.end());
  return dependent_minimal;
}

} // namespace

TEST(TorusData, CotangentP1) {
  TorusData td = instances::cotangent_projective(1);
  EXPECT_EQ(td.iota, (IntMatrix{{1}, {1}}));
  ASSERT_EQ(td.hyperplanes.size(), 2u);
  EXPECT_EQ(td.hyperplanes[0].normal, IntVector{1});
  EXPECT_EQ(td.hyperplanes[0].offset, 1);
  EXPECT_EQ(td.hyperplanes[1].normal, IntVector{-1});
  EXPECT_EQ(td.hyperplanes[1].offset, 0);
}

TEST(TorusData, ATilde1) {
  TorusData td = instances::a_tilde(1);
  EXPECT_EQ(td.iota, (IntMatrix{{1}, {-1}}));
  EXPECT_EQ(td.theta_hat, (IntVector{1, 0}));
}

TEST(TorusData, Errors) {
  EXPECT_NO_THROW(build_torus_data(IntMatrix{{2}}, IntVector{0}, {.require_surjective = false}));
  try {
    build_torus_data(IntMatrix{{2, 4}}, IntVector{0, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), Error::Kind::NotSurjective);
  }
  try {
    build_torus_data(IntMatrix{{1, 1}, {2, 2}}, IntVector{0, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), Error::Kind::RankDeficient);
  }
}

TEST(Circuits, CotangentP1) {
  auto cs = enumerate_circuits(instances::cotangent_projective(1));
  ASSERT_EQ(cs.size(), 1u);
  EXPECT_EQ(cs[0].plus, (IndexSet{0, 1}));
  EXPECT_TRUE(cs[0].minus.empty());
  EXPECT_EQ(cs[0].beta, (IntVector{1, 1}));
  EXPECT_EQ(cs[0].beta_k, (IntVector{1}));
}

TEST(Circuits, ATilde1) {
  auto cs = enumerate_circuits(instances::a_tilde(1));
  ASSERT_EQ(cs.size(), 1u);
  EXPECT_EQ(cs[0].plus, (IndexSet{0}));
  EXPECT_EQ(cs[0].minus, (IndexSet{1}));
  EXPECT_EQ(cs[0].beta, (IntVector{1, -1}));
}

TEST(Circuits, TwoPlaneExample) {
  TorusData td = instances::two_plane_example();
  auto cs = enumerate_circuits(td);
  std::vector<IndexSet> expected{{0, 1}, {0, 2, 4}, {0, 3, 4}, {1, 2, 4}, {1, 3, 4}, {2, 3}};
  EXPECT_EQ(supports(cs), expected);
  EXPECT_EQ(supports(cs), brute_force_circuits(td.a));
}

TEST(Circuits, WallThrows) {
  auto td = build_torus_data(IntMatrix{{1, 1}}, IntVector{0, 0});
  try {
    enumerate_circuits(td);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), Error::Kind::NonGenericStability);
  }
}

TEST(Circuits, PropertiesOnInstances) {
  std::vector<TorusData> all;
  for (std::size_t n = 1; n <= 4; ++n) {
    all.push_back(instances::cotangent_projective(n));
    all.push_back(instances::a_tilde(n));
  }
  all.push_back(instances::two_plane_example());
  for (const auto& td : all) {
    auto cs = enumerate_circuits(td);
    ASSERT_EQ(supports(cs), brute_force_circuits(td.a));
    for (const auto& c : cs) {
      auto ab = td.a * std::span<const Integer>(c.beta);
      for (const auto& x : ab) ASSERT_EQ(x, 0);
      Integer pairing = 0;
      for (std::size_t i = 0; i < td.n; ++i) pairing += c.beta[i] * td.theta_hat[i];
      ASSERT_GT(pairing, 0);
      for (const auto& b : c.beta) ASSERT_LE(abs(b), 1);
      auto back = td.iota * std::span<const Integer>(c.beta_k);
      ASSERT_EQ(back, c.beta);
    }
    for (std::size_t x = 0; x < cs.size(); ++x)
      for (std::size_t y = 0; y < cs.size(); ++y)
        if (x != y)
          ASSERT_FALSE(std::includes(cs[y].support.begin(), cs[y].support.end(), cs[x].support.begin(),
                                     cs[x].support.end()));
  }
}

TEST(Circuits, RandomAgainstBruteForce) {
  std::mt19937 rng(17);
  std::uniform_int_distribution<long> e(-2, 2), th(-20, 20);
  int checked = 0;
  while (checked < 25) {
    std::size_t d = 1 + rng() % 3, n = d + 1 + rng() % (10 - d);
    IntMatrix a(d, n);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < n; ++j) a(i, j) = e(rng);
    IntVector theta(n);
    for (auto& t : theta) t = th(rng) * 7919 + static_cast<long>(rng() % 97);
    try {
      auto td = build_torus_data(a, theta);
      auto cs = enumerate_circuits(td);
      ASSERT_EQ(supports(cs), brute_force_circuits(a));
      ++checked;
    } catch (const Error&) {
    }
  }
}

TEST(Classify, Instances) {
  auto c = classify(instances::cotangent_projective(3));
  EXPECT_TRUE(c.simple && c.unimodular && c.smooth);
  EXPECT_TRUE(classify(instances::two_plane_example()).smooth);
  EXPECT_TRUE(classify(instances::a_tilde(3)).smooth);
  EXPECT_FALSE(classify(build_torus_data(IntMatrix{{2}}, IntVector{0}, {.require_surjective = false})).unimodular);
  auto coincident = classify(build_torus_data(IntMatrix{{1, 1}}, IntVector{0, 0}));
  EXPECT_FALSE(coincident.simple);
  EXPECT_FALSE(coincident.smooth);
}

TEST(Vertices, Counts) {
  auto v = vertices(instances::cotangent_projective(1));
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].position, RatVector{-1});
  EXPECT_EQ(v[1].position, RatVector{0});
  EXPECT_EQ(vertices(instances::two_plane_example()).size(), 8u);
  EXPECT_EQ(vertices(instances::a_tilde(2)).size(), 3u);
  for (std::size_t n = 1; n <= 4; ++n) {
    EXPECT_EQ(vertices(instances::cotangent_projective(n)).size(), n + 1);
    EXPECT_EQ(matroid_basis_count(instances::cotangent_projective(n)), n + 1);
  }
}

TEST(RootHyperplanes, Dimensions) {
  auto td1 = instances::cotangent_projective(1);
  auto r1 = root_hyperplanes(td1, enumerate_circuits(td1));
  ASSERT_EQ(r1.size(), 1u);
  EXPECT_EQ(r1[0].dimension, 0u);

  auto td = instances::two_plane_example();
  auto cs = enumerate_circuits(td);
  auto rh = root_hyperplanes(td, cs);
  ASSERT_EQ(rh.size(), 6u);
  for (std::size_t i = 0; i < rh.size(); ++i) {
    EXPECT_EQ(rh[i].dimension, 2u);
    for (const auto& v : rh[i].spanning) {
      Integer dot = 0;
      for (std::size_t l = 0; l < td.k; ++l) dot += v[l] * cs[i].beta_k[l];
      // Rows of iota outside S pair to zero with beta_S (beta vanishes off S).
      EXPECT_EQ(dot, 0);
    }
  }

  auto ta = instances::a_tilde(2);
  auto rha = root_hyperplanes(ta, enumerate_circuits(ta));
  ASSERT_EQ(rha.size(), 3u);
  for (std::size_t x = 0; x < 3; ++x)
    for (std::size_t y = x + 1; y < 3; ++y) {
      IntMatrix two(2, 2);
      for (std::size_t l = 0; l < 2; ++l) {
        two(0, l) = rha[x].spanning[0][l];
        two(1, l) = rha[y].spanning[0][l];
      }
      EXPECT_EQ(rank(two), 2u);
    }
}
