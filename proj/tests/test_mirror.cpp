#include "hypertoric/errors.hpp"
#include "hypertoric/mirror.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <numeric>
#include <numbers>
#include <random>

using namespace hypertoric;

namespace {

constexpr double kPi = std::numbers::pi;

Error::Kind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return Error::Kind::InvalidArgument;
}

bool near(cplx a, cplx b, double tol = 1e-12) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

} // namespace

TEST(MirrorSpace, ATilde1Punctures) {
  auto m = mirror_space(instances::a_tilde(1), {2.0, 3.0}, 0.3, {0.2});
  ASSERT_EQ(m.punctures.size(), 3u);
  EXPECT_EQ(m.punctures[0].factor, -1);
  EXPECT_TRUE(near(m.punctures[1].t, -1.0 / 3));
  EXPECT_TRUE(near(m.punctures[2].t, -1.0 / 2));
  EXPECT_EQ(m.punctures[1].factor, 1);
  EXPECT_EQ(m.punctures[2].factor, 0);
}

TEST(MirrorSpace, CotangentP1Punctures) {
  cplx q1(0.7, 0.2), q2(1.4, -0.3);
  auto m = mirror_space(instances::cotangent_projective(1), {q1, q2}, 0.3, {0.2});
  ASSERT_EQ(m.punctures.size(), 3u);
  std::vector<cplx> pts{m.punctures[1].t, m.punctures[2].t};
  auto has = [&](cplx z) { return std::any_of(pts.begin(), pts.end(), [&](cplx p) { return near(p, z); }); };
  EXPECT_TRUE(has(-1.0 / q1));
  EXPECT_TRUE(has(-q2));
}

TEST(MirrorSpace, CollidingPunctures) {
  EXPECT_EQ(kind_of([] { mirror_space(instances::a_tilde(1), {2.0, 2.0}, 0.3, {0.2}); }),
            Error::Kind::DegenerateModel);
  EXPECT_EQ(kind_of([] { mirror_space(instances::a_tilde(1), {0.0, 2.0}, 0.3, {0.2}); }),
            Error::Kind::DegenerateModel);
}

TEST(Cycles, Counts) {
  auto m = mirror_space(instances::a_tilde(1), {2.0, 3.0}, 0.3, {0.2});
  auto cyc = build_cycles(m);
  ASSERT_EQ(cyc.size(), 2u);
  EXPECT_EQ(cyc[0].first.factor, -1);
  EXPECT_EQ(cyc[0].second.factor, 1);
  EXPECT_EQ(cyc[1].first.factor, 1);
  EXPECT_EQ(cyc[1].second.factor, 0);
  for (const auto& c : cyc) EXPECT_LE(period(m, c).monodromy_defect, 1e-10);

  auto t = mirror_space(instances::cotangent_projective(1), {0.7, 1.4}, 0.3, {0.2});
  EXPECT_EQ(build_cycles(t).size(), 2u);
  auto a3 = mirror_space(instances::a_tilde(3), {0.5, 1.1, 2.3, 4.0}, 0.3, {0.2});
  EXPECT_EQ(build_cycles(a3).size(), 4u);
}

TEST(Cycles, HigherDimensionUnsupported) {
  auto m = mirror_space(instances::cotangent_projective(2), {0.5, 1.1, 2.3}, 0.3, {0.2, 0.1});
  EXPECT_EQ(kind_of([&] { build_cycles(m); }), Error::Kind::UnsupportedDimension);
}

TEST(Period, PlainResidue) {
  auto m = mirror_space(instances::a_tilde(1), {2.0, 3.0}, 0.0, {0.0});
  Contour circle;
  circle.kind = Contour::Kind::Circle;
  circle.first = m.punctures[0];
  circle.radius_first = 0.1;
  EXPECT_TRUE(near(period(m, circle).value, cplx(0, 2 * kPi), 1e-13));
}

TEST(Period, SingleLoopIsNotClosed) {
  auto m = mirror_space(instances::a_tilde(1), {2.0, 3.0}, 0.3, {0.2});
  Contour circle;
  circle.kind = Contour::Kind::Circle;
  circle.first = m.punctures[0];
  circle.radius_first = 0.1;
  EXPECT_EQ(kind_of([&] { period(m, circle); }), Error::Kind::BranchTrackingFailure);
}

TEST(Period, BetaFunctionModulus) {
  // One hyperplane: Omega = (1 + q t)^h t^{-c} dt/t. A Pochhammer loop around 0 and -1/q
  // gives |q|^c |1 - e^{-2 pi i c}| |1 - e^{2 pi i h}| |B(-c, h + 1)| in modulus for real h, c, q > 0.
  auto td = build_torus_data(IntMatrix{{1}}, {0});
  const double h = 0.37, c = 0.23, q = 1.7;
  auto m = mirror_space(td, {q}, h, {c});
  auto cyc = build_cycles(m);
  ASSERT_EQ(cyc.size(), 1u);
  double got = std::abs(period(m, cyc[0]).value);
  double beta = std::tgamma(-c) * std::tgamma(h + 1) / std::tgamma(h + 1 - c);
  double expected = std::pow(q, c) * std::abs(1.0 - std::exp(cplx(0, -2 * kPi * c))) *
                    std::abs(1.0 - std::exp(cplx(0, 2 * kPi * h))) * std::abs(beta);
  EXPECT_NEAR(got / expected, 1.0, 1e-11);
}

TEST(Period, ParametrizationInvariance) {
  auto m = mirror_space(instances::a_tilde(1), {cplx(2.0, 0.3), cplx(3.1, -0.4)}, cplx(1.0 / 3, 0.1), {0.2});
  for (const auto& c : build_cycles(m)) {
    PeriodValue v = period(m, c);
    EXPECT_GT(std::abs(v.value), 1e-6);

    Contour faster = c;
    faster.refinement *= 2;
    EXPECT_LT(std::abs(period(m, faster).value - v.value), 1e-10 * std::abs(v.value));

    Contour other = c;
    other.base_fraction = 0.37;
    other.radius_first *= 0.7;
    other.radius_second *= 1.2;
    EXPECT_LT(std::abs(period(m, other).value - v.value), 1e-8 * std::abs(v.value));

    Contour nudged = c;
    nudged.base_fraction += 1e-3;
    nudged.radius_first += 1e-3;
    EXPECT_LT(std::abs(period(m, nudged).value - v.value), 1e-7 * std::abs(v.value));
  }
}

TEST(Period, EulerFormIdentity) {
  auto m = mirror_space(instances::a_tilde(2), {0.5, cplx(1.1, 0.4), 2.3}, cplx(0.3, 0.1), {0.2});
  std::vector<CVector> ts{{cplx(0.3, 0.8)}, {cplx(-1.2, 0.1)}, {cplx(2.0, -3.0)}};
  EXPECT_LE(euler_form_identity_error(m, ts), 1e-10);
  auto m2 = mirror_space(instances::two_plane_example(), {0.5, 1.1, 2.3, 0.7, 1.3}, 0.3, {0.2, 0.1});
  EXPECT_LE(euler_form_identity_error(m2, {{cplx(0.3, 0.8), cplx(1.1, -0.2)}, {cplx(-2, 1), cplx(0.5, 0.5)}}), 1e-10);
}

TEST(GkzOnPeriods, ATilde1) {
  auto rep = verify_gkz_on_periods(instances::a_tilde(1), 1.0 / 3, {0.2}, {cplx(1.3, 0.2), cplx(0.6, -0.3)});
  EXPECT_LE(rep.max_residual, 1e-6);
  EXPECT_EQ(rep.period_rank, 2u);
  EXPECT_EQ(rep.expected_rank, 2u);
}

TEST(GkzOnPeriods, CotangentP1Linear) {
  auto rep = verify_gkz_on_periods(instances::cotangent_projective(1), cplx(0.3, 0.05), {0.45},
                                   {cplx(0.8, 0.3), cplx(1.7, -0.2)});
  ASSERT_EQ(rep.operators[0], "D1 - D2 - c");
  EXPECT_LE(rep.per_operator[0], 1e-6);
  EXPECT_LE(rep.max_residual, 1e-6);
  EXPECT_EQ(rep.period_rank, 2u);
}

TEST(GkzOnPeriods, WrongSignDetected) {
  GkzPeriodOptions opts;
  opts.corrupt_circuit_sign = true;
  auto rep = verify_gkz_on_periods(instances::a_tilde(1), 1.0 / 3, {0.2}, {cplx(1.3, 0.2), cplx(0.6, -0.3)}, opts);
  EXPECT_GT(rep.max_residual, 1e-2);
}

TEST(GkzOnPeriods, RandomPointsATilde2) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> mod(0.4, 2.5), arg(-0.6, 0.6);
  for (int k = 0; k < 3; ++k) {
    CVector q;
    for (int i = 0; i < 3; ++i) q.push_back(std::polar(mod(rng), arg(rng)));
    auto rep = verify_gkz_on_periods(instances::a_tilde(2), cplx(0.31, 0.07), {cplx(0.17, -0.05)}, q);
    EXPECT_LE(rep.max_residual, 1e-6);
    EXPECT_EQ(rep.period_rank, rep.expected_rank);
  }
}

TEST(Critical, ATilde1AgainstQuadratic) {
  const cplx h = 0.3, c = 0.2, q1 = 2.0, q2 = 3.0;
  auto pts = critical_points(instances::a_tilde(1), {q1, q2}, h, {c});
  ASSERT_EQ(pts.size(), 2u);
  // (2h - c) q1 q2 t^2 + (h - c)(q1 + q2) t - c = 0
  cplx A = (2.0 * h - c) * q1 * q2, B = (h - c) * (q1 + q2), C = -c;
  cplx disc = std::sqrt(B * B - 4.0 * A * C);
  std::vector<cplx> roots{(-B + disc) / (2.0 * A), (-B - disc) / (2.0 * A)};
  for (const auto& p : pts) {
    EXPECT_LT(p.residual, 1e-12);
    double best = std::min(std::abs(p.t[0] - roots[0]), std::abs(p.t[0] - roots[1]));
    EXPECT_LT(best, 1e-12);
  }
}

TEST(Critical, CountEqualsRank) {
  std::vector<TorusData> tds{instances::cotangent_projective(1), instances::a_tilde(1), instances::a_tilde(2),
                             instances::a_tilde(3)};
  for (const auto& td : tds) {
    CVector q;
    for (std::size_t i = 0; i < td.n; ++i) q.push_back(cplx(0.6 + 0.45 * i, 0.1 * i));
    auto pts = critical_points(td, q, cplx(0.3, 0.02), {0.2});
    EXPECT_EQ(pts.size(), build_presentation(td, RingMode::Classical).rank());
  }
}

TEST(Critical, TwoDimensional) {
  auto td = instances::cotangent_projective(2);
  auto pts = critical_points(td, {0.5, cplx(1.1, 0.3), 0.8}, 0.3, {0.2, cplx(0.1, 0.05)});
  EXPECT_EQ(pts.size(), 3u);
  for (const auto& p : pts) EXPECT_LT(p.residual, 1e-10);
}

TEST(Hungarian, MatchesBruteForce) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 10);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + trial % 6;
    Eigen::MatrixXd cost(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) cost(i, j) = u(rng);
    auto a = min_cost_assignment(cost);
    double got = 0;
    for (int i = 0; i < n; ++i) got += cost(i, static_cast<Eigen::Index>(a[i]));
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = 1e300;
    do {
      double s = 0;
      for (int i = 0; i < n; ++i) s += cost(i, perm[i]);
      best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    EXPECT_NEAR(got, best, 1e-12);
  }
}

TEST(Spectra, CotangentP1) {
  auto td = instances::cotangent_projective(1);
  ConnectionFamily fam(build_presentation(td, RingMode::Quantum));
  NumericPoint p{cplx(0.3, 0.1), {cplx(0.45, -0.2)}, {cplx(0.7, 0.3), cplx(1.3, -0.4)}};
  auto crit = critical_points(td, p.q, p.hbar, p.c);
  auto rep = compare_spectra(fam, crit, p);
  EXPECT_LE(rep.max_distance, 1e-8);
  EXPECT_LE(rep.joint_distance, 1e-8);
}

TEST(Spectra, CotangentP1ClassicalLimit) {
  auto td = instances::cotangent_projective(1);
  const cplx h = 0.3, c = 0.45;
  auto crit = critical_points(td, {1e-7, 1e-7}, h, {c});
  ASSERT_EQ(crit.size(), 2u);
  std::vector<cplx> x1{crit[0].x[0], crit[1].x[0]};
  auto has = [&](cplx z) { return std::abs(x1[0] - z) < 1e-5 || std::abs(x1[1] - z) < 1e-5; };
  EXPECT_TRUE(has(0.0));
  EXPECT_TRUE(has(c));
}

TEST(Spectra, JointMatchingInstances) {
  struct Case {
    TorusData td;
    double tol;
  };
  std::vector<Case> cases{{instances::a_tilde(2), 1e-8}, {instances::a_tilde(3), 1e-8},
                          {instances::cotangent_projective(2), 1e-6}, {instances::two_plane_example(), 1e-6}};
  for (auto& [td, tol] : cases) {
    ConnectionFamily fam(build_presentation(td, RingMode::Quantum));
    CVector q, c;
    for (std::size_t i = 0; i < td.n; ++i) q.push_back(std::polar(0.5 + 0.31 * i, 0.2 * i - 0.3));
    for (std::size_t j = 0; j < td.d; ++j) c.push_back(cplx(0.2 + 0.13 * j, 0.03));
    NumericPoint p{cplx(0.3, 0.05), c, q};
    auto crit = critical_points(td, q, p.hbar, c);
    auto rep = compare_spectra(fam, crit, p);
    EXPECT_EQ(crit.size(), fam.rank());
    EXPECT_LE(rep.joint_distance, tol) << td.n;
  }
}

TEST(Spectra, TwoDimensionalRandomPoints) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> mod(0.3, 2.5), arg(-3, 3);
  for (auto td : {instances::cotangent_projective(2), instances::two_plane_example()}) {
    ConnectionFamily fam(build_presentation(td, RingMode::Quantum));
    int tried = 0;
    while (tried < 15) {
      CVector q;
      for (std::size_t i = 0; i < td.n; ++i) q.push_back(std::polar(mod(rng), arg(rng)));
      if (fam.clearance(q) < 0.05) continue;
      ++tried;
      NumericPoint p{cplx(0.3, 0.05), {cplx(0.23, 0.02), cplx(0.41, -0.05)}, q};
      auto crit = critical_points(td, q, p.hbar, p.c);
      ASSERT_EQ(crit.size(), fam.rank());
      EXPECT_LE(compare_spectra(fam, crit, p).joint_distance, 1e-6) << td.n << " " << tried;
    }
  }
}

TEST(TransportConsistency, CotangentP1AndATilde1) {
  for (auto td : {instances::cotangent_projective(1), instances::a_tilde(1)}) {
    ConnectionFamily fam(build_presentation(td, RingMode::Quantum));
    QPath path;
    path.waypoints = {{cplx(0.8, 0.3), cplx(1.7, -0.2)}, {cplx(1.0, 0.5), cplx(1.5, 0.1)},
                      {cplx(1.2, 0.2), cplx(1.9, 0.3)}};
    auto rep = check_transport_consistency(fam, cplx(0.3, 0.05), {0.45}, path);
    EXPECT_LE(rep.max_relative_error, 1e-6);
  }
}
