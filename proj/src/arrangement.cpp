#include "hypertoric/arrangement.hpp"

#include "hypertoric/errors.hpp"

#include <algorithm>
#include <cstdint>

namespace hypertoric {

bool Circuit::contains(std::size_t i) const {
  return std::binary_search(support.begin(), support.end(), i);
}

int Circuit::sign(std::size_t i) const {
  if (std::binary_search(plus.begin(), plus.end(), i)) return 1;
  if (std::binary_search(minus.begin(), minus.end(), i)) return -1;
  return 0;
}

IntMatrix columns(const IntMatrix& a, const IndexSet& subset) {
  IntMatrix m(a.rows(), subset.size());
  for (std::size_t j = 0; j < subset.size(); ++j)
    for (std::size_t r = 0; r < a.rows(); ++r) m(r, j) = a(r, subset[j]);
  return m;
}

TorusData build_torus_data(const IntMatrix& a, const IntVector& theta_hat, BuildOptions options) {
  if (a.cols() == 0 || a.rows() == 0)
    throw Error(Error::Kind::InvalidArgument, "matrix a must be non-empty");
  if (a.cols() > 16) throw Error(Error::Kind::InvalidArgument, "at most 16 hyperplanes supported");
  if (theta_hat.size() != a.cols())
    throw Error(Error::Kind::InvalidArgument, "theta_hat must have one entry per column of a");
  if (rank(a) != a.rows())
    throw Error(Error::Kind::RankDeficient, "a does not have full row rank");
  TorusData td;
  SmithForm snf = smith_normal_form(a);
  for (std::size_t i = 0; i < snf.rank; ++i)
    if (snf.D(i, i) != 1) {
      if (options.require_surjective)
        throw Error(Error::Kind::NotSurjective, "a is not surjective onto Z^d (invariant factor " +
                                                    snf.D(i, i).get_str() + ")");
      td.surjective = false;
    }

  td.n = a.cols();
  td.d = a.rows();
  td.k = td.n - td.d;
  td.a = a;
  td.iota = integer_kernel_basis(a);
  td.theta_hat = theta_hat;
  for (std::size_t i = 0; i < td.n; ++i) td.hyperplanes.push_back({a.col(i), theta_hat[i]});
  return td;
}

namespace {

std::uint32_t mask_of(const IndexSet& s) {
  std::uint32_t m = 0;
  for (auto i : s) m |= (1u << i);
  return m;
}

} // namespace

std::vector<Circuit> enumerate_circuits(const TorusData& td) {
  std::vector<Circuit> out;
  std::vector<std::uint32_t> found;
  const RatMatrix a = to_rational(td.a);
  for (std::size_t size = 1; size <= std::min(td.n, td.d + 1); ++size) {
    for_each_subset(td.n, size, [&](const IndexSet& s) {
      const std::uint32_t m = mask_of(s);
      for (auto f : found)
        if ((f & m) == f) return;
      RatMatrix sub(td.d, s.size());
      for (std::size_t j = 0; j < s.size(); ++j)
        for (std::size_t r = 0; r < td.d; ++r) sub(r, j) = a(r, s[j]);
      RatMatrix ker = rational_kernel(sub);
      if (ker.cols() == 0) return;
      assert(ker.cols() == 1);
      IntVector coeffs = primitive_integer_vector(ker.col(0));
      Circuit c;
      c.support = s;
      c.beta.assign(td.n, 0);
      Integer pairing = 0;
      for (std::size_t j = 0; j < s.size(); ++j) {
        c.beta[s[j]] = coeffs[j];
        pairing += coeffs[j] * td.theta_hat[s[j]];
      }
      if (pairing == 0) {
        std::string idx;
        for (auto i : s) idx += (idx.empty() ? "" : ",") + std::to_string(i + 1);
        throw Error(Error::Kind::NonGenericStability,
                    "theta_hat pairs to zero with the circuit {" + idx + "}");
      }
      if (pairing < 0)
        for (auto& b : c.beta) b = -b;
      for (auto i : s) (c.beta[i] > 0 ? c.plus : c.minus).push_back(i);
      RatVector beta_q(c.beta.begin(), c.beta.end());
      auto bk = solve_rational(td.iota, beta_q);
      assert(bk);
      for (const auto& x : *bk) {
        assert(x.get_den() == 1);
        c.beta_k.push_back(x.get_num());
      }
      found.push_back(m);
      out.push_back(std::move(c));
    });
  }
  std::sort(out.begin(), out.end(),
            [](const Circuit& x, const Circuit& y) { return x.support < y.support; });
  return out;
}

Classification classify(const TorusData& td) {
  Classification cls;
  cls.simple = true;
  for (std::size_t size = 1; size <= std::min(td.n, td.d + 1) && cls.simple; ++size) {
    for_each_subset(td.n, size, [&](const IndexSet& s) {
      if (!cls.simple) return;
      IntMatrix rows = columns(td.a, s).transpose();
      RatVector rhs;
      for (auto i : s) rhs.push_back(Rational(-td.theta_hat[i]));
      if (!solve_rational(rows, rhs)) return;
      if (rank(rows) < s.size()) cls.simple = false;
    });
  }
  cls.unimodular = true;
  for_each_subset(td.n, td.d, [&](const IndexSet& s) {
    if (!cls.unimodular) return;
    Integer det = determinant(columns(td.a, s));
    if (det != 0 && abs(det) != 1) cls.unimodular = false;
  });
  cls.unimodular = cls.unimodular && td.surjective;
  cls.smooth = cls.simple && cls.unimodular;
  return cls;
}

std::vector<Vertex> vertices(const TorusData& td) {
  std::vector<Vertex> out;
  for_each_subset(td.n, td.d, [&](const IndexSet& s) {
    IntMatrix rows = columns(td.a, s).transpose();
    if (determinant(rows) == 0) return;
    RatVector rhs;
    for (auto i : s) rhs.push_back(Rational(-td.theta_hat[i]));
    auto x = solve_rational(rows, rhs);
    assert(x);
    out.push_back({s, std::move(*x)});
  });
  return out;
}

std::size_t matroid_basis_count(const TorusData& td) {
  std::size_t count = 0;
  for_each_subset(td.n, td.d, [&](const IndexSet& s) {
    if (determinant(columns(td.a, s)) != 0) ++count;
  });
  return count;
}

std::vector<RootHyperplane> root_hyperplanes(const TorusData& td,
                                             const std::vector<Circuit>& circuits) {
  std::vector<RootHyperplane> out;
  for (std::size_t ci = 0; ci < circuits.size(); ++ci) {
    RootHyperplane rh;
    rh.circuit_index = ci;
    for (std::size_t i = 0; i < td.n; ++i)
      if (!circuits[ci].contains(i)) rh.spanning.push_back(td.iota.row(i));
    IntMatrix span(rh.spanning.size(), td.k);
    for (std::size_t r = 0; r < rh.spanning.size(); ++r)
      for (std::size_t c = 0; c < td.k; ++c) span(r, c) = rh.spanning[r][c];
    rh.dimension = rh.spanning.empty() ? 0 : rank(span);
    if (rh.dimension + 1 != td.k)
      throw Error(Error::Kind::DimensionMismatch,
                  "root hyperplane of circuit " + std::to_string(ci) + " has dimension " +
                      std::to_string(rh.dimension) + ", expected " + std::to_string(td.k - 1));
    out.push_back(std::move(rh));
  }
  return out;
}

namespace instances {

TorusData cotangent_projective(std::size_t n) {
  IntMatrix a(n, n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = 1;
    a(i, n) = -1;
  }
  IntVector theta(n + 1, 0);
  theta[0] = 1;
  return build_torus_data(a, theta);
}

TorusData a_tilde(std::size_t n) {
  IntMatrix a(1, n + 1);
  IntVector theta(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    a(0, i) = 1;
    theta[i] = static_cast<long>(n - i);
  }
  return build_torus_data(a, theta);
}

TorusData two_plane_example() {
  IntMatrix a{{0, 0, 1, 1, 1}, {1, 1, 0, 0, -1}};
  IntVector theta{0, 2, 0, 3, 5};
  return build_torus_data(a, theta);
}

} // namespace instances

} // namespace hypertoric
