#pragma once

// Slow independent oracles shared by the unit tests and the acceptance run.

#include "hypertoric/resonance.hpp"

#include <vector>

namespace hypertoric::oracle {

/// Membership of v in span(cols) + Z^m by trying every shift with entries in [-3, 3].
inline bool brute_force_resonant(const TorusData& td, const Rational& hbar, const RatVector& c) {
  const auto v = parameter_vector(td, hbar, c);
  const std::size_t m = v.size();
  for (const auto& q : enumerate_minimal_saturated(enumerate_circuits(td), td.n)) {
    // Rows of N span the annihilator of the subspace: v - z in span iff N (v - z) = 0.
    RatMatrix spanT = to_rational(complement_span(td, q)).transpose();
    RatMatrix N = rational_kernel(spanT).transpose();
    if (N.rows() == 0) return true;
    std::vector<std::vector<long>> rows;
    std::vector<long> rhs;
    bool integral = true;
    for (std::size_t r = 0; r < N.rows(); ++r) {
      Integer den = 1;
      for (std::size_t k = 0; k < m; ++k) den = lcm(den, N(r, k).get_den());
      std::vector<long> row(m);
      Rational nv = 0;
      for (std::size_t k = 0; k < m; ++k) {
        Rational e = N(r, k) * den;
        row[k] = e.get_num().get_si();
        nv += e * v[k];
      }
      if (nv.get_den() != 1) integral = false;
      rows.push_back(row);
      rhs.push_back(nv.get_num().get_si());
    }
    if (!integral) continue;
    std::vector<long> z(m, -3);
    for (;;) {
      bool all = true;
      for (std::size_t r = 0; r < rows.size() && all; ++r) {
        long s = 0;
        for (std::size_t k = 0; k < m; ++k) s += rows[r][k] * z[k];
        all = s == rhs[r];
      }
      if (all) return true;
      std::size_t k = 0;
      while (k < m && z[k] == 3) z[k++] = -3;
      if (k == m) break;
      ++z[k];
    }
  }
  return false;
}

} // namespace hypertoric::oracle
