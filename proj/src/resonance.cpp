#include "hypertoric/resonance.hpp"

#include "hypertoric/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <thread>

namespace hypertoric {

namespace {

using Mask = std::uint32_t;

// Bit i is index i, bit n + i is i*.
Mask to_mask(const SignedIndexSet& s, std::size_t n) {
  Mask m = 0;
  for (auto i : s.plain) m |= Mask{1} << i;
  for (auto i : s.starred) m |= Mask{1} << (n + i);
  return m;
}

SignedIndexSet from_codes(const IndexSet& codes, std::size_t n) {
  SignedIndexSet s;
  for (auto k : codes) (k < n ? s.plain : s.starred).push_back(k < n ? k : k - n);
  return s;
}

} // namespace

std::string SignedIndexSet::to_string() const {
  std::string out = "{";
  bool first = true;
  auto add = [&](std::size_t i, bool star) {
    if (!first) out += ",";
    first = false;
    out += std::to_string(i + 1) + (star ? "*" : "");
  };
  for (auto i : plain) add(i, false);
  for (auto i : starred) add(i, true);
  return out + "}";
}

std::pair<SignedIndexSet, SignedIndexSet> split_circuit_sides(const Circuit& circuit) {
  SignedIndexSet left{circuit.plus, circuit.minus};
  SignedIndexSet right{circuit.minus, circuit.plus};
  return {left, right};
}

bool is_saturated(const SignedIndexSet& q, const std::vector<Circuit>& circuits) {
  auto meets = [](const SignedIndexSet& a, const SignedIndexSet& b) {
    for (auto i : a.plain)
      for (auto j : b.plain)
        if (i == j) return true;
    for (auto i : a.starred)
      for (auto j : b.starred)
        if (i == j) return true;
    return false;
  };
  for (const auto& s : circuits) {
    auto [l, r] = split_circuit_sides(s);
    if (meets(q, l) != meets(q, r)) return false;
  }
  return true;
}

std::vector<SignedIndexSet> enumerate_minimal_saturated(const std::vector<Circuit>& circuits, std::size_t n) {
  if (2 * n > 24)
    throw Error(Error::Kind::SearchBudgetExceeded, "minimal saturated search needs 2n <= 24, got n = " + std::to_string(n));
  std::vector<std::pair<Mask, Mask>> sides;
  for (const auto& s : circuits) {
    auto [l, r] = split_circuit_sides(s);
    sides.emplace_back(to_mask(l, n), to_mask(r, n));
  }
  std::vector<Mask> found;
  std::vector<SignedIndexSet> out;
  for (std::size_t k = 1; k <= 2 * n; ++k) {
    for_each_subset(2 * n, k, [&](const IndexSet& codes) {
      Mask m = 0;
      for (auto c : codes) m |= Mask{1} << c;
      // Anything containing a smaller saturated set is not minimal.
      for (Mask f : found)
        if ((m & f) == f) return;
      for (auto [l, r] : sides)
        if (((m & l) != 0) != ((m & r) != 0)) return;
      found.push_back(m);
      out.push_back(from_codes(codes, n));
    });
  }
  return out;
}

IntMatrix complement_span(const TorusData& td, const SignedIndexSet& q) {
  const std::size_t n = td.n;
  const Mask m = to_mask(q, n);
  std::vector<IntVector> cols;
  for (std::size_t i = 0; i < n; ++i) {
    if (m & (Mask{1} << i)) continue;
    IntVector v(n + td.d);
    v[i] = 1;
    for (std::size_t j = 0; j < td.d; ++j) v[n + j] = td.a(j, i);
    cols.push_back(v);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (m & (Mask{1} << (n + i))) continue;
    IntVector v(n + td.d);
    v[i] = 1;
    cols.push_back(v);
  }
  return from_columns(n + td.d, cols);
}

RatVector parameter_vector(const TorusData& td, const Rational& hbar, const RatVector& c) {
  if (c.size() != td.d)
    throw Error(Error::Kind::DimensionMismatch,
                "expected " + std::to_string(td.d) + " equivariant parameters, got " + std::to_string(c.size()));
  RatVector v(td.n, hbar);
  v.insert(v.end(), c.begin(), c.end());
  return v;
}

ResonanceVerdict is_non_resonant(const TorusData& td, const Rational& hbar, const RatVector& c,
                                 std::size_t threads) {
  const auto v = parameter_vector(td, hbar, c);
  const auto lattice = IntMatrix::identity(td.n + td.d);
  const auto collections = enumerate_minimal_saturated(enumerate_circuits(td), td.n);
  std::vector<std::optional<LatticeWitness>> found(collections.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < collections.size(); i = next++)
      found[i] = lattice_membership_witness(v, lattice, complement_span(td, collections[i]));
  };
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(collections.size(), 1));
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }
  ResonanceVerdict verdict;
  verdict.collections_checked = collections.size();
  for (std::size_t i = 0; i < collections.size(); ++i)
    if (found[i]) {
      verdict.non_resonant = false;
      verdict.witness = ResonanceWitness{collections[i], found[i]->lattice_coeffs, found[i]->subspace_coeffs};
      break;
    }
  return verdict;
}

bool verify_witness(const TorusData& td, const Rational& hbar, const RatVector& c, const ResonanceWitness& w) {
  const auto v = parameter_vector(td, hbar, c);
  const auto span = complement_span(td, w.collection);
  if (w.shift.size() != v.size() || w.span_coeffs.size() != span.cols()) return false;
  if (!is_saturated(w.collection, enumerate_circuits(td))) return false;
  for (std::size_t r = 0; r < v.size(); ++r) {
    Rational s = w.shift[r];
    for (std::size_t k = 0; k < span.cols(); ++k) s += span(r, k) * w.span_coeffs[k];
    if (s != v[r]) return false;
  }
  return true;
}

std::vector<std::size_t> genericity_dimensions(const TorusData& td) {
  const std::size_t n = td.n, d = td.d;
  // V_n: (1, .., 1, 0, .., 0) and the last d unit vectors.
  std::vector<IntVector> vn;
  IntVector diag(n + d);
  for (std::size_t i = 0; i < n; ++i) diag[i] = 1;
  vn.push_back(diag);
  for (std::size_t j = 0; j < d; ++j) {
    IntVector e(n + d);
    e[n + j] = 1;
    vn.push_back(e);
  }
  std::vector<std::size_t> dims;
  for (const auto& q : enumerate_minimal_saturated(enumerate_circuits(td), n)) {
    auto span = complement_span(td, q);
    std::vector<IntVector> cols;
    for (std::size_t k = 0; k < span.cols(); ++k) cols.push_back(span.col(k));
    const std::size_t lin = rank(span);
    cols.insert(cols.end(), vn.begin(), vn.end());
    const std::size_t sum = rank(from_columns(n + d, cols));
    dims.push_back(lin + (d + 1) - sum);
  }
  return dims;
}

bool genericity_check(const TorusData& td) {
  for (auto dim : genericity_dimensions(td))
    if (dim >= td.d + 1) return false;
  return true;
}

} // namespace hypertoric
