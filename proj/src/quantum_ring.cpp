#include "hypertoric/quantum_ring.hpp"

#include "hypertoric/errors.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <random>
#include <sstream>

namespace hypertoric {

namespace {

// Scratch parameter slot used for one-variable curves (lambda, s). Parameter
// spaces use at most 1 + 16 slots, so the last one is always free.
constexpr std::size_t kAux = kMaxParams - 1;

ParamFraction aux_power(long e) {
  std::size_t v = kAux;
  return ParamFraction::laurent_monomial(std::span<const std::size_t>(&v, 1), std::span<const long>(&e, 1));
}

IntPoly linear_in_aux(const Integer& root) {
  return IntPoly::variable(kAux) - IntPoly(root);
}

// Strips every factor (aux - root) from p; returns the multiplicity.
unsigned strip_root(IntPoly& p, const Integer& root) {
  if (p.is_zero()) return 0;
  IntPoly lin = linear_in_aux(root);
  unsigned m = 0;
  while (p.uses(kAux)) {
    if (!p.evaluate(kAux, root).is_zero()) break;
    auto q = p.divide_exact(lin);
    if (!q) break;
    p = std::move(*q);
    ++m;
  }
  return m;
}

} // namespace

// ---------------------------------------------------------------------------
// OperatorMatrix

OperatorMatrix OperatorMatrix::identity(std::size_t size) {
  OperatorMatrix m(size, "1");
  for (std::size_t i = 0; i < size; ++i) m(i, i) = ParamFraction(1);
  return m;
}

bool OperatorMatrix::is_zero() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const ParamFraction& f) { return f.is_zero(); });
}

OperatorMatrix& OperatorMatrix::operator+=(const OperatorMatrix& o) {
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += o.entries_[i];
  return *this;
}

OperatorMatrix& OperatorMatrix::operator-=(const OperatorMatrix& o) {
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= o.entries_[i];
  return *this;
}

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
  const std::size_t n = a.size();
  OperatorMatrix out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      if (a(i, k).is_zero()) continue;
      for (std::size_t j = 0; j < n; ++j)
        if (!b(k, j).is_zero()) out(i, j) += a(i, k) * b(k, j);
    }
  return out;
}

OperatorMatrix OperatorMatrix::scaled(const ParamFraction& s) const {
  return map([&](const ParamFraction& f) { return f * s; });
}

std::vector<ParamFraction> OperatorMatrix::apply(const std::vector<ParamFraction>& v) const {
  std::vector<ParamFraction> out(size_);
  for (std::size_t i = 0; i < size_; ++i)
    for (std::size_t j = 0; j < size_; ++j)
      if (!(*this)(i, j).is_zero() && !v[j].is_zero()) out[i] += (*this)(i, j) * v[j];
  return out;
}

bool operator==(const OperatorMatrix& a, const OperatorMatrix& b) {
  return a.size_ == b.size_ && a.entries_ == b.entries_;
}

std::vector<std::complex<double>> OperatorMatrix::eval(std::span<const std::complex<double>> params) const {
  std::vector<std::complex<double>> out(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) out[i] = entries_[i].eval(params);
  return out;
}

std::size_t OperatorMatrix::rank_at(std::span<const Rational> params) const {
  std::vector<std::size_t> vars(params.size());
  for (std::size_t i = 0; i < vars.size(); ++i) vars[i] = i;
  RatMatrix m(size_, size_);
  for (std::size_t r = 0; r < size_; ++r)
    for (std::size_t c = 0; c < size_; ++c) {
      ParamFraction f = (*this)(r, c).specialize(vars, params);
      if (!f.is_constant()) throw Error(Error::Kind::InvalidArgument, "rank_at: free parameters remain");
      m(r, c) = f.constant_value();
    }
  return rank(m);
}

OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b) { return a * b - b * a; }

// ---------------------------------------------------------------------------
// Presentations

ParamSpace param_space(const TorusData& td) { return ParamSpace{td.d, td.k}; }

ParamFraction q_power(const ParamSpace& space, const IntVector& beta_k) {
  std::vector<std::size_t> vars;
  std::vector<long> exps;
  for (std::size_t l = 0; l < beta_k.size(); ++l) {
    if (beta_k[l] == 0) continue;
    vars.push_back(space.q(l));
    exps.push_back(beta_k[l].get_si());
  }
  return ParamFraction::laurent_monomial(vars, exps);
}

ParamPolynomial circuit_relation(const Circuit& S, const ParamSpace& space, const OrderPtr& order,
                                 RingMode mode) {
  const ParamPolynomial hbar(order, ParamFraction::variable(space.hbar()));
  ParamPolynomial left(order, ParamFraction(1)), right(order, ParamFraction(1));
  for (auto i : S.support) {
    ParamPolynomial u = ParamPolynomial::variable(order, i);
    if (S.sign(i) > 0) {
      left = left * u;
      right = right * (hbar - u);
    } else {
      left = left * (hbar - u);
      right = right * u;
    }
  }
  if (mode == RingMode::Classical) return left;
  return left - right.scaled(q_power(space, S.beta_k));
}

std::vector<ParamPolynomial> linear_relations(const TorusData& td, const ParamSpace& space,
                                              const OrderPtr& order) {
  std::vector<ParamPolynomial> out;
  for (std::size_t j = 0; j < td.d; ++j) {
    ParamPolynomial p(order, -ParamFraction::variable(space.c(j)));
    for (std::size_t i = 0; i < td.n; ++i)
      if (td.a(j, i) != 0) p += ParamPolynomial::variable(order, i).scaled(ParamFraction(td.a(j, i)));
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

std::vector<ParamPolynomial> ideal(const TorusData& td, RingMode mode) {
  if (!classify(td).smooth) throw Error(Error::Kind::NotSmooth, "arrangement is not smooth");
  auto order = std::make_shared<const TermOrder>(TermOrder::drevlex(td.n));
  ParamSpace space = param_space(td);
  std::vector<ParamPolynomial> gens;
  for (const auto& S : enumerate_circuits(td)) gens.push_back(circuit_relation(S, space, order, mode));
  for (auto& p : linear_relations(td, space, order)) gens.push_back(std::move(p));
  return gens;
}

} // namespace

std::vector<ParamPolynomial> classical_ideal(const TorusData& td) { return ideal(td, RingMode::Classical); }
std::vector<ParamPolynomial> quantum_ideal(const TorusData& td) { return ideal(td, RingMode::Quantum); }

namespace {

bool contains_circuit_mask(const std::vector<std::uint32_t>& circuit_masks, std::uint32_t mask) {
  for (auto m : circuit_masks)
    if ((m & mask) == m) return true;
  return false;
}

std::vector<std::uint32_t> circuit_masks(const std::vector<Circuit>& circuits) {
  std::vector<std::uint32_t> out;
  for (const auto& S : circuits) {
    std::uint32_t m = 0;
    for (auto i : S.support) m |= 1u << i;
    out.push_back(m);
  }
  return out;
}

std::vector<ParamFraction> monomial_coordinates(const RingPresentation& pres, const IndexSet& M) {
  ParamPolynomial p(pres.order, ParamFraction(1));
  for (auto i : M) p = p * pres.u(i);
  return pres.coordinates(p);
}

OperatorMatrix columns_matrix(const std::vector<std::vector<ParamFraction>>& cols) {
  OperatorMatrix m(cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < cols.size(); ++i) m(i, j) = cols[j][i];
  return m;
}

// Greedy choice of independent lemma-safe monomials, judged at a random rational point.
std::vector<IndexSet> choose_class_basis(const RingPresentation& classical) {
  std::mt19937_64 rng(0x5eed);
  std::uniform_int_distribution<long> num(3, 97), den(2, 89);
  std::vector<std::size_t> vars;
  std::vector<Rational> vals;
  for (std::size_t v = 0; v < classical.space.size(); ++v) {
    vars.push_back(v);
    Rational x(num(rng), den(rng));
    x.canonicalize();
    vals.push_back(x);
  }
  const std::size_t r = classical.rank();
  std::vector<IndexSet> chosen;
  RatMatrix rows(0, r);
  std::vector<RatVector> accepted;
  for (const auto& M : lemma_safe_sets(classical.td, classical.circuits)) {
    auto coords = monomial_coordinates(classical, M);
    RatVector v(r);
    for (std::size_t i = 0; i < r; ++i) v[i] = coords[i].specialize(vars, vals).constant_value();
    RatMatrix trial(accepted.size() + 1, r);
    for (std::size_t a = 0; a < accepted.size(); ++a)
      for (std::size_t i = 0; i < r; ++i) trial(a, i) = accepted[a][i];
    for (std::size_t i = 0; i < r; ++i) trial(accepted.size(), i) = v[i];
    if (rank(trial) == accepted.size() + 1) {
      accepted.push_back(v);
      chosen.push_back(M);
      if (chosen.size() == r) break;
    }
  }
  return chosen;
}

void attach_class_basis(RingPresentation& pres, const std::vector<IndexSet>& chosen) {
  const std::size_t r = pres.rank();
  if (chosen.size() == r) {
    std::vector<std::vector<ParamFraction>> cols;
    for (const auto& M : chosen) cols.push_back(monomial_coordinates(pres, M));
    OperatorMatrix P = columns_matrix(cols);
    if (auto inv = inverse(P)) {
      pres.class_basis = chosen;
      pres.class_basis_found = true;
      pres.to_standard = std::move(P);
      pres.from_standard = std::move(*inv);
      return;
    }
  }
  pres.class_basis.clear();
  for (const auto& m : pres.basis) {
    IndexSet M;
    for (std::size_t i = 0; i < pres.td.n; ++i)
      for (unsigned e = 0; e < m[i]; ++e) M.push_back(i);
    pres.class_basis.push_back(M);
  }
  pres.class_basis_found = false;
  pres.to_standard = OperatorMatrix::identity(r);
  pres.from_standard = OperatorMatrix::identity(r);
}

} // namespace

std::vector<IndexSet> lemma_safe_sets(const TorusData& td, const std::vector<Circuit>& circuits) {
  const std::size_t n = td.n;
  const auto cmasks = circuit_masks(circuits);
  const std::uint32_t total = 1u << n;
  auto rank_of = [&](std::uint32_t mask) {
    IndexSet s;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) s.push_back(i);
    return s.empty() ? std::size_t{0} : rank(columns(td.a, s));
  };
  std::vector<std::size_t> rank_cache(total, SIZE_MAX);
  auto cached_rank = [&](std::uint32_t mask) {
    if (rank_cache[mask] == SIZE_MAX) rank_cache[mask] = rank_of(mask);
    return rank_cache[mask];
  };
  // Multiplying the class u_prev by u_j adds corrections L_S(u_prev) for circuits S
  // containing j; they vanish when span(a_S) is not inside span(a_prev).
  auto step_safe = [&](std::uint32_t prev, std::size_t j) {
    const auto base = static_cast<std::size_t>(std::popcount(prev));
    for (std::size_t s = 0; s < circuits.size(); ++s) {
      if (!(cmasks[s] & (1u << j))) continue;
      if (cached_rank(prev | cmasks[s]) == base) return false;
    }
    return true;
  };
  std::vector<char> safe(total, 0);
  safe[0] = 1;
  std::vector<std::uint32_t> order;
  for (std::uint32_t M = 0; M < total; ++M) order.push_back(M);
  std::stable_sort(order.begin(), order.end(), [](std::uint32_t x, std::uint32_t y) {
    return std::popcount(x) < std::popcount(y);
  });
  for (auto M : order) {
    if (M == 0 || contains_circuit_mask(cmasks, M)) continue;
    for (std::size_t j = 0; j < n && !safe[M]; ++j)
      if ((M & (1u << j)) && safe[M & ~(1u << j)] && step_safe(M & ~(1u << j), j)) safe[M] = 1;
  }
  std::vector<IndexSet> out;
  for (auto M : order) {
    if (!safe[M]) continue;
    IndexSet s;
    for (std::size_t i = 0; i < n; ++i)
      if (M & (1u << i)) s.push_back(i);
    out.push_back(s);
    // One repeated final factor is allowed: the argument of L_S is still u_M.
    for (auto j : s)
      if (step_safe(M, j)) {
        IndexSet t = s;
        t.insert(std::upper_bound(t.begin(), t.end(), j), j);
        out.push_back(std::move(t));
      }
  }
  std::stable_sort(out.begin(), out.end(), [](const IndexSet& x, const IndexSet& y) {
    return x.size() != y.size() ? x.size() < y.size() : x < y;
  });
  return out;
}

std::optional<OperatorMatrix> inverse(const OperatorMatrix& m) {
  const std::size_t n = m.size();
  OperatorMatrix a = m, inv = OperatorMatrix::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && a(piv, col).is_zero()) ++piv;
    if (piv == n) return std::nullopt;
    if (piv != col)
      for (std::size_t c = 0; c < n; ++c) {
        std::swap(a(piv, c), a(col, c));
        std::swap(inv(piv, c), inv(col, c));
      }
    ParamFraction p = a(col, col).inverse();
    for (std::size_t c = 0; c < n; ++c) {
      if (!a(col, c).is_zero()) a(col, c) *= p;
      if (!inv(col, c).is_zero()) inv(col, c) *= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a(r, col).is_zero()) continue;
      ParamFraction f = a(r, col);
      for (std::size_t c = 0; c < n; ++c) {
        if (!a(col, c).is_zero()) a(r, c) -= f * a(col, c);
        if (!inv(col, c).is_zero()) inv(r, c) -= f * inv(col, c);
      }
    }
  }
  return inv;
}

RingPresentation build_presentation(const TorusData& td, RingMode mode, const GroebnerOptions& opts) {
  auto make = [&](RingMode m) {
    RingPresentation pres;
    pres.td = td;
    pres.mode = m;
    pres.space = param_space(td);
    pres.generators = ideal(td, m);
    pres.order = pres.generators.front().order();
    pres.circuits = enumerate_circuits(td);
    pres.groebner = groebner_basis(pres.generators, opts);
    pres.basis = standard_monomials(pres.groebner);
    return pres;
  };
  RingPresentation classical = make(RingMode::Classical);
  auto chosen = choose_class_basis(classical);
  if (mode == RingMode::Classical) {
    attach_class_basis(classical, chosen);
    return classical;
  }
  RingPresentation pres = make(mode);
  attach_class_basis(pres, chosen);
  return pres;
}

std::vector<ParamFraction> RingPresentation::coordinates(const ParamPolynomial& p) const {
  ParamPolynomial r = normal_form(p, groebner);
  std::vector<ParamFraction> v(basis.size());
  for (const auto& t : r.terms()) {
    auto it = std::find(basis.begin(), basis.end(), t.mono);
    if (it == basis.end()) throw Error(Error::Kind::InvalidArgument, "normal form left the standard basis");
    v[static_cast<std::size_t>(it - basis.begin())] = t.coef;
  }
  return v;
}

ParamPolynomial RingPresentation::from_coordinates(const std::vector<ParamFraction>& v) const {
  ParamPolynomial p(order);
  for (std::size_t j = 0; j < basis.size(); ++j)
    if (!v[j].is_zero()) p += ParamPolynomial::monomial(order, basis[j], v[j]);
  return p;
}

OperatorMatrix multiplication_matrix(const ParamPolynomial& p, const RingPresentation& pres) {
  const std::size_t r = pres.rank();
  OperatorMatrix m(r, p.to_string(pres.space));
  for (std::size_t j = 0; j < r; ++j) {
    auto col = pres.coordinates(p * ParamPolynomial::monomial(pres.order, pres.basis[j], ParamFraction(1)));
    for (std::size_t i = 0; i < r; ++i) m(i, j) = std::move(col[i]);
  }
  return m;
}

std::vector<OperatorMatrix> divisor_matrices(const RingPresentation& pres) {
  std::vector<OperatorMatrix> out;
  for (std::size_t i = 0; i < pres.td.n; ++i) out.push_back(multiplication_matrix(pres.u(i), pres));
  return out;
}

std::vector<OperatorMatrix> class_divisor_matrices(const RingPresentation& pres) {
  std::vector<OperatorMatrix> out;
  for (std::size_t i = 0; i < pres.td.n; ++i) {
    OperatorMatrix m = multiplication_matrix(pres.u(i), pres);
    if (pres.class_basis_found) m = pres.from_standard * m * pres.to_standard;
    m.set_label("u" + std::to_string(i + 1));
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<ParamFraction> RingPresentation::class_coordinates(const ParamPolynomial& p) const {
  auto v = coordinates(p);
  return class_basis_found ? from_standard.apply(v) : v;
}

std::string render_relation(const Circuit& S, RingMode mode) {
  std::vector<std::string> left, right;
  for (auto i : S.support) {
    std::string u = "u" + std::to_string(i + 1);
    std::string hu = "(h-" + u + ")";
    if (S.sign(i) > 0) {
      left.push_back(u);
      right.push_back(hu);
    } else {
      left.push_back(hu);
      right.push_back(u);
    }
  }
  auto join = [](const std::vector<std::string>& parts) {
    std::string s;
    for (const auto& p : parts) s += (s.empty() ? "" : "*") + p;
    return s;
  };
  std::string out = join(left);
  if (mode == RingMode::Classical) return out;
  std::string beta;
  for (const auto& b : S.beta) beta += (beta.empty() ? "" : ",") + b.get_str();
  return out + " - q^(" + beta + ")*" + join(right);
}

std::string render_linear_relation(const TorusData& td, const ParamSpace& space, std::size_t j) {
  std::string out;
  for (std::size_t i = 0; i < td.n; ++i) {
    const Integer& a = td.a(j, i);
    if (a == 0) continue;
    std::string u = "u" + std::to_string(i + 1);
    Integer mag = abs(a);
    std::string term = mag == 1 ? u : mag.get_str() + "*" + u;
    if (out.empty())
      out = (a < 0 ? "-" : "") + term;
    else
      out += (a < 0 ? " - " : " + ") + term;
  }
  return out + " - " + space.name(space.c(j));
}

// ---------------------------------------------------------------------------
// Limits and poles

ParamFraction classical_limit(const ParamFraction& f, const TorusData& td, const ParamSpace& space) {
  if (f.is_zero()) return f;
  ParamFraction g = f;
  for (std::size_t l = 0; l < td.k; ++l) {
    Integer w = 0;
    for (std::size_t i = 0; i < td.n; ++i) w += td.iota(i, l) * td.theta_hat[i];
    if (w == 0 || !g.uses(space.q(l))) continue;
    g = g.substitute(space.q(l), ParamFraction::variable(space.q(l)) * aux_power(w.get_si()));
  }
  auto nc = g.num().coefficients_in(kAux);
  auto dc = g.den().coefficients_in(kAux);
  std::size_t a = 0, b = 0;
  while (nc[a].is_zero()) ++a;
  while (dc[b].is_zero()) ++b;
  if (a < b) throw Error(Error::Kind::PoleOrderError, "entry diverges as q -> 0");
  if (a > b) return ParamFraction();
  return ParamFraction(nc[a], dc[b]);
}

OperatorMatrix classical_limit(const OperatorMatrix& m, const TorusData& td, const ParamSpace& space) {
  return m.map([&](const ParamFraction& f) { return classical_limit(f, td, space); });
}

ParamPolynomial classical_limit(const ParamPolynomial& p, const TorusData& td, const ParamSpace& space) {
  return p.map_coefficients([&](const ParamFraction& f) { return classical_limit(f, td, space); });
}

bool poles_on_shifted_discriminant(const OperatorMatrix& m, const RingPresentation& pres) {
  const auto& space = pres.space;
  std::vector<IntPoly> factors;
  for (const auto& S : pres.circuits) {
    ParamExponent plus{}, minus{};
    for (std::size_t l = 0; l < S.beta_k.size(); ++l) {
      long b = S.beta_k[l].get_si();
      if (b > 0) plus[space.q(l)] = static_cast<std::uint16_t>(b);
      if (b < 0) minus[space.q(l)] = static_cast<std::uint16_t>(-b);
    }
    long sigma = S.support.size() % 2 == 0 ? 1 : -1;
    // 1 - sigma Q^beta, cleared of denominators.
    factors.push_back(IntPoly::monomial(minus, 1) - IntPoly::monomial(plus, sigma));
  }
  for (std::size_t r = 0; r < m.size(); ++r)
    for (std::size_t c = 0; c < m.size(); ++c) {
      IntPoly den = m(r, c).den();
      ParamExponent lo = den.min_exponent();
      for (std::size_t v = 0; v < kMaxParams; ++v)
        if (v < space.q(0) || v >= space.size()) lo[v] = 0;
      den = den.unshifted(lo);
      bool progress = true;
      while (progress) {
        progress = false;
        for (const auto& f : factors) {
          auto qd = den.divide_exact(f);
          if (qd) {
            den = std::move(*qd);
            progress = true;
          }
        }
      }
      for (std::size_t l = 0; l < pres.td.k; ++l)
        if (den.uses(space.q(l))) return false;
    }
  return true;
}

// ---------------------------------------------------------------------------
// Steinberg extraction

namespace {

struct Curve {
  IntMatrix M;                      // Q_l = prod_m y_m^{M_lm}, y_1 = s
  std::vector<Rational> constants;  // value of prod_{m>=2} y_m^{M_lm} for each l
};

Rational rational_power(const Rational& base, long e) {
  Rational r = 1;
  Rational b = e >= 0 ? base : Rational(1) / base;
  for (long i = 0; i < std::abs(e); ++i) r *= b;
  return r;
}

Curve make_curve(const Circuit& S, std::size_t k, std::mt19937_64& rng) {
  IntMatrix B(k, 1);
  for (std::size_t l = 0; l < k; ++l) B(l, 0) = S.beta_k[l];
  auto [H, U] = hermite_normal_form(B);
  if (H(0, 0) != 1) throw Error(Error::Kind::InconsistentExtraction, "curve class is not primitive");
  Curve curve;
  curve.M = U.transpose();
  std::uniform_int_distribution<long> num(2, 41), den(2, 37);
  std::vector<Rational> y(k, Rational(1));
  for (std::size_t m = 1; m < k; ++m) {
    y[m] = Rational(num(rng) * (rng() % 2 ? 1 : -1), den(rng));
    y[m].canonicalize();
  }
  curve.constants.assign(k, Rational(1));
  for (std::size_t l = 0; l < k; ++l)
    for (std::size_t m = 1; m < k; ++m) curve.constants[l] *= rational_power(y[m], curve.M(l, m).get_si());
  return curve;
}

ParamFraction residue_entry(const ParamFraction& f, const Curve& curve, const ParamSpace& space,
                            long sigma) {
  if (f.is_zero()) return f;
  ParamFraction g = f;
  for (std::size_t l = 0; l < space.k; ++l) {
    if (!g.uses(space.q(l))) continue;
    g = g.substitute(space.q(l), ParamFraction(curve.constants[l]) * aux_power(curve.M(l, 0).get_si()));
  }
  IntPoly num = g.num(), den = g.den();
  Integer root = sigma;
  unsigned pole = strip_root(den, root);
  unsigned zero = strip_root(num, root);
  if (pole > zero + 1) throw Error(Error::Kind::PoleOrderError, "pole at q^S = 1 is not simple");
  if (pole <= zero) return ParamFraction();
  // (1 - sigma s) = -sigma (s - sigma)
  ParamFraction value(num.evaluate(kAux, root), den.evaluate(kAux, root));
  return value * ParamFraction(-sigma);
}

OperatorMatrix extract_once(const RingPresentation& pres, const Circuit& S, std::size_t i,
                            const OperatorMatrix& Ai, const Curve& curve) {
  long sigma = S.support.size() % 2 == 0 ? 1 : -1;
  ParamFraction scale = (ParamFraction::variable(pres.space.hbar()) * ParamFraction(S.beta[i])).inverse();
  return Ai.map([&](const ParamFraction& f) { return residue_entry(f, curve, pres.space, sigma) * scale; });
}

} // namespace

OperatorMatrix extract_steinberg(const RingPresentation& pres, std::size_t circuit_index,
                                 const std::vector<OperatorMatrix>& divisors, const SteinbergOptions& opts) {
  if (pres.mode != RingMode::Quantum)
    throw Error(Error::Kind::InvalidArgument, "Steinberg extraction needs the quantum presentation");
  const Circuit& S = pres.circuits.at(circuit_index);
  std::mt19937_64 rng(opts.seed * 1000003ULL + circuit_index);
  Curve first = make_curve(S, pres.td.k, rng);
  Curve second = make_curve(S, pres.td.k, rng);
  const std::size_t i = S.support.front();
  OperatorMatrix L = extract_once(pres, S, i, divisors[i], first);
  L.set_label("L_S" + std::to_string(circuit_index + 1));
  if (!(extract_once(pres, S, i, divisors[i], second) == L))
    throw Error(Error::Kind::InconsistentExtraction, "residue depends on the generic constants");
  if (S.support.size() > 1) {
    const std::size_t j = S.support.back();
    if (!(extract_once(pres, S, j, divisors[j], first) == L))
      throw Error(Error::Kind::InconsistentExtraction, "residue depends on the chosen divisor");
  }
  return L;
}

// ---------------------------------------------------------------------------
// Divisor formula and identities

bool DivisorFormulaReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const IdentityCheck& c) { return c.pass; });
}

namespace {

std::string circuit_name(const Circuit& S) {
  std::string s;
  for (auto i : S.support) s += std::to_string(i + 1);
  return "{" + s + "}";
}

bool contains_circuit(const std::vector<Circuit>& circuits, std::uint32_t mask) {
  for (const auto& S : circuits) {
    std::uint32_t m = 0;
    for (auto i : S.support) m |= 1u << i;
    if ((m & mask) == m) return true;
  }
  return false;
}

} // namespace

DivisorFormulaReport verify_divisor_formula(const RingPresentation& quantum, const RingPresentation& classical,
                                            const SteinbergOptions& opts) {
  DivisorFormulaReport rep;
  const auto& td = quantum.td;
  const auto& space = quantum.space;
  const std::size_t r = quantum.rank();
  if (classical.class_basis != quantum.class_basis) {
    rep.checks.push_back({"shared basis", false, "classical and quantum class bases differ"});
    return rep;
  }
  auto A = class_divisor_matrices(quantum);
  auto A0 = class_divisor_matrices(classical);
  for (std::size_t s = 0; s < quantum.circuits.size(); ++s) rep.steinberg.push_back(extract_steinberg(quantum, s, A, opts));

  const ParamFraction hbar = ParamFraction::variable(space.hbar());
  bool all_zero = true;
  for (std::size_t i = 0; i < td.n; ++i) {
    OperatorMatrix rec = A0[i];
    for (std::size_t s = 0; s < quantum.circuits.size(); ++s) {
      const auto& S = quantum.circuits[s];
      if (S.beta[i] == 0) continue;
      ParamFraction qS = q_power(space, S.beta_k) * ParamFraction(S.support.size() % 2 == 0 ? 1 : -1);
      ParamFraction coef = hbar * ParamFraction(S.beta[i]) * qS / (ParamFraction(1) - qS);
      rec += rep.steinberg[s].scaled(coef);
    }
    OperatorMatrix diff = rec - A[i];
    all_zero = all_zero && diff.is_zero();
    rep.difference.push_back(std::move(diff));
  }
  rep.checks.push_back({"divisor formula", all_zero, all_zero ? "exact zero difference" : "nonzero difference"});

  bool limit_ok = true;
  for (std::size_t i = 0; i < td.n; ++i) limit_ok = limit_ok && classical_limit(A[i], td, space) == A0[i];
  rep.checks.push_back({"classical limit", limit_ok, "q^beta -> 0 reproduces the cup product"});

  bool poles_ok = true;
  for (const auto& m : A) poles_ok = poles_ok && poles_on_shifted_discriminant(m, quantum);
  rep.checks.push_back({"class basis", quantum.class_basis_found, "lemma-safe square-free basis"});
  rep.checks.push_back({"pole locus", poles_ok, "denominators only at q^S = 1"});

  const ParamPolynomial H = classical.constant(hbar);
  for (std::size_t s = 0; s < quantum.circuits.size(); ++s) {
    const auto& S = quantum.circuits[s];
    const auto& L = rep.steinberg[s];
    auto v = [&](std::size_t i) { return S.sign(i) > 0 ? classical.u(i) : H - classical.u(i); };
    ParamPolynomial full(classical.order, ParamFraction(1));
    for (auto i : S.support) full = full * (H - v(i));
    auto full_c = classical.class_coordinates(full);
    const long parity = S.support.size() % 2 == 0 ? 1 : -1;

    bool first_ok = true, second_ok = true;
    for (auto i0 : S.support) {
      ParamPolynomial pv(classical.order, ParamFraction(1)), ph(classical.order, ParamFraction(1));
      for (auto i : S.support)
        if (i != i0) {
          pv = pv * v(i);
          ph = ph * (H - v(i));
        }
      auto lhs1 = L.apply(classical.class_coordinates(pv));
      auto lhs2 = L.apply(classical.class_coordinates(ph));
      for (std::size_t j = 0; j < r; ++j) {
        first_ok = first_ok && hbar * lhs1[j] == ParamFraction(parity) * full_c[j];
        second_ok = second_ok && hbar * lhs2[j] == -full_c[j];
      }
    }
    rep.checks.push_back({"steinberg identity v " + circuit_name(S), first_ok, ""});
    rep.checks.push_back({"steinberg identity h-v " + circuit_name(S), second_ok, ""});

    if (td.n > 6) {
      rep.checks.push_back({"vanishing " + circuit_name(S), true, "skipped for n > 6"});
      continue;
    }
    std::size_t tested = 0;
    bool vanish_ok = true;
    for (std::uint32_t M = 0; M < (1u << td.n); ++M) {
      if (contains_circuit(quantum.circuits, M)) continue;
      bool qualifies = true;
      for (auto i : S.support)
        if (!(M & (1u << i)) && contains_circuit(quantum.circuits, M | (1u << i))) qualifies = false;
      if (!qualifies) continue;
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < td.n; ++i)
        if (M & (1u << i)) idx.push_back(i);
      for (std::uint32_t split = 0; split < (1u << idx.size()); ++split) {
        ParamPolynomial p(classical.order, ParamFraction(1));
        for (std::size_t t = 0; t < idx.size(); ++t)
          p = p * ((split & (1u << t)) ? H - classical.u(idx[t]) : classical.u(idx[t]));
        auto img = L.apply(classical.class_coordinates(p));
        for (const auto& x : img) vanish_ok = vanish_ok && x.is_zero();
        ++tested;
      }
    }
    rep.checks.push_back({"vanishing " + circuit_name(S), vanish_ok, std::to_string(tested) + " products"});
  }
  return rep;
}

} // namespace hypertoric
