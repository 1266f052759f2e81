#include "hypertoric/polynomial.hpp"

#include "hypertoric/errors.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace hypertoric {

unsigned degree(const Monomial& m) {
  unsigned s = 0;
  for (auto e : m) s += e;
  return s;
}

bool divides(const Monomial& a, const Monomial& b) {
  for (std::size_t i = 0; i < kMaxVars; ++i)
    if (a[i] > b[i]) return false;
  return true;
}

Monomial lcm(const Monomial& a, const Monomial& b) {
  Monomial r;
  for (std::size_t i = 0; i < kMaxVars; ++i) r[i] = std::max(a[i], b[i]);
  return r;
}

Monomial operator+(const Monomial& a, const Monomial& b) {
  Monomial r;
  for (std::size_t i = 0; i < kMaxVars; ++i) r[i] = static_cast<std::uint8_t>(a[i] + b[i]);
  return r;
}

Monomial operator-(const Monomial& a, const Monomial& b) {
  Monomial r;
  for (std::size_t i = 0; i < kMaxVars; ++i) r[i] = static_cast<std::uint8_t>(a[i] - b[i]);
  return r;
}

TermOrder TermOrder::drevlex(std::size_t n) {
  std::vector<std::size_t> perm(n);
  for (std::size_t r = 0; r < n; ++r) perm[r] = n - 1 - r;
  return drevlex(std::move(perm));
}

TermOrder TermOrder::drevlex(std::vector<std::size_t> rank_to_var) {
  if (rank_to_var.size() > kMaxVars) throw Error(Error::Kind::InvalidArgument, "too many variables");
  TermOrder o;
  o.nvars = rank_to_var.size();
  o.rank_to_var = std::move(rank_to_var);
  return o;
}

bool TermOrder::greater(const Monomial& a, const Monomial& b) const {
  unsigned da = degree(a), db = degree(b);
  if (da != db) return da > db;
  for (std::size_t r = nvars; r-- > 0;) {
    std::size_t v = rank_to_var[r];
    if (a[v] != b[v]) return a[v] < b[v];
  }
  return false;
}

ParamPolynomial::ParamPolynomial(OrderPtr order, const ParamFraction& constant)
    : order_(std::move(order)) {
  if (!constant.is_zero()) terms_.push_back({Monomial{}, constant});
}

ParamPolynomial ParamPolynomial::variable(OrderPtr order, std::size_t var) {
  Monomial m{};
  m[var] = 1;
  return monomial(std::move(order), m, ParamFraction(1));
}

ParamPolynomial ParamPolynomial::monomial(OrderPtr order, const Monomial& m, const ParamFraction& coef) {
  ParamPolynomial p(std::move(order));
  if (!coef.is_zero()) p.terms_.push_back({m, coef});
  return p;
}

unsigned ParamPolynomial::total_degree() const {
  unsigned d = 0;
  for (const auto& t : terms_) d = std::max(d, degree(t.mono));
  return d;
}

ParamFraction ParamPolynomial::coefficient(const Monomial& m) const {
  for (const auto& t : terms_)
    if (t.mono == m) return t.coef;
  return ParamFraction();
}

ParamPolynomial ParamPolynomial::operator-() const {
  ParamPolynomial r = *this;
  for (auto& t : r.terms_) t.coef = -t.coef;
  return r;
}

namespace {

template <class Combine>
std::vector<ParamPolynomial::Term> merge_terms(const TermOrder& order,
                                               const std::vector<ParamPolynomial::Term>& a,
                                               const std::vector<ParamPolynomial::Term>& b,
                                               Combine&& transform_b) {
  std::vector<ParamPolynomial::Term> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && order.greater(a[i].mono, b[j].mono))) {
      out.push_back(a[i++]);
    } else if (i == a.size() || order.greater(b[j].mono, a[i].mono)) {
      out.push_back({b[j].mono, transform_b(b[j].coef)});
      ++j;
    } else {
      ParamFraction c = a[i].coef + transform_b(b[j].coef);
      if (!c.is_zero()) out.push_back({a[i].mono, std::move(c)});
      ++i;
      ++j;
    }
  }
  return out;
}

} // namespace

ParamPolynomial& ParamPolynomial::operator+=(const ParamPolynomial& o) {
  terms_ = merge_terms(*order_, terms_, o.terms_, [](const ParamFraction& c) { return c; });
  return *this;
}

ParamPolynomial& ParamPolynomial::operator-=(const ParamPolynomial& o) {
  terms_ = merge_terms(*order_, terms_, o.terms_, [](const ParamFraction& c) { return -c; });
  return *this;
}

ParamPolynomial operator*(const ParamPolynomial& a, const ParamPolynomial& b) {
  ParamPolynomial out(a.order_);
  for (const auto& t : a.terms_) {
    ParamPolynomial part = b.shifted(t.mono).scaled(t.coef);
    out += part;
  }
  return out;
}

ParamPolynomial ParamPolynomial::scaled(const ParamFraction& s) const {
  if (s.is_zero()) return ParamPolynomial(order_);
  ParamPolynomial r = *this;
  if (s.is_one()) return r;
  for (auto& t : r.terms_) t.coef *= s;
  return r;
}

ParamPolynomial ParamPolynomial::shifted(const Monomial& m) const {
  ParamPolynomial r = *this;
  for (auto& t : r.terms_) t.mono = t.mono + m;
  return r;
}

ParamPolynomial ParamPolynomial::monic() const {
  if (is_zero() || leading().coef.is_one()) return *this;
  return scaled(leading().coef.inverse());
}

void ParamPolynomial::subtract_multiple(const ParamFraction& coef, const Monomial& m,
                                        const ParamPolynomial& other) {
  std::vector<Term> shifted_terms;
  shifted_terms.reserve(other.terms_.size());
  for (const auto& t : other.terms_) shifted_terms.push_back({t.mono + m, t.coef});
  terms_ = merge_terms(*order_, terms_, shifted_terms,
                       [&](const ParamFraction& c) { return -(c * coef); });
}

bool operator==(const ParamPolynomial& a, const ParamPolynomial& b) {
  if (a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i)
    if (a.terms_[i].mono != b.terms_[i].mono || a.terms_[i].coef != b.terms_[i].coef) return false;
  return true;
}

std::string monomial_to_string(const Monomial& m, std::size_t nvars) {
  std::ostringstream os;
  bool first = true;
  for (std::size_t v = 0; v < nvars; ++v) {
    if (m[v] == 0) continue;
    if (!first) os << "*";
    os << "u" << (v + 1);
    if (m[v] > 1) os << "^" << static_cast<int>(m[v]);
    first = false;
  }
  return first ? "1" : os.str();
}

std::string ParamPolynomial::to_string(const ParamSpace& space) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& t : terms_) {
    std::string coef = t.coef.to_string(space);
    bool negative = false;
    bool simple = t.coef.den().is_one() && t.coef.num().size() == 1;
    if (simple && !coef.empty() && coef[0] == '-') {
      negative = true;
      coef.erase(0, 1);
    }
    if (!simple) coef = "(" + coef + ")";
    if (first)
      os << (negative ? "-" : "");
    else
      os << (negative ? " - " : " + ");
    first = false;
    bool constant_mono = t.mono == Monomial{};
    std::string mono = monomial_to_string(t.mono, nvars());
    if (constant_mono)
      os << coef;
    else if (coef == "1")
      os << mono;
    else
      os << coef << "*" << mono;
  }
  return os.str();
}

// ---------------------------------------------------------------------------

ParamPolynomial normal_form(const ParamPolynomial& p, const std::vector<ParamPolynomial>& gb) {
  ParamPolynomial rem = p;
  ParamPolynomial result(p.order());
  std::vector<ParamPolynomial::Term> done;
  while (!rem.is_zero()) {
    const auto lead = rem.leading();
    const ParamPolynomial* divisor = nullptr;
    for (const auto& g : gb)
      if (divides(g.leading().mono, lead.mono)) {
        if (!divisor || g.size() < divisor->size()) divisor = &g;
      }
    if (divisor) {
      ParamFraction c = lead.coef / divisor->leading().coef;
      rem.subtract_multiple(c, lead.mono - divisor->leading().mono, *divisor);
    } else {
      done.push_back(lead);
      ParamPolynomial tail(p.order());
      rem -= ParamPolynomial::monomial(p.order(), lead.mono, lead.coef);
    }
  }
  for (const auto& t : done) result += ParamPolynomial::monomial(p.order(), t.mono, t.coef);
  return result;
}

ParamPolynomial s_polynomial(const ParamPolynomial& f, const ParamPolynomial& g) {
  Monomial l = lcm(f.leading().mono, g.leading().mono);
  ParamPolynomial a = f.shifted(l - f.leading().mono).scaled(f.leading().coef.inverse());
  ParamPolynomial b = g.shifted(l - g.leading().mono).scaled(g.leading().coef.inverse());
  return a - b;
}

namespace {

struct Pair {
  std::size_t i, j;
  Monomial lcm;
};

bool coprime(const Monomial& a, const Monomial& b) {
  for (std::size_t v = 0; v < kMaxVars; ++v)
    if (a[v] && b[v]) return false;
  return true;
}

} // namespace

std::vector<ParamPolynomial> groebner_basis(const std::vector<ParamPolynomial>& gens,
                                            const GroebnerOptions& options) {
  if (gens.empty()) throw Error(Error::Kind::InvalidArgument, "empty generator list");
  const OrderPtr order = gens.front().order();
  std::vector<ParamPolynomial> G;
  std::vector<Pair> pairs;
  std::set<std::pair<std::size_t, std::size_t>> pending;
  std::size_t steps = 0;

  auto add = [&](ParamPolynomial p) {
    p = p.monic();
    const std::size_t idx = G.size();
    G.push_back(std::move(p));
    for (std::size_t i = 0; i < idx; ++i) {
      pairs.push_back({i, idx, lcm(G[i].leading().mono, G[idx].leading().mono)});
      pending.insert({i, idx});
    }
  };

  for (const auto& g : gens) {
    if (g.is_zero()) continue;
    ParamPolynomial r = normal_form(g, G);
    if (!r.is_zero()) add(std::move(r));
  }

  while (!pairs.empty()) {
    if (++steps > options.max_steps)
      throw Error(Error::Kind::BudgetExceeded, "Gröbner basis step budget exceeded");
    auto best = std::min_element(pairs.begin(), pairs.end(), [&](const Pair& x, const Pair& y) {
      if (x.lcm != y.lcm) return order->greater(y.lcm, x.lcm);
      return std::tie(x.j, x.i) < std::tie(y.j, y.i);
    });
    Pair pr = *best;
    pairs.erase(best);
    pending.erase({pr.i, pr.j});

    const Monomial& li = G[pr.i].leading().mono;
    const Monomial& lj = G[pr.j].leading().mono;
    if (coprime(li, lj)) continue;
    bool chain = false;
    for (std::size_t k = 0; k < G.size() && !chain; ++k) {
      if (k == pr.i || k == pr.j) continue;
      if (!divides(G[k].leading().mono, pr.lcm)) continue;
      auto key = [](std::size_t a, std::size_t b) { return std::make_pair(std::min(a, b), std::max(a, b)); };
      if (!pending.count(key(pr.i, k)) && !pending.count(key(pr.j, k))) chain = true;
    }
    if (chain) continue;

    ParamPolynomial r = normal_form(s_polynomial(G[pr.i], G[pr.j]), G);
    if (!r.is_zero()) add(std::move(r));
  }

  // Minimize: drop elements whose leading monomial is divisible by another's.
  std::vector<ParamPolynomial> minimal;
  for (std::size_t i = 0; i < G.size(); ++i) {
    bool redundant = false;
    for (std::size_t j = 0; j < G.size() && !redundant; ++j) {
      if (i == j) continue;
      const auto& mi = G[i].leading().mono;
      const auto& mj = G[j].leading().mono;
      if (divides(mj, mi) && (mi != mj || j < i)) redundant = true;
    }
    if (!redundant) minimal.push_back(G[i]);
  }
  // Interreduce tails.
  std::vector<ParamPolynomial> reduced;
  for (std::size_t i = 0; i < minimal.size(); ++i) {
    std::vector<ParamPolynomial> others;
    for (std::size_t j = 0; j < minimal.size(); ++j)
      if (j != i) others.push_back(minimal[j]);
    ParamPolynomial head = ParamPolynomial::monomial(order, minimal[i].leading().mono,
                                                     minimal[i].leading().coef);
    ParamPolynomial tail = minimal[i] - head;
    reduced.push_back((head + normal_form(tail, others)).monic());
  }
  std::sort(reduced.begin(), reduced.end(), [&](const ParamPolynomial& a, const ParamPolynomial& b) {
    return order->greater(b.leading().mono, a.leading().mono);
  });
  return reduced;
}

bool is_groebner_basis(const std::vector<ParamPolynomial>& gb) {
  for (std::size_t i = 0; i < gb.size(); ++i)
    for (std::size_t j = i + 1; j < gb.size(); ++j)
      if (!normal_form(s_polynomial(gb[i], gb[j]), gb).is_zero()) return false;
  return true;
}

std::vector<Monomial> standard_monomials(const std::vector<ParamPolynomial>& gb) {
  if (gb.empty()) throw Error(Error::Kind::NotZeroDimensional, "empty basis");
  const OrderPtr order = gb.front().order();
  const std::size_t n = order->nvars;
  for (const auto& g : gb)
    if (g.leading().mono == Monomial{}) return {}; // unit ideal
  for (std::size_t v = 0; v < n; ++v) {
    bool pure = false;
    for (const auto& g : gb) {
      const auto& m = g.leading().mono;
      bool only_v = m[v] > 0;
      for (std::size_t w = 0; w < n && only_v; ++w)
        if (w != v && m[w] != 0) only_v = false;
      if (only_v) pure = true;
    }
    if (!pure)
      throw Error(Error::Kind::NotZeroDimensional,
                  "no pure power of u" + std::to_string(v + 1) + " among leading monomials");
  }
  auto standard = [&](const Monomial& m) {
    for (const auto& g : gb)
      if (divides(g.leading().mono, m)) return false;
    return true;
  };
  std::vector<Monomial> out;
  std::set<Monomial> seen;
  std::vector<Monomial> frontier{Monomial{}};
  seen.insert(Monomial{});
  while (!frontier.empty()) {
    Monomial m = frontier.back();
    frontier.pop_back();
    out.push_back(m);
    for (std::size_t v = 0; v < n; ++v) {
      Monomial next = m;
      ++next[v];
      if (seen.count(next) || !standard(next)) continue;
      seen.insert(next);
      frontier.push_back(next);
    }
  }
  std::sort(out.begin(), out.end(),
            [&](const Monomial& a, const Monomial& b) { return order->greater(b, a); });
  return out;
}

} // namespace hypertoric
