#include "hypertoric/param_poly.hpp"

#include "hypertoric/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>

namespace hypertoric {

std::string ParamSpace::name(std::size_t var) const {
  if (var == 0) return "h";
  if (var <= d) return d == 1 ? "c" : "c" + std::to_string(var);
  std::size_t l = var - d;
  return k == 1 ? "q" : "q" + std::to_string(l);
}

namespace {

bool exp_greater(const ParamExponent& a, const ParamExponent& b) { return b < a; }

ParamExponent exp_add(const ParamExponent& a, const ParamExponent& b) {
  ParamExponent r;
  for (std::size_t i = 0; i < kMaxParams; ++i) r[i] = static_cast<std::uint16_t>(a[i] + b[i]);
  return r;
}

bool exp_divides(const ParamExponent& a, const ParamExponent& b) {
  for (std::size_t i = 0; i < kMaxParams; ++i)
    if (a[i] > b[i]) return false;
  return true;
}

ParamExponent exp_sub(const ParamExponent& a, const ParamExponent& b) {
  ParamExponent r;
  for (std::size_t i = 0; i < kMaxParams; ++i) r[i] = static_cast<std::uint16_t>(a[i] - b[i]);
  return r;
}

std::atomic<std::size_t> g_heuristic_failures{0};

} // namespace

IntPoly::IntPoly(long c) {
  if (c != 0) terms_.push_back({ParamExponent{}, Integer(c)});
}

IntPoly::IntPoly(const Integer& c) {
  if (c != 0) terms_.push_back({ParamExponent{}, c});
}

IntPoly IntPoly::variable(std::size_t var, unsigned power) {
  assert(var < kMaxParams);
  ParamExponent e{};
  e[var] = static_cast<std::uint16_t>(power);
  return monomial(e, Integer(1));
}

IntPoly IntPoly::monomial(const ParamExponent& exp, const Integer& coef) {
  IntPoly p;
  if (coef != 0) p.terms_.push_back({exp, coef});
  return p;
}

IntPoly IntPoly::from_terms(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(),
            [](const Term& x, const Term& y) { return exp_greater(x.exp, y.exp); });
  IntPoly p;
  p.terms_.reserve(terms.size());
  for (auto& t : terms) {
    if (!p.terms_.empty() && p.terms_.back().exp == t.exp) {
      p.terms_.back().coef += t.coef;
    } else {
      if (!p.terms_.empty() && p.terms_.back().coef == 0) p.terms_.pop_back();
      p.terms_.push_back(std::move(t));
    }
  }
  if (!p.terms_.empty() && p.terms_.back().coef == 0) p.terms_.pop_back();
  return p;
}

bool IntPoly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].exp == ParamExponent{});
}

bool IntPoly::is_one() const {
  return terms_.size() == 1 && terms_[0].exp == ParamExponent{} && terms_[0].coef == 1;
}

Integer IntPoly::constant_term() const {
  if (!terms_.empty() && terms_.back().exp == ParamExponent{}) return terms_.back().coef;
  return 0;
}

unsigned IntPoly::degree(std::size_t var) const {
  unsigned d = 0;
  for (const auto& t : terms_) d = std::max<unsigned>(d, t.exp[var]);
  return d;
}

unsigned IntPoly::total_degree() const {
  unsigned d = 0;
  for (const auto& t : terms_) {
    unsigned s = 0;
    for (auto e : t.exp) s += e;
    d = std::max(d, s);
  }
  return d;
}

Integer IntPoly::content() const {
  Integer g = 0;
  for (const auto& t : terms_) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.coef.get_mpz_t());
    if (g == 1) break;
  }
  return g;
}

Integer IntPoly::max_norm() const {
  Integer m = 0;
  for (const auto& t : terms_)
    if (abs(t.coef) > m) m = abs(t.coef);
  return m;
}

ParamExponent IntPoly::min_exponent() const {
  if (terms_.empty()) return ParamExponent{};
  ParamExponent m = terms_[0].exp;
  for (const auto& t : terms_)
    for (std::size_t i = 0; i < kMaxParams; ++i) m[i] = std::min(m[i], t.exp[i]);
  return m;
}

IntPoly IntPoly::operator-() const {
  IntPoly r = *this;
  for (auto& t : r.terms_) t.coef = -t.coef;
  return r;
}

namespace {

void merge_into(std::vector<IntPoly::Term>& out, const std::vector<IntPoly::Term>& a,
                const std::vector<IntPoly::Term>& b, bool subtract) {
  out.clear();
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && exp_greater(a[i].exp, b[j].exp))) {
      out.push_back(a[i++]);
    } else if (i == a.size() || exp_greater(b[j].exp, a[i].exp)) {
      out.push_back(b[j++]);
      if (subtract) out.back().coef = -out.back().coef;
    } else {
      Integer c = subtract ? Integer(a[i].coef - b[j].coef) : Integer(a[i].coef + b[j].coef);
      if (c != 0) out.push_back({a[i].exp, std::move(c)});
      ++i;
      ++j;
    }
  }
}

} // namespace

IntPoly& IntPoly::operator+=(const IntPoly& o) {
  if (o.terms_.empty()) return *this;
  std::vector<Term> out;
  merge_into(out, terms_, o.terms_, false);
  terms_ = std::move(out);
  return *this;
}

IntPoly& IntPoly::operator-=(const IntPoly& o) {
  if (o.terms_.empty()) return *this;
  std::vector<Term> out;
  merge_into(out, terms_, o.terms_, true);
  terms_ = std::move(out);
  return *this;
}

IntPoly operator*(const IntPoly& a, const IntPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  if (a.terms_.size() == 1) return b.shifted(a.terms_[0].exp).scaled(a.terms_[0].coef);
  if (b.terms_.size() == 1) return a.shifted(b.terms_[0].exp).scaled(b.terms_[0].coef);
  std::vector<IntPoly::Term> prods;
  prods.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& x : a.terms_)
    for (const auto& y : b.terms_) {
      IntPoly::Term t;
      t.exp = exp_add(x.exp, y.exp);
      mpz_mul(t.coef.get_mpz_t(), x.coef.get_mpz_t(), y.coef.get_mpz_t());
      prods.push_back(std::move(t));
    }
  return IntPoly::from_terms(std::move(prods));
}

IntPoly IntPoly::scaled(const Integer& s) const {
  if (s == 0) return {};
  IntPoly r = *this;
  if (s == 1) return r;
  for (auto& t : r.terms_) t.coef *= s;
  return r;
}

IntPoly IntPoly::divided_by_integer(const Integer& s) const {
  IntPoly r = *this;
  if (s == 1) return r;
  for (auto& t : r.terms_) mpz_divexact(t.coef.get_mpz_t(), t.coef.get_mpz_t(), s.get_mpz_t());
  return r;
}

IntPoly IntPoly::shifted(const ParamExponent& exp) const {
  IntPoly r = *this;
  for (auto& t : r.terms_) t.exp = exp_add(t.exp, exp);
  return r;
}

IntPoly IntPoly::unshifted(const ParamExponent& exp) const {
  IntPoly r = *this;
  for (auto& t : r.terms_) t.exp = exp_sub(t.exp, exp);
  return r;
}

IntPoly IntPoly::pow(unsigned e) const {
  IntPoly result(1);
  IntPoly base = *this;
  while (e) {
    if (e & 1u) result = result * base;
    e >>= 1u;
    if (e) base = base * base;
  }
  return result;
}

std::optional<IntPoly> IntPoly::divide_exact(const IntPoly& divisor) const {
  if (divisor.is_zero()) throw Error(Error::Kind::InvalidArgument, "division by zero polynomial");
  if (is_zero()) return IntPoly{};
  if (divisor.is_constant()) {
    const Integer& c = divisor.terms_[0].coef;
    for (const auto& t : terms_)
      if (!mpz_divisible_p(t.coef.get_mpz_t(), c.get_mpz_t())) return std::nullopt;
    IntPoly r = *this;
    for (auto& t : r.terms_) mpz_divexact(t.coef.get_mpz_t(), t.coef.get_mpz_t(), c.get_mpz_t());
    return r;
  }
  if (divisor.is_monomial()) {
    const auto& lt = divisor.terms_[0];
    IntPoly r = *this;
    for (auto& t : r.terms_) {
      if (!exp_divides(lt.exp, t.exp)) return std::nullopt;
      if (!mpz_divisible_p(t.coef.get_mpz_t(), lt.coef.get_mpz_t())) return std::nullopt;
      t.exp = exp_sub(t.exp, lt.exp);
      mpz_divexact(t.coef.get_mpz_t(), t.coef.get_mpz_t(), lt.coef.get_mpz_t());
    }
    return r;
  }
  for (std::size_t v = 0; v < kMaxParams; ++v)
    if (divisor.degree(v) > degree(v)) return std::nullopt;
  // Lowest terms must also divide (cheap necessary condition).
  if (!exp_divides(divisor.terms_.back().exp, terms_.back().exp)) return std::nullopt;

  const auto& lt = divisor.terms_[0];
  IntPoly rem = *this;
  std::vector<Term> quotient;
  std::vector<Term> buffer;
  while (!rem.is_zero()) {
    const auto& r = rem.terms_[0];
    if (!exp_divides(lt.exp, r.exp)) return std::nullopt;
    if (!mpz_divisible_p(r.coef.get_mpz_t(), lt.coef.get_mpz_t())) return std::nullopt;
    Term t;
    t.exp = exp_sub(r.exp, lt.exp);
    mpz_divexact(t.coef.get_mpz_t(), r.coef.get_mpz_t(), lt.coef.get_mpz_t());
    // rem -= t * divisor, skipping the leading term which cancels exactly.
    std::vector<Term> sub;
    sub.reserve(divisor.terms_.size() - 1);
    for (std::size_t i = 1; i < divisor.terms_.size(); ++i) {
      Term s;
      s.exp = exp_add(divisor.terms_[i].exp, t.exp);
      mpz_mul(s.coef.get_mpz_t(), divisor.terms_[i].coef.get_mpz_t(), t.coef.get_mpz_t());
      sub.push_back(std::move(s));
    }
    std::vector<Term> rest(std::make_move_iterator(rem.terms_.begin() + 1),
                           std::make_move_iterator(rem.terms_.end()));
    merge_into(buffer, rest, sub, true);
    rem.terms_.swap(buffer);
    quotient.push_back(std::move(t));
  }
  IntPoly q;
  q.terms_ = std::move(quotient);
  return q;
}

IntPoly IntPoly::evaluate(std::size_t var, const Integer& x) const {
  std::vector<Term> out;
  out.reserve(terms_.size());
  Integer power;
  for (const auto& t : terms_) {
    Term s;
    s.exp = t.exp;
    unsigned e = s.exp[var];
    s.exp[var] = 0;
    mpz_pow_ui(power.get_mpz_t(), x.get_mpz_t(), e);
    s.coef = t.coef * power;
    out.push_back(std::move(s));
  }
  return from_terms(std::move(out));
}

std::vector<IntPoly> IntPoly::coefficients_in(std::size_t var) const {
  std::vector<IntPoly> out(degree(var) + 1);
  for (const auto& t : terms_) {
    Term s = t;
    unsigned e = s.exp[var];
    s.exp[var] = 0;
    out[e].terms_.push_back(std::move(s));
  }
  return out;
}

IntPoly IntPoly::substitute(std::size_t var, const IntPoly& value) const {
  auto coeffs = coefficients_in(var);
  IntPoly acc;
  for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * value + coeffs[i];
  return acc;
}

IntPoly IntPoly::derivative(std::size_t var) const {
  IntPoly r;
  for (const auto& t : terms_) {
    if (t.exp[var] == 0) continue;
    Term s = t;
    s.coef *= s.exp[var];
    s.exp[var] -= 1;
    r.terms_.push_back(std::move(s));
  }
  return r;
}

IntPoly IntPoly::symmetric_mod(const Integer& m) const {
  std::vector<Term> out;
  Integer half = m / 2;
  for (const auto& t : terms_) {
    Integer r;
    mpz_fdiv_r(r.get_mpz_t(), t.coef.get_mpz_t(), m.get_mpz_t());
    if (r > half) r -= m;
    if (r != 0) out.push_back({t.exp, std::move(r)});
  }
  IntPoly p;
  p.terms_ = std::move(out);
  return p;
}

std::complex<double> IntPoly::eval(std::span<const std::complex<double>> values) const {
  std::complex<double> acc = 0;
  for (const auto& t : terms_) {
    std::complex<double> term = t.coef.get_d();
    for (std::size_t v = 0; v < values.size() && v < kMaxParams; ++v)
      for (unsigned e = 0; e < t.exp[v]; ++e) term *= values[v];
    acc += term;
  }
  return acc;
}

bool operator==(const IntPoly& a, const IntPoly& b) {
  if (a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i)
    if (a.terms_[i].exp != b.terms_[i].exp || a.terms_[i].coef != b.terms_[i].coef) return false;
  return true;
}

std::string IntPoly::to_string(const ParamSpace& space) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& t : terms_) {
    Integer c = t.coef;
    bool neg = c < 0;
    if (neg) c = -c;
    if (first) {
      if (neg) os << "-";
    } else {
      os << (neg ? " - " : " + ");
    }
    first = false;
    bool any_var = false;
    std::ostringstream vars;
    for (std::size_t v = 0; v < space.size(); ++v) {
      if (t.exp[v] == 0) continue;
      if (any_var) vars << "*";
      vars << space.name(v);
      if (t.exp[v] > 1) vars << "^" << t.exp[v];
      any_var = true;
    }
    if (!any_var) {
      os << c.get_str();
    } else if (c == 1) {
      os << vars.str();
    } else {
      os << c.get_str() << "*" << vars.str();
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// GCD: heuristic evaluation/interpolation scheme over Z[x1..xm].

namespace {

struct GcdTriple {
  IntPoly h, cff, cfg;
};

struct HeuristicFailed {};

Integer integer_sqrt(const Integer& x) {
  Integer r;
  mpz_sqrt(r.get_mpz_t(), x.get_mpz_t());
  return r;
}

int first_variable(const IntPoly& f, const IntPoly& g) {
  int best = -1;
  for (std::size_t v = 0; v < kMaxParams; ++v)
    if (f.uses(v) || g.uses(v)) return static_cast<int>(v);
  return best;
}

IntPoly interpolate(IntPoly h, const Integer& x, std::size_t var) {
  IntPoly out;
  unsigned i = 0;
  while (!h.is_zero()) {
    IntPoly g = h.symmetric_mod(x);
    if (!g.is_zero()) out += g.shifted([&] {
      ParamExponent e{};
      e[var] = static_cast<std::uint16_t>(i);
      return e;
    }());
    h -= g;
    h = h.divided_by_integer(x);
    ++i;
  }
  if (!out.is_zero() && out.leading().coef < 0) out = -out;
  return out;
}

IntPoly primitive_part(const IntPoly& p) {
  if (p.is_zero()) return p;
  Integer c = p.content();
  IntPoly r = p.divided_by_integer(c);
  if (r.leading().coef < 0) r = -r;
  return r;
}

GcdTriple heu_gcd(const IntPoly& f0, const IntPoly& g0) {
  int var = first_variable(f0, g0);
  if (var < 0) {
    Integer a = f0.constant_term();
    Integer b = g0.constant_term();
    Integer h;
    mpz_gcd(h.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return {IntPoly(h), IntPoly(Integer(a / h)), IntPoly(Integer(b / h))};
  }
  Integer cf = f0.content();
  Integer cg = g0.content();
  Integer cont;
  mpz_gcd(cont.get_mpz_t(), cf.get_mpz_t(), cg.get_mpz_t());
  IntPoly f = f0.divided_by_integer(cont);
  IntPoly g = g0.divided_by_integer(cont);

  Integer f_norm = f.max_norm();
  Integer g_norm = g.max_norm();
  Integer B = 2 * std::min(f_norm, g_norm) + 29;
  Integer x = std::min(B, Integer(99 * integer_sqrt(B)));
  Integer alt = 2 * std::min(Integer(f_norm / abs(f.leading().coef)),
                             Integer(g_norm / abs(g.leading().coef))) +
                2;
  if (alt > x) x = alt;

  for (int attempt = 0; attempt < 6; ++attempt) {
    IntPoly ff = f.evaluate(static_cast<std::size_t>(var), x);
    IntPoly gg = g.evaluate(static_cast<std::size_t>(var), x);
    if (!ff.is_zero() && !gg.is_zero()) {
      GcdTriple inner = heu_gcd(ff, gg);
      IntPoly h = primitive_part(interpolate(inner.h, x, static_cast<std::size_t>(var)));
      if (!h.is_zero()) {
        if (auto cff = f.divide_exact(h))
          if (auto cfg = g.divide_exact(h)) return {h.scaled(cont), std::move(*cff), std::move(*cfg)};
      }
      IntPoly cff = interpolate(inner.cff, x, static_cast<std::size_t>(var));
      if (!cff.is_zero())
        if (auto hq = f.divide_exact(cff))
          if (!hq->is_zero())
            if (auto cfg = g.divide_exact(*hq)) return {hq->scaled(cont), cff, std::move(*cfg)};
      IntPoly cfg = interpolate(inner.cfg, x, static_cast<std::size_t>(var));
      if (!cfg.is_zero())
        if (auto hq = g.divide_exact(cfg))
          if (!hq->is_zero())
            if (auto cff2 = f.divide_exact(*hq)) return {hq->scaled(cont), std::move(*cff2), cfg};
    }
    x = 73794 * x * integer_sqrt(integer_sqrt(x)) / 27011;
  }
  throw HeuristicFailed{};
}

IntPoly monomial_gcd_with(const IntPoly& mono, const IntPoly& other) {
  ParamExponent e = mono.leading().exp;
  ParamExponent m = other.min_exponent();
  for (std::size_t i = 0; i < kMaxParams; ++i) e[i] = std::min(e[i], m[i]);
  Integer c;
  Integer oc = other.content();
  mpz_gcd(c.get_mpz_t(), mono.leading().coef.get_mpz_t(), oc.get_mpz_t());
  return IntPoly::monomial(e, c);
}

} // namespace

IntPoly gcd(const IntPoly& f, const IntPoly& g) {
  if (f.is_zero()) return primitive_part(g).scaled(g.is_zero() ? Integer(0) : g.content());
  if (g.is_zero()) return gcd(g, f);
  if (f.is_constant() || g.is_constant()) {
    Integer a = f.content(), b = g.content(), h;
    mpz_gcd(h.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return IntPoly(h);
  }
  if (f.is_monomial()) return monomial_gcd_with(f, g);
  if (g.is_monomial()) return monomial_gcd_with(g, f);
  if (f == g) return primitive_part(f).scaled(f.content());
  // Pull out the common monomial factor first; it keeps evaluation points small.
  ParamExponent mf = f.min_exponent(), mg = g.min_exponent(), common{};
  bool has_common = false;
  for (std::size_t i = 0; i < kMaxParams; ++i) {
    common[i] = std::min(mf[i], mg[i]);
    has_common = has_common || common[i] > 0;
  }
  try {
    IntPoly h = has_common ? heu_gcd(f.unshifted(common), g.unshifted(common)).h.shifted(common)
                           : heu_gcd(f, g).h;
    if (h.leading().coef < 0) h = -h;
    return h;
  } catch (const HeuristicFailed&) {
    ++g_heuristic_failures;
    Integer a = f.content(), b = g.content(), h;
    mpz_gcd(h.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return IntPoly(h).shifted(common);
  }
}

std::size_t gcd_heuristic_failures() { return g_heuristic_failures.load(); }

// ---------------------------------------------------------------------------

ParamFraction::ParamFraction(const Rational& r) : num_(Integer(r.get_num())), den_(Integer(r.get_den())) {}

ParamFraction::ParamFraction(IntPoly num) : num_(std::move(num)), den_(1) {}

ParamFraction::ParamFraction(IntPoly num, IntPoly den) : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw Error(Error::Kind::ParameterDegeneracy, "zero denominator");
  normalize();
}

ParamFraction ParamFraction::variable(std::size_t var) { return ParamFraction(IntPoly::variable(var)); }

ParamFraction ParamFraction::laurent_monomial(std::span<const std::size_t> vars,
                                              std::span<const long> exps) {
  ParamExponent up{}, down{};
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (exps[i] > 0) up[vars[i]] = static_cast<std::uint16_t>(up[vars[i]] + exps[i]);
    if (exps[i] < 0) down[vars[i]] = static_cast<std::uint16_t>(down[vars[i]] - exps[i]);
  }
  ParamFraction f;
  f.num_ = IntPoly::monomial(up, Integer(1));
  f.den_ = IntPoly::monomial(down, Integer(1));
  return f;
}

void ParamFraction::normalize() {
  if (num_.is_zero()) {
    den_ = IntPoly(1);
    return;
  }
  if (!den_.is_one()) {
    IntPoly g = gcd(num_, den_);
    if (!g.is_one()) {
      num_ = *num_.divide_exact(g);
      den_ = *den_.divide_exact(g);
    }
  }
  if (den_.leading().coef < 0) {
    num_ = -num_;
    den_ = -den_;
  }
}

Rational ParamFraction::constant_value() const {
  assert(is_constant());
  Rational r(num_.constant_term(), den_.constant_term());
  r.canonicalize();
  return r;
}

ParamFraction ParamFraction::operator-() const {
  ParamFraction r = *this;
  r.num_ = -r.num_;
  return r;
}

ParamFraction& ParamFraction::operator+=(const ParamFraction& o) {
  if (o.is_zero()) return *this;
  if (is_zero()) return *this = o;
  if (den_ == o.den_) {
    num_ += o.num_;
    if (num_.is_zero()) {
      den_ = IntPoly(1);
      return *this;
    }
    if (!den_.is_one()) normalize();
    return *this;
  }
  if (den_.is_one()) {
    num_ = num_ * o.den_ + o.num_;
    den_ = o.den_;
    return *this;
  }
  if (o.den_.is_one()) {
    num_ += o.num_ * den_;
    return *this;
  }
  IntPoly g = gcd(den_, o.den_);
  if (g.is_one()) {
    num_ = num_ * o.den_ + o.num_ * den_;
    den_ = den_ * o.den_;
    if (den_.leading().coef < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    return *this;
  }
  IntPoly b1 = *den_.divide_exact(g);
  IntPoly d1 = *o.den_.divide_exact(g);
  num_ = num_ * d1 + o.num_ * b1;
  den_ = den_ * d1;
  if (num_.is_zero()) {
    den_ = IntPoly(1);
    return *this;
  }
  IntPoly g2 = gcd(num_, g);
  if (!g2.is_one()) {
    num_ = *num_.divide_exact(g2);
    den_ = *den_.divide_exact(g2);
  }
  if (den_.leading().coef < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  return *this;
}

ParamFraction& ParamFraction::operator-=(const ParamFraction& o) { return *this += -o; }

ParamFraction& ParamFraction::operator*=(const ParamFraction& o) {
  if (is_zero()) return *this;
  if (o.is_zero()) return *this = ParamFraction();
  IntPoly g1 = (den_.is_one() && o.den_.is_one()) ? IntPoly(1) : gcd(num_, o.den_);
  IntPoly g2 = (den_.is_one() && o.den_.is_one()) ? IntPoly(1) : gcd(o.num_, den_);
  IntPoly a = g1.is_one() ? num_ : *num_.divide_exact(g1);
  IntPoly od = g1.is_one() ? o.den_ : *o.den_.divide_exact(g1);
  IntPoly c = g2.is_one() ? o.num_ : *o.num_.divide_exact(g2);
  IntPoly b = g2.is_one() ? den_ : *den_.divide_exact(g2);
  num_ = a * c;
  den_ = b * od;
  if (den_.leading().coef < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  return *this;
}

ParamFraction ParamFraction::inverse() const {
  if (is_zero()) throw Error(Error::Kind::ParameterDegeneracy, "inverse of zero");
  ParamFraction r;
  r.num_ = den_;
  r.den_ = num_;
  if (r.den_.leading().coef < 0) {
    r.num_ = -r.num_;
    r.den_ = -r.den_;
  }
  return r;
}

ParamFraction& ParamFraction::operator/=(const ParamFraction& o) { return *this *= o.inverse(); }

bool operator==(const ParamFraction& a, const ParamFraction& b) {
  if (a.num_ == b.num_ && a.den_ == b.den_) return true;
  return a.num_ * b.den_ == b.num_ * a.den_;
}

ParamFraction ParamFraction::derivative(std::size_t var) const {
  IntPoly n = num_.derivative(var) * den_ - num_ * den_.derivative(var);
  return ParamFraction(std::move(n), den_ * den_);
}

ParamFraction ParamFraction::substitute(std::size_t var, const ParamFraction& value) const {
  auto horner = [&](const IntPoly& p) {
    auto coeffs = p.coefficients_in(var);
    ParamFraction acc;
    for (std::size_t i = coeffs.size(); i-- > 0;) {
      acc *= value;
      acc += ParamFraction(coeffs[i]);
    }
    return acc;
  };
  ParamFraction n = horner(num_);
  ParamFraction d = horner(den_);
  if (d.is_zero()) throw Error(Error::Kind::ParameterDegeneracy, "denominator vanishes under substitution");
  return n / d;
}

ParamFraction ParamFraction::specialize(std::span<const std::size_t> vars,
                                        std::span<const Rational> values) const {
  ParamFraction r = *this;
  for (std::size_t i = 0; i < vars.size(); ++i) r = r.substitute(vars[i], ParamFraction(values[i]));
  return r;
}

std::complex<double> ParamFraction::eval(std::span<const std::complex<double>> values) const {
  std::complex<double> d = den_.eval(values);
  double scale = 0;
  for (const auto& t : den_.terms()) {
    double m = std::abs(t.coef.get_d());
    for (std::size_t v = 0; v < values.size() && v < kMaxParams; ++v)
      m *= std::pow(std::abs(values[v]), t.exp[v]);
    scale += m;
  }
  if (std::abs(d) <= 1e-13 * scale)
    throw Error(Error::Kind::SingularEvaluation, "denominator vanishes at evaluation point");
  return num_.eval(values) / d;
}

std::string ParamFraction::to_string(const ParamSpace& space) const {
  auto wrap = [&](const IntPoly& p) {
    std::string s = p.to_string(space);
    return p.size() > 1 ? "(" + s + ")" : s;
  };
  if (den_.is_one()) return num_.to_string(space);
  return wrap(num_) + "/" + wrap(den_);
}

} // namespace hypertoric
