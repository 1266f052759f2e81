#pragma once

// Polynomials in the divisor classes u_1..u_n with coefficients in
// Q(hbar, c, q), Buchberger Gröbner bases and normal forms.

#include "hypertoric/param_poly.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace hypertoric {

inline constexpr std::size_t kMaxVars = 16;
using Monomial = std::array<std::uint8_t, kMaxVars>;

unsigned degree(const Monomial& m);
bool divides(const Monomial& a, const Monomial& b);
Monomial lcm(const Monomial& a, const Monomial& b);
Monomial operator+(const Monomial& a, const Monomial& b);
Monomial operator-(const Monomial& a, const Monomial& b); ///< requires divides(b, a)

/// Degree reverse lexicographic order; rank_to_var[0] is the largest variable.
struct TermOrder {
  std::size_t nvars = 0;
  std::vector<std::size_t> rank_to_var;

  /// u_n > u_{n-1} > ... > u_1.
  static TermOrder drevlex(std::size_t n);
  static TermOrder drevlex(std::vector<std::size_t> rank_to_var);

  bool greater(const Monomial& a, const Monomial& b) const;
};

using OrderPtr = std::shared_ptr<const TermOrder>;

class ParamPolynomial {
public:
  struct Term {
    Monomial mono{};
    ParamFraction coef;
  };

  explicit ParamPolynomial(OrderPtr order) : order_(std::move(order)) {}
  ParamPolynomial(OrderPtr order, const ParamFraction& constant);

  static ParamPolynomial variable(OrderPtr order, std::size_t var);
  static ParamPolynomial monomial(OrderPtr order, const Monomial& m, const ParamFraction& coef);

  const OrderPtr& order() const { return order_; }
  std::size_t nvars() const { return order_->nvars; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  const std::vector<Term>& terms() const { return terms_; }
  const Term& leading() const { return terms_.front(); }
  unsigned total_degree() const;
  ParamFraction coefficient(const Monomial& m) const;

  ParamPolynomial operator-() const;
  ParamPolynomial& operator+=(const ParamPolynomial& o);
  ParamPolynomial& operator-=(const ParamPolynomial& o);
  friend ParamPolynomial operator+(ParamPolynomial a, const ParamPolynomial& b) { return a += b; }
  friend ParamPolynomial operator-(ParamPolynomial a, const ParamPolynomial& b) { return a -= b; }
  friend ParamPolynomial operator*(const ParamPolynomial& a, const ParamPolynomial& b);
  ParamPolynomial scaled(const ParamFraction& s) const;
  ParamPolynomial shifted(const Monomial& m) const;
  ParamPolynomial monic() const;

  /// this - coef * m * other, the basic reduction step.
  void subtract_multiple(const ParamFraction& coef, const Monomial& m, const ParamPolynomial& other);

  /// Applies f to every coefficient (zero results are dropped).
  template <class F>
  ParamPolynomial map_coefficients(F&& f) const {
    ParamPolynomial r(order_);
    for (const auto& t : terms_) {
      ParamFraction c = f(t.coef);
      if (!c.is_zero()) r.terms_.push_back({t.mono, std::move(c)});
    }
    return r;
  }

  friend bool operator==(const ParamPolynomial& a, const ParamPolynomial& b);

  /// Canonical text: terms in descending order, coefficients as num/den.
  std::string to_string(const ParamSpace& space) const;

private:
  OrderPtr order_;
  std::vector<Term> terms_;
};

struct GroebnerOptions {
  std::size_t max_steps = 20000;
};

/// Reduced Gröbner basis over Q(params); monic, sorted by ascending leading monomial.
std::vector<ParamPolynomial> groebner_basis(const std::vector<ParamPolynomial>& gens,
                                            const GroebnerOptions& options = {});

ParamPolynomial normal_form(const ParamPolynomial& p, const std::vector<ParamPolynomial>& gb);

/// Buchberger criterion: every S-polynomial reduces to zero.
bool is_groebner_basis(const std::vector<ParamPolynomial>& gb);

ParamPolynomial s_polynomial(const ParamPolynomial& f, const ParamPolynomial& g);

/// Monomials outside the leading-term ideal, ascending in the term order.
/// Throws NotZeroDimensional when there are infinitely many.
std::vector<Monomial> standard_monomials(const std::vector<ParamPolynomial>& gb);

std::string monomial_to_string(const Monomial& m, std::size_t nvars);

} // namespace hypertoric
