#pragma once

// Sparse multivariate polynomials over Z in the parameters (hbar, c_j, q_l),
// and the fraction field built on top of them.

#include "hypertoric/exact.hpp"

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hypertoric {

inline constexpr std::size_t kMaxParams = 18;
using ParamExponent = std::array<std::uint16_t, kMaxParams>;

/// Names and layout of the parameter variables: index 0 is hbar, then c_1..c_d,
/// then the Kähler coordinates q_1..q_k (iota coordinates).
struct ParamSpace {
  std::size_t d = 0;
  std::size_t k = 0;

  std::size_t size() const { return 1 + d + k; }
  std::size_t hbar() const { return 0; }
  std::size_t c(std::size_t j) const { return 1 + j; }
  std::size_t q(std::size_t l) const { return 1 + d + l; }
  std::string name(std::size_t var) const;
};

/// Polynomial over Z with terms kept sorted by descending lexicographic exponent.
class IntPoly {
public:
  struct Term {
    ParamExponent exp{};
    Integer coef;
  };

  IntPoly() = default;
  IntPoly(long c);
  IntPoly(const Integer& c);

  static IntPoly variable(std::size_t var, unsigned power = 1);
  static IntPoly monomial(const ParamExponent& exp, const Integer& coef);
  static IntPoly from_terms(std::vector<Term> terms); ///< sorts and merges

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  bool is_monomial() const { return terms_.size() == 1; }
  bool is_one() const;
  std::size_t size() const { return terms_.size(); }
  const std::vector<Term>& terms() const { return terms_; }
  const Term& leading() const { return terms_.front(); }
  Integer constant_term() const;

  unsigned degree(std::size_t var) const;
  unsigned total_degree() const;
  bool uses(std::size_t var) const { return degree(var) > 0; }
  Integer content() const;        ///< positive gcd of coefficients (0 for the zero polynomial)
  Integer max_norm() const;
  ParamExponent min_exponent() const; ///< componentwise minimum over terms

  IntPoly operator-() const;
  IntPoly& operator+=(const IntPoly& o);
  IntPoly& operator-=(const IntPoly& o);
  friend IntPoly operator+(IntPoly a, const IntPoly& b) { return a += b; }
  friend IntPoly operator-(IntPoly a, const IntPoly& b) { return a -= b; }
  friend IntPoly operator*(const IntPoly& a, const IntPoly& b);
  IntPoly scaled(const Integer& s) const;
  IntPoly divided_by_integer(const Integer& s) const; ///< exact
  IntPoly shifted(const ParamExponent& exp) const;     ///< multiply by a monomial
  IntPoly unshifted(const ParamExponent& exp) const;   ///< exact division by a monomial
  IntPoly pow(unsigned e) const;

  /// Exact quotient this / divisor, or nullopt if divisor does not divide.
  std::optional<IntPoly> divide_exact(const IntPoly& divisor) const;

  IntPoly evaluate(std::size_t var, const Integer& x) const;
  IntPoly substitute(std::size_t var, const IntPoly& value) const;
  IntPoly derivative(std::size_t var) const;
  IntPoly symmetric_mod(const Integer& m) const;

  /// Coefficients as a polynomial in `var`: result[e] is the coefficient of var^e.
  std::vector<IntPoly> coefficients_in(std::size_t var) const;

  std::complex<double> eval(std::span<const std::complex<double>> values) const;

  friend bool operator==(const IntPoly& a, const IntPoly& b);
  friend bool operator!=(const IntPoly& a, const IntPoly& b) { return !(a == b); }

  std::string to_string(const ParamSpace& space) const;

private:
  std::vector<Term> terms_;
};

/// Greatest common divisor with positive leading coefficient.
IntPoly gcd(const IntPoly& f, const IntPoly& g);

/// Diagnostics: number of gcd calls where the heuristic gave up.
std::size_t gcd_heuristic_failures();

/// Element of Q(hbar, c, q): reduced quotient of integer polynomials,
/// denominator with positive leading coefficient.
class ParamFraction {
public:
  ParamFraction() : den_(1) {}
  ParamFraction(long c) : num_(c), den_(1) {}
  ParamFraction(const Integer& c) : num_(c), den_(1) {}
  ParamFraction(const Rational& r);
  ParamFraction(IntPoly num);
  ParamFraction(IntPoly num, IntPoly den);

  static ParamFraction variable(std::size_t var);
  /// Laurent monomial prod var_i^{exps_i} with possibly negative exponents.
  static ParamFraction laurent_monomial(std::span<const std::size_t> vars, std::span<const long> exps);

  const IntPoly& num() const { return num_; }
  const IntPoly& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_one() const { return num_.is_one() && den_.is_one(); }
  bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
  bool uses(std::size_t var) const { return num_.uses(var) || den_.uses(var); }
  Rational constant_value() const; ///< requires is_constant()

  ParamFraction operator-() const;
  ParamFraction& operator+=(const ParamFraction& o);
  ParamFraction& operator-=(const ParamFraction& o);
  ParamFraction& operator*=(const ParamFraction& o);
  ParamFraction& operator/=(const ParamFraction& o);
  friend ParamFraction operator+(ParamFraction a, const ParamFraction& b) { return a += b; }
  friend ParamFraction operator-(ParamFraction a, const ParamFraction& b) { return a -= b; }
  friend ParamFraction operator*(ParamFraction a, const ParamFraction& b) { return a *= b; }
  friend ParamFraction operator/(ParamFraction a, const ParamFraction& b) { return a /= b; }
  ParamFraction inverse() const;

  friend bool operator==(const ParamFraction& a, const ParamFraction& b);
  friend bool operator!=(const ParamFraction& a, const ParamFraction& b) { return !(a == b); }

  ParamFraction derivative(std::size_t var) const;
  ParamFraction substitute(std::size_t var, const ParamFraction& value) const;
  /// Substitutes rational values; throws ParameterDegeneracy if the denominator vanishes.
  ParamFraction specialize(std::span<const std::size_t> vars, std::span<const Rational> values) const;

  /// Numeric value; throws SingularEvaluation if the denominator vanishes (relative to its size).
  std::complex<double> eval(std::span<const std::complex<double>> values) const;

  std::string to_string(const ParamSpace& space) const;

private:
  void normalize();
  IntPoly num_;
  IntPoly den_;
};

} // namespace hypertoric
