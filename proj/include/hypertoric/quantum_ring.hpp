#pragma once

// Classical and quantum cohomology presentations, multiplication operators
// on the standard monomial basis, and Steinberg operators recovered from the
// poles of divisor multiplication.

#include "hypertoric/arrangement.hpp"
#include "hypertoric/polynomial.hpp"

#include <complex>
#include <optional>
#include <cstdint>
#include <string>
#include <vector>

namespace hypertoric {

enum class RingMode { Classical, Quantum };

/// Square matrix of parameter fractions; column j is the image of basis vector j.
class OperatorMatrix {
public:
  OperatorMatrix() = default;
  OperatorMatrix(std::size_t size, std::string label = {})
      : size_(size), label_(std::move(label)), entries_(size * size) {}

  static OperatorMatrix identity(std::size_t size);

  std::size_t size() const { return size_; }
  const std::string& label() const { return label_; }
  void set_label(std::string label) { label_ = std::move(label); }

  ParamFraction& operator()(std::size_t r, std::size_t c) { return entries_[r * size_ + c]; }
  const ParamFraction& operator()(std::size_t r, std::size_t c) const { return entries_[r * size_ + c]; }

  bool is_zero() const;
  OperatorMatrix& operator+=(const OperatorMatrix& o);
  OperatorMatrix& operator-=(const OperatorMatrix& o);
  friend OperatorMatrix operator+(OperatorMatrix a, const OperatorMatrix& b) { return a += b; }
  friend OperatorMatrix operator-(OperatorMatrix a, const OperatorMatrix& b) { return a -= b; }
  friend OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b);
  OperatorMatrix scaled(const ParamFraction& s) const;
  std::vector<ParamFraction> apply(const std::vector<ParamFraction>& v) const;
  friend bool operator==(const OperatorMatrix& a, const OperatorMatrix& b);

  template <class F>
  OperatorMatrix map(F&& f) const {
    OperatorMatrix r(size_, label_);
    for (std::size_t i = 0; i < entries_.size(); ++i) r.entries_[i] = f(entries_[i]);
    return r;
  }

  /// Row-major numeric values at the given parameter point.
  std::vector<std::complex<double>> eval(std::span<const std::complex<double>> params) const;

  std::size_t rank_at(std::span<const Rational> params) const;

private:
  std::size_t size_ = 0;
  std::string label_;
  std::vector<ParamFraction> entries_;
};

OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b);

struct RingPresentation {
  TorusData td;
  std::vector<Circuit> circuits;
  RingMode mode = RingMode::Quantum;
  ParamSpace space;
  OrderPtr order;
  std::vector<ParamPolynomial> generators; ///< one per circuit, then d linear relations
  std::vector<ParamPolynomial> groebner;
  std::vector<Monomial> basis;

  /// Monomials whose quantum and classical products agree;
  /// the basis of cohomology classes used by the divisor formula and the connection.
  std::vector<IndexSet> class_basis;
  bool class_basis_found = false;
  OperatorMatrix to_standard;   ///< column j: standard coordinates of class_basis[j]
  OperatorMatrix from_standard; ///< inverse of to_standard

  std::size_t rank() const { return basis.size(); }
  std::vector<ParamFraction> class_coordinates(const ParamPolynomial& p) const;
  /// Coordinates of a polynomial in the standard basis after reduction.
  std::vector<ParamFraction> coordinates(const ParamPolynomial& p) const;
  ParamPolynomial from_coordinates(const std::vector<ParamFraction>& v) const;
  ParamPolynomial u(std::size_t i) const { return ParamPolynomial::variable(order, i); }
  ParamPolynomial constant(const ParamFraction& f) const { return ParamPolynomial(order, f); }
};

ParamSpace param_space(const TorusData& td);

/// q^{beta_S} as a Laurent monomial in the iota coordinates.
ParamFraction q_power(const ParamSpace& space, const IntVector& beta_k);

/// Relation for circuit S; the quantum term is dropped in classical mode.
ParamPolynomial circuit_relation(const Circuit& S, const ParamSpace& space, const OrderPtr& order,
                                 RingMode mode);

/// sum_i a_ij u_i - c_j for j = 0..d-1.
std::vector<ParamPolynomial> linear_relations(const TorusData& td, const ParamSpace& space,
                                              const OrderPtr& order);

std::vector<ParamPolynomial> classical_ideal(const TorusData& td);
std::vector<ParamPolynomial> quantum_ideal(const TorusData& td);

/// Throws NotSmooth unless the arrangement is simple and unimodular.
RingPresentation build_presentation(const TorusData& td, RingMode mode, const GroebnerOptions& opts = {});

OperatorMatrix multiplication_matrix(const ParamPolynomial& p, const RingPresentation& pres);

/// A_i: multiplication by the divisor u_i on the standard basis.
std::vector<OperatorMatrix> divisor_matrices(const RingPresentation& pres);

/// Multiplication by u_i on the class basis.
std::vector<OperatorMatrix> class_divisor_matrices(const RingPresentation& pres);

std::optional<OperatorMatrix> inverse(const OperatorMatrix& m);

/// Monomials (index multisets) whose quantum product equals the classical one because
/// they can be built one divisor at a time with every correction L_S(u_M) vanishing
/// (span a_S not contained in span a_M). Ordered by degree, then lexicographically.
std::vector<IndexSet> lemma_safe_sets(const TorusData& td, const std::vector<Circuit>& circuits);

/// Factored text of a circuit relation, e.g. "u1*u2 - q^(1,1)*(h-u1)*(h-u2)",
/// with the curve class written in the n standard coordinates.
std::string render_relation(const Circuit& S, RingMode mode);
std::string render_linear_relation(const TorusData& td, const ParamSpace& space, std::size_t j);

/// Limit of an entry as all q^{beta_S} -> 0, taken along Q_l -> lambda^{w_l} Q_l
/// with w = iota^T theta_hat. Throws PoleOrderError if the entry blows up.
ParamFraction classical_limit(const ParamFraction& f, const TorusData& td, const ParamSpace& space);
OperatorMatrix classical_limit(const OperatorMatrix& m, const TorusData& td, const ParamSpace& space);
/// Coefficientwise; on a quantum relation this sets every q^{beta_S} to zero.
ParamPolynomial classical_limit(const ParamPolynomial& p, const TorusData& td, const ParamSpace& space);

/// True iff every denominator factors into q-monomials, powers of
/// (Q^{beta-} - sigma Q^{beta+}) over circuits, and a q-free cofactor.
bool poles_on_shifted_discriminant(const OperatorMatrix& m, const RingPresentation& pres);

struct SteinbergOptions {
  std::uint64_t seed = 0;
};

/// L_S = lim_{q^S -> 1} (1 - q^S) A_i / (hbar (u_i, beta_S)) with q^S = (-1)^{|S|} q^{beta_S}.
/// Checked against a second divisor in S (when available) and a second set of
/// generic constants; throws InconsistentExtraction or PoleOrderError.
OperatorMatrix extract_steinberg(const RingPresentation& pres, std::size_t circuit_index,
                                 const std::vector<OperatorMatrix>& divisors,
                                 const SteinbergOptions& opts = {});

struct IdentityCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct DivisorFormulaReport {
  std::vector<OperatorMatrix> steinberg;            ///< one per circuit
  std::vector<OperatorMatrix> difference;           ///< reconstructed minus direct, per divisor
  std::vector<IdentityCheck> checks;
  bool pass() const;
};

/// Reconstructs A_i(q) = A_i(0) + hbar sum_S (u_i,beta_S) q^S/(1-q^S) L_S and compares
/// with the direct multiplication matrices; also checks the vanishing lemma and the two
/// Steinberg identities on classical normal forms.
DivisorFormulaReport verify_divisor_formula(const RingPresentation& quantum,
                                            const RingPresentation& classical,
                                            const SteinbergOptions& opts = {});

} // namespace hypertoric
