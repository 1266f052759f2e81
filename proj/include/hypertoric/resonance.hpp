#pragma once

// Saturated collections of signed indices and the non-resonance test for rational (hbar, c).

#include "hypertoric/arrangement.hpp"

#include <optional>
#include <string>
#include <utility>

namespace hypertoric {

/// A subset of {1..n} ∪ {1*..n*}, stored 0-based.
struct SignedIndexSet {
  IndexSet plain;
  IndexSet starred;

  bool empty() const { return plain.empty() && starred.empty(); }
  std::size_t size() const { return plain.size() + starred.size(); }
  std::string to_string() const; ///< 1-based, e.g. "{1,2*}"

  friend bool operator==(const SignedIndexSet&, const SignedIndexSet&) = default;
};

/// S^L = S+ ∪ (S-)*, S^R = S- ∪ (S+)*.
std::pair<SignedIndexSet, SignedIndexSet> split_circuit_sides(const Circuit& circuit);

/// Q meets S^L iff it meets S^R, for every circuit.
bool is_saturated(const SignedIndexSet& q, const std::vector<Circuit>& circuits);

/// Nonempty minimal saturated collections, by size and then lexicographically in the order
/// 1 < .. < n < 1* < .. < n*. Throws SearchBudgetExceeded when 2n > 24.
std::vector<SignedIndexSet> enumerate_minimal_saturated(const std::vector<Circuit>& circuits, std::size_t n);

/// Columns e_i ⊕ a_i for i in Q^c and e_i ⊕ 0 for i* in Q^c, in Q^{n+d}.
IntMatrix complement_span(const TorusData& td, const SignedIndexSet& q);

/// (hbar, .., hbar, c_1, .., c_d).
RatVector parameter_vector(const TorusData& td, const Rational& hbar, const RatVector& c);

struct ResonanceWitness {
  SignedIndexSet collection;
  IntVector shift;          ///< z in Z^{n+d}
  RatVector span_coeffs;    ///< v - z = complement_span * span_coeffs
};

struct ResonanceVerdict {
  bool non_resonant = true;
  std::optional<ResonanceWitness> witness; ///< set iff resonant
  std::size_t collections_checked = 0;
};

/// Membership tests run on up to `threads` threads; the witness is always the first
/// resonant collection in enumeration order.
ResonanceVerdict is_non_resonant(const TorusData& td, const Rational& hbar, const RatVector& c,
                                 std::size_t threads = 1);

/// Exact re-substitution of a witness.
bool verify_witness(const TorusData& td, const Rational& hbar, const RatVector& c, const ResonanceWitness& w);

/// dim(Lin(Q^c) ∩ V_n) for every minimal saturated Q, V_n = {first n coordinates equal}.
std::vector<std::size_t> genericity_dimensions(const TorusData& td);

/// True iff every such intersection has dimension < d + 1.
bool genericity_check(const TorusData& td);

} // namespace hypertoric
