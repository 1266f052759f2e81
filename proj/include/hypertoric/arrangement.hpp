#pragma once

// Torus data, circuits, classification and vertices of the hyperplane
// arrangement attached to a hypertoric variety.

#include "hypertoric/exact.hpp"

#include <cstddef>
#include <vector>

namespace hypertoric {

using IndexSet = std::vector<std::size_t>; // sorted, 0-based

struct Hyperplane {
  IntVector normal; ///< a_i in Z^d
  Integer offset;   ///< theta_hat_i; hyperplane is {x : a_i . x + offset = 0}
};

/// Integer data of the exact sequence 0 -> Z^k --iota--> Z^n --a--> Z^d -> 0
/// together with the lift theta_hat of the stability parameter.
struct TorusData {
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t d = 0;
  IntMatrix a;         ///< d x n, columns a_i
  IntMatrix iota;      ///< n x k, HNF-canonical basis of ker a
  IntVector theta_hat; ///< length n
  std::vector<Hyperplane> hyperplanes;
  bool surjective = true;

  IntVector normal(std::size_t i) const { return a.col(i); }
};

/// Signed minimal dependence S = S+ ⊔ S- among the columns of a.
struct Circuit {
  IndexSet support;
  IndexSet plus;
  IndexSet minus;
  IntVector beta;   ///< length n, entries in Z; a*beta = 0, theta_hat.beta > 0
  IntVector beta_k; ///< beta in iota coordinates (length k)

  bool contains(std::size_t i) const;
  int sign(std::size_t i) const; ///< +1 for S+, -1 for S-, 0 otherwise
};

struct Classification {
  bool simple = false;
  bool unimodular = false;
  bool smooth = false;
};

struct Vertex {
  IndexSet basis;
  RatVector position;
};

struct RootHyperplane {
  std::size_t circuit_index = 0;
  std::vector<IntVector> spanning; ///< rows of iota for i outside the circuit
  std::size_t dimension = 0;
};

struct BuildOptions {
  /// When false, a non-surjective a is accepted and only recorded in TorusData::surjective.
  bool require_surjective = true;
};

/// Validates a (d x n, rank d, surjective over Z) and derives iota.
TorusData build_torus_data(const IntMatrix& a, const IntVector& theta_hat, BuildOptions options = {});

/// All circuits, sorted lexicographically by support.
std::vector<Circuit> enumerate_circuits(const TorusData& td);

Classification classify(const TorusData& td);

std::vector<Vertex> vertices(const TorusData& td);

std::vector<RootHyperplane> root_hyperplanes(const TorusData& td, const std::vector<Circuit>& circuits);

/// Number of d-subsets of columns of a that are linearly independent.
std::size_t matroid_basis_count(const TorusData& td);

/// Columns of a indexed by `subset`, as a d x |subset| matrix.
IntMatrix columns(const IntMatrix& a, const IndexSet& subset);

/// Calls f on every k-subset of {0..n-1} in lexicographic order.
template <class F>
void for_each_subset(std::size_t n, std::size_t k, F&& f) {
  if (k > n) return;
  IndexSet s(k);
  for (std::size_t i = 0; i < k; ++i) s[i] = i;
  for (;;) {
    f(static_cast<const IndexSet&>(s));
    std::size_t i = k;
    while (i > 0 && s[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++s[i - 1];
    for (std::size_t j = i; j < k; ++j) s[j] = s[j - 1] + 1;
  }
}

// Standard instances used throughout tests and examples.
namespace instances {
TorusData cotangent_projective(std::size_t n); ///< T*P^n, n+1 hyperplanes in R^n
TorusData a_tilde(std::size_t n);              ///< A~_n surface, n+1 points on a line
TorusData two_plane_example();                 ///< 5 lines in the plane, 6 circuits
} // namespace instances

} // namespace hypertoric
