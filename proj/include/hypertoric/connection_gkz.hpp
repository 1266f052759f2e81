#pragma once

// Quantum connection nabla_i = q_i d/dq_i + u_i* over the n coordinates q_i,
// its GKZ operators, and numerical parallel transport.

#include "hypertoric/quantum_ring.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <complex>
#include <string>
#include <vector>

namespace hypertoric {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

/// Numeric equivariant parameters and a point of (C*)^n.
struct NumericPoint {
  cplx hbar;
  CVector c; ///< length d
  CVector q; ///< length n
};

/// Fast evaluator of a parameter fraction at complex points.
class CompiledFraction {
public:
  CompiledFraction() = default;
  explicit CompiledFraction(const ParamFraction& f);
  cplx operator()(std::span<const cplx> params) const;
  bool is_zero() const { return num_.empty(); }

private:
  // Sums run in long double: expanded numerators cancel badly near the discriminant.
  using lcplx = std::complex<long double>;
  struct Term {
    long double coef;
    std::vector<std::pair<std::uint8_t, std::uint16_t>> powers;
  };
  static lcplx eval_terms(const std::vector<Term>& terms, std::span<const lcplx> params, long double* scale);
  std::vector<Term> num_, den_;
};

class ConnectionFamily {
public:
  explicit ConnectionFamily(const RingPresentation& quantum);

  const RingPresentation& presentation() const { return pres_; }
  std::size_t n() const { return pres_.td.n; }
  std::size_t rank() const { return pres_.rank(); }
  /// A_i as exact matrices on the class basis.
  const std::vector<OperatorMatrix>& operators() const { return ops_; }

  /// (hbar, c, Q) with Q_l = prod_i q_i^{iota_il}, laid out as in ParamSpace.
  CVector parameter_point(const NumericPoint& p) const;

  /// Distance-like measure to the singular locus: min over circuits of
  /// |1 - (-1)^{|S|} q^{beta_S}| and min_i |q_i|.
  double clearance(const CVector& q) const;

  /// A_i(q); throws SingularEvaluation on the discriminant.
  std::vector<Eigen::MatrixXcd> evaluate(const NumericPoint& p) const;

  /// deriv[i][j] = q_i d/dq_i A_j, from exact derivatives of the entries.
  std::vector<std::vector<Eigen::MatrixXcd>> log_derivatives(const NumericPoint& p) const;

private:
  RingPresentation pres_;
  std::vector<OperatorMatrix> ops_;
  std::vector<std::vector<CompiledFraction>> compiled_;        // [i][entry]
  std::vector<std::vector<std::vector<CompiledFraction>>> dq_; // [l][j][entry]: Q_l d/dQ_l A_j
};

struct FlatnessReport {
  double max_residual = 0;
  std::vector<double> per_point;
  std::size_t points = 0;
};

/// max over points and pairs of |q_i d_i A_j - q_j d_j A_i + [A_i, A_j]|.
FlatnessReport check_flatness(const ConnectionFamily& fam, const std::vector<NumericPoint>& points);

/// Seeded random points with every |q_i| in [0.3, 2] and clearance above 0.05.
std::vector<NumericPoint> random_points(const ConnectionFamily& fam, cplx hbar, const CVector& c,
                                        std::size_t count, std::uint64_t seed);

// ---------------------------------------------------------------------------
// GKZ operators

struct GkzOperator {
  enum class Kind { Linear, Circuit };
  Kind kind = Kind::Linear;
  std::size_t index = 0; ///< j for linear operators, circuit index otherwise
  IntVector coeffs;      ///< linear: (a_1j .. a_nj)
  Circuit circuit;       ///< circuit operators
  long q_sign = -1;      ///< sign in front of the q^beta term
  std::string text;
};

std::vector<GkzOperator> gkz_system(const TorusData& td);

/// Replaces nabla_i by u_i.
ParamPolynomial symbol(const GkzOperator& op, const RingPresentation& pres);

/// True iff every symbol lies in the ideal of the presentation.
bool symbol_check(const std::vector<GkzOperator>& ops, const RingPresentation& pres);

/// coef * (prod_{i in derivs} E_i) applied to a function; E_i = q_i d/dq_i.
struct GkzTerm {
  IndexSet derivs;
  cplx coef;
};

/// Expansion of the operator at a numeric point as a sum of mixed log-derivatives.
std::vector<GkzTerm> expand_operator(const GkzOperator& op, const NumericPoint& p);

// ---------------------------------------------------------------------------
// Transport

struct QPath {
  enum class Interpolation { Linear, Log };
  std::vector<CVector> waypoints;
  Interpolation mode = Interpolation::Linear;

  std::size_t segments() const { return waypoints.empty() ? 0 : waypoints.size() - 1; }
  /// Position at s in [0, segments()].
  CVector at(double s) const;
  /// Position and d log q / dt inside segment `seg`, t in [0, 1].
  CVector at(std::size_t seg, double t) const;
  CVector dlog(std::size_t seg, double t) const;

  static QPath from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct TransportOptions {
  double rtol = 1e-10;
  double atol = 1e-13;
  double min_clearance = 1e-4;
  std::size_t max_steps = 200000;
};

/// Fundamental matrix S(s) of dS/ds = -(sum_i dlog q_i/ds A_i(q(s))) S with S(0) = I, at the end of the path.
Eigen::MatrixXcd transport_matrix(const ConnectionFamily& fam, cplx hbar, const CVector& c, const QPath& path,
                                  const TransportOptions& opts = {});

/// Flat section through v0.
Eigen::VectorXcd transport(const ConnectionFamily& fam, cplx hbar, const CVector& c, const QPath& path,
                           const Eigen::VectorXcd& v0, const TransportOptions& opts = {});

/// Row vector xi with q_i d_i xi = xi A_i (pairing with flat sections is constant).
Eigen::RowVectorXcd transport_dual(const ConnectionFamily& fam, cplx hbar, const CVector& c, const QPath& path,
                                   const Eigen::RowVectorXcd& xi0, const TransportOptions& opts = {});

} // namespace hypertoric
