#pragma once

// Multiplicative mirror: the complement of the hyperplanes q_i t^{a_i} = -1 in (C*)^d,
// twisted periods of Omega = prod (1 + q_i t^{a_i})^hbar prod t_j^{-c_j} dt_j/t_j,
// and critical points of the superpotential.

#include "hypertoric/connection_gkz.hpp"

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <vector>

namespace hypertoric {

struct Puncture {
  cplx t;
  long factor = -1;     ///< hyperplane index, or -1 for the origin
  std::size_t root = 0; ///< which root of q_i t^{a_i} = -1 when |a_i| > 1
};

struct MirrorModel {
  TorusData td;
  CVector q;
  cplx hbar;
  CVector c;
  /// d = 1 only: the origin first, then roots of 1 + q_i t^{a_i} by increasing |t|, then arg t.
  std::vector<Puncture> punctures;

  const Puncture& find(const Puncture& key) const; ///< throws InvalidArgument if absent

  /// Principal logs (log t_j for j < d, then log(1 + q_i t^{a_i})).
  CVector logs(const CVector& t) const;
  /// Omega / (dt/t) on the branch given by the logs.
  cplx integrand(const CVector& logs) const;
};

/// Throws DegenerateModel when punctures collide or some q_i vanishes.
MirrorModel mirror_space(const TorusData& td, const CVector& q, cplx hbar, const CVector& c);

/// A closed contour in C* (d = 1). A Pochhammer loop winds around two punctures as
/// [a, b] = a b a^-1 b^-1 from a base point on the chord; a Circle is a single positive loop.
struct Contour {
  enum class Kind { Pochhammer, Circle };
  Kind kind = Kind::Pochhammer;
  Puncture first, second; ///< identified by (factor, root); positions follow q
  double radius_first = 0, radius_second = 0;
  double base_fraction = 0.5; ///< base point p1 + base_fraction (p2 - p1)
  std::size_t refinement = 1; ///< panel multiplier, frozen once chosen
  CVector reference_logs;     ///< branch at the base point
};

/// Pochhammer loops on consecutive punctures, with refinement chosen so that doubling it
/// changes the period by less than 1e-12 relative. Throws UnsupportedDimension for d > 1.
std::vector<Contour> build_cycles(const MirrorModel& model);

struct PeriodValue {
  cplx value;
  double monodromy_defect = 0; ///< |total branch factor - 1|
  double magnitude = 0;        ///< sum of |weight * integrand|
};

/// Integral of Omega with continuous branch tracking. Throws BranchTrackingFailure if a
/// step turns an argument by pi/4 or more, or if the contour is not closed on the local system.
PeriodValue period(const MirrorModel& model, const Contour& contour);

/// Mixed log-derivative prod_{i in derivs} E_i J (indices may repeat), by central
/// differences with steps h and h/2 and one Richardson step. Contours keep their
/// frozen recipe; punctures move with q.
cplx period_derivative(const MirrorModel& model, const Contour& contour, const IndexSet& derivs, double h);

struct GkzPeriodOptions {
  double step = 1e-3;
  bool corrupt_circuit_sign = false; ///< negative control: flips the q^beta sign
};

struct GkzPeriodReport {
  double max_residual = 0;
  std::vector<double> per_operator; ///< max over cycles
  std::vector<std::string> operators;
  std::size_t period_rank = 0; ///< rank of (J, E_1 J, .., E_n J) over the cycles
  std::size_t expected_rank = 0;
  std::vector<cplx> periods;
  std::vector<double> singular_values;
};

/// GKZ residual |sum_k coef_k D_k J| / sum_k |coef_k D_k J| for every operator and cycle.
GkzPeriodReport verify_gkz_on_periods(const TorusData& td, cplx hbar, const CVector& c, const CVector& q0,
                                      const GkzPeriodOptions& opts = {});

/// max over i and sample t of |E_i Omega / Omega - hbar q_i t^a_i / (1 + q_i t^a_i)| / |rhs|,
/// with E_i Omega from a five-point difference in log q_i.
double euler_form_identity_error(const MirrorModel& model, const std::vector<CVector>& sample_t);

struct CriticalPoint {
  CVector t;
  CVector x;       ///< hbar q_i t^{a_i} / (1 + q_i t^{a_i})
  double residual; ///< max_j |sum_i a_ij x_i - c_j|
};

struct CriticalOptions {
  std::size_t expected = 0; ///< d = 2: stop after this many (0 = matroid basis count)
  std::size_t max_starts = 4000;
  std::uint64_t seed = 7;
  bool deflate = true;
};

std::vector<CriticalPoint> critical_points(const TorusData& td, const CVector& q, cplx hbar, const CVector& c,
                                           const CriticalOptions& opts = {});

/// Assignment rows -> columns minimising the total cost (Hungarian method).
std::vector<std::size_t> min_cost_assignment(const Eigen::MatrixXd& cost);

struct SpectrumReport {
  std::vector<double> per_divisor; ///< best matching of eigenvalues of A_i against x_i
  double max_distance = 0;
  double joint_distance = 0; ///< one pairing of joint eigenvectors with critical points for all i
  std::vector<std::size_t> joint_pairing;
};

SpectrumReport compare_spectra(const ConnectionFamily& fam, const std::vector<CriticalPoint>& crit,
                               const NumericPoint& p);

struct TransportConsistencyReport {
  double max_relative_error = 0;
  Eigen::MatrixXcd start_frame; ///< rows: cycles, columns: class basis; m_b(E) J_gamma at the start
  std::vector<cplx> transported;
  std::vector<cplx> direct;
};

/// Transports the period frame along the path with the quantum connection and compares
/// with periods recomputed at the end point (d = 1).
TransportConsistencyReport check_transport_consistency(const ConnectionFamily& fam, cplx hbar, const CVector& c,
                                                       const QPath& path, double step = 1e-3);

} // namespace hypertoric
