#include "hypertoric/connection_gkz.hpp"

#include "hypertoric/errors.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace hypertoric {

namespace {

template <class C>
C ipow(C x, long e) {
  if (e < 0) return C(1) / ipow(x, -e);
  C r = 1;
  while (e > 0) {
    if (e & 1) r *= x;
    x *= x;
    e >>= 1;
  }
  return r;
}

/// prod_i q_i^{v_i} for an integer vector over the n coordinates.
cplx q_monomial(const CVector& q, const IntVector& v) {
  cplx r = 1;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] != 0) r *= ipow(q[i], v[i].get_si());
  return r;
}

double circuit_sign(const Circuit& S) { return S.support.size() % 2 == 0 ? 1.0 : -1.0; }

} // namespace

CompiledFraction::CompiledFraction(const ParamFraction& f) {
  auto compile = [](const IntPoly& p) {
    std::vector<Term> out;
    for (const auto& t : p.terms()) {
      const double hi = t.coef.get_d();
      const double lo = Integer(t.coef - Integer(hi)).get_d();
      Term c{static_cast<long double>(hi) + lo, {}};
      for (std::size_t v = 0; v < kMaxParams; ++v)
        if (t.exp[v] != 0) c.powers.emplace_back(static_cast<std::uint8_t>(v), t.exp[v]);
      out.push_back(std::move(c));
    }
    return out;
  };
  num_ = compile(f.num());
  den_ = compile(f.den());
}

CompiledFraction::lcplx CompiledFraction::eval_terms(const std::vector<Term>& terms, std::span<const lcplx> params,
                                                      long double* scale) {
  lcplx sum = 0;
  for (const auto& t : terms) {
    lcplx m = t.coef;
    for (auto [v, e] : t.powers) m *= ipow(params[v], e);
    sum += m;
    if (scale) *scale += std::abs(m);
  }
  return sum;
}

cplx CompiledFraction::operator()(std::span<const cplx> params) const {
  if (num_.empty()) return 0;
  std::array<lcplx, kMaxParams> p{};
  for (std::size_t v = 0; v < params.size() && v < kMaxParams; ++v) p[v] = lcplx(params[v].real(), params[v].imag());
  long double scale = 0;
  const lcplx den = eval_terms(den_, p, &scale);
  if (std::abs(den) <= 1e-13L * scale)
    throw Error(Error::Kind::SingularEvaluation, "denominator vanishes at the evaluation point");
  const lcplx value = eval_terms(num_, p, nullptr) / den;
  return cplx(static_cast<double>(value.real()), static_cast<double>(value.imag()));
}

ConnectionFamily::ConnectionFamily(const RingPresentation& quantum) : pres_(quantum) {
  ops_ = class_divisor_matrices(pres_);
  const std::size_t r = rank();
  for (const auto& A : ops_) {
    std::vector<CompiledFraction> entries;
    entries.reserve(r * r);
    for (std::size_t a = 0; a < r; ++a)
      for (std::size_t b = 0; b < r; ++b) entries.emplace_back(A(a, b));
    compiled_.push_back(std::move(entries));
  }
  for (std::size_t l = 0; l < pres_.td.k; ++l) {
    std::size_t var = pres_.space.q(l);
    ParamFraction Q = ParamFraction::variable(var);
    std::vector<std::vector<CompiledFraction>> per_op;
    for (const auto& A : ops_) {
      std::vector<CompiledFraction> entries;
      entries.reserve(r * r);
      for (std::size_t a = 0; a < r; ++a)
        for (std::size_t b = 0; b < r; ++b) {
          const ParamFraction& f = A(a, b);
          entries.emplace_back(f.uses(var) ? Q * f.derivative(var) : ParamFraction());
        }
      per_op.push_back(std::move(entries));
    }
    dq_.push_back(std::move(per_op));
  }
}

CVector ConnectionFamily::parameter_point(const NumericPoint& p) const {
  const auto& td = pres_.td;
  if (p.q.size() != td.n || p.c.size() != td.d)
    throw Error(Error::Kind::DimensionMismatch, "numeric point has the wrong number of coordinates");
  CVector v(kMaxParams, 0.0);
  v[pres_.space.hbar()] = p.hbar;
  for (std::size_t j = 0; j < td.d; ++j) v[pres_.space.c(j)] = p.c[j];
  for (std::size_t l = 0; l < td.k; ++l) v[pres_.space.q(l)] = q_monomial(p.q, td.iota.col(l));
  return v;
}

double ConnectionFamily::clearance(const CVector& q) const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& x : q) m = std::min(m, std::abs(x));
  for (const auto& S : pres_.circuits) m = std::min(m, std::abs(1.0 - circuit_sign(S) * q_monomial(q, S.beta)));
  return m;
}

std::vector<Eigen::MatrixXcd> ConnectionFamily::evaluate(const NumericPoint& p) const {
  CVector params = parameter_point(p);
  if (clearance(p.q) < 1e-12) throw Error(Error::Kind::SingularEvaluation, "point lies on the singular locus");
  const std::size_t r = rank();
  std::vector<Eigen::MatrixXcd> out;
  for (const auto& entries : compiled_) {
    Eigen::MatrixXcd M(r, r);
    for (std::size_t a = 0; a < r; ++a)
      for (std::size_t b = 0; b < r; ++b) M(a, b) = entries[a * r + b](params);
    out.push_back(std::move(M));
  }
  return out;
}

std::vector<std::vector<Eigen::MatrixXcd>> ConnectionFamily::log_derivatives(const NumericPoint& p) const {
  CVector params = parameter_point(p);
  if (clearance(p.q) < 1e-12) throw Error(Error::Kind::SingularEvaluation, "point lies on the singular locus");
  const std::size_t r = rank(), n = this->n(), k = pres_.td.k;
  // dQ[l][j] = Q_l d/dQ_l A_j
  std::vector<std::vector<Eigen::MatrixXcd>> dQ(k);
  for (std::size_t l = 0; l < k; ++l)
    for (std::size_t j = 0; j < n; ++j) {
      Eigen::MatrixXcd M(r, r);
      for (std::size_t a = 0; a < r; ++a)
        for (std::size_t b = 0; b < r; ++b) M(a, b) = dq_[l][j][a * r + b](params);
      dQ[l].push_back(std::move(M));
    }
  std::vector<std::vector<Eigen::MatrixXcd>> out(n, std::vector<Eigen::MatrixXcd>(n, Eigen::MatrixXcd::Zero(r, r)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < k; ++l) {
      long w = pres_.td.iota(i, l).get_si();
      if (w == 0) continue;
      for (std::size_t j = 0; j < n; ++j) out[i][j] += static_cast<double>(w) * dQ[l][j];
    }
  return out;
}

FlatnessReport check_flatness(const ConnectionFamily& fam, const std::vector<NumericPoint>& points) {
  FlatnessReport rep;
  for (const auto& p : points) {
    auto A = fam.evaluate(p);
    auto D = fam.log_derivatives(p);
    double worst = 0;
    for (std::size_t i = 0; i < fam.n(); ++i)
      for (std::size_t j = i + 1; j < fam.n(); ++j) {
        Eigen::MatrixXcd F = D[i][j] - D[j][i] + A[i] * A[j] - A[j] * A[i];
        worst = std::max(worst, F.cwiseAbs().maxCoeff());
      }
    rep.per_point.push_back(worst);
    rep.max_residual = std::max(rep.max_residual, worst);
    ++rep.points;
  }
  return rep;
}

std::vector<NumericPoint> random_points(const ConnectionFamily& fam, cplx hbar, const CVector& c,
                                        std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> logmod(std::log(0.3), std::log(2.0));
  std::uniform_real_distribution<double> phase(-std::numbers::pi, std::numbers::pi);
  std::vector<NumericPoint> out;
  while (out.size() < count) {
    CVector q(fam.n());
    for (auto& x : q) x = std::polar(std::exp(logmod(rng)), phase(rng));
    if (fam.clearance(q) > 0.05) out.push_back({hbar, c, std::move(q)});
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::string as_operator_text(std::string s) {
  std::replace(s.begin(), s.end(), 'u', 'D');
  return s;
}

} // namespace

std::vector<GkzOperator> gkz_system(const TorusData& td) {
  ParamSpace space = param_space(td);
  std::vector<GkzOperator> out;
  for (std::size_t j = 0; j < td.d; ++j) {
    GkzOperator op;
    op.kind = GkzOperator::Kind::Linear;
    op.index = j;
    op.coeffs = td.a.row(j);
    op.text = as_operator_text(render_linear_relation(td, space, j));
    out.push_back(std::move(op));
  }
  auto circuits = enumerate_circuits(td);
  for (std::size_t s = 0; s < circuits.size(); ++s) {
    GkzOperator op;
    op.kind = GkzOperator::Kind::Circuit;
    op.index = s;
    op.circuit = circuits[s];
    op.text = as_operator_text(render_relation(circuits[s], RingMode::Quantum));
    out.push_back(std::move(op));
  }
  return out;
}

ParamPolynomial symbol(const GkzOperator& op, const RingPresentation& pres) {
  const auto& space = pres.space;
  if (op.kind == GkzOperator::Kind::Linear) {
    ParamPolynomial p(pres.order, -ParamFraction::variable(space.c(op.index)));
    for (std::size_t i = 0; i < op.coeffs.size(); ++i)
      if (op.coeffs[i] != 0) p += pres.u(i).scaled(ParamFraction(op.coeffs[i]));
    return p;
  }
  const Circuit& S = op.circuit;
  const ParamPolynomial hbar(pres.order, ParamFraction::variable(space.hbar()));
  ParamPolynomial left(pres.order, ParamFraction(1)), right(pres.order, ParamFraction(1));
  for (auto i : S.support) {
    if (S.sign(i) > 0) {
      left = left * pres.u(i);
      right = right * (hbar - pres.u(i));
    } else {
      left = left * (hbar - pres.u(i));
      right = right * pres.u(i);
    }
  }
  return left + right.scaled(q_power(space, S.beta_k) * ParamFraction(op.q_sign));
}

bool symbol_check(const std::vector<GkzOperator>& ops, const RingPresentation& pres) {
  for (const auto& op : ops)
    if (!normal_form(symbol(op, pres), pres.groebner).is_zero()) return false;
  return true;
}

std::vector<GkzTerm> expand_operator(const GkzOperator& op, const NumericPoint& p) {
  std::vector<GkzTerm> out;
  if (op.kind == GkzOperator::Kind::Linear) {
    out.push_back({{}, -p.c.at(op.index)});
    for (std::size_t i = 0; i < op.coeffs.size(); ++i)
      if (op.coeffs[i] != 0) out.push_back({{i}, op.coeffs[i].get_d()});
    return out;
  }
  const Circuit& S = op.circuit;
  const cplx qb = static_cast<double>(op.q_sign) * q_monomial(p.q, S.beta);
  const std::size_t m = S.support.size();
  // Each factor is either E_i (forced sign side) or (hbar - E_i).
  for (std::size_t mask = 0; mask < (std::size_t(1) << m); ++mask) {
    IndexSet P;
    cplx left = 1, right = 1;
    for (std::size_t t = 0; t < m; ++t) {
      std::size_t i = S.support[t];
      bool take = mask >> t & 1;
      if (take) P.push_back(i);
      bool plus = S.sign(i) > 0;
      // left: E_i on S+, (hbar - E_i) on S-
      if (plus) left *= take ? 1.0 : 0.0;
      else left *= take ? cplx(-1) : p.hbar;
      // right: (hbar - E_i) on S+, E_i on S-
      if (plus) right *= take ? cplx(-1) : p.hbar;
      else right *= take ? 1.0 : 0.0;
    }
    cplx coef = left + qb * right;
    if (coef != 0.0) out.push_back({std::move(P), coef});
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

cplx parse_complex(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw Error(Error::Kind::InvalidArgument, "complex value must be a number or [re, im]");
}

} // namespace

CVector QPath::at(std::size_t seg, double t) const {
  if (waypoints.empty()) throw Error(Error::Kind::InvalidArgument, "empty path");
  if (waypoints.size() == 1) return waypoints[0];
  const auto& a = waypoints[seg];
  const auto& b = waypoints[seg + 1];
  CVector q(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    q[i] = mode == Interpolation::Linear ? a[i] + t * (b[i] - a[i]) : a[i] * std::exp(t * std::log(b[i] / a[i]));
  return q;
}

CVector QPath::dlog(std::size_t seg, double t) const {
  if (waypoints.size() < 2) return CVector(waypoints.empty() ? 0 : waypoints[0].size(), 0.0);
  const auto& a = waypoints[seg];
  const auto& b = waypoints[seg + 1];
  CVector out(a.size());
  if (mode == Interpolation::Log) {
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = std::log(b[i] / a[i]);
  } else {
    CVector q = at(seg, t);
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = (b[i] - a[i]) / q[i];
  }
  return out;
}

CVector QPath::at(double s) const {
  if (waypoints.size() < 2) return at(0, 0.0);
  std::size_t seg = std::min<std::size_t>(static_cast<std::size_t>(std::max(s, 0.0)), segments() - 1);
  return at(seg, s - static_cast<double>(seg));
}

QPath QPath::from_json(const nlohmann::json& j) {
  QPath p;
  std::string mode = j.value("interpolation", std::string("linear"));
  if (mode == "linear") p.mode = Interpolation::Linear;
  else if (mode == "log") p.mode = Interpolation::Log;
  else throw Error(Error::Kind::InvalidArgument, "unknown interpolation mode: " + mode);
  if (!j.contains("waypoints") || !j["waypoints"].is_array() || j["waypoints"].empty())
    throw Error(Error::Kind::InvalidArgument, "path needs a non-empty waypoints array");
  for (const auto& w : j["waypoints"]) {
    CVector q;
    for (const auto& x : w) q.push_back(parse_complex(x));
    if (!p.waypoints.empty() && q.size() != p.waypoints[0].size())
      throw Error(Error::Kind::DimensionMismatch, "waypoints differ in length");
    p.waypoints.push_back(std::move(q));
  }
  return p;
}

nlohmann::json QPath::to_json() const {
  nlohmann::json w = nlohmann::json::array();
  for (const auto& q : waypoints) {
    nlohmann::json row = nlohmann::json::array();
    for (const auto& x : q) row.push_back({x.real(), x.imag()});
    w.push_back(row);
  }
  return {{"interpolation", mode == Interpolation::Linear ? "linear" : "log"}, {"waypoints", w}};
}

namespace {

using State = std::vector<double>;

/// Integrates dX/ds = sign * G(s) X along the path, where G = sum_i dlog q_i/ds A_i
/// and X is r x m, stored as interleaved real and imaginary parts (column-major).
/// sign = -1 gives flat sections; for the dual, X holds xi^T and the system is +A^T.
Eigen::MatrixXcd integrate(const ConnectionFamily& fam, cplx hbar, const CVector& c, const QPath& path,
                           Eigen::MatrixXcd X, bool dual, const TransportOptions& opts) {
  namespace odeint = boost::numeric::odeint;
  if (path.waypoints.empty()) throw Error(Error::Kind::InvalidArgument, "empty path");
  for (const auto& w : path.waypoints)
    if (w.size() != fam.n()) throw Error(Error::Kind::DimensionMismatch, "waypoint length differs from n");
  const Eigen::Index r = X.rows(), m = X.cols();
  State x(static_cast<std::size_t>(2 * r * m));
  auto pack = [&](const Eigen::MatrixXcd& M, State& s) {
    for (Eigen::Index k = 0; k < r * m; ++k) {
      s[2 * k] = M.data()[k].real();
      s[2 * k + 1] = M.data()[k].imag();
    }
  };
  auto unpack = [&](const State& s) {
    Eigen::MatrixXcd M(r, m);
    for (Eigen::Index k = 0; k < r * m; ++k) M.data()[k] = {s[2 * k], s[2 * k + 1]};
    return M;
  };
  pack(X, x);

  std::size_t steps = 0;
  std::size_t seg = 0;
  auto rhs = [&](const State& s, State& ds, double t) {
    NumericPoint p{hbar, c, path.at(seg, t)};
    if (fam.clearance(p.q) < opts.min_clearance)
      throw Error(Error::Kind::SingularEvaluation, "path comes too close to the singular locus");
    CVector dl = path.dlog(seg, t);
    auto A = fam.evaluate(p);
    Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(r, r);
    for (std::size_t i = 0; i < A.size(); ++i)
      if (dl[i] != 0.0) G += dl[i] * A[i];
    Eigen::MatrixXcd D = dual ? Eigen::MatrixXcd(G.transpose() * unpack(s)) : Eigen::MatrixXcd(-G * unpack(s));
    pack(D, ds);
  };
  auto observer = [&](const State&, double) {
    if (++steps > opts.max_steps) throw Error(Error::Kind::StepFailure, "transport exceeded the step budget");
  };

  auto stepper = odeint::make_controlled(opts.atol, opts.rtol, odeint::runge_kutta_fehlberg78<State>());
  try {
    for (seg = 0; seg < path.segments(); ++seg) {
      // Endpoint checks so that a singular waypoint is reported even if the stepper skips it.
      NumericPoint end{hbar, c, path.waypoints[seg + 1]};
      if (fam.clearance(end.q) < opts.min_clearance)
        throw Error(Error::Kind::SingularEvaluation, "waypoint too close to the singular locus");
      odeint::integrate_adaptive(stepper, rhs, x, 0.0, 1.0, 0.01, observer);
    }
  } catch (const odeint::odeint_error& e) {
    throw Error(Error::Kind::StepFailure, std::string("adaptive stepping failed: ") + e.what());
  }
  for (double v : x)
    if (!std::isfinite(v)) throw Error(Error::Kind::StepFailure, "transport produced non-finite values");
  return unpack(x);
}

} // namespace

Eigen::MatrixXcd transport_matrix(const ConnectionFamily& fam, cplx hbar, const CVector& c, const QPath& path,
                                  const TransportOptions& opts) {
  const auto r = static_cast<Eigen::Index>(fam.rank());
  return integrate(fam, hbar, c, path, Eigen::MatrixXcd::Identity(r, r), false, opts);
}

Eigen::VectorXcd transport(const ConnectionFamily& fam, cplx hbar, const CVector& c, const QPath& path,
                           const Eigen::VectorXcd& v0, const TransportOptions& opts) {
  if (v0.size() != static_cast<Eigen::Index>(fam.rank()))
    throw Error(Error::Kind::DimensionMismatch, "initial vector has the wrong length");
  return integrate(fam, hbar, c, path, v0, false, opts).col(0);
}

Eigen::RowVectorXcd transport_dual(const ConnectionFamily& fam, cplx hbar, const CVector& c, const QPath& path,
                                   const Eigen::RowVectorXcd& xi0, const TransportOptions& opts) {
  if (xi0.size() != static_cast<Eigen::Index>(fam.rank()))
    throw Error(Error::Kind::DimensionMismatch, "initial covector has the wrong length");
  Eigen::MatrixXcd col = xi0.transpose();
  return integrate(fam, hbar, c, path, col, true, opts).col(0).transpose();
}

} // namespace hypertoric
