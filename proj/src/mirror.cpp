#include "hypertoric/mirror.hpp"

#include "hypertoric/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace hypertoric {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI{0.0, 1.0};

cplx ipow(cplx x, long e) {
  if (e < 0) return 1.0 / ipow(x, -e);
  cplx r = 1;
  while (e > 0) {
    if (e & 1) r *= x;
    x *= x;
    e >>= 1;
  }
  return r;
}

long a_entry(const TorusData& td, std::size_t j, std::size_t i) { return td.a(j, i).get_si(); }

/// y_i = q_i t^{a_i}
cplx y_value(const MirrorModel& m, std::size_t i, const CVector& t) {
  cplx y = m.q[i];
  for (std::size_t j = 0; j < m.td.d; ++j) y *= ipow(t[j], a_entry(m.td, j, i));
  return y;
}

bool same_key(const Puncture& a, const Puncture& b) { return a.factor == b.factor && a.root == b.root; }

/// Nodes and weights of 16-point Gauss-Legendre on [0, 1], ascending.
const std::vector<std::pair<double, double>>& gl_nodes() {
  static const std::vector<std::pair<double, double>> nodes = [] {
    using G = boost::math::quadrature::gauss<double, 16>;
    std::vector<std::pair<double, double>> out;
    const auto& x = G::abscissa();
    const auto& w = G::weights();
    for (std::size_t k = 0; k < x.size(); ++k) {
      out.emplace_back(0.5 * (1 - x[k]), 0.5 * w[k]);
      if (x[k] != 0) out.emplace_back(0.5 * (1 + x[k]), 0.5 * w[k]);
    }
    std::sort(out.begin(), out.end());
    return out;
  }();
  return nodes;
}

struct Piece {
  bool arc = false;
  cplx from, to;        // line
  cplx center;          // arc
  double radius = 0, angle0 = 0, sweep = 0;
  std::size_t panels = 1;

  cplx point(double s) const {
    return arc ? center + std::polar(radius, angle0 + sweep * s) : from + s * (to - from);
  }
  cplx velocity(double s) const {
    return arc ? kI * sweep * std::polar(radius, angle0 + sweep * s) : to - from;
  }
};

double segment_distance(cplx p, cplx a, cplx b) {
  cplx ab = b - a;
  double len2 = std::norm(ab);
  double s = len2 == 0 ? 0 : std::clamp(((p - a) * std::conj(ab)).real() / len2, 0.0, 1.0);
  return std::abs(p - (a + s * ab));
}

struct Geometry {
  cplx base;
  std::vector<Piece> pieces;
};

Geometry contour_geometry(const MirrorModel& m, const Contour& c) {
  Geometry g;
  const auto& P = m.punctures;
  const cplx p1 = m.find(c.first).t;
  if (c.kind == Contour::Kind::Circle) {
    g.base = p1 + c.radius_first;
    Piece arc{true, {}, {}, p1, c.radius_first, 0.0, 2 * kPi, 8 * c.refinement};
    g.pieces.push_back(arc);
    return g;
  }
  const cplx p2 = m.find(c.second).t;
  g.base = p1 + c.base_fraction * (p2 - p1);
  const double rho[2] = {c.radius_first, c.radius_second};
  const cplx pts[2] = {p1, p2};
  // other punctures must keep away from the chord
  for (const auto& q : P) {
    if (same_key(q, c.first) || same_key(q, c.second)) continue;
    if (segment_distance(q.t, p1, p2) < 0.5 * std::min(rho[0], rho[1]))
      throw Error(Error::Kind::DegenerateModel, "a puncture lies too close to the contour chord");
  }
  auto line_panels = [&](cplx a, cplx b) {
    double scale = std::numeric_limits<double>::infinity();
    for (const auto& q : P) scale = std::min(scale, segment_distance(q.t, a, b));
    std::size_t base = static_cast<std::size_t>(std::ceil(2.0 * std::abs(b - a) / scale));
    return std::max<std::size_t>(2, base) * c.refinement;
  };
  auto lasso = [&](int k, double orientation) {
    cplx e = (g.base - pts[k]) / std::abs(g.base - pts[k]);
    cplx start = pts[k] + rho[k] * e;
    Piece in{false, g.base, start, {}};
    in.panels = line_panels(g.base, start);
    Piece arc{true, {}, {}, pts[k], rho[k], std::arg(e), orientation * 2 * kPi, 8 * c.refinement};
    Piece out{false, start, g.base, {}};
    out.panels = in.panels;
    g.pieces.push_back(in);
    g.pieces.push_back(arc);
    g.pieces.push_back(out);
  };
  lasso(0, 1);
  lasso(1, 1);
  lasso(0, -1);
  lasso(1, -1);
  return g;
}

struct BranchJump {};

/// Moves each principal log onto the branch nearest `prev`.
void unwrap(CVector& logs, const CVector& prev, bool strict) {
  for (std::size_t k = 0; k < logs.size(); ++k) {
    double turns = std::round((prev[k].imag() - logs[k].imag()) / (2 * kPi));
    logs[k] += 2 * kPi * turns * kI;
    if (strict && std::abs(logs[k].imag() - prev[k].imag()) >= kPi / 4) throw BranchJump{};
  }
}

PeriodValue integrate_contour(const MirrorModel& m, const Contour& c) {
  Geometry g = contour_geometry(m, c);
  CVector start = m.logs({g.base});
  if (!c.reference_logs.empty()) unwrap(start, c.reference_logs, false);
  CVector prev = start;
  cplx sum = 0;
  double mag = 0;
  const auto& nodes = gl_nodes();
  for (const auto& piece : g.pieces) {
    const double width = 1.0 / static_cast<double>(piece.panels);
    for (std::size_t panel = 0; panel < piece.panels; ++panel) {
      for (const auto& [x, w] : nodes) {
        double s = (static_cast<double>(panel) + x) * width;
        cplx t = piece.point(s);
        CVector L = m.logs({t});
        unwrap(L, prev, true);
        cplx term = w * width * m.integrand(L) * piece.velocity(s) / t;
        sum += term;
        mag += std::abs(term);
        prev = std::move(L);
      }
    }
  }
  CVector end = m.logs({g.base});
  unwrap(end, prev, true);
  cplx drift = 0;
  for (std::size_t i = 0; i < m.td.n; ++i) drift += m.hbar * (end[1 + i] - start[1 + i]);
  drift -= m.c[0] * (end[0] - start[0]);
  return {sum, std::abs(std::exp(drift) - 1.0), mag};
}

} // namespace

const Puncture& MirrorModel::find(const Puncture& key) const {
  for (const auto& p : punctures)
    if (same_key(p, key)) return p;
  throw Error(Error::Kind::InvalidArgument, "contour refers to an unknown puncture");
}

CVector MirrorModel::logs(const CVector& t) const {
  CVector out;
  out.reserve(td.d + td.n);
  for (std::size_t j = 0; j < td.d; ++j) out.push_back(std::log(t[j]));
  for (std::size_t i = 0; i < td.n; ++i) out.push_back(std::log(1.0 + y_value(*this, i, t)));
  return out;
}

cplx MirrorModel::integrand(const CVector& L) const {
  cplx e = 0;
  for (std::size_t i = 0; i < td.n; ++i) e += hbar * L[td.d + i];
  for (std::size_t j = 0; j < td.d; ++j) e -= c[j] * L[j];
  return std::exp(e);
}

MirrorModel mirror_space(const TorusData& td, const CVector& q, cplx hbar, const CVector& c) {
  if (q.size() != td.n || c.size() != td.d)
    throw Error(Error::Kind::DimensionMismatch, "q needs n entries and c needs d entries");
  MirrorModel m{td, q, hbar, c, {}};
  for (const auto& x : q)
    if (std::abs(x) < 1e-300 || !std::isfinite(std::abs(x)))
      throw Error(Error::Kind::DegenerateModel, "q_i must be a nonzero finite number");
  if (td.d != 1) return m;

  std::vector<Puncture> roots;
  for (std::size_t i = 0; i < td.n; ++i) {
    long a = a_entry(td, 0, i);
    if (a == 0) continue;
    // t^a = -1/q_i, i.e. t^{|a|} = (-1/q_i)^{sign a}
    cplx target = a > 0 ? -1.0 / q[i] : -q[i];
    long k = std::labs(a);
    cplx principal = std::pow(target, 1.0 / static_cast<double>(k));
    for (long r = 0; r < k; ++r)
      roots.push_back({principal * std::polar(1.0, 2 * kPi * r / k), static_cast<long>(i), static_cast<std::size_t>(r)});
  }
  std::sort(roots.begin(), roots.end(), [](const Puncture& x, const Puncture& y) {
    if (std::abs(x.t) != std::abs(y.t)) return std::abs(x.t) < std::abs(y.t);
    return std::arg(x.t) < std::arg(y.t);
  });
  m.punctures.push_back({0.0, -1, 0});
  for (auto& r : roots) m.punctures.push_back(r);
  for (std::size_t a = 0; a < m.punctures.size(); ++a)
    for (std::size_t b = a + 1; b < m.punctures.size(); ++b) {
      double scale = std::max({1.0, std::abs(m.punctures[a].t), std::abs(m.punctures[b].t)});
      if (std::abs(m.punctures[a].t - m.punctures[b].t) < 1e-8 * scale)
        throw Error(Error::Kind::DegenerateModel, "mirror punctures collide");
    }
  return m;
}

PeriodValue period(const MirrorModel& model, const Contour& contour) {
  if (model.td.d != 1) throw Error(Error::Kind::UnsupportedDimension, "periods are implemented for d = 1");
  PeriodValue v;
  try {
    v = integrate_contour(model, contour);
  } catch (const BranchJump&) {
    Contour finer = contour;
    for (int attempt = 0;; ++attempt) {
      finer.refinement *= 2;
      if (attempt == 5) throw Error(Error::Kind::BranchTrackingFailure, "argument jumps persist after refinement");
      try {
        v = integrate_contour(model, finer);
        break;
      } catch (const BranchJump&) {
      }
    }
  }
  if (!(v.monodromy_defect <= 1e-10))
    throw Error(Error::Kind::BranchTrackingFailure, "integrand does not return to its initial branch");
  if (!std::isfinite(std::abs(v.value))) throw Error(Error::Kind::QuadratureFailure, "non-finite period");
  return v;
}

std::vector<Contour> build_cycles(const MirrorModel& model) {
  if (model.td.d > 1)
    throw Error(Error::Kind::UnsupportedDimension, "cycles are constructed for d = 1 only");
  const auto& P = model.punctures;
  std::vector<Contour> out;
  for (std::size_t k = 0; k + 1 < P.size(); ++k) {
    Contour c;
    c.first = P[k];
    c.second = P[k + 1];
    double gap = std::abs(P[k].t - P[k + 1].t);
    auto clearance = [&](std::size_t idx) {
      double d = gap;
      for (std::size_t j = 0; j < P.size(); ++j)
        if (j != idx) d = std::min(d, std::abs(P[idx].t - P[j].t));
      return d;
    };
    c.radius_first = 0.3 * clearance(k);
    c.radius_second = 0.3 * clearance(k + 1);
    c.reference_logs = model.logs({P[k].t + 0.5 * (P[k + 1].t - P[k].t)});
    for (;;) {
      PeriodValue coarse = period(model, c);
      Contour fine = c;
      fine.refinement *= 2;
      PeriodValue f = period(model, fine);
      if (std::abs(f.value - coarse.value) <= 1e-13 * f.magnitude) {
        c.refinement = fine.refinement;
        break;
      }
      if (fine.refinement > 64) throw Error(Error::Kind::QuadratureFailure, "period quadrature does not settle");
      c.refinement = fine.refinement;
    }
    out.push_back(std::move(c));
  }
  return out;
}

namespace {

/// Central-difference weights for the m-th derivative, offsets -2..2, accurate to O(h^2).
const std::array<double, 5>& stencil(std::size_t m) {
  static const std::array<double, 5> first{0, -0.5, 0, 0.5, 0};
  static const std::array<double, 5> second{0, 1, -2, 1, 0};
  static const std::array<double, 5> third{-0.5, 1, 0, -1, 0.5};
  static const std::array<double, 5> fourth{1, -4, 6, -4, 1};
  switch (m) {
  case 1: return first;
  case 2: return second;
  case 3: return third;
  case 4: return fourth;
  default: throw Error(Error::Kind::InvalidArgument, "derivatives of order above 4 in one variable");
  }
}

cplx difference(const MirrorModel& model, const Contour& contour, const IndexSet& derivs, double h) {
  std::map<std::size_t, std::size_t> mult;
  for (auto i : derivs) ++mult[i];
  std::vector<std::pair<std::size_t, std::size_t>> vars(mult.begin(), mult.end());
  cplx total = 0;
  // odometer over offsets -2..2 for each variable
  std::vector<int> off(vars.size(), -2);
  for (;;) {
    double w = 1;
    for (std::size_t k = 0; k < vars.size() && w != 0; ++k) w *= stencil(vars[k].second)[off[k] + 2];
    if (w != 0) {
      CVector q = model.q;
      for (std::size_t k = 0; k < vars.size(); ++k) q[vars[k].first] *= std::exp(off[k] * h);
      MirrorModel shifted = mirror_space(model.td, q, model.hbar, model.c);
      total += w * period(shifted, contour).value;
    }
    std::size_t k = 0;
    while (k < off.size() && off[k] == 2) off[k++] = -2;
    if (k == off.size()) break;
    ++off[k];
  }
  return total / std::pow(h, static_cast<double>(derivs.size()));
}

} // namespace

cplx period_derivative(const MirrorModel& model, const Contour& contour, const IndexSet& derivs, double h) {
  if (derivs.empty()) return period(model, contour).value;
  cplx coarse = difference(model, contour, derivs, h);
  cplx fine = difference(model, contour, derivs, h / 2);
  return (4.0 * fine - coarse) / 3.0;
}

GkzPeriodReport verify_gkz_on_periods(const TorusData& td, cplx hbar, const CVector& c, const CVector& q0,
                                      const GkzPeriodOptions& opts) {
  if (td.d != 1) throw Error(Error::Kind::UnsupportedDimension, "period checks need d = 1");
  MirrorModel model = mirror_space(td, q0, hbar, c);
  auto cycles = build_cycles(model);
  auto ops = gkz_system(td);
  if (opts.corrupt_circuit_sign)
    for (auto& op : ops)
      if (op.kind == GkzOperator::Kind::Circuit) op.q_sign = -op.q_sign;

  GkzPeriodReport rep;
  rep.expected_rank = build_presentation(td, RingMode::Classical).rank();
  rep.per_operator.assign(ops.size(), 0.0);
  for (const auto& op : ops) rep.operators.push_back(op.text);
  NumericPoint point{hbar, c, q0};

  Eigen::MatrixXcd frame(static_cast<Eigen::Index>(cycles.size()), static_cast<Eigen::Index>(td.n + 1));
  for (std::size_t g = 0; g < cycles.size(); ++g) {
    std::map<IndexSet, cplx> memo;
    auto D = [&](const IndexSet& P) {
      auto it = memo.find(P);
      if (it != memo.end()) return it->second;
      cplx v = period_derivative(model, cycles[g], P, opts.step);
      memo.emplace(P, v);
      return v;
    };
    rep.periods.push_back(D({}));
    frame(g, 0) = D({});
    for (std::size_t i = 0; i < td.n; ++i) frame(g, i + 1) = D({i});
    for (std::size_t o = 0; o < ops.size(); ++o) {
      cplx sum = 0;
      double scale = 0;
      for (const auto& term : expand_operator(ops[o], point)) {
        cplx v = term.coef * D(term.derivs);
        sum += v;
        scale += std::abs(v);
      }
      double r = scale == 0 ? 0 : std::abs(sum) / scale;
      rep.per_operator[o] = std::max(rep.per_operator[o], r);
      rep.max_residual = std::max(rep.max_residual, r);
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(frame);
  auto sv = svd.singularValues();
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    rep.singular_values.push_back(sv[k]);
    if (sv[k] > 1e-7 * sv[0]) ++rep.period_rank;
  }
  return rep;
}

double euler_form_identity_error(const MirrorModel& model, const std::vector<CVector>& sample_t) {
  const double h = 1e-3;
  double worst = 0;
  for (const auto& t : sample_t) {
    CVector base = model.logs(t);
    for (std::size_t i = 0; i < model.td.n; ++i) {
      // d/d(log q_i) of log Omega from differences of log(1 + q_i t^a_i)
      auto shifted = [&](double s) {
        MirrorModel m = model;
        m.q[i] *= std::exp(s);
        CVector L = m.logs(t);
        unwrap(L, base, false);
        return m.hbar * L[model.td.d + i];
      };
      cplx fd = (-shifted(2 * h) + 8.0 * shifted(h) - 8.0 * shifted(-h) + shifted(-2 * h)) / (12 * h);
      cplx y = y_value(model, i, t);
      cplx rhs = model.hbar * y / (1.0 + y);
      worst = std::max(worst, std::abs(fd - rhs) / std::abs(rhs));
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Critical points

namespace {

using CPoly = std::vector<cplx>; // ascending coefficients

CPoly mul(const CPoly& a, const CPoly& b) {
  CPoly r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

CPoly add(CPoly a, const CPoly& b) {
  if (b.size() > a.size()) a.resize(b.size(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
  return a;
}

std::vector<cplx> poly_roots(CPoly p) {
  double scale = 0;
  for (auto x : p) scale = std::max(scale, std::abs(x));
  while (!p.empty() && std::abs(p.back()) <= 1e-14 * scale) p.pop_back();
  if (p.size() < 2) return {};
  const auto deg = static_cast<Eigen::Index>(p.size() - 1);
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
  for (Eigen::Index k = 1; k < deg; ++k) comp(k, k - 1) = 1;
  for (Eigen::Index k = 0; k < deg; ++k) comp(k, deg - 1) = -p[static_cast<std::size_t>(k)] / p.back();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
  std::vector<cplx> out(es.eigenvalues().data(), es.eigenvalues().data() + deg);
  return out;
}

CVector x_values(const TorusData& td, const CVector& q, cplx hbar, const CVector& t) {
  MirrorModel m{td, q, hbar, {}, {}};
  CVector x(td.n);
  for (std::size_t i = 0; i < td.n; ++i) {
    cplx y = y_value(m, i, t);
    x[i] = hbar * y / (1.0 + y);
  }
  return x;
}

/// F_j(w) = sum_i a_ij x_i - c_j and its Jacobian in log coordinates w = log t.
void critical_system(const TorusData& td, const CVector& q, cplx hbar, const CVector& c, const CVector& t,
                     Eigen::VectorXcd& F, Eigen::MatrixXcd& J) {
  MirrorModel m{td, q, hbar, {}, {}};
  const auto d = static_cast<Eigen::Index>(td.d);
  F = Eigen::VectorXcd::Zero(d);
  J = Eigen::MatrixXcd::Zero(d, d);
  for (Eigen::Index j = 0; j < d; ++j) F[j] = -c[static_cast<std::size_t>(j)];
  for (std::size_t i = 0; i < td.n; ++i) {
    cplx y = y_value(m, i, t);
    cplx x = hbar * y / (1.0 + y);
    cplx dx = hbar * y / ((1.0 + y) * (1.0 + y));
    for (Eigen::Index j = 0; j < d; ++j) {
      double aij = static_cast<double>(a_entry(td, static_cast<std::size_t>(j), i));
      F[j] += aij * x;
      for (Eigen::Index k = 0; k < d; ++k)
        J(j, k) += aij * static_cast<double>(a_entry(td, static_cast<std::size_t>(k), i)) * dx;
    }
  }
}

/// Plain Newton in log coordinates; returns false if it stalls.
bool polish(const TorusData& td, const CVector& q, cplx hbar, const CVector& c, CVector& t) {
  Eigen::VectorXcd F;
  Eigen::MatrixXcd J;
  for (int it = 0; it < 50; ++it) {
    critical_system(td, q, hbar, c, t, F, J);
    if (!F.allFinite()) return false;
    Eigen::VectorXcd step = J.fullPivLu().solve(F);
    if (!step.allFinite()) return false;
    for (std::size_t j = 0; j < t.size(); ++j) t[j] *= std::exp(-step[static_cast<Eigen::Index>(j)]);
    if (step.norm() < 1e-15) break;
  }
  critical_system(td, q, hbar, c, t, F, J);
  return F.allFinite() && F.cwiseAbs().maxCoeff() < 1e-10 * std::max(1.0, std::abs(hbar));
}

CriticalPoint make_point(const TorusData& td, const CVector& q, cplx hbar, const CVector& c, const CVector& t) {
  CriticalPoint p{t, x_values(td, q, hbar, t), 0.0};
  for (std::size_t j = 0; j < td.d; ++j) {
    cplx s = -c[j];
    for (std::size_t i = 0; i < td.n; ++i) s += static_cast<double>(a_entry(td, j, i)) * p.x[i];
    p.residual = std::max(p.residual, std::abs(s));
  }
  return p;
}

std::vector<CriticalPoint> critical_points_1d(const TorusData& td, const CVector& q, cplx hbar, const CVector& c) {
  // Clear denominators: x_i = hbar N_i / D_i with polynomial N_i, D_i in t.
  std::vector<CPoly> N(td.n), D(td.n);
  for (std::size_t i = 0; i < td.n; ++i) {
    long a = a_entry(td, 0, i);
    auto k = static_cast<std::size_t>(std::labs(a));
    CPoly mono(k + 1, 0.0);
    mono[k] = 1;
    if (a > 0) {
      N[i] = CPoly(k + 1, 0.0);
      N[i][k] = q[i];
      D[i] = add(CPoly{1.0}, N[i]);
    } else if (a < 0) {
      N[i] = {q[i]};
      D[i] = add(mono, CPoly{q[i]});
    } else {
      N[i] = {q[i]};
      D[i] = {1.0 + q[i]};
    }
  }
  CPoly all{1.0};
  for (const auto& d : D) all = mul(all, d);
  CPoly F = mul(all, CPoly{-c[0]});
  for (std::size_t i = 0; i < td.n; ++i) {
    CPoly term{hbar * static_cast<double>(a_entry(td, 0, i))};
    term = mul(term, N[i]);
    for (std::size_t k = 0; k < td.n; ++k)
      if (k != i) term = mul(term, D[k]);
    F = add(F, term);
  }
  std::vector<CriticalPoint> out;
  for (cplx r : poly_roots(F)) {
    if (std::abs(r) < 1e-12) continue;
    CVector t{r};
    bool pole = false;
    for (std::size_t i = 0; i < td.n; ++i) {
      MirrorModel m{td, q, hbar, {}, {}};
      if (std::abs(1.0 + y_value(m, i, t)) < 1e-12) pole = true;
    }
    if (pole) continue;
    polish(td, q, hbar, c, t);
    out.push_back(make_point(td, q, hbar, c, t));
  }
  return out;
}

std::vector<CriticalPoint> critical_points_2d(const TorusData& td, const CVector& q, cplx hbar, const CVector& c,
                                              const CriticalOptions& opts) {
  const std::size_t want = opts.expected ? opts.expected : matroid_basis_count(td);
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> logmod(-3.0, 3.0), phase(-kPi, kPi);
  std::vector<CVector> found;

  // Deflated damped Newton on G = M F, M = prod_k (1 + 1/|t - t_k|^2), in real coordinates of w = log t.
  auto deflation = [&](const CVector& t, Eigen::Vector4d& grad) {
    double M = 1;
    grad.setZero();
    if (!opts.deflate) return M;
    for (const auto& r : found) {
      double r2 = std::norm(t[0] - r[0]) + std::norm(t[1] - r[1]);
      double mk = 1 + 1 / r2;
      Eigen::Vector4d g;
      for (int l = 0; l < 2; ++l) {
        cplx delta = t[l] - r[l];
        g[2 * l] = 2 * (std::conj(delta) * t[l]).real();
        g[2 * l + 1] = 2 * (std::conj(delta) * kI * t[l]).real();
      }
      // grad log mk
      grad += (-1 / (r2 * r2) / mk) * g;
      M *= mk;
    }
    return M;
  };
  bool cleared = false;
  auto real_residual = [&](const CVector& t, Eigen::Vector4d& G, Eigen::Matrix4d& JG) {
    Eigen::VectorXcd F;
    Eigen::MatrixXcd J;
    critical_system(td, q, hbar, c, t, F, J);
    if (cleared) {
      // D F with D = prod_i (1 + y_i) has no poles; spurious roots on pole crossings are
      // rejected by the final polish on F.
      MirrorModel m{td, q, hbar, {}, {}};
      cplx D = 1;
      Eigen::Vector2cd g = Eigen::Vector2cd::Zero();
      for (std::size_t i = 0; i < td.n; ++i) {
        cplx y = y_value(m, i, t);
        D *= 1.0 + y;
        for (std::size_t k = 0; k < 2; ++k) g[static_cast<Eigen::Index>(k)] += static_cast<double>(a_entry(td, k, i)) * y / (1.0 + y);
      }
      J = D * (J + F * g.transpose());
      F = D * F;
    }
    Eigen::Vector4d f;
    Eigen::Matrix4d jf;
    for (int j = 0; j < 2; ++j) {
      f[2 * j] = F[j].real();
      f[2 * j + 1] = F[j].imag();
      for (int k = 0; k < 2; ++k) {
        jf(2 * j, 2 * k) = J(j, k).real();
        jf(2 * j, 2 * k + 1) = -J(j, k).imag();
        jf(2 * j + 1, 2 * k) = J(j, k).imag();
        jf(2 * j + 1, 2 * k + 1) = J(j, k).real();
      }
    }
    Eigen::Vector4d glog;
    double M = deflation(t, glog);
    G = M * f;
    JG = M * (jf + f * glog.transpose());
    return f.allFinite() && jf.allFinite();
  };

  for (std::size_t start = 0; start < opts.max_starts && found.size() < want; ++start) {
    CVector t{std::polar(std::exp(logmod(rng)), phase(rng)), std::polar(std::exp(logmod(rng)), phase(rng))};
    if (!found.empty() && start % 3 != 0) {
      // Roots cluster in each coordinate separately, so also start from a jittered
      // mix of coordinates of known roots.
      std::uniform_int_distribution<std::size_t> pick(0, found.size() - 1);
      std::normal_distribution<double> jitter(0.0, 0.05);
      for (int l = 0; l < 2; ++l) t[l] = found[pick(rng)][l] * std::exp(cplx(jitter(rng), jitter(rng)));
    }
    cleared = start % 2 == 1;
    Eigen::Vector4d G;
    Eigen::Matrix4d JG;
    bool ok = real_residual(t, G, JG);
    for (int it = 0; ok && it < 100 && G.norm() > 1e-11; ++it) {
      Eigen::Vector4d step = JG.fullPivLu().solve(G);
      if (!step.allFinite()) {
        ok = false;
        break;
      }
      double lambda = 1, g0 = G.norm();
      bool improved = false;
      for (int b = 0; b < 30; ++b, lambda *= 0.5) {
        CVector trial{t[0] * std::exp(-lambda * cplx(step[0], step[1])), t[1] * std::exp(-lambda * cplx(step[2], step[3]))};
        Eigen::Vector4d Gt;
        Eigen::Matrix4d Jt;
        if (real_residual(trial, Gt, Jt) && Gt.norm() < (1 - 1e-4 * lambda) * g0) {
          t = trial;
          G = Gt;
          JG = Jt;
          improved = true;
          break;
        }
      }
      if (!improved) break;
    }
    if (!ok || !polish(td, q, hbar, c, t)) continue;
    bool fresh = true;
    for (const auto& r : found)
      if (std::abs(t[0] - r[0]) + std::abs(t[1] - r[1]) < 1e-7 * (std::abs(r[0]) + std::abs(r[1]))) fresh = false;
    if (fresh) found.push_back(t);
  }
  if (found.size() < want)
    throw Error(Error::Kind::IncompleteCriticalSet, "found " + std::to_string(found.size()) + " of " +
                                                        std::to_string(want) + " critical points");
  std::vector<CriticalPoint> out;
  for (const auto& t : found) out.push_back(make_point(td, q, hbar, c, t));
  return out;
}

} // namespace

std::vector<CriticalPoint> critical_points(const TorusData& td, const CVector& q, cplx hbar, const CVector& c,
                                           const CriticalOptions& opts) {
  mirror_space(td, q, hbar, c); // validates the data
  if (td.d == 1) return critical_points_1d(td, q, hbar, c);
  if (td.d == 2) return critical_points_2d(td, q, hbar, c, opts);
  throw Error(Error::Kind::UnsupportedDimension, "critical points are computed for d <= 2");
}

std::vector<std::size_t> min_cost_assignment(const Eigen::MatrixXd& cost) {
  // Shortest augmenting paths with potentials; rows <= cols.
  const auto n = static_cast<std::size_t>(cost.rows()), m = static_cast<std::size_t>(cost.cols());
  if (n > m) throw Error(Error::Kind::InvalidArgument, "assignment needs rows <= cols");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0), v(m + 1, 0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      std::size_t i0 = p[j0], j1 = 0;
      double delta = inf;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        double cur = cost(static_cast<Eigen::Index>(i0 - 1), static_cast<Eigen::Index>(j - 1)) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> assign(n);
  for (std::size_t j = 1; j <= m; ++j)
    if (p[j] != 0) assign[p[j] - 1] = j - 1;
  return assign;
}

SpectrumReport compare_spectra(const ConnectionFamily& fam, const std::vector<CriticalPoint>& crit,
                               const NumericPoint& p) {
  SpectrumReport rep;
  const auto r = static_cast<Eigen::Index>(fam.rank());
  const auto nc = static_cast<Eigen::Index>(crit.size());
  if (nc != r) {
    rep.max_distance = rep.joint_distance = std::numeric_limits<double>::infinity();
    return rep;
  }
  auto A = fam.evaluate(p);
  for (std::size_t i = 0; i < A.size(); ++i) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A[i], false);
    Eigen::MatrixXd cost(r, nc);
    for (Eigen::Index k = 0; k < r; ++k)
      for (Eigen::Index l = 0; l < nc; ++l) cost(k, l) = std::abs(es.eigenvalues()[k] - crit[static_cast<std::size_t>(l)].x[i]);
    auto match = min_cost_assignment(cost);
    double worst = 0;
    for (Eigen::Index k = 0; k < r; ++k) worst = std::max(worst, cost(k, static_cast<Eigen::Index>(match[static_cast<std::size_t>(k)])));
    rep.per_divisor.push_back(worst);
    rep.max_distance = std::max(rep.max_distance, worst);
  }
  // Joint eigenvectors from a fixed generic combination.
  Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(r, r);
  for (std::size_t i = 0; i < A.size(); ++i) B += cplx(1.0 + 0.37 * i, 0.21 * i * i - 0.4) * A[i];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(B);
  Eigen::MatrixXcd V = es.eigenvectors();
  auto lu = V.fullPivLu();
  std::vector<Eigen::VectorXcd> diag;
  for (const auto& Ai : A) diag.push_back(lu.solve(Ai * V).diagonal());
  Eigen::MatrixXd cost(r, nc);
  for (Eigen::Index k = 0; k < r; ++k)
    for (Eigen::Index l = 0; l < nc; ++l) {
      double d = 0;
      for (std::size_t i = 0; i < A.size(); ++i) d = std::max(d, std::abs(diag[i][k] - crit[static_cast<std::size_t>(l)].x[i]));
      cost(k, l) = d;
    }
  rep.joint_pairing = min_cost_assignment(cost);
  for (Eigen::Index k = 0; k < r; ++k)
    rep.joint_distance = std::max(rep.joint_distance, cost(k, static_cast<Eigen::Index>(rep.joint_pairing[static_cast<std::size_t>(k)])));
  return rep;
}

// ---------------------------------------------------------------------------

TransportConsistencyReport check_transport_consistency(const ConnectionFamily& fam, cplx hbar, const CVector& c,
                                                       const QPath& path, double step) {
  const TorusData& td = fam.presentation().td;
  if (td.d != 1) throw Error(Error::Kind::UnsupportedDimension, "period transport needs d = 1");
  if (path.waypoints.size() < 2) throw Error(Error::Kind::InvalidArgument, "path needs two waypoints");
  const auto& basis = fam.presentation().class_basis;
  auto unit = std::find_if(basis.begin(), basis.end(), [](const IndexSet& s) { return s.empty(); });
  if (unit == basis.end()) throw Error(Error::Kind::InvalidArgument, "class basis lacks the unit");
  const auto unit_col = static_cast<Eigen::Index>(unit - basis.begin());

  MirrorModel start = mirror_space(td, path.waypoints.front(), hbar, c);
  auto cycles = build_cycles(start);
  TransportConsistencyReport rep;
  rep.start_frame.resize(static_cast<Eigen::Index>(cycles.size()), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t g = 0; g < cycles.size(); ++g)
    for (std::size_t b = 0; b < basis.size(); ++b)
      rep.start_frame(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(b)) =
          period_derivative(start, cycles[g], basis[b], step);

  // Carry the contours along the path so that the base-point branch follows continuously.
  const std::size_t samples = 64;
  for (std::size_t seg = 0; seg < path.segments(); ++seg)
    for (std::size_t k = 1; k <= samples; ++k) {
      MirrorModel m = mirror_space(td, path.at(seg, double(k) / samples), hbar, c);
      for (auto& cyc : cycles) {
        cplx p1 = m.find(cyc.first).t, p2 = m.find(cyc.second).t;
        CVector L = m.logs({p1 + cyc.base_fraction * (p2 - p1)});
        try {
          unwrap(L, cyc.reference_logs, true);
        } catch (const BranchJump&) {
          throw Error(Error::Kind::BranchTrackingFailure, "base point branch jumps along the path");
        }
        cyc.reference_logs = L;
      }
    }
  MirrorModel end = mirror_space(td, path.waypoints.back(), hbar, c);

  Eigen::MatrixXcd S = transport_matrix(fam, hbar, c, path);
  Eigen::MatrixXcd predicted = rep.start_frame * S.inverse();
  double scale = 0, err = 0;
  for (std::size_t g = 0; g < cycles.size(); ++g) {
    cplx direct = period(end, cycles[g]).value;
    cplx moved = predicted(static_cast<Eigen::Index>(g), unit_col);
    rep.direct.push_back(direct);
    rep.transported.push_back(moved);
    scale = std::max(scale, std::abs(direct));
    err = std::max(err, std::abs(direct - moved));
  }
  rep.max_relative_error = err / scale;
  return rep;
}

} // namespace hypertoric
