#include "hypertoric/cli.hpp"

#include "hypertoric/arrangement.hpp"
#include "hypertoric/connection_gkz.hpp"
#include "hypertoric/errors.hpp"
#include "hypertoric/mirror.hpp"
#include "hypertoric/resonance.hpp"

#include <Eigen/Core>
#include <boost/version.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace hypertoric::cli {

namespace {

using cplx = std::complex<double>;

constexpr double kFlatnessTol = 1e-10;

// FNV-1a, 64 bit.
std::string digest_of(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a64:") + buf;
}

Rational rational_field(const nlohmann::json& j, const std::string& what) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (!j.is_string()) throw InputError(what + " must be an integer or a string p/q");
  try {
    return parse_rational(j.get<std::string>());
  } catch (const Error&) {
    throw InputError(what + " is not an exact fraction: " + j.get<std::string>());
  }
}

long integer_field(const nlohmann::json& j, const std::string& what) {
  if (!j.is_number_integer()) throw InputError(what + " must be an integer");
  return j.get<long>();
}

Json rat_json(const Rational& r) { return to_string(r); }
Json int_json(const Integer& z) { return z.get_str(); }
Json cplx_json(cplx z) { return Json::array({z.real(), z.imag()}); }

Json one_based(const IndexSet& s) {
  Json out = Json::array();
  for (auto i : s) out.push_back(i + 1);
  return out;
}

class ReportBuilder {
public:
  ReportBuilder(std::string command, const InputSpec& in, const RunOptions& opts) {
    json_["command"] = std::move(command);
    json_["input_digest"] = in.digest;
    json_["options"] = {{"seed", opts.seed}, {"tol", opts.tol}};
    json_["results"] = Json::object();
    json_["checks"] = Json::array();
  }

  Json& results() { return json_["results"]; }

  void check(const std::string& name, bool pass, Json value, Json tolerance) {
    json_["checks"].push_back({{"name", name}, {"pass", pass}, {"value", std::move(value)}, {"tolerance", std::move(tolerance)}});
    pass_ = pass_ && pass;
    ++total_;
    passed_ += pass ? 1 : 0;
  }
  void exact(const std::string& name, bool pass) { check(name, pass, pass, "exact"); }

  Report finish(const std::string& headline) {
    json_["pass"] = pass_;
    json_["versions"] = {
        {"hypertoric", "0.1.0"},
        {"gmp", gmp_version},
        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION)},
        {"boost", BOOST_LIB_VERSION},
    };
    std::ostringstream os;
    os << json_["command"].get<std::string>() << ": " << headline << "; " << passed_ << "/" << total_
       << " checks pass";
    return Report{json_, pass_, os.str()};
  }

private:
  Json json_;
  bool pass_ = true;
  std::size_t total_ = 0, passed_ = 0;
};

TorusData torus(const InputSpec& in, bool permissive = false) {
  return build_torus_data(in.a, in.theta_hat, BuildOptions{!permissive});
}

Rational hbar_of(const InputSpec& in, const RunOptions& opts) {
  if (opts.hbar) return *opts.hbar;
  if (in.hbar) return *in.hbar;
  throw InputError("hbar is required (params.hbar or --hbar)");
}

RatVector c_of(const InputSpec& in, const RunOptions& opts, std::size_t d) {
  RatVector c;
  if (opts.c)
    c = *opts.c;
  else if (in.c)
    c = *in.c;
  else
    throw InputError("c is required (params.c or --c)");
  if (c.size() != d) throw InputError("c needs " + std::to_string(d) + " entries, got " + std::to_string(c.size()));
  return c;
}

cplx to_cplx(const Rational& r) { return cplx(r.get_d(), 0.0); }

Json matrix_json(const OperatorMatrix& m, const ParamSpace& space) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.size(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.size(); ++c) row.push_back(m(r, c).to_string(space));
    rows.push_back(std::move(row));
  }
  return rows;
}

} // namespace

InputSpec parse_input(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw InputError("input must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (key != "a" && key != "theta_hat" && key != "names" && key != "params" && key != "description")
      throw InputError("unknown field: " + key);
  if (!j.contains("a") || !j["a"].is_array() || j["a"].empty()) throw InputError("a must be a non-empty array of rows");
  const auto& rows = j["a"];
  if (!rows[0].is_array() || rows[0].empty()) throw InputError("a must be a non-empty array of rows");
  const std::size_t d = rows.size(), n = rows[0].size();
  InputSpec in;
  in.a = IntMatrix(d, n);
  for (std::size_t r = 0; r < d; ++r) {
    if (!rows[r].is_array() || rows[r].size() != n) throw InputError("rows of a must all have length " + std::to_string(n));
    for (std::size_t c = 0; c < n; ++c) in.a(r, c) = integer_field(rows[r][c], "a entry");
  }
  if (!j.contains("theta_hat") || !j["theta_hat"].is_array() || j["theta_hat"].size() != n)
    throw InputError("theta_hat must have one integer per column of a");
  for (const auto& v : j["theta_hat"]) in.theta_hat.emplace_back(integer_field(v, "theta_hat entry"));
  if (j.contains("names")) {
    if (!j["names"].is_array() || j["names"].size() != n) throw InputError("names must have one string per hyperplane");
    for (const auto& v : j["names"]) {
      if (!v.is_string()) throw InputError("names must be strings");
      in.names.push_back(v.get<std::string>());
    }
  }
  if (j.contains("params")) {
    const auto& p = j["params"];
    if (!p.is_object()) throw InputError("params must be an object");
    for (const auto& [key, value] : p.items())
      if (key != "hbar" && key != "c" && key != "q") throw InputError("unknown params field: " + key);
    if (p.contains("hbar")) in.hbar = rational_field(p["hbar"], "params.hbar");
    if (p.contains("c")) {
      if (!p["c"].is_array() || p["c"].size() != d) throw InputError("params.c must have " + std::to_string(d) + " entries");
      RatVector c;
      for (const auto& v : p["c"]) c.push_back(rational_field(v, "params.c entry"));
      in.c = c;
    }
    if (p.contains("q")) {
      if (!p["q"].is_array() || p["q"].size() != n) throw InputError("params.q must have one entry per hyperplane");
      std::vector<cplx> q;
      for (const auto& v : p["q"]) {
        if (v.is_number())
          q.emplace_back(v.get<double>(), 0.0);
        else if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
          q.emplace_back(v[0].get<double>(), v[1].get<double>());
        else
          throw InputError("params.q entries must be numbers or [re, im]");
      }
      in.q = q;
    }
  }
  in.digest = digest_of(j.dump());
  return in;
}

InputSpec read_input(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_input(ss.str());
}

Report cmd_check(const InputSpec& in, const RunOptions& opts) {
  ReportBuilder rb("check", in, opts);
  auto td = torus(in, true);
  auto circuits = enumerate_circuits(td);
  auto cls = classify(td);
  auto verts = vertices(td);
  auto& res = rb.results();
  res["n"] = td.n;
  res["k"] = td.k;
  res["d"] = td.d;
  res["surjective"] = td.surjective;
  if (!in.names.empty()) res["names"] = in.names;
  res["classification"] = {{"simple", cls.simple}, {"unimodular", cls.unimodular}, {"smooth", cls.smooth}};
  res["circuits"] = Json::array();
  bool circuits_ok = true;
  for (const auto& s : circuits) {
    Json beta = Json::array();
    for (const auto& b : s.beta) beta.push_back(int_json(b));
    res["circuits"].push_back({{"support", one_based(s.support)}, {"plus", one_based(s.plus)},
                               {"minus", one_based(s.minus)}, {"beta", beta}});
    Integer pairing = 0;
    for (std::size_t i = 0; i < td.n; ++i) pairing += td.theta_hat[i] * s.beta[i];
    circuits_ok = circuits_ok && pairing > 0;
    for (std::size_t j = 0; j < td.d; ++j) {
      Integer dot = 0;
      for (std::size_t i = 0; i < td.n; ++i) dot += td.a(j, i) * s.beta[i];
      circuits_ok = circuits_ok && dot == 0;
    }
  }
  res["vertices"] = Json::array();
  bool vertices_ok = true;
  for (const auto& v : verts) {
    Json pos = Json::array();
    for (const auto& x : v.position) pos.push_back(rat_json(x));
    res["vertices"].push_back({{"basis", one_based(v.basis)}, {"position", pos}});
    for (auto i : v.basis) {
      Rational val = td.theta_hat[i];
      for (std::size_t j = 0; j < td.d; ++j) val += td.a(j, i) * v.position[j];
      vertices_ok = vertices_ok && val == 0;
    }
  }
  res["root_hyperplanes"] = Json::array();
  if (td.surjective)
    for (const auto& r : root_hyperplanes(td, circuits))
      res["root_hyperplanes"].push_back({{"circuit", r.circuit_index + 1}, {"dimension", r.dimension}});
  res["matroid_basis_count"] = matroid_basis_count(td);
  rb.exact("a_surjective", td.surjective);
  rb.exact("circuits_are_oriented_kernel_vectors", circuits_ok);
  rb.exact("vertices_lie_on_their_hyperplanes", vertices_ok);
  std::ostringstream os;
  os << (cls.smooth ? "smooth" : "not smooth") << ", " << circuits.size() << " circuits, " << verts.size()
     << " vertices";
  return rb.finish(os.str());
}

Report cmd_ring(const InputSpec& in, const RunOptions& opts) {
  ReportBuilder rb("ring", in, opts);
  auto td = torus(in);
  auto pres = build_presentation(td, opts.mode);
  const auto& space = pres.space;
  auto& res = rb.results();
  res["mode"] = opts.mode == RingMode::Quantum ? "quantum" : "classical";
  res["rank"] = pres.rank();
  res["matroid_basis_count"] = matroid_basis_count(td);
  res["relations"] = Json::array();
  for (const auto& s : pres.circuits) res["relations"].push_back(render_relation(s, opts.mode));
  for (std::size_t j = 0; j < td.d; ++j) res["relations"].push_back(render_linear_relation(td, space, j));
  res["generators"] = Json::array();
  for (const auto& g : pres.generators) res["generators"].push_back(g.to_string(space));
  res["groebner_basis"] = Json::array();
  for (const auto& g : pres.groebner) res["groebner_basis"].push_back(g.to_string(space));
  res["standard_basis"] = Json::array();
  for (const auto& m : pres.basis) res["standard_basis"].push_back(monomial_to_string(m, td.n));
  auto A = divisor_matrices(pres);
  res["multiplication_matrices"] = Json::array();
  for (const auto& m : A) res["multiplication_matrices"].push_back(matrix_json(m, space));

  rb.exact("rank_equals_basis_count", pres.rank() == matroid_basis_count(td));
  bool commute = true;
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t j = i + 1; j < A.size(); ++j) commute = commute && commutator(A[i], A[j]).is_zero();
  rb.exact("multiplication_commutes", commute);
  if (opts.mode == RingMode::Quantum) {
    auto classical = build_presentation(td, RingMode::Classical);
    bool same = classical.generators.size() == pres.generators.size();
    for (std::size_t g = 0; same && g < pres.generators.size(); ++g)
      same = classical_limit(pres.generators[g], td, space) == classical.generators[g];
    rb.exact("q_zero_gives_classical_ideal", same);
    auto rep = verify_divisor_formula(pres, classical, SteinbergOptions{opts.seed});
    res["divisor_formula"] = Json::array();
    for (const auto& c : rep.checks) {
      res["divisor_formula"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    }
    rb.exact("divisor_formula", rep.pass());
  }
  return rb.finish("rank " + std::to_string(pres.rank()));
}

Report cmd_gkz(const InputSpec& in, const RunOptions& opts) {
  ReportBuilder rb("gkz", in, opts);
  auto td = torus(in);
  auto pres = build_presentation(td, RingMode::Quantum);
  auto ops = gkz_system(td);
  auto& res = rb.results();
  res["operators"] = Json::array();
  bool all = true;
  for (const auto& op : ops) {
    auto sym = symbol(op, pres);
    bool zero = normal_form(sym, pres.groebner).is_zero();
    all = all && zero;
    res["operators"].push_back({{"kind", op.kind == GkzOperator::Kind::Linear ? "linear" : "circuit"},
                                {"text", op.text},
                                {"symbol", sym.to_string(pres.space)},
                                {"symbol_in_ideal", zero}});
  }
  rb.exact("symbols_reduce_to_zero", all);
  return rb.finish(std::to_string(ops.size()) + " operators");
}

Report cmd_mirror_verify(const InputSpec& in, const RunOptions& opts) {
  ReportBuilder rb("mirror-verify", in, opts);
  auto td = torus(in);
  if (!in.q) throw InputError("params.q is required");
  const auto hbar_r = hbar_of(in, opts);
  const auto c_r = c_of(in, opts, td.d);
  const cplx hbar = to_cplx(hbar_r);
  CVector c, q = *in.q;
  for (const auto& x : c_r) c.push_back(to_cplx(x));
  ConnectionFamily fam(build_presentation(td, RingMode::Quantum));
  NumericPoint p{hbar, c, q};
  auto& res = rb.results();
  res["rank"] = fam.rank();
  res["clearance"] = fam.clearance(q);

  auto points = random_points(fam, hbar, c, 20, opts.seed);
  points.push_back(p);
  auto flat = check_flatness(fam, points);
  rb.check("flatness", flat.max_residual <= kFlatnessTol, flat.max_residual, kFlatnessTol);

  if (td.d == 1) {
    auto rep = verify_gkz_on_periods(td, hbar, c, q);
    Json periods = Json::array();
    for (auto v : rep.periods) periods.push_back(cplx_json(v));
    Json per_op = Json::array();
    for (std::size_t k = 0; k < rep.operators.size(); ++k)
      per_op.push_back({{"operator", rep.operators[k]}, {"residual", rep.per_operator[k]}});
    res["periods"] = {{"values", periods}, {"gkz_residuals", per_op}, {"period_rank", rep.period_rank},
                      {"expected_rank", rep.expected_rank}};
    rb.check("gkz_annihilates_periods", rep.max_residual <= opts.tol, rep.max_residual, opts.tol);
    rb.exact("period_rank", rep.period_rank == rep.expected_rank);
  } else {
    res["periods"] = {{"skipped", "twisted cycles are constructed for d = 1 only"}};
  }

  if (td.d <= 2) {
    CriticalOptions co;
    co.seed = opts.seed;
    auto crit = critical_points(td, q, hbar, c, co);
    auto match = compare_spectra(fam, crit, p);
    Json pts = Json::array();
    for (const auto& cp : crit) {
      Json x = Json::array();
      for (auto v : cp.x) x.push_back(cplx_json(v));
      pts.push_back({{"x", x}, {"residual", cp.residual}});
    }
    // multistart order depends on the seed, so list points in pairing order
    Json paired = Json::array();
    if (match.joint_pairing.size() == crit.size())
      for (auto k : match.joint_pairing) paired.push_back(pts[k]);
    res["critical_points"] = paired.empty() ? pts : paired;
    res["spectrum_joint_distance"] = match.joint_distance;
    rb.exact("critical_point_count_equals_rank", crit.size() == fam.rank());
    rb.check("spectra_match_jointly", match.joint_distance <= opts.tol, match.joint_distance, opts.tol);
  } else {
    res["critical_points"] = {{"skipped", "critical points are computed for d <= 2"}};
  }
  return rb.finish("rank " + std::to_string(fam.rank()));
}

Report cmd_resonance(const InputSpec& in, const RunOptions& opts) {
  ReportBuilder rb("resonance", in, opts);
  auto td = torus(in);
  const auto hbar = hbar_of(in, opts);
  const auto c = c_of(in, opts, td.d);
  auto& res = rb.results();
  Json v = Json::array();
  for (const auto& x : parameter_vector(td, hbar, c)) v.push_back(rat_json(x));
  res["parameter_vector"] = v;
  auto collections = enumerate_minimal_saturated(enumerate_circuits(td), td.n);
  res["minimal_saturated"] = Json::array();
  for (const auto& q : collections) res["minimal_saturated"].push_back(q.to_string());
  auto verdict = is_non_resonant(td, hbar, c, opts.threads);
  res["non_resonant"] = verdict.non_resonant;
  if (verdict.witness) {
    const auto& w = *verdict.witness;
    Json shift = Json::array(), coeffs = Json::array();
    for (const auto& z : w.shift) shift.push_back(int_json(z));
    for (const auto& x : w.span_coeffs) coeffs.push_back(rat_json(x));
    res["witness"] = {{"collection", w.collection.to_string()}, {"shift", shift}, {"span_coefficients", coeffs}};
    rb.exact("witness_verifies", verify_witness(td, hbar, c, w));
  } else {
    res["witness"] = nullptr;
  }
  auto dims = genericity_dimensions(td);
  res["genericity_dimensions"] = dims;
  rb.exact("genericity", genericity_check(td));
  return rb.finish(verdict.non_resonant ? "non-resonant" : "resonant");
}

Report run(const std::string& command, const InputSpec& in, const RunOptions& opts) {
  if (command == "check") return cmd_check(in, opts);
  if (command == "ring") return cmd_ring(in, opts);
  if (command == "gkz") return cmd_gkz(in, opts);
  if (command == "mirror-verify") return cmd_mirror_verify(in, opts);
  if (command == "resonance") return cmd_resonance(in, opts);
  throw InputError("unknown command: " + command);
}

} // namespace hypertoric::cli
