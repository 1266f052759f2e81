// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include "hypertoric/cli.hpp"
#include "hypertoric/connection_gkz.hpp"
#include "hypertoric/errors.hpp"
#include "hypertoric/mirror.hpp"
#include "hypertoric/quantum_ring.hpp"
#include "hypertoric/resonance.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>

using namespace hypertoric;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::vector<TorusData> all_instances() {
  return {instances::cotangent_projective(1), instances::cotangent_projective(2), instances::cotangent_projective(3),
          instances::a_tilde(1),             instances::a_tilde(2),             instances::a_tilde(3),
          instances::two_plane_example()};
}

std::string name_of(const TorusData& td) {
  std::ostringstream os;
  os << "n=" << td.n << ",d=" << td.d;
  return os.str();
}

Outcome circuit_oracle() {
  auto cs = enumerate_circuits(instances::two_plane_example());
  std::set<std::string> got;
  for (const auto& s : cs) {
    std::string t;
    for (auto i : s.support) t += std::to_string(i + 1);
    got.insert(t);
  }
  std::set<std::string> want{"12", "34", "135", "145", "235", "245"};
  std::string list;
  for (const auto& t : got) list += t + " ";
  return {got == want && cs.size() == 6, "supports " + list};
}

// prod_{S+} u_i prod_{S-} (h - u_i), then sum_i a_ij u_i - c_j
std::vector<ParamPolynomial> expected_classical(const TorusData& td, const OrderPtr& order) {
  auto space = param_space(td);
  ParamPolynomial h(order, ParamFraction::variable(space.hbar()));
  std::vector<ParamPolynomial> out;
  for (const auto& s : enumerate_circuits(td)) {
    ParamPolynomial p(order, ParamFraction(1));
    for (auto i : s.plus) p = p * ParamPolynomial::variable(order, i);
    for (auto i : s.minus) p = p * (h - ParamPolynomial::variable(order, i));
    out.push_back(p);
  }
  for (std::size_t j = 0; j < td.d; ++j) {
    ParamPolynomial p(order, -ParamFraction::variable(space.c(j)));
    for (std::size_t i = 0; i < td.n; ++i) p += ParamPolynomial::variable(order, i).scaled(ParamFraction(td.a(j, i)));
    out.push_back(p);
  }
  return out;
}

Outcome classical_ring() {
  std::string bad;
  for (const auto& td : all_instances()) {
    auto cl = classical_ideal(td);
    auto qu = quantum_ideal(td);
    auto want = expected_classical(td, cl.front().order());
    bool ok = cl.size() == want.size() && qu.size() == cl.size();
    for (std::size_t g = 0; ok && g < cl.size(); ++g)
      ok = cl[g] == want[g] && classical_limit(qu[g], td, param_space(td)) == cl[g];
    if (!ok) bad += " " + name_of(td);
  }
  return {bad.empty(), bad.empty() ? "7 instances, pattern and q=0 term-for-term" : "mismatch on" + bad};
}

Outcome rank_oracle() {
  std::string detail;
  bool ok = true;
  auto expect = [&](const TorusData& td, std::size_t want) {
    auto pres = build_presentation(td, RingMode::Classical);
    bool good = pres.rank() == want && matroid_basis_count(td) == want;
    ok = ok && good;
    detail += name_of(td) + ":" + std::to_string(pres.rank()) + " ";
  };
  for (std::size_t n = 1; n <= 3; ++n) {
    expect(instances::cotangent_projective(n), n + 1);
    expect(instances::a_tilde(n), n + 1);
  }
  expect(instances::two_plane_example(), 8);
  return {ok, detail};
}

Outcome quantum_relations() {
  auto check = [](const TorusData& td, bool cotangent) {
    auto space = param_space(td);
    auto qu = quantum_ideal(td);
    auto order = qu[0].order();
    auto u1 = ParamPolynomial::variable(order, 0), u2 = ParamPolynomial::variable(order, 1);
    ParamPolynomial h(order, ParamFraction::variable(space.hbar())), q(order, ParamFraction::variable(space.q(0)));
    auto want = cotangent ? u1 * u2 - q * (h - u1) * (h - u2) : u1 * (h - u2) - q * (h - u1) * u2;
    return qu[0] == want;
  };
  bool a = check(instances::cotangent_projective(1), true), b = check(instances::a_tilde(1), false);
  return {a && b, std::string("T*P1 ") + (a ? "ok" : "differs") + ", A~1 " + (b ? "ok" : "differs")};
}

Outcome commutativity_flatness() {
  bool commute = true, flat = true;
  double worst = 0;
  for (const auto& td : all_instances()) {
    auto pres = build_presentation(td, RingMode::Quantum);
    auto A = divisor_matrices(pres);
    for (std::size_t i = 0; i < A.size(); ++i)
      for (std::size_t j = i + 1; j < A.size(); ++j) commute = commute && commutator(A[i], A[j]).is_zero();
    ConnectionFamily fam(pres);
    CVector c;
    for (std::size_t j = 0; j < td.d; ++j) c.push_back(cplx(0.2 + 0.1 * j, 0.03));
    auto rep = check_flatness(fam, random_points(fam, cplx(0.3, 0.05), c, 20, 1));
    worst = std::max(worst, rep.max_residual);
    flat = flat && rep.points == 20 && rep.max_residual <= 1e-10;
  }
  std::ostringstream os;
  os << "commutators " << (commute ? "all zero" : "NOT zero") << ", worst flatness " << worst << " at 20 points each";
  return {commute && flat, os.str()};
}

Outcome divisor_formula() {
  std::string detail;
  bool ok = true;
  for (const auto& td : {instances::cotangent_projective(1), instances::a_tilde(2), instances::two_plane_example()}) {
    auto rep = verify_divisor_formula(build_presentation(td, RingMode::Quantum),
                                      build_presentation(td, RingMode::Classical));
    bool good = rep.pass();
    for (const auto& c : rep.checks)
      if (!c.pass) detail += c.name + " failed on " + name_of(td) + "; ";
    ok = ok && good && !rep.checks.empty();
  }
  return {ok, ok ? "round trip, vanishing lemma and both identities exact on 3 instances" : detail};
}

Outcome gkz_symbols() {
  std::size_t ops = 0;
  bool ok = true;
  for (const auto& td : all_instances()) {
    auto sys = gkz_system(td);
    ops += sys.size();
    ok = ok && symbol_check(sys, build_presentation(td, RingMode::Quantum));
  }
  return {ok, std::to_string(ops) + " operators on 7 instances"};
}

Outcome mirror_periods() {
  const cplx hbar(1.0 / 3.0), c(1.0 / 5.0);
  double worst = 0;
  bool ok = true;
  std::string ranks;
  for (const auto& td : {instances::a_tilde(1), instances::cotangent_projective(1)}) {
    ConnectionFamily fam(build_presentation(td, RingMode::Quantum));
    for (const auto& p : random_points(fam, hbar, {c}, 3, 17)) {
      auto rep = verify_gkz_on_periods(td, hbar, {c}, p.q);
      worst = std::max(worst, rep.max_residual);
      ok = ok && rep.max_residual <= 1e-6 && rep.period_rank == 2;
      ranks += std::to_string(rep.period_rank);
    }
  }
  std::ostringstream os;
  os << "worst relative residual " << worst << ", period ranks " << ranks;
  return {ok, os.str()};
}

Outcome spectra() {
  bool ok = true;
  std::ostringstream os;
  struct Case {
    TorusData td;
    double tol;
  };
  for (auto& [td, tol] : std::vector<Case>{{instances::cotangent_projective(1), 1e-8},
                                           {instances::a_tilde(1), 1e-8},
                                           {instances::a_tilde(2), 1e-8},
                                           {instances::a_tilde(3), 1e-8},
                                           {instances::cotangent_projective(2), 1e-6},
                                           {instances::two_plane_example(), 1e-6}}) {
    ConnectionFamily fam(build_presentation(td, RingMode::Quantum));
    CVector c;
    for (std::size_t j = 0; j < td.d; ++j) c.push_back(cplx(0.2 + 0.13 * j, 0.03));
    auto p = random_points(fam, cplx(0.3, 0.05), c, 1, 5).front();
    auto crit = critical_points(td, p.q, p.hbar, p.c);
    auto rep = compare_spectra(fam, crit, p);
    ok = ok && crit.size() == fam.rank() && rep.joint_distance <= tol;
    os << name_of(td) << ":" << rep.joint_distance << " ";
  }
  return {ok, os.str()};
}

Outcome transport_consistency() {
  double worst = 0;
  for (const auto& td : {instances::cotangent_projective(1), instances::a_tilde(1)}) {
    ConnectionFamily fam(build_presentation(td, RingMode::Quantum));
    QPath path;
    path.waypoints = {{cplx(0.8, 0.3), cplx(1.7, -0.2)}, {cplx(1.0, 0.5), cplx(1.5, 0.1)},
                      {cplx(1.2, 0.2), cplx(1.9, 0.3)}};
    worst = std::max(worst, check_transport_consistency(fam, cplx(1.0 / 3.0), {cplx(0.2)}, path).max_relative_error);
  }
  std::ostringstream os;
  os << "worst relative error " << worst;
  return {worst <= 1e-6, os.str()};
}

Outcome resonance() {
  auto t = instances::cotangent_projective(1);
  bool ok = !is_non_resonant(t, 0, {0}).non_resonant && !is_non_resonant(t, 1, {2}).non_resonant &&
            is_non_resonant(t, Rational(1, 3), {Rational(1, 5)}).non_resonant;
  const std::vector<Rational> values{0, Rational(1, 2), Rational(1, 3), Rational(-2, 5), 1, Rational(3, 7), -2};
  std::size_t compared = 0, disagree = 0;
  for (const auto& td : {instances::cotangent_projective(1), instances::cotangent_projective(2), instances::a_tilde(1),
                         instances::a_tilde(2), instances::a_tilde(3), instances::a_tilde(4)}) {
    for (std::size_t h = 0; h < values.size(); ++h)
      for (std::size_t k = 0; k < values.size(); ++k) {
        RatVector c;
        for (std::size_t j = 0; j < td.d; ++j) c.push_back(values[(k + 3 * j) % values.size()]);
        auto v = is_non_resonant(td, values[h], c);
        bool witness_ok = v.non_resonant || (v.witness && verify_witness(td, values[h], c, *v.witness));
        if (v.non_resonant == oracle::brute_force_resonant(td, values[h], c) || !witness_ok) ++disagree;
        ++compared;
      }
  }
  bool generic = true;
  for (const auto& td : all_instances()) generic = generic && genericity_check(td);
  return {ok && disagree == 0 && generic, "examples " + std::string(ok ? "ok" : "wrong") + ", " +
                                              std::to_string(disagree) + "/" + std::to_string(compared) +
                                              " disagree with brute force, genericity " + (generic ? "true" : "false")};
}

Outcome determinism() {
  const std::string inputs = HYPERTORIC_INPUTS;
  std::size_t runs = 0;
  bool ok = true;
  struct Run {
    std::string command, file;
  };
  for (const auto& [command, file] : std::vector<Run>{{"check", "two_plane"},
                                                       {"ring", "two_plane"},
                                                       {"gkz", "cotangent_p2"},
                                                       {"mirror-verify", "cotangent_p1"},
                                                       {"mirror-verify", "cotangent_p2"},
                                                       {"resonance", "a_tilde1"}}) {
    auto in = cli::read_input(inputs + "/" + file + ".json");
    cli::RunOptions opts;
    opts.seed = 42;
    opts.threads = 2;
    auto a = cli::run(command, in, opts).json.dump();
    auto b = cli::run(command, in, opts).json.dump();
    ok = ok && a == b;
    ++runs;
  }
  return {ok, std::to_string(runs) + " command pairs compared byte for byte"};
}

} // namespace

int main() {
  struct Criterion {
    std::string name;
    std::function<Outcome()> run;
    double budget = 0; ///< seconds, 0 for none
  };
  const std::vector<Criterion> criteria{
      {"circuit oracle", circuit_oracle, 1},
      {"classical ring", classical_ring},
      {"rank oracle", rank_oracle},
      {"quantum relations", quantum_relations},
      {"commutativity and flatness", commutativity_flatness, 60},
      {"divisor formula round trip", divisor_formula},
      {"GKZ symbols", gkz_symbols},
      {"GKZ on periods", mirror_periods, 300},
      {"critical point spectra", spectra},
      {"transport consistency", transport_consistency},
      {"resonance", resonance},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[k].run();
    } catch (const std::exception& e) {
      out = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (criteria[k].budget > 0 && secs > criteria[k].budget) {
      out.pass = false;
      out.detail += "; over the time budget";
    }
    std::printf("%s %2zu %s: %s (%.2f s)\n", out.pass ? "PASS" : "FAIL", k + 1, criteria[k].name.c_str(),
                out.detail.c_str(), secs);
    failed += out.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
