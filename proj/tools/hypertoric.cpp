// hypertoric: JSON reports on the cohomology, GKZ system and mirror periods of a hypertoric variety.
//
//   hypertoric check input.json
//   hypertoric ring --classical input.json
//   hypertoric resonance --hbar 1/3 --c 1/5,2/7 input.json
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 bad input, 3 computation error.

#include "hypertoric/cli.hpp"
#include "hypertoric/errors.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <iostream>

namespace cli = hypertoric::cli;

namespace {

std::string utc_now() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hypertoric cohomology, quantum connection and mirror periods"};
  app.require_subcommand(1);
  app.fallthrough();

  cli::RunOptions opts;
  std::string input_path;
  std::string hbar_text;
  std::vector<std::string> c_text;
  bool classical = false;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  double tol = 1e-6;
  app.add_option("--seed", seed, "seed for generic constants and multistart")->capture_default_str();
  app.add_option("--threads", threads, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--tol", tol, "tolerance for numeric checks")->capture_default_str()->check(CLI::PositiveNumber);

  auto input = [&](CLI::App* sub) { sub->add_option("input", input_path, "input JSON file")->required(); };
  input(app.add_subcommand("check", "circuits, classification, vertices, root hyperplanes"));
  auto* ring = app.add_subcommand("ring", "presentation, standard basis, multiplication matrices");
  input(ring);
  auto* flag_c = ring->add_flag("--classical", classical, "classical ring");
  ring->add_flag("--quantum", "quantum ring (default)")->excludes(flag_c);
  input(app.add_subcommand("gkz", "GKZ operators and their symbols"));
  input(app.add_subcommand("mirror-verify", "periods, GKZ residuals and spectra at params"));
  auto* res = app.add_subcommand("resonance", "non-resonance of (hbar, c)");
  input(res);
  res->add_option("--hbar", hbar_text, "hbar as p/q");
  res->add_option("--c", c_text, "c_1,..,c_d as p/q")->delimiter(',')->allow_extra_args(false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const auto start = std::chrono::steady_clock::now();
  const std::string command = app.get_subcommands().front()->get_name();
  opts.seed = seed;
  opts.threads = threads;
  opts.tol = tol;
  opts.mode = classical ? hypertoric::RingMode::Classical : hypertoric::RingMode::Quantum;
  try {
    if (!hbar_text.empty()) opts.hbar = hypertoric::parse_rational(hbar_text);
    if (!c_text.empty()) {
      hypertoric::RatVector c;
      for (const auto& t : c_text) c.push_back(hypertoric::parse_rational(t));
      opts.c = c;
    }
  } catch (const hypertoric::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    auto in = cli::read_input(input_path);
    auto report = cli::run(command, in, opts);
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.json["timestamp"] = {{"utc", utc_now()}, {"elapsed_seconds", elapsed}};
    std::cout << report.json.dump(2) << "\n";
    std::cerr << report.summary << "\n";
    return report.pass ? 0 : 1;
  } catch (const cli::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const hypertoric::Error& e) {
    std::cerr << "computation error (" << hypertoric::to_string(e.kind()) << "): " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "computation error: " << e.what() << "\n";
    return 3;
  }
}
