#pragma once

// Commands behind the hypertoric tool. Each returns a JSON report with a deterministic
// field order; the tool adds the wall-clock "timestamp" field.

#include "hypertoric/exact.hpp"
#include "hypertoric/quantum_ring.hpp"

#include <json.hpp>

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypertoric::cli {

using Json = nlohmann::ordered_json;

/// Malformed or schema-violating input; exit code 2.
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct InputSpec {
  IntMatrix a;
  IntVector theta_hat;
  std::vector<std::string> names;
  std::optional<Rational> hbar;
  std::optional<RatVector> c;
  std::optional<std::vector<std::complex<double>>> q; ///< one entry per hyperplane
  std::string digest;                                 ///< of the canonical input text
};

InputSpec parse_input(const std::string& text);
InputSpec read_input(const std::string& path);

struct RunOptions {
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  double tol = 1e-6;
  RingMode mode = RingMode::Quantum;
  std::optional<Rational> hbar; ///< overrides the input file
  std::optional<RatVector> c;
};

struct Report {
  Json json;
  bool pass = true;
  std::string summary; ///< human readable, for stderr
};

Report cmd_check(const InputSpec& in, const RunOptions& opts);
Report cmd_ring(const InputSpec& in, const RunOptions& opts);
Report cmd_gkz(const InputSpec& in, const RunOptions& opts);
Report cmd_mirror_verify(const InputSpec& in, const RunOptions& opts);
Report cmd_resonance(const InputSpec& in, const RunOptions& opts);

/// Dispatch by subcommand name ("check", "ring", "gkz", "mirror-verify", "resonance").
Report run(const std::string& command, const InputSpec& in, const RunOptions& opts);

} // namespace hypertoric::cli
