// Command-line surface: basis building/caching, bound curves, certification
// from count data, attacks, classical bounds and simulation.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dimcert/scenario.hpp"
#include "dimcert/strategy.hpp"

namespace dimcert {

// Shared run settings assembled from flags (and an optional config file).
struct RunConfig {
  int d = 4;
  int K = 1;
  std::optional<GenerationSet> xprime;
  GuessMode mode = GuessMode::Binarized;
  double tol = 1e-8;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: machine cores
  std::string basis_path;
  std::string out_path;
};

// "z:y,z:y" pairs; throws std::invalid_argument on malformed text.
GenerationSet parse_xprime(const std::string& text);

// Resolve the generation set from an optional override and K.
GenerationSet resolve_xprime(const Scenario& s, const std::optional<GenerationSet>& override_set,
                             int K);

// Floor at six decimals; certified entropy is always under-reported.
double floor6(double h);

// Exit codes: 0 ok, 2 usage, 3 infeasible, 4 data error, 5 solver failure.
int run_cli(int argc, const char* const* argv);

}  // namespace dimcert
