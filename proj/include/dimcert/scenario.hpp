// Prepare-and-measure games: alphabets, the payoff functional T, generation
// sets and outcome post-processing.
#pragma once

#include <vector>

#include "dimcert/linalg.hpp"

namespace dimcert {

// A communication game with n_prep sender inputs z, n_meas receiver inputs y,
// n_out outcomes and a Hilbert-space dimension bound. The payoff table
// defines T = sum_{b,x} c(b,x) P(b|x) with inputs flattened as
// x = z * n_meas + y.
struct Scenario {
  int n_prep = 0;
  int n_meas = 0;
  int n_out = 0;
  int dim = 0;
  RMat payoff;  // n_out rows, n_prep*n_meas columns

  int num_inputs() const { return n_prep * n_meas; }
  int x_index(int z, int y) const { return z * n_meas + y; }
  int z_of(int x) const { return x / n_meas; }
  int y_of(int x) const { return x % n_meas; }
};

// Conditional distribution table P(b|x), rows b, columns x.
struct Behavior {
  RMat p;

  int n_out() const { return static_cast<int>(p.rows()); }
  int num_inputs() const { return static_cast<int>(p.cols()); }
};

// One input of the device, z for the preparation and y for the measurement.
struct Input {
  int z = 0;
  int y = 0;
  friend bool operator==(const Input&, const Input&) = default;
};

// Ordered set X' of generation inputs; entries are distinct.
struct GenerationSet {
  std::vector<Input> inputs;

  int size() const { return static_cast<int>(inputs.size()); }
};

// d-level random access code with 2 receiver inputs: z = (a0, a1) encodes
// two digits, the correct answer for (z, y) is a_y, and every correct
// outcome carries payoff 1/(2 d^2).
Scenario make_qrac_scenario(int d);

// True when every input has exactly one positive payoff coefficient equal to
// 1/(n_prep*n_meas); holds for QRAC scenarios and their binarizations.
bool is_rac_like(const Scenario& s);

// The outcome carrying the payoff for input x (RAC-like scenarios).
int correct_answer(const Scenario& s, int x);

// Digits of the preparation index: z = a0 + d*a1.
inline int digit0(int z, int d) { return z % d; }
inline int digit1(int z, int d) { return z / d; }

void validate_behavior(const Scenario& s, const Behavior& p, double tol = 1e-9);

double eval_T(const Scenario& s, const Behavior& p);

// Deterministic default X': element j is (z = j, y = j mod 2); all z
// distinct. 1 <= K <= n_prep.
GenerationSet default_generation_set(const Scenario& s, int K);

void validate_generation_set(const Scenario& s, const GenerationSet& xprime,
                             bool require_distinct_z = false);

// Post-processing to the success indicator: P'(0|x) = P(correct|x).
Behavior binarize(const Scenario& s, const Behavior& p);

// The induced two-outcome scenario scoring the success indicator.
Scenario binary_scenario(const Scenario& s);

std::uint64_t scenario_hash(const Scenario& s);

}  // namespace dimcert
