// Explicit dimension-d realizations: Born-rule evaluation, the ideal RAC
// strategy, the eigenvector attack, a brute-force classical optimum and
// see-saw heuristics.
#pragma once

#include <cstdint>
#include <vector>

#include "dimcert/linalg.hpp"
#include "dimcert/random.hpp"
#include "dimcert/scenario.hpp"

namespace dimcert {

struct Strategy {
  std::vector<CMat> states;                     // n_prep density matrices
  std::vector<std::vector<CMat>> measurements;  // [y][b] POVM effects
};

// Deterministic encoding z -> message and per-y decodings message -> outcome.
struct ClassicalStrategy {
  std::vector<int> encoding;
  std::vector<std::vector<int>> decodings;  // [y][message]
};

enum class GuessMode { Full, Binarized };

// Throws naming the offending object when a state or effect violates the
// Hermiticity/positivity/normalization tolerances.
void validate_strategy(const Scenario& s, const Strategy& st, double tol = 1e-10);

Behavior behavior_of(const Scenario& s, const Strategy& st);

// Computational-basis measurement for y=0, Fourier basis for y=1; each state
// is the top eigenvector of its success operator (the phase-aligned
// superposition of the two target basis vectors). For the d=4 code T = 3/4.
Strategy ideal_qrac_strategy(int d);

// Starts from the ideal strategy and replaces the state of each element of
// X' by the measurement eigenvector that makes its outcome deterministic.
// Requires distinct preparation indices in X'.
Strategy eigenvector_attack_strategy(const Scenario& s, const GenerationSet& xprime);

struct ClassicalOptimum {
  double value = 0.0;
  ClassicalStrategy strategy;
};

// Exact maximum of T over deterministic classical strategies by enumerating
// decoding pairs (canonical up to message relabeling) with per-input optimal
// encoding. Enumeration is limited to n_out <= 6.
ClassicalOptimum classical_optimum(const Scenario& s);

Strategy classical_to_strategy(const Scenario& s, const ClassicalStrategy& cs);

// Achievable guessing probability of a known behavior over X'.
double guessing_probability(const Scenario& s, const Behavior& p,
                            const GenerationSet& xprime, GuessMode mode);

// Random strategies for restarts and property tests: Haar-random pure states
// and conjugated computational-basis projectors.
Strategy random_strategy(const Scenario& s, Rng& rng);

struct SeesawOptions {
  std::uint64_t seed = 1;
  int restarts = 20;
  int max_iterations = 200;
  double improvement_tol = 1e-12;
};

struct SeesawResult {
  Strategy strategy;
  double T = 0.0;
  int iterations = 0;             // iterations of the best restart
  std::vector<double> t_trace;    // accepted per-iteration values, best restart
};

// Alternating maximization of T: states move to top eigenvectors of their
// payoff operators, measurements to the exact POVM optimizer of the linear
// objective. The per-iteration value never decreases.
SeesawResult seesaw_max_T(const Scenario& s, const SeesawOptions& opt);

struct AttackOptions {
  std::uint64_t seed = 1;
  int restarts = 8;
  int max_iterations = 150;
  double t_slack = 1e-6;
};

struct AttackResult {
  Strategy strategy;
  double T = 0.0;
  double p_guess = 0.0;
  bool reached_target = false;
  int penalty_rounds = 0;
};

// Heuristic adversary: maximizes the guessing probability over X' subject to
// T >= t_target via an escalating penalty (weight 10, doubled, at most 5
// rounds). Returns the best strategy found and its exact (T, p_guess).
AttackResult seesaw_attack(const Scenario& s, const GenerationSet& xprime,
                           GuessMode mode, double t_target, const AttackOptions& opt);

// Exact POVM maximizer of sum_b tr(M_b C_b) for Hermitian weights C_b:
// a simultaneous eigenbasis assignment when the weights commute, otherwise
// a conic solve. Used by the see-saw measurement step.
std::vector<CMat> optimal_povm(const std::vector<CMat>& weights, double* value = nullptr);

}  // namespace dimcert
