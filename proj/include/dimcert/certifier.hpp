// Outer relaxation of the dimension-bounded moment-matrix set, built by
// randomized realization sampling and affine-hull detection, and the
// assignment-enumeration entropy bounds on top of it.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dimcert/linalg.hpp"
#include "dimcert/random.hpp"
#include "dimcert/scenario.hpp"
#include "dimcert/sdp.hpp"
#include "dimcert/strategy.hpp"

namespace dimcert {

struct Monomial {
  enum class Kind { Identity, State, Effect, Product };
  Kind kind = Kind::Identity;
  int z = -1;  // State / Product
  int y = -1;  // Effect / Product
  int b = -1;  // Effect / Product
};

struct SamplingPolicy {
  int level = 1;             // 1: {1, rho_z, M_by}; 2: adds rho_z * M_by products
  int stall = 64;            // consecutive non-informative samples before stopping
  double sv_cutoff = 1e-7;   // residual cutoff relative to the largest sample norm
  int max_samples = 20000;
  double mixed_state_fraction = 0.5;
  double general_povm_fraction = 0.5;
};

struct SaturationEntry {
  std::uint64_t sample_index = 0;
  int dimension = 0;
};

struct BasisMeta {
  std::uint64_t scenario_hash = 0;
  int dim = 0;
  std::uint64_t seed = 0;
  std::uint64_t sample_count = 0;
  SamplingPolicy policy;
  std::vector<SaturationEntry> saturation_log;
};

struct MomentBasis {
  Scenario scenario;
  std::vector<Monomial> monomials;
  CMat center;                  // mean of sampled moment matrices
  std::vector<CMat> directions; // orthonormal under Re tr(A'B)
  BasisMeta meta;

  int size() const { return static_cast<int>(monomials.size()); }
  int affine_dim() const { return static_cast<int>(directions.size()); }
  int index_of_state(int z) const { return 1 + z; }
  int index_of_effect(int y, int b) const { return 1 + scenario.n_prep + y * scenario.n_out + b; }
};

std::vector<Monomial> monomial_list(const Scenario& s, int level);

// Gram matrix of the monomial operators of a random dimension-d realization
// under the trace inner product; PSD by construction.
CMat sample_realization(const Scenario& s, Rng& rng, const SamplingPolicy& policy);

MomentBasis build_moment_basis(const Scenario& s, std::uint64_t seed,
                               const SamplingPolicy& policy = {});

// An adversarial outcome choice per element of X'.
struct Assignment {
  GuessMode mode = GuessMode::Binarized;
  std::vector<int> choices;  // Full: b in [0, n_out); Binarized: 0 success, 1 failure
};

// Linear functional over the basis coefficients: value = weights.lambda + offset.
struct AffineFunctional {
  RVec weights;
  double offset = 0.0;
};

AffineFunctional assignment_objective(const MomentBasis& basis, const GenerationSet& xprime,
                                      const Assignment& a);
AffineFunctional t_functional(const MomentBasis& basis);

struct AssignmentBound {
  Assignment assignment;
  double bound = 0.0;  // dual value + tol
  SolveStatus status = SolveStatus::Inaccurate;
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
};

// Certified upper bound on the assignment objective over the relaxation at
// security parameter exactly t. Throws InfeasibleError when t lies outside
// the relaxation's feasible range.
AssignmentBound bound_assignment(const MomentBasis& basis, double t,
                                 const GenerationSet& xprime, const Assignment& a,
                                 double tol = 1e-8);

struct EntropyBound {
  double t = 0.0;
  int K = 0;
  GenerationSet xprime;
  GuessMode mode = GuessMode::Binarized;
  std::vector<AssignmentBound> per_assignment;  // lexicographic order
  double p_star = 0.0;      // clamped to [1/outcomes, 1]
  double p_star_raw = 0.0;  // max assignment bound / K before clamping
  double H_bits = 0.0;
  double solver_tol = 0.0;
  double max_gap = 0.0;
  BasisMeta basis_meta;
};

struct CertifyOptions {
  double tol = 1e-8;
  int threads = 0;  // 0: hardware concurrency
};

// Enumerates all assignments (2^K binarized, n_out^K full), bounds each one,
// and converts the largest average into a min-entropy bound.
EntropyBound certify(const MomentBasis& basis, double t, const GenerationSet& xprime,
                     GuessMode mode, const CertifyOptions& opt = {});

double min_entropy(double p_guess);

// Threshold of the d=4 code below which the eigenvector attack erases the
// randomness of K generation inputs.
double critical_T(int K);

struct CurvePoint {
  double t = 0.0;
  bool feasible = false;
  std::optional<EntropyBound> bound;
  std::string error;
};

std::vector<CurvePoint> entropy_curve(const MomentBasis& basis, const GenerationSet& xprime,
                                      GuessMode mode, const std::vector<double>& t_grid,
                                      const CertifyOptions& opt = {});

// Range of the security parameter over the relaxation, for feasibility checks.
std::pair<double, double> relaxation_t_range(const MomentBasis& basis, double tol = 1e-8);

// Versioned binary container (magic "DIMCERT-BASIS-v1"); layout documented in
// docs/formats.md. Writing is deterministic for a fixed basis.
void save_basis(const MomentBasis& basis, const std::string& path);
MomentBasis load_basis(const std::string& path);

}  // namespace dimcert
