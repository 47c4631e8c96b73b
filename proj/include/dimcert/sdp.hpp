// Minimal conic-optimization layer: affine-parameterized PSD constraints,
// Hermitian-to-real embedding, and an embedded primal-dual interior-point
// solver that reports dual values for rigorous bounding.
#pragma once

#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "dimcert/linalg.hpp"

namespace dimcert {

// maximize objective . lambda + offset
//   s.t.  base + sum_i lambda_i directions[i]  >= 0   (PSD)
//         <a, lambda> = r  for each equality
struct ConicProblem {
  int variable_dim = 0;
  RVec objective;
  double objective_offset = 0.0;
  CMat base;
  std::vector<CMat> directions;
  std::vector<std::pair<RVec, double>> equalities;
};

enum class SolveStatus { Optimal, Infeasible, Inaccurate };

struct ConicSolution {
  SolveStatus status = SolveStatus::Inaccurate;
  double primal_value = 0.0;
  double dual_value = 0.0;   // upper bound on the optimum when Optimal
  RVec lambda;
  double duality_gap = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
};

const char* to_string(SolveStatus s);

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void validate_problem(const ConicProblem& p);

// Hermitian-to-real embedding of every matrix in the problem; objective and
// equalities are unchanged. H >= 0 iff its image is >= 0.
ConicProblem realify(const ConicProblem& p);

// Nesterov-Todd predictor-corrector interior-point method. Complex Hermitian
// problems are realified internally. On Optimal the duality gap is at most
// tol and dual_value >= primal_value - tol*scale; downstream certificates
// should report dual_value + tol.
ConicSolution solve(const ConicProblem& p, double tol = 1e-8);

// Sparse SDPA export (real problems; complex ones are realified first).
// Equalities are encoded as paired 1x1 inequality blocks.
void write_sdpa(const ConicProblem& p, std::ostream& os);

}  // namespace dimcert
