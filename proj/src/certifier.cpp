#include "dimcert/certifier.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace dimcert {

std::vector<Monomial> monomial_list(const Scenario& s, int level) {
  std::vector<Monomial> mons;
  mons.push_back({Monomial::Kind::Identity, -1, -1, -1});
  for (int z = 0; z < s.n_prep; ++z) mons.push_back({Monomial::Kind::State, z, -1, -1});
  for (int y = 0; y < s.n_meas; ++y)
    for (int b = 0; b < s.n_out; ++b) mons.push_back({Monomial::Kind::Effect, -1, y, b});
  if (level >= 2) {
    for (int z = 0; z < s.n_prep; ++z)
      for (int y = 0; y < s.n_meas; ++y)
        for (int b = 0; b < s.n_out; ++b) mons.push_back({Monomial::Kind::Product, z, y, b});
  }
  return mons;
}

namespace {

std::vector<CMat> monomial_operators(const Scenario& s, const std::vector<Monomial>& mons,
                                     const std::vector<CMat>& states,
                                     const std::vector<std::vector<CMat>>& effects) {
  std::vector<CMat> ops;
  ops.reserve(mons.size());
  for (const Monomial& m : mons) {
    switch (m.kind) {
      case Monomial::Kind::Identity:
        ops.push_back(CMat::Identity(s.dim, s.dim));
        break;
      case Monomial::Kind::State:
        ops.push_back(states[m.z]);
        break;
      case Monomial::Kind::Effect:
        ops.push_back(effects[m.y][m.b]);
        break;
      case Monomial::Kind::Product:
        ops.push_back(states[m.z] * effects[m.y][m.b]);
        break;
    }
  }
  return ops;
}

// Entries that are constant across every realization: (1,1) = d and
// (1, rho_z) = 1. Returned as svec coordinate indices.
std::vector<int> pinned_coordinates(const Scenario& s, int n) {
  std::vector<int> coords;
  coords.push_back(svec_index(n, 0, 0).re);
  for (int z = 0; z < s.n_prep; ++z) {
    const SvecIndex idx = svec_index(n, 0, 1 + z);
    coords.push_back(idx.re);
    coords.push_back(idx.im);
  }
  return coords;
}

void pin_exact_entries(const Scenario& s, CMat& gamma) {
  gamma(0, 0) = static_cast<double>(s.dim);
  for (int z = 0; z < s.n_prep; ++z) {
    gamma(0, 1 + z) = 1.0;
    gamma(1 + z, 0) = 1.0;
  }
}

}  // namespace

CMat sample_realization(const Scenario& s, Rng& rng, const SamplingPolicy& policy) {
  std::vector<CMat> states;
  states.reserve(s.n_prep);
  for (int z = 0; z < s.n_prep; ++z) {
    if (rng.uniform() < policy.mixed_state_fraction) {
      const int rank = 1 + rng.uniform_int(s.dim);
      states.push_back(rng.random_mixed_density(s.dim, rank));
    } else {
      states.push_back(rng.random_pure_density(s.dim));
    }
  }
  std::vector<std::vector<CMat>> effects(s.n_meas);
  for (int y = 0; y < s.n_meas; ++y) {
    if (rng.uniform() < policy.general_povm_fraction) {
      effects[y] = rng.general_povm(s.dim, s.n_out);
    } else {
      // projective with a random rank profile, zero ranks included
      std::vector<int> ranks(s.n_out, 0);
      for (int ball = 0; ball < s.dim; ++ball) ++ranks[rng.uniform_int(s.n_out)];
      effects[y] = rng.projective_povm(s.dim, ranks);
    }
  }

  const std::vector<Monomial> mons = monomial_list(s, policy.level);
  const std::vector<CMat> ops = monomial_operators(s, mons, states, effects);
  const int n = static_cast<int>(ops.size());
  CMat gamma(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const Cplx v = (ops[i].adjoint() * ops[j]).trace();
      gamma(i, j) = v;
      gamma(j, i) = std::conj(v);
    }
  // Gram entries of Hermitian monomials are real; drop arithmetic noise
  if (policy.level == 1) gamma = gamma.real().cast<Cplx>();
  pin_exact_entries(s, gamma);
  return gamma;
}

MomentBasis build_moment_basis(const Scenario& s, std::uint64_t seed,
                               const SamplingPolicy& policy) {
  MomentBasis basis;
  basis.scenario = s;
  basis.monomials = monomial_list(s, policy.level);
  const int n = basis.size();
  basis.meta.scenario_hash = scenario_hash(s);
  basis.meta.dim = s.dim;
  basis.meta.seed = seed;
  basis.meta.policy = policy;

  Rng rng(derive_seed(seed, 0xba515ULL));
  const std::vector<int> pinned = pinned_coordinates(s, n);

  std::vector<RVec> dirs;  // orthonormal svec coordinates
  CMat first;
  CMat sum = CMat::Zero(n, n);
  double scale = 0.0;
  int stall_count = 0;
  std::uint64_t count = 0;

  while (count < static_cast<std::uint64_t>(policy.max_samples)) {
    const CMat gamma = sample_realization(s, rng, policy);
    ++count;
    sum += gamma;
    if (count == 1) {
      first = gamma;
      continue;
    }
    RVec v = svec(gamma - first);
    for (int c : pinned) v(c) = 0.0;
    const double norm0 = v.norm();
    scale = std::max(scale, norm0);
    // two-pass Gram-Schmidt for numerical stability
    for (int pass = 0; pass < 2; ++pass)
      for (const RVec& d : dirs) v -= d.dot(v) * d;
    const double res = v.norm();
    if (res > policy.sv_cutoff * std::max(scale, 1e-300)) {
      dirs.push_back(v / res);
      basis.meta.saturation_log.push_back({count, static_cast<int>(dirs.size())});
      stall_count = 0;
    } else if (++stall_count >= policy.stall) {
      break;
    }
  }

  basis.meta.sample_count = count;
  basis.center = sum / static_cast<double>(count);
  pin_exact_entries(s, basis.center);
  basis.directions.reserve(dirs.size());
  for (const RVec& d : dirs) basis.directions.push_back(unsvec(d, n));
  return basis;
}

namespace {

// functional reading a single real matrix entry of Gamma(lambda)
void add_entry_term(const MomentBasis& basis, int i, int j, double coeff,
                    AffineFunctional& f) {
  f.offset += coeff * basis.center(i, j).real();
  for (int k = 0; k < basis.affine_dim(); ++k)
    f.weights(k) += coeff * basis.directions[k](i, j).real();
}

}  // namespace

AffineFunctional t_functional(const MomentBasis& basis) {
  const Scenario& s = basis.scenario;
  AffineFunctional f;
  f.weights = RVec::Zero(basis.affine_dim());
  for (int z = 0; z < s.n_prep; ++z)
    for (int y = 0; y < s.n_meas; ++y)
      for (int b = 0; b < s.n_out; ++b) {
        const double c = s.payoff(b, s.x_index(z, y));
        if (c != 0.0)
          add_entry_term(basis, basis.index_of_state(z), basis.index_of_effect(y, b), c, f);
      }
  return f;
}

AffineFunctional assignment_objective(const MomentBasis& basis, const GenerationSet& xprime,
                                      const Assignment& a) {
  const Scenario& s = basis.scenario;
  validate_generation_set(s, xprime);
  if (a.choices.size() != xprime.inputs.size())
    throw std::invalid_argument("assignment length does not match the generation set");
  AffineFunctional f;
  f.weights = RVec::Zero(basis.affine_dim());
  for (std::size_t j = 0; j < xprime.inputs.size(); ++j) {
    const Input& in = xprime.inputs[j];
    const int row = basis.index_of_state(in.z);
    if (a.mode == GuessMode::Full) {
      const int b = a.choices[j];
      if (b < 0 || b >= s.n_out) throw std::invalid_argument("assignment outcome out of range");
      add_entry_term(basis, row, basis.index_of_effect(in.y, b), 1.0, f);
    } else {
      const int ay = correct_answer(s, s.x_index(in.z, in.y));
      if (a.choices[j] == 0) {
        add_entry_term(basis, row, basis.index_of_effect(in.y, ay), 1.0, f);
      } else if (a.choices[j] == 1) {
        f.offset += 1.0;
        add_entry_term(basis, row, basis.index_of_effect(in.y, ay), -1.0, f);
      } else {
        throw std::invalid_argument("binarized assignment entries must be 0 or 1");
      }
    }
  }
  return f;
}

namespace {

ConicProblem relaxation_problem(const MomentBasis& basis, const AffineFunctional& objective,
                                std::optional<double> t_value) {
  ConicProblem p;
  p.variable_dim = basis.affine_dim();
  p.objective = objective.weights;
  p.objective_offset = objective.offset;
  p.base = basis.center;
  p.directions = basis.directions;
  if (t_value) {
    const AffineFunctional tf = t_functional(basis);
    p.equalities.push_back({tf.weights, *t_value - tf.offset});
  }
  return p;
}

}  // namespace

AssignmentBound bound_assignment(const MomentBasis& basis, double t,
                                 const GenerationSet& xprime, const Assignment& a,
                                 double tol) {
  if (t < 0.0 || t > 1.0) throw std::invalid_argument("bound_assignment: t must lie in [0,1]");
  const AffineFunctional obj = assignment_objective(basis, xprime, a);
  const ConicProblem prob = relaxation_problem(basis, obj, t);
  const ConicSolution sol = solve(prob, tol);
  AssignmentBound out;
  out.assignment = a;
  out.status = sol.status;
  out.primal = sol.primal_value;
  out.dual = sol.dual_value;
  out.gap = sol.duality_gap;
  out.bound = sol.dual_value + tol;
  if (sol.status == SolveStatus::Infeasible)
    throw InfeasibleError("relaxation admits no point with security parameter t=" +
                          std::to_string(t));
  return out;
}

EntropyBound certify(const MomentBasis& basis, double t, const GenerationSet& xprime,
                     GuessMode mode, const CertifyOptions& opt) {
  const Scenario& s = basis.scenario;
  validate_generation_set(s, xprime);
  const int K = xprime.size();
  const int radix = mode == GuessMode::Full ? s.n_out : 2;
  std::uint64_t total = 1;
  for (int j = 0; j < K; ++j) {
    total *= static_cast<std::uint64_t>(radix);
    if (total > (1ULL << 24))
      throw std::invalid_argument("certify: assignment enumeration too large");
  }

  std::vector<Assignment> assignments(total);
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    Assignment a;
    a.mode = mode;
    a.choices.resize(K);
    std::uint64_t rem = idx;
    for (int j = K - 1; j >= 0; --j) {  // lexicographic: first element most significant
      a.choices[j] = static_cast<int>(rem % radix);
      rem /= radix;
    }
    assignments[idx] = std::move(a);
  }

  std::vector<AssignmentBound> results(total);
  std::vector<std::string> errors(total);
  int threads = opt.threads > 0 ? opt.threads
                                : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min<int>(threads, static_cast<int>(total)));

  std::atomic<std::uint64_t> cursor{0};
  auto worker = [&]() {
    while (true) {
      const std::uint64_t idx = cursor.fetch_add(1);
      if (idx >= total) break;
      try {
        results[idx] = bound_assignment(basis, t, xprime, assignments[idx], opt.tol);
      } catch (const InfeasibleError& e) {
        results[idx].status = SolveStatus::Infeasible;
        errors[idx] = e.what();
      } catch (const std::exception& e) {
        results[idx].status = SolveStatus::Inaccurate;
        errors[idx] = e.what();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }

  for (std::uint64_t idx = 0; idx < total; ++idx) {
    if (results[idx].status == SolveStatus::Infeasible)
      throw InfeasibleError(errors[idx].empty()
                                ? "relaxation admits no point with security parameter t=" +
                                      std::to_string(t)
                                : errors[idx]);
    if (results[idx].status != SolveStatus::Optimal)
      throw SolverError("assignment " + std::to_string(idx) +
                        " did not solve to optimality" +
                        (errors[idx].empty() ? "" : ": " + errors[idx]));
  }

  EntropyBound bound;
  bound.t = t;
  bound.K = K;
  bound.xprime = xprime;
  bound.mode = mode;
  bound.per_assignment = std::move(results);
  bound.solver_tol = opt.tol;
  double best = -std::numeric_limits<double>::infinity();
  for (const AssignmentBound& ab : bound.per_assignment) {
    best = std::max(best, ab.bound);
    bound.max_gap = std::max(bound.max_gap, ab.gap);
  }
  bound.p_star_raw = best / K;
  const double floor_p = mode == GuessMode::Full ? 1.0 / s.n_out : 0.5;
  bound.p_star = std::clamp(bound.p_star_raw, floor_p, 1.0);
  bound.H_bits = min_entropy(bound.p_star);
  bound.basis_meta = basis.meta;
  return bound;
}

double min_entropy(double p_guess) {
  if (!(p_guess > 0.0) || p_guess > 1.0 + 1e-12)
    throw std::invalid_argument("min_entropy: guessing probability must lie in (0, 1]");
  return -std::log2(std::min(p_guess, 1.0));
}

double critical_T(int K) {
  if (K < 1 || K > 16) throw std::invalid_argument("critical_T: K must lie in [1, 16]");
  return (16.0 - K) / 16.0 * 0.75 + K / 16.0 * 0.625;
}

std::vector<CurvePoint> entropy_curve(const MomentBasis& basis, const GenerationSet& xprime,
                                      GuessMode mode, const std::vector<double>& t_grid,
                                      const CertifyOptions& opt) {
  std::vector<CurvePoint> points;
  points.reserve(t_grid.size());
  for (double t : t_grid) {
    CurvePoint pt;
    pt.t = t;
    if (t < 0.0 || t > 1.0) {
      pt.error = "t outside [0,1]";
      points.push_back(std::move(pt));
      continue;
    }
    try {
      pt.bound = certify(basis, t, xprime, mode, opt);
      pt.feasible = true;
    } catch (const InfeasibleError& e) {
      pt.error = e.what();
    } catch (const SolverError& e) {
      pt.error = e.what();
    }
    points.push_back(std::move(pt));
  }
  return points;
}

std::pair<double, double> relaxation_t_range(const MomentBasis& basis, double tol) {
  const AffineFunctional tf = t_functional(basis);
  ConicProblem p = relaxation_problem(basis, tf, std::nullopt);
  const ConicSolution hi = solve(p, tol);
  ConicProblem pneg = p;
  pneg.objective = -p.objective;
  pneg.objective_offset = -p.objective_offset;
  const ConicSolution lo = solve(pneg, tol);
  if (hi.status != SolveStatus::Optimal || lo.status != SolveStatus::Optimal)
    throw SolverError("relaxation_t_range: could not bound the feasible range");
  return {-(lo.dual_value + tol), hi.dual_value + tol};
}

}  // namespace dimcert
