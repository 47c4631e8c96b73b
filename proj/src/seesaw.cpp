#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dimcert/sdp.hpp"
#include "dimcert/strategy.hpp"

namespace dimcert {

namespace {

CMat top_eigenvector_projector(const CMat& h) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(h));
  const Eigen::VectorXcd v = es.eigenvectors().col(h.rows() - 1);
  return v * v.adjoint();
}

double povm_value(const std::vector<CMat>& effects, const std::vector<CMat>& weights) {
  double v = 0.0;
  for (std::size_t b = 0; b < effects.size(); ++b)
    v += (effects[b] * weights[b]).trace().real();
  return v;
}

// Exact solution when all weights are diagonal in a common eigenbasis: give
// each eigenvector to the outcome with the largest diagonal weight.
bool try_commuting_povm(const std::vector<CMat>& weights, std::vector<CMat>& out) {
  const int d = static_cast<int>(weights[0].rows());
  const int outcomes = static_cast<int>(weights.size());
  CMat probe = CMat::Zero(d, d);
  double coeff = 1.0;
  for (int b = 0; b < outcomes; ++b, coeff *= 1.6180339887498949)
    probe += coeff * weights[b];
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(probe));
  const CMat u = es.eigenvectors();
  double scale = 1e-30;
  std::vector<CMat> rotated(outcomes);
  for (int b = 0; b < outcomes; ++b) {
    rotated[b] = u.adjoint() * weights[b] * u;
    scale = std::max(scale, rotated[b].cwiseAbs().maxCoeff());
  }
  for (int b = 0; b < outcomes; ++b) {
    CMat off = rotated[b];
    off.diagonal().setZero();
    if (off.cwiseAbs().maxCoeff() > 1e-11 * scale) return false;
  }
  out.assign(outcomes, CMat::Zero(d, d));
  for (int k = 0; k < d; ++k) {
    int best = 0;
    double bv = rotated[0](k, k).real();
    for (int b = 1; b < outcomes; ++b) {
      const double v = rotated[b](k, k).real();
      if (v > bv) {
        bv = v;
        best = b;
      }
    }
    out[best] += u.col(k) * u.col(k).adjoint();
  }
  for (CMat& m : out) m = hermitize(m);
  return true;
}

}  // namespace

std::vector<CMat> optimal_povm(const std::vector<CMat>& weights, double* value) {
  if (weights.size() < 2) throw std::invalid_argument("optimal_povm: need at least 2 outcomes");
  const int d = static_cast<int>(weights[0].rows());
  const int outcomes = static_cast<int>(weights.size());

  std::vector<CMat> effects;
  if (!try_commuting_povm(weights, effects)) {
    // conic step: variables are the first (outcomes-1) effects in a Hermitian
    // basis, the last effect closes the resolution of the identity
    const std::vector<CMat> basis = hermitian_basis(d);
    const int per = static_cast<int>(basis.size());
    const int last = outcomes - 1;
    ConicProblem prob;
    prob.variable_dim = per * last;
    prob.objective = RVec::Zero(prob.variable_dim);
    const int bd = outcomes * d;
    prob.base = CMat::Zero(bd, bd);
    prob.base.block(last * d, last * d, d, d) = CMat::Identity(d, d);
    prob.objective_offset = weights[last].trace().real();
    prob.directions.reserve(prob.variable_dim);
    for (int b = 0; b < last; ++b)
      for (int k = 0; k < per; ++k) {
        CMat dir = CMat::Zero(bd, bd);
        dir.block(b * d, b * d, d, d) = basis[k];
        dir.block(last * d, last * d, d, d) = -basis[k];
        prob.directions.push_back(dir);
        prob.objective(b * per + k) =
            (basis[k] * (weights[b] - weights[last])).trace().real();
      }
    const ConicSolution sol = solve(prob, 1e-9);
    if (sol.status == SolveStatus::Infeasible)
      throw SolverError("optimal_povm: conic step reported infeasible");
    effects.assign(outcomes, CMat::Zero(d, d));
    for (int b = 0; b < last; ++b)
      for (int k = 0; k < per; ++k)
        effects[b] += sol.lambda(b * per + k) * basis[k];
    effects[last] = CMat::Identity(d, d);
    for (int b = 0; b < last; ++b) effects[last] -= effects[b];
    for (CMat& m : effects) m = hermitize(m);
    // absorb solver-level negativity by mixing toward the uniform POVM
    double min_eig = 0.0;
    for (const CMat& m : effects) min_eig = std::min(min_eig, min_eigenvalue(m));
    if (min_eig < 0.0) {
      const double theta = std::min(1.0, -min_eig * outcomes * 1.01 + 1e-14);
      const CMat unif = CMat::Identity(d, d) / static_cast<double>(outcomes);
      for (CMat& m : effects) m = (1.0 - theta) * m + theta * unif;
    }
  }
  if (value) *value = povm_value(effects, weights);
  return effects;
}

namespace {

double strategy_T(const Scenario& s, const Strategy& st) {
  double t = 0.0;
  for (int z = 0; z < s.n_prep; ++z)
    for (int y = 0; y < s.n_meas; ++y)
      for (int b = 0; b < s.n_out; ++b) {
        const double c = s.payoff(b, s.x_index(z, y));
        if (c != 0.0) t += c * (st.states[z] * st.measurements[y][b]).trace().real();
      }
  return t;
}

void seesaw_state_step(const Scenario& s, Strategy& st) {
  for (int z = 0; z < s.n_prep; ++z) {
    CMat a = CMat::Zero(s.dim, s.dim);
    for (int y = 0; y < s.n_meas; ++y)
      for (int b = 0; b < s.n_out; ++b) {
        const double c = s.payoff(b, s.x_index(z, y));
        if (c != 0.0) a += c * st.measurements[y][b];
      }
    if (a.cwiseAbs().maxCoeff() > 0.0) st.states[z] = top_eigenvector_projector(a);
  }
}

bool seesaw_measurement_step(const Scenario& s, Strategy& st) {
  bool changed = false;
  for (int y = 0; y < s.n_meas; ++y) {
    std::vector<CMat> weights(s.n_out, CMat::Zero(s.dim, s.dim));
    for (int b = 0; b < s.n_out; ++b)
      for (int z = 0; z < s.n_prep; ++z) {
        const double c = s.payoff(b, s.x_index(z, y));
        if (c != 0.0) weights[b] += c * st.states[z];
      }
    const double current = povm_value(st.measurements[y], weights);
    double candidate_value = 0.0;
    std::vector<CMat> candidate = optimal_povm(weights, &candidate_value);
    if (candidate_value > current) {
      st.measurements[y] = std::move(candidate);
      changed = true;
    }
  }
  return changed;
}

}  // namespace

SeesawResult seesaw_max_T(const Scenario& s, const SeesawOptions& opt) {
  SeesawResult best;
  best.T = -1.0;
  for (int restart = 0; restart < std::max(1, opt.restarts); ++restart) {
    Rng rng(derive_seed(opt.seed, static_cast<std::uint64_t>(restart)));
    Strategy st = random_strategy(s, rng);
    std::vector<double> trace;
    double t_cur = strategy_T(s, st);
    trace.push_back(t_cur);
    int iters = 0;
    for (; iters < opt.max_iterations; ++iters) {
      Strategy candidate = st;
      seesaw_state_step(s, candidate);
      double t_new = strategy_T(s, candidate);
      if (t_new >= t_cur) {
        st = std::move(candidate);
        t_cur = t_new;
      }
      Strategy mcand = st;
      if (seesaw_measurement_step(s, mcand)) {
        t_new = strategy_T(s, mcand);
        if (t_new >= t_cur) {
          st = std::move(mcand);
          t_cur = t_new;
        }
      }
      trace.push_back(t_cur);
      if (trace.size() >= 2 && t_cur - trace[trace.size() - 2] < opt.improvement_tol) break;
    }
    if (t_cur > best.T) {
      best.T = t_cur;
      best.strategy = st;
      best.iterations = iters + 1;
      best.t_trace = std::move(trace);
    }
  }
  return best;
}

namespace {

struct AttackObjective {
  const Scenario* s;
  const GenerationSet* xprime;
  GuessMode mode;
  double t_target;
  double mu;

  double guess_part(const Strategy& st) const {
    const Behavior q = behavior_of(*s, st);
    return guessing_probability(*s, q, *xprime, mode);
  }
  double combined(const Strategy& st) const {
    const double t = strategy_T(*s, st);
    return guess_part(st) + mu * std::min(0.0, t - t_target);
  }
};

// outcome guesses maximizing the current per-input probability
std::vector<int> best_assignment(const Scenario& s, const Behavior& q,
                                 const GenerationSet& xprime, GuessMode mode) {
  std::vector<int> choice;
  choice.reserve(xprime.inputs.size());
  for (const Input& in : xprime.inputs) {
    const int x = s.x_index(in.z, in.y);
    if (mode == GuessMode::Full) {
      int b_best = 0;
      q.p.col(x).maxCoeff(&b_best);
      choice.push_back(b_best);
    } else {
      const double success = q.p(correct_answer(s, x), x);
      choice.push_back(success >= 1.0 - success ? 0 : 1);
    }
  }
  return choice;
}

void attack_state_step(const Scenario& s, const GenerationSet& xprime, GuessMode mode,
                       const std::vector<int>& assign, double mu, bool with_penalty,
                       Strategy& st) {
  const double k_inv = 1.0 / xprime.size();
  for (int z = 0; z < s.n_prep; ++z) {
    CMat a = CMat::Zero(s.dim, s.dim);
    for (std::size_t j = 0; j < xprime.inputs.size(); ++j) {
      const Input& in = xprime.inputs[j];
      if (in.z != z) continue;
      if (mode == GuessMode::Full) {
        a += k_inv * st.measurements[in.y][assign[j]];
      } else {
        const int ay = correct_answer(s, s.x_index(in.z, in.y));
        if (assign[j] == 0)
          a += k_inv * st.measurements[in.y][ay];
        else
          a += k_inv * (CMat::Identity(s.dim, s.dim) - st.measurements[in.y][ay]);
      }
    }
    if (with_penalty)
      for (int y = 0; y < s.n_meas; ++y)
        for (int b = 0; b < s.n_out; ++b) {
          const double c = s.payoff(b, s.x_index(z, y));
          if (c != 0.0) a += mu * c * st.measurements[y][b];
        }
    if (a.cwiseAbs().maxCoeff() > 0.0) st.states[z] = top_eigenvector_projector(a);
  }
}

void attack_measurement_step(const Scenario& s, const GenerationSet& xprime, GuessMode mode,
                             const std::vector<int>& assign, double mu, bool with_penalty,
                             Strategy& st) {
  const double k_inv = 1.0 / xprime.size();
  for (int y = 0; y < s.n_meas; ++y) {
    std::vector<CMat> weights(s.n_out, CMat::Zero(s.dim, s.dim));
    for (std::size_t j = 0; j < xprime.inputs.size(); ++j) {
      const Input& in = xprime.inputs[j];
      if (in.y != y) continue;
      if (mode == GuessMode::Full) {
        weights[assign[j]] += k_inv * st.states[in.z];
      } else {
        const int ay = correct_answer(s, s.x_index(in.z, in.y));
        if (assign[j] == 0) {
          weights[ay] += k_inv * st.states[in.z];
        } else {
          for (int b = 0; b < s.n_out; ++b)
            if (b != ay) weights[b] += k_inv * st.states[in.z];
        }
      }
    }
    if (with_penalty)
      for (int b = 0; b < s.n_out; ++b)
        for (int z = 0; z < s.n_prep; ++z) {
          const double c = s.payoff(b, s.x_index(z, y));
          if (c != 0.0) weights[b] += mu * c * st.states[z];
        }
    bool nonzero = false;
    for (const CMat& w : weights)
      if (w.cwiseAbs().maxCoeff() > 0.0) nonzero = true;
    if (!nonzero) continue;
    st.measurements[y] = optimal_povm(weights);
  }
}

}  // namespace

AttackResult seesaw_attack(const Scenario& s, const GenerationSet& xprime, GuessMode mode,
                           double t_target, const AttackOptions& opt) {
  validate_generation_set(s, xprime);
  AttackResult best;
  best.p_guess = -1.0;

  double mu = 10.0;
  for (int round = 0; round < 5; ++round, mu *= 2.0) {
    AttackObjective obj{&s, &xprime, mode, t_target, mu};
    for (int restart = 0; restart < std::max(1, opt.restarts); ++restart) {
      Strategy st;
      if (restart == 0) {
        try {
          st = eigenvector_attack_strategy(s, xprime);
        } catch (const std::invalid_argument&) {
          st = ideal_qrac_strategy(s.dim);
        }
      } else if (restart == 1) {
        st = ideal_qrac_strategy(s.dim);
      } else {
        Rng rng(derive_seed(opt.seed, (static_cast<std::uint64_t>(round) << 32) + restart));
        st = random_strategy(s, rng);
      }
      double value = obj.combined(st);
      for (int iter = 0; iter < opt.max_iterations; ++iter) {
        const Behavior q = behavior_of(s, st);
        const std::vector<int> assign = best_assignment(s, q, xprime, mode);
        const bool violating = strategy_T(s, st) < t_target;

        Strategy cand = st;
        attack_state_step(s, xprime, mode, assign, mu, violating, cand);
        double cand_value = obj.combined(cand);
        if (cand_value >= value) {
          st = std::move(cand);
          value = cand_value;
        }
        Strategy mcand = st;
        attack_measurement_step(s, xprime, mode, assign, mu,
                                strategy_T(s, st) < t_target, mcand);
        cand_value = obj.combined(mcand);
        const double before = value;
        if (cand_value >= value) {
          st = std::move(mcand);
          value = cand_value;
        }
        if (value - before < 1e-12 && iter > 2) break;
      }
      const double t_final = strategy_T(s, st);
      const double p_final = obj.guess_part(st);
      const bool reached = t_final >= t_target - opt.t_slack;
      const bool better = (reached && !best.reached_target) ||
                          (reached == best.reached_target && p_final > best.p_guess);
      if (better) {
        best.strategy = st;
        best.T = t_final;
        best.p_guess = p_final;
        best.reached_target = reached;
        best.penalty_rounds = round + 1;
      }
    }
    if (best.reached_target) break;
  }
  return best;
}

}  // namespace dimcert
