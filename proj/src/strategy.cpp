#include "dimcert/strategy.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dimcert {

void validate_strategy(const Scenario& s, const Strategy& st, double tol) {
  if (static_cast<int>(st.states.size()) != s.n_prep)
    throw std::invalid_argument("strategy has " + std::to_string(st.states.size()) +
                                " states, scenario expects " + std::to_string(s.n_prep));
  if (static_cast<int>(st.measurements.size()) != s.n_meas)
    throw std::invalid_argument("strategy has wrong number of measurement settings");
  for (int z = 0; z < s.n_prep; ++z) {
    const CMat& rho = st.states[z];
    const std::string name = "state z=" + std::to_string(z);
    if (rho.rows() != s.dim || rho.cols() != s.dim)
      throw std::invalid_argument(name + ": wrong dimension");
    if (hermiticity_error(rho) > tol)
      throw std::invalid_argument(name + ": not Hermitian within tolerance");
    if (min_eigenvalue(rho) < -tol)
      throw std::invalid_argument(name + ": negative eigenvalue beyond tolerance");
    if (std::abs(rho.trace().real() - 1.0) > tol || std::abs(rho.trace().imag()) > tol)
      throw std::invalid_argument(name + ": trace differs from 1 beyond tolerance");
  }
  for (int y = 0; y < s.n_meas; ++y) {
    if (static_cast<int>(st.measurements[y].size()) != s.n_out)
      throw std::invalid_argument("measurement y=" + std::to_string(y) +
                                  ": wrong number of effects");
    CMat sum = CMat::Zero(s.dim, s.dim);
    for (int b = 0; b < s.n_out; ++b) {
      const CMat& m = st.measurements[y][b];
      const std::string name =
          "effect y=" + std::to_string(y) + " b=" + std::to_string(b);
      if (m.rows() != s.dim || m.cols() != s.dim)
        throw std::invalid_argument(name + ": wrong dimension");
      if (hermiticity_error(m) > tol)
        throw std::invalid_argument(name + ": not Hermitian within tolerance");
      if (min_eigenvalue(m) < -tol)
        throw std::invalid_argument(name + ": negative eigenvalue beyond tolerance");
      sum += m;
    }
    if ((sum - CMat::Identity(s.dim, s.dim)).cwiseAbs().maxCoeff() > tol)
      throw std::invalid_argument("measurement y=" + std::to_string(y) +
                                  ": effects do not sum to the identity");
  }
}

Behavior behavior_of(const Scenario& s, const Strategy& st) {
  validate_strategy(s, st);
  Behavior out;
  out.p = RMat::Zero(s.n_out, s.num_inputs());
  for (int z = 0; z < s.n_prep; ++z)
    for (int y = 0; y < s.n_meas; ++y)
      for (int b = 0; b < s.n_out; ++b)
        out.p(b, s.x_index(z, y)) = (st.states[z] * st.measurements[y][b]).trace().real();
  // clean tiny float excursions so the behavior invariants hold exactly
  for (int x = 0; x < s.num_inputs(); ++x)
    for (int b = 0; b < s.n_out; ++b)
      out.p(b, x) = std::clamp(out.p(b, x), 0.0, 1.0);
  return out;
}

namespace {

CMat fourier_unitary(int d) {
  CMat f(d, d);
  const double w = 2.0 * std::numbers::pi / d;
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k)
      f(j, k) = norm * Cplx(std::cos(w * j * k), std::sin(w * j * k));
  return f;
}

CMat top_eigenvector_projector(const CMat& h) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(h));
  const Eigen::VectorXcd v = es.eigenvectors().col(h.rows() - 1);
  return v * v.adjoint();
}

}  // namespace

Strategy ideal_qrac_strategy(int d) {
  if (d < 2) throw std::invalid_argument("ideal_qrac_strategy: dimension must be at least 2");
  const CMat f = fourier_unitary(d);
  Strategy st;
  st.measurements.resize(2);
  for (int b = 0; b < d; ++b) {
    CMat comp = CMat::Zero(d, d);
    comp(b, b) = 1.0;
    st.measurements[0].push_back(comp);
    st.measurements[1].push_back(f.col(b) * f.col(b).adjoint());
  }
  st.states.reserve(d * d);
  for (int z = 0; z < d * d; ++z) {
    const int a0 = digit0(z, d);
    const int a1 = digit1(z, d);
    Eigen::VectorXcd u = Eigen::VectorXcd::Zero(d);
    u(a0) = 1.0;
    const Eigen::VectorXcd v = f.col(a1);
    const Cplx overlap = u.dot(v);  // <u|v>
    Cplx phase(1.0, 0.0);
    if (std::abs(overlap) > 0.0) phase = std::conj(overlap) / std::abs(overlap);
    Eigen::VectorXcd psi = u + phase * v;
    if (psi.norm() < 1e-8) {
      // anti-aligned superposition: take the best state directly
      st.states.push_back(top_eigenvector_projector(st.measurements[0][a0] +
                                                    st.measurements[1][a1]));
      continue;
    }
    psi.normalize();
    st.states.push_back(psi * psi.adjoint());
  }
  return st;
}

Strategy eigenvector_attack_strategy(const Scenario& s, const GenerationSet& xprime) {
  validate_generation_set(s, xprime, /*require_distinct_z=*/true);
  if (!is_rac_like(s))
    throw std::invalid_argument("eigenvector_attack_strategy: not a RAC scenario");
  Strategy st = ideal_qrac_strategy(s.dim);
  for (const Input& in : xprime.inputs) {
    const int a = correct_answer(s, s.x_index(in.z, in.y));
    const CMat& effect = st.measurements[in.y][a];
    // ideal measurements are rank-1 projectors, so the effect itself is the
    // deterministic eigenvector state
    st.states[in.z] = effect;
  }
  return st;
}

namespace {

// Non-decreasing output sequences of length d over [0, d): canonical decoder
// representatives under message relabeling.
void enumerate_canonical_decoders(int d, std::vector<std::vector<int>>& out) {
  std::vector<int> cur(d, 0);
  while (true) {
    out.push_back(cur);
    int i = d - 1;
    while (i >= 0 && cur[i] == d - 1) --i;
    if (i < 0) break;
    const int v = cur[i] + 1;
    for (int j = i; j < d; ++j) cur[j] = v;
  }
}

}  // namespace

ClassicalOptimum classical_optimum(const Scenario& s) {
  if (!is_rac_like(s) || s.n_meas != 2 || s.n_prep != s.n_out * s.n_out)
    throw std::invalid_argument("classical_optimum: expects a two-input RAC scenario");
  const int d = s.n_out;
  if (d > 6)
    throw std::invalid_argument(
        "classical_optimum: enumeration limited to d <= 6; use the see-saw heuristic");

  std::vector<std::vector<int>> canonical;
  enumerate_canonical_decoders(d, canonical);
  std::vector<int> d1(d);

  int best_score = -1;
  ClassicalStrategy best;
  // score(z) = max_m [D0(m)=a0] + [D1(m)=a1]; T is invariant under a common
  // relabeling of messages, so D0 runs over canonical representatives only.
  for (const std::vector<int>& d0 : canonical) {
    std::fill(d1.begin(), d1.end(), 0);
    while (true) {
      int score = 0;
      for (int z = 0; z < s.n_prep; ++z) {
        const int a0 = digit0(z, d);
        const int a1 = digit1(z, d);
        int zbest = 0;
        for (int m = 0; m < d; ++m) {
          const int v = (d0[m] == a0 ? 1 : 0) + (d1[m] == a1 ? 1 : 0);
          if (v > zbest) zbest = v;
          if (zbest == 2) break;
        }
        score += zbest;
      }
      if (score > best_score) {
        best_score = score;
        best.decodings = {d0, d1};
      }
      int i = d - 1;
      while (i >= 0 && d1[i] == d - 1) --i;
      if (i < 0) break;
      ++d1[i];
      for (int j = i + 1; j < d; ++j) d1[j] = 0;
    }
  }

  best.encoding.resize(s.n_prep);
  for (int z = 0; z < s.n_prep; ++z) {
    const int a0 = digit0(z, d);
    const int a1 = digit1(z, d);
    int bm = 0, bv = -1;
    for (int m = 0; m < d; ++m) {
      const int v = (best.decodings[0][m] == a0 ? 1 : 0) + (best.decodings[1][m] == a1 ? 1 : 0);
      if (v > bv) {
        bv = v;
        bm = m;
      }
    }
    best.encoding[z] = bm;
  }

  ClassicalOptimum result;
  result.value = static_cast<double>(best_score) / (2.0 * d * d);
  result.strategy = best;
  return result;
}

Strategy classical_to_strategy(const Scenario& s, const ClassicalStrategy& cs) {
  const int d = s.dim;
  Strategy st;
  st.states.reserve(s.n_prep);
  for (int z = 0; z < s.n_prep; ++z) {
    CMat rho = CMat::Zero(d, d);
    rho(cs.encoding[z], cs.encoding[z]) = 1.0;
    st.states.push_back(rho);
  }
  st.measurements.resize(s.n_meas);
  for (int y = 0; y < s.n_meas; ++y) {
    st.measurements[y].assign(s.n_out, CMat::Zero(d, d));
    for (int m = 0; m < d; ++m) st.measurements[y][cs.decodings[y][m]](m, m) += 1.0;
  }
  return st;
}

double guessing_probability(const Scenario& s, const Behavior& p,
                            const GenerationSet& xprime, GuessMode mode) {
  validate_generation_set(s, xprime);
  if (p.n_out() != s.n_out || p.num_inputs() != s.num_inputs())
    throw std::invalid_argument("guessing_probability: behavior shape mismatch");
  double total = 0.0;
  for (const Input& in : xprime.inputs) {
    const int x = s.x_index(in.z, in.y);
    if (mode == GuessMode::Full) {
      total += p.p.col(x).maxCoeff();
    } else {
      const double success = p.p(correct_answer(s, x), x);
      total += std::max(success, 1.0 - success);
    }
  }
  return total / xprime.size();
}

Strategy random_strategy(const Scenario& s, Rng& rng) {
  Strategy st;
  st.states.reserve(s.n_prep);
  for (int z = 0; z < s.n_prep; ++z) st.states.push_back(rng.random_pure_density(s.dim));
  st.measurements.resize(s.n_meas);
  const std::vector<int> ranks(static_cast<std::size_t>(s.n_out),
                               s.dim / s.n_out);  // used only when n_out divides dim
  for (int y = 0; y < s.n_meas; ++y) {
    if (s.n_out * (s.dim / s.n_out) == s.dim && s.dim / s.n_out >= 1) {
      st.measurements[y] = rng.projective_povm(s.dim, ranks);
    } else {
      st.measurements[y] = rng.general_povm(s.dim, s.n_out);
    }
  }
  return st;
}

}  // namespace dimcert
