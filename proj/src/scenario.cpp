#include "dimcert/scenario.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace dimcert {

Scenario make_qrac_scenario(int d) {
  if (d < 2) throw std::invalid_argument("make_qrac_scenario: dimension must be at least 2");
  Scenario s;
  s.dim = d;
  s.n_prep = d * d;
  s.n_meas = 2;
  s.n_out = d;
  s.payoff = RMat::Zero(s.n_out, s.num_inputs());
  const double c = 1.0 / (2.0 * d * d);
  for (int z = 0; z < s.n_prep; ++z) {
    const int a0 = digit0(z, d);
    const int a1 = digit1(z, d);
    s.payoff(a0, s.x_index(z, 0)) = c;
    s.payoff(a1, s.x_index(z, 1)) = c;
  }
  return s;
}

bool is_rac_like(const Scenario& s) {
  const double c = 1.0 / (s.n_prep * s.n_meas);
  for (int x = 0; x < s.num_inputs(); ++x) {
    int positive = 0;
    for (int b = 0; b < s.n_out; ++b) {
      const double v = s.payoff(b, x);
      if (v < 0.0) return false;
      if (v > 0.0) {
        if (std::abs(v - c) > 1e-12) return false;
        ++positive;
      }
    }
    if (positive != 1) return false;
  }
  return true;
}

int correct_answer(const Scenario& s, int x) {
  int answer = -1;
  for (int b = 0; b < s.n_out; ++b) {
    if (s.payoff(b, x) > 0.0) {
      if (answer >= 0)
        throw std::invalid_argument("correct_answer: input " + std::to_string(x) +
                                    " has more than one scoring outcome");
      answer = b;
    }
  }
  if (answer < 0)
    throw std::invalid_argument("correct_answer: input " + std::to_string(x) +
                                " has no scoring outcome");
  return answer;
}

void validate_behavior(const Scenario& s, const Behavior& p, double tol) {
  if (p.n_out() != s.n_out || p.num_inputs() != s.num_inputs())
    throw std::invalid_argument("behavior shape does not match scenario");
  for (int x = 0; x < s.num_inputs(); ++x) {
    double total = 0.0;
    for (int b = 0; b < s.n_out; ++b) {
      const double v = p.p(b, x);
      if (v < -tol || v > 1.0 + tol)
        throw std::invalid_argument("behavior entry out of [0,1] at b=" + std::to_string(b) +
                                    " x=" + std::to_string(x));
      total += v;
    }
    if (std::abs(total - 1.0) > tol)
      throw std::invalid_argument("behavior not normalized at x=" + std::to_string(x) +
                                  " (sum=" + std::to_string(total) + ")");
  }
}

double eval_T(const Scenario& s, const Behavior& p) {
  if (p.n_out() != s.n_out || p.num_inputs() != s.num_inputs())
    throw std::invalid_argument("eval_T: behavior shape does not match scenario");
  return (s.payoff.array() * p.p.array()).sum();
}

GenerationSet default_generation_set(const Scenario& s, int K) {
  if (K < 1 || K > s.n_prep)
    throw std::invalid_argument("default_generation_set: K must be in [1, " +
                                std::to_string(s.n_prep) + "]");
  GenerationSet g;
  g.inputs.reserve(K);
  for (int j = 0; j < K; ++j) g.inputs.push_back({j, j % s.n_meas});
  return g;
}

void validate_generation_set(const Scenario& s, const GenerationSet& xprime,
                             bool require_distinct_z) {
  if (xprime.inputs.empty())
    throw std::invalid_argument("generation set must not be empty");
  std::set<std::pair<int, int>> seen;
  std::set<int> seen_z;
  for (const Input& in : xprime.inputs) {
    if (in.z < 0 || in.z >= s.n_prep || in.y < 0 || in.y >= s.n_meas)
      throw std::invalid_argument("generation set input out of range: z=" +
                                  std::to_string(in.z) + " y=" + std::to_string(in.y));
    if (!seen.insert({in.z, in.y}).second)
      throw std::invalid_argument("generation set contains duplicate inputs");
    if (!seen_z.insert(in.z).second && require_distinct_z)
      throw std::invalid_argument("generation set has repeated preparation index z=" +
                                  std::to_string(in.z));
  }
}

Behavior binarize(const Scenario& s, const Behavior& p) {
  if (!is_rac_like(s))
    throw std::invalid_argument("binarize: scenario has no unique scoring outcome per input");
  validate_behavior(s, p);
  Behavior out;
  out.p = RMat::Zero(2, s.num_inputs());
  for (int x = 0; x < s.num_inputs(); ++x) {
    const double success = p.p(correct_answer(s, x), x);
    out.p(0, x) = success;
    out.p(1, x) = 1.0 - success;
  }
  return out;
}

Scenario binary_scenario(const Scenario& s) {
  if (!is_rac_like(s))
    throw std::invalid_argument("binary_scenario: scenario has no unique scoring outcome per input");
  Scenario b = s;
  b.n_out = 2;
  b.payoff = RMat::Zero(2, s.num_inputs());
  const double c = 1.0 / (s.n_prep * s.n_meas);
  for (int x = 0; x < s.num_inputs(); ++x) b.payoff(0, x) = c;
  return b;
}

std::uint64_t scenario_hash(const Scenario& s) {
  std::uint64_t h = fnv1a(&s.n_prep, sizeof(s.n_prep));
  h = fnv1a(&s.n_meas, sizeof(s.n_meas), h);
  h = fnv1a(&s.n_out, sizeof(s.n_out), h);
  h = fnv1a(&s.dim, sizeof(s.dim), h);
  for (int x = 0; x < s.num_inputs(); ++x)
    for (int b = 0; b < s.n_out; ++b) {
      const double v = s.payoff(b, x);
      h = fnv1a(&v, sizeof(v), h);
    }
  return h;
}

}  // namespace dimcert
