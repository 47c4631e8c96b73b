// Shared helpers for the unit suites.
#pragma once

#include <dimcert/random.hpp>
#include <dimcert/scenario.hpp>

namespace dimcert::testing {

inline Behavior uniform_behavior(const Scenario& s) {
  Behavior b;
  b.p = RMat::Constant(s.n_out, s.num_inputs(), 1.0 / s.n_out);
  return b;
}

// all-correct deterministic behavior for RAC-like scenarios
inline Behavior correct_behavior(const Scenario& s) {
  Behavior b;
  b.p = RMat::Zero(s.n_out, s.num_inputs());
  for (int x = 0; x < s.num_inputs(); ++x) b.p(correct_answer(s, x), x) = 1.0;
  return b;
}

inline Behavior random_behavior(const Scenario& s, Rng& rng) {
  Behavior b;
  b.p = RMat::Zero(s.n_out, s.num_inputs());
  for (int x = 0; x < s.num_inputs(); ++x) {
    double total = 0.0;
    for (int o = 0; o < s.n_out; ++o) {
      const double e = -std::log(1.0 - rng.uniform());
      b.p(o, x) = e;
      total += e;
    }
    b.p.col(x) /= total;
  }
  return b;
}

}  // namespace dimcert::testing
