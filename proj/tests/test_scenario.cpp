#include <doctest.h>

#include <dimcert/scenario.hpp>
#include <dimcert/strategy.hpp>

#include "support.hpp"

using namespace dimcert;
using namespace dimcert::testing;

TEST_CASE("qrac scenario shapes and coefficients") {
  const Scenario s4 = make_qrac_scenario(4);
  CHECK(s4.n_prep == 16);
  CHECK(s4.n_meas == 2);
  CHECK(s4.n_out == 4);
  CHECK(s4.dim == 4);
  int nonzero = 0;
  for (int x = 0; x < s4.num_inputs(); ++x)
    for (int b = 0; b < s4.n_out; ++b)
      if (s4.payoff(b, x) != 0.0) {
        CHECK(s4.payoff(b, x) == doctest::Approx(1.0 / 32.0).epsilon(1e-15));
        ++nonzero;
      }
  CHECK(nonzero == 32);
  CHECK(is_rac_like(s4));

  const Scenario s2 = make_qrac_scenario(2);
  CHECK(s2.n_prep == 4);
  CHECK(s2.payoff.maxCoeff() == doctest::Approx(1.0 / 8.0).epsilon(1e-15));

  CHECK_THROWS_AS(make_qrac_scenario(1), std::invalid_argument);
}

TEST_CASE("correct answer is a_y") {
  const Scenario s = make_qrac_scenario(4);
  for (int z = 0; z < s.n_prep; ++z) {
    CHECK(correct_answer(s, s.x_index(z, 0)) == digit0(z, 4));
    CHECK(correct_answer(s, s.x_index(z, 1)) == digit1(z, 4));
  }
}

TEST_CASE("eval_T on reference behaviors") {
  const Scenario s = make_qrac_scenario(4);
  CHECK(eval_T(s, uniform_behavior(s)) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(eval_T(s, correct_behavior(s)) == doctest::Approx(1.0).epsilon(1e-12));
  const Behavior ideal = behavior_of(s, ideal_qrac_strategy(4));
  CHECK(eval_T(s, ideal) == doctest::Approx(0.75).epsilon(1e-11));

  Behavior wrong;
  wrong.p = RMat::Constant(3, s.num_inputs(), 1.0 / 3.0);
  CHECK_THROWS_AS(eval_T(s, wrong), std::invalid_argument);
}

TEST_CASE("eval_T is linear in the behavior") {
  const Scenario s = make_qrac_scenario(3);
  Rng rng(7);
  const Behavior p = random_behavior(s, rng);
  const Behavior q = random_behavior(s, rng);
  for (double alpha : {0.0, 0.25, 0.5, 0.9, 1.0}) {
    Behavior mix;
    mix.p = alpha * p.p + (1.0 - alpha) * q.p;
    const double lhs = eval_T(s, mix);
    const double rhs = alpha * eval_T(s, p) + (1.0 - alpha) * eval_T(s, q);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("default generation set") {
  const Scenario s = make_qrac_scenario(4);
  const GenerationSet g1 = default_generation_set(s, 1);
  REQUIRE(g1.size() == 1);
  CHECK(g1.inputs[0] == Input{0, 0});

  const GenerationSet g2 = default_generation_set(s, 2);
  REQUIRE(g2.size() == 2);
  CHECK(g2.inputs[0] == Input{0, 0});
  CHECK(g2.inputs[1] == Input{1, 1});

  const GenerationSet g16 = default_generation_set(s, 16);
  validate_generation_set(s, g16, /*require_distinct_z=*/true);

  CHECK_THROWS_AS(default_generation_set(s, 17), std::invalid_argument);
  CHECK_THROWS_AS(default_generation_set(s, 0), std::invalid_argument);
}

TEST_CASE("generation set validation") {
  const Scenario s = make_qrac_scenario(4);
  GenerationSet dup;
  dup.inputs = {{0, 0}, {0, 0}};
  CHECK_THROWS_AS(validate_generation_set(s, dup), std::invalid_argument);
  GenerationSet same_z;
  same_z.inputs = {{0, 0}, {0, 1}};
  CHECK_NOTHROW(validate_generation_set(s, same_z));
  CHECK_THROWS_AS(validate_generation_set(s, same_z, true), std::invalid_argument);
}

TEST_CASE("binarize reference behaviors") {
  const Scenario s = make_qrac_scenario(4);
  const Behavior det = binarize(s, correct_behavior(s));
  CHECK(det.p.row(0).minCoeff() == doctest::Approx(1.0));

  const Behavior unif = binarize(s, uniform_behavior(s));
  for (int x = 0; x < s.num_inputs(); ++x)
    CHECK(unif.p(0, x) == doctest::Approx(0.25).epsilon(1e-14));

  // success of every ideal term computed straight from the Born rule
  const Strategy ideal = ideal_qrac_strategy(4);
  const Behavior bin = binarize(s, behavior_of(s, ideal));
  for (int z = 0; z < s.n_prep; ++z)
    for (int y = 0; y < 2; ++y) {
      const int a = y == 0 ? digit0(z, 4) : digit1(z, 4);
      const double born = (ideal.states[z] * ideal.measurements[y][a]).trace().real();
      CHECK(born == doctest::Approx(0.75).epsilon(1e-11));
      CHECK(bin.p(0, s.x_index(z, y)) == doctest::Approx(born).epsilon(1e-13));
    }
}

TEST_CASE("binarized payoff preserves T and binarize is idempotent") {
  const Scenario s = make_qrac_scenario(4);
  const Scenario sb = binary_scenario(s);
  Rng rng(11);
  for (int rep = 0; rep < 10; ++rep) {
    const Behavior p = random_behavior(s, rng);
    const Behavior pb = binarize(s, p);
    CHECK(eval_T(sb, pb) == doctest::Approx(eval_T(s, p)).epsilon(1e-12));
    const Behavior pbb = binarize(sb, pb);
    CHECK((pbb.p - pb.p).cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("scenario hash distinguishes games") {
  CHECK(scenario_hash(make_qrac_scenario(4)) != scenario_hash(make_qrac_scenario(3)));
  const Scenario s = make_qrac_scenario(4);
  CHECK(scenario_hash(s) != scenario_hash(binary_scenario(s)));
}
