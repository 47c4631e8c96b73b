#include <doctest.h>

#include <dimcert/certifier.hpp>
#include <dimcert/strategy.hpp>

#include <numbers>

#include "support.hpp"

using namespace dimcert;
using namespace dimcert::testing;

TEST_CASE("behavior of fixed-state strategies") {
  const Scenario s = make_qrac_scenario(2);
  Strategy st;
  CMat ket0 = CMat::Zero(2, 2);
  ket0(0, 0) = 1.0;
  st.states.assign(s.n_prep, ket0);
  std::vector<CMat> comp = {ket0, CMat::Identity(2, 2) - ket0};
  st.measurements = {comp, comp};
  const Behavior q = behavior_of(s, st);
  for (int z = 0; z < s.n_prep; ++z)
    for (int y = 0; y < 2; ++y) CHECK(q.p(0, s.x_index(z, y)) == doctest::Approx(1.0));
}

TEST_CASE("maximally mixed states read out effect traces") {
  const Scenario s = make_qrac_scenario(4);
  Rng rng(5);
  Strategy st = random_strategy(s, rng);
  for (CMat& rho : st.states) rho = CMat::Identity(4, 4) / 4.0;
  const Behavior q = behavior_of(s, st);
  for (int z = 0; z < s.n_prep; ++z)
    for (int y = 0; y < 2; ++y)
      for (int b = 0; b < 4; ++b) {
        const double tb = st.measurements[y][b].trace().real();
        CHECK(q.p(b, s.x_index(z, y)) == doctest::Approx(tb / 4.0).epsilon(1e-12));
      }
}

TEST_CASE("strategy validation names the offending object") {
  const Scenario s = make_qrac_scenario(2);
  Strategy st = ideal_qrac_strategy(2);
  st.states[3] *= 2.0;  // trace 2
  try {
    behavior_of(s, st);
    FAIL("expected a validation error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("state z=3") != std::string::npos);
  }
  Strategy st2 = ideal_qrac_strategy(2);
  st2.measurements[1][0] *= 1.5;
  try {
    behavior_of(s, st2);
    FAIL("expected a validation error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("y=1") != std::string::npos);
  }
}

TEST_CASE("ideal strategy values") {
  const Scenario s4 = make_qrac_scenario(4);
  CHECK(eval_T(s4, behavior_of(s4, ideal_qrac_strategy(4))) ==
        doctest::Approx(0.75).epsilon(1e-9));

  const Scenario s2 = make_qrac_scenario(2);
  const double cos2 = std::pow(std::cos(std::numbers::pi / 8.0), 2.0);
  CHECK(eval_T(s2, behavior_of(s2, ideal_qrac_strategy(2))) ==
        doctest::Approx(cos2).epsilon(1e-12));

  const Scenario s3 = make_qrac_scenario(3);
  const double expect3 = 0.5 * (1.0 + 1.0 / std::sqrt(3.0));
  CHECK(eval_T(s3, behavior_of(s3, ideal_qrac_strategy(3))) ==
        doctest::Approx(expect3).epsilon(1e-11));

  CHECK_THROWS_AS(ideal_qrac_strategy(1), std::invalid_argument);
}

TEST_CASE("eigenvector attack reaches the closed-form T") {
  const Scenario s = make_qrac_scenario(4);
  for (int K = 1; K <= 16; ++K) {
    const GenerationSet xp = default_generation_set(s, K);
    const Strategy st = eigenvector_attack_strategy(s, xp);
    const Behavior q = behavior_of(s, st);
    CHECK(eval_T(s, q) == doctest::Approx(critical_T(K)).epsilon(1e-12));
    for (const Input& in : xp.inputs)
      CHECK(q.p(correct_answer(s, s.x_index(in.z, in.y)), s.x_index(in.z, in.y)) ==
            doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("attack K=1: corrupted input scores 1 and 1/4 across settings") {
  const Scenario s = make_qrac_scenario(4);
  const GenerationSet xp = default_generation_set(s, 1);  // (z=0, y=0)
  const Behavior q = behavior_of(s, eigenvector_attack_strategy(s, xp));
  CHECK(q.p(correct_answer(s, s.x_index(0, 0)), s.x_index(0, 0)) == doctest::Approx(1.0));
  CHECK(q.p(correct_answer(s, s.x_index(0, 1)), s.x_index(0, 1)) ==
        doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("attack rejects duplicate preparations") {
  const Scenario s = make_qrac_scenario(4);
  GenerationSet bad;
  bad.inputs = {{0, 0}, {0, 1}};
  CHECK_THROWS_AS(eigenvector_attack_strategy(s, bad), std::invalid_argument);
}

TEST_CASE("classical optimum by brute force") {
  const ClassicalOptimum c4 = classical_optimum(make_qrac_scenario(4));
  CHECK(c4.value == 0.625);
  const ClassicalOptimum c2 = classical_optimum(make_qrac_scenario(2));
  CHECK(c2.value == 0.75);
  CHECK(c4.value == 20.0 / 32.0);
}

TEST_CASE("classical strategy rescored by eval_T matches exactly") {
  const Scenario s = make_qrac_scenario(4);
  const ClassicalOptimum c = classical_optimum(s);
  const Strategy st = classical_to_strategy(s, c.strategy);
  CHECK(eval_T(s, behavior_of(s, st)) == c.value);
}

TEST_CASE("classical value is stable under outcome relabeling of the game") {
  const Scenario s = make_qrac_scenario(3);
  const ClassicalOptimum c = classical_optimum(s);
  // relabel outcomes of one measurement in the game and the strategy together
  const std::vector<int> perm = {2, 0, 1};
  for (int y_perm = 0; y_perm < 2; ++y_perm) {
    Scenario relabeled = s;
    relabeled.payoff = RMat::Zero(s.n_out, s.num_inputs());
    for (int x = 0; x < s.num_inputs(); ++x) {
      const int a = correct_answer(s, x);
      const int a_new = s.y_of(x) == y_perm ? perm[a] : a;
      relabeled.payoff(a_new, x) = 1.0 / (s.n_prep * s.n_meas);
    }
    ClassicalStrategy cs = c.strategy;
    for (int& b : cs.decodings[y_perm]) b = perm[b];
    const Strategy st = classical_to_strategy(relabeled, cs);
    // 1/18 is not dyadic, so summation order costs an ulp here
    CHECK(eval_T(relabeled, behavior_of(relabeled, st)) ==
          doctest::Approx(c.value).epsilon(1e-15));
  }
}

TEST_CASE("classical optimum rejects large dimensions") {
  CHECK_THROWS_AS(classical_optimum(make_qrac_scenario(7)), std::invalid_argument);
}

TEST_CASE("guessing probability") {
  const Scenario s = make_qrac_scenario(4);
  const GenerationSet xp = default_generation_set(s, 3);

  CHECK(guessing_probability(s, correct_behavior(s), xp, GuessMode::Full) == doctest::Approx(1.0));
  CHECK(guessing_probability(s, correct_behavior(s), xp, GuessMode::Binarized) ==
        doctest::Approx(1.0));

  const Behavior unif = uniform_behavior(s);
  CHECK(guessing_probability(s, unif, xp, GuessMode::Full) == doctest::Approx(0.25));
  CHECK(guessing_probability(s, unif, xp, GuessMode::Binarized) == doctest::Approx(0.75));

  const GenerationSet x1 = default_generation_set(s, 1);
  const Behavior attack = behavior_of(s, eigenvector_attack_strategy(s, x1));
  CHECK(guessing_probability(s, attack, x1, GuessMode::Full) == doctest::Approx(1.0));
  CHECK(guessing_probability(s, attack, x1, GuessMode::Binarized) == doctest::Approx(1.0));
}

TEST_CASE("random strategies produce valid behaviors") {
  const Scenario s = make_qrac_scenario(4);
  Rng rng(99);
  for (int rep = 0; rep < 100; ++rep) {
    const Behavior q = behavior_of(s, random_strategy(s, rng));
    CHECK_NOTHROW(validate_behavior(s, q));
  }
}
