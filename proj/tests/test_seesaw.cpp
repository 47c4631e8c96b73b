#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <dimcert/certifier.hpp>
#include <dimcert/strategy.hpp>

#include <numbers>

using namespace dimcert;

namespace {

// Helstrom value for two-outcome discrimination: tr(C1) + sum of positive
// eigenvalues of (C0 - C1). Independent oracle for the conic POVM step.
double helstrom_value(const CMat& c0, const CMat& c1) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(c0 - c1), Eigen::EigenvaluesOnly);
  double v = c1.trace().real();
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    v += std::max(0.0, es.eigenvalues()(i));
  return v;
}

void check_povm(const std::vector<CMat>& effects, double tol = 1e-7) {
  const int d = static_cast<int>(effects[0].rows());
  CMat sum = CMat::Zero(d, d);
  for (const CMat& m : effects) {
    CHECK(min_eigenvalue(m) >= -tol);
    sum += m;
  }
  CHECK((sum - CMat::Identity(d, d)).cwiseAbs().maxCoeff() <= tol);
}

}  // namespace

TEST_CASE("optimal_povm matches Helstrom on two outcomes") {
  Rng rng(2024);
  for (int rep = 0; rep < 8; ++rep) {
    const int d = 2 + rep % 3;
    CMat c0 = rng.gaussian_matrix(d, d);
    c0 = c0 * c0.adjoint();
    CMat c1 = rng.gaussian_matrix(d, d);
    c1 = c1 * c1.adjoint();
    double value = 0.0;
    const std::vector<CMat> effects = optimal_povm({c0, c1}, &value);
    check_povm(effects);
    CHECK(value == doctest::Approx(helstrom_value(c0, c1)).epsilon(5e-7));
  }
}

TEST_CASE("optimal_povm on commuting weights picks the pointwise max") {
  const int d = 4;
  std::vector<CMat> weights;
  RMat diags(3, d);
  diags << 0.9, 0.1, 0.5, 0.3,
           0.2, 0.8, 0.5, 0.1,
           0.1, 0.1, 0.2, 0.9;
  for (int b = 0; b < 3; ++b) {
    CMat c = CMat::Zero(d, d);
    for (int k = 0; k < d; ++k) c(k, k) = diags(b, k);
    weights.push_back(c);
  }
  double value = 0.0;
  const std::vector<CMat> effects = optimal_povm(weights, &value);
  check_povm(effects, 1e-12);
  double expect = 0.0;
  for (int k = 0; k < d; ++k) expect += diags.col(k).maxCoeff();
  CHECK(value == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("optimal_povm dominates random projective candidates") {
  Rng rng(7);
  const int d = 3, outcomes = 3;
  std::vector<CMat> weights;
  for (int b = 0; b < outcomes; ++b) {
    CMat c = rng.gaussian_matrix(d, d);
    weights.push_back(hermitize(c * c.adjoint()));
  }
  double value = 0.0;
  check_povm(optimal_povm(weights, &value));
  for (int rep = 0; rep < 200; ++rep) {
    const std::vector<CMat> cand = rng.projective_povm(d, {1, 1, 1});
    double cv = 0.0;
    for (int b = 0; b < outcomes; ++b) cv += (cand[b] * weights[b]).trace().real();
    CHECK(value >= cv - 1e-7);
  }
}

TEST_CASE("seesaw reaches the quantum maximum for d=2") {
  const Scenario s = make_qrac_scenario(2);
  SeesawOptions opt;
  opt.seed = 11;
  opt.restarts = 8;
  const SeesawResult res = seesaw_max_T(s, opt);
  CHECK(res.T >= 0.8535);
  CHECK_NOTHROW(validate_behavior(s, behavior_of(s, res.strategy)));
}

TEST_CASE("seesaw reaches the quantum maximum for d=4") {
  const Scenario s = make_qrac_scenario(4);
  SeesawOptions opt;
  opt.seed = 3;
  opt.restarts = 20;
  const SeesawResult res = seesaw_max_T(s, opt);
  CHECK(res.T >= 0.7499);

  // coordinate ascent: the accepted value trace never decreases
  for (std::size_t i = 1; i < res.t_trace.size(); ++i)
    CHECK(res.t_trace[i] >= res.t_trace[i - 1] - 1e-10);
}

TEST_CASE("seesaw attack reproduces the eigenvector attack point") {
  const Scenario s = make_qrac_scenario(4);
  const GenerationSet xp = default_generation_set(s, 1);
  AttackOptions opt;
  opt.seed = 5;
  opt.restarts = 3;
  const AttackResult res =
      seesaw_attack(s, xp, GuessMode::Binarized, critical_T(1), opt);
  CHECK(res.reached_target);
  CHECK(res.T >= critical_T(1) - 1e-6);
  CHECK(res.p_guess >= 1.0 - 1e-9);
}

TEST_CASE("seesaw attack at the quantum maximum stays below the certified level") {
  const Scenario s = make_qrac_scenario(4);
  const GenerationSet xp = default_generation_set(s, 1);
  AttackOptions opt;
  opt.seed = 19;
  opt.restarts = 4;
  const AttackResult res = seesaw_attack(s, xp, GuessMode::Binarized, 0.75, opt);
  CHECK(res.reached_target);
  CHECK(res.p_guess <= 0.7579 + 1e-3);
  CHECK(res.p_guess >= 0.75 - 1e-6);  // the ideal strategy already achieves 3/4
}

TEST_CASE("seesaw attack at trivial T finds a deterministic point") {
  const Scenario s = make_qrac_scenario(4);
  const GenerationSet xp = default_generation_set(s, 1);
  AttackOptions opt;
  opt.seed = 23;
  opt.restarts = 4;
  const AttackResult res = seesaw_attack(s, xp, GuessMode::Full, 0.25, opt);
  CHECK(res.reached_target);
  CHECK(res.p_guess >= 1.0 - 1e-9);
}
