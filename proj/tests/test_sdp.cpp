#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <dimcert/random.hpp>
#include <dimcert/sdp.hpp>

#include <sstream>

using namespace dimcert;

namespace {

CMat random_hermitian(Rng& rng, int n) {
  const CMat g = rng.gaussian_matrix(n, n);
  return hermitize(g);
}

// bounded instance by construction: the dual point z0 > 0 certifies
// tr(f0 z0) as an upper bound
ConicProblem random_bounded_problem(Rng& rng, int n, int m, bool complex_matrices) {
  ConicProblem p;
  p.variable_dim = m;
  CMat f0 = random_hermitian(rng, n);
  f0 = f0 * f0.adjoint() + 0.1 * CMat::Identity(n, n);
  CMat z0 = random_hermitian(rng, n);
  z0 = z0 * z0.adjoint() + 0.1 * CMat::Identity(n, n);
  if (!complex_matrices) {
    f0 = f0.real().cast<Cplx>();
    z0 = z0.real().cast<Cplx>();
  }
  p.base = f0;
  p.objective = RVec::Zero(m);
  for (int i = 0; i < m; ++i) {
    CMat d = random_hermitian(rng, n);
    if (!complex_matrices) d = d.real().cast<Cplx>();
    p.directions.push_back(d);
    p.objective(i) = -(d * z0).trace().real();
  }
  return p;
}

}  // namespace

TEST_CASE("realify block structure and eigenvalue doubling") {
  RMat a = RMat::Random(4, 4);
  a = (a + a.transpose()).eval();
  ConicProblem p;
  p.variable_dim = 1;
  p.base = a.cast<Cplx>();
  p.directions.push_back(CMat::Identity(4, 4));
  p.objective = RVec::Zero(1);
  const ConicProblem r = realify(p);
  const RMat img = r.base.real();
  CHECK((img.topLeftCorner(4, 4) - a).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((img.bottomRightCorner(4, 4) - a).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(img.topRightCorner(4, 4).cwiseAbs().maxCoeff() <= 1e-14);

  Eigen::SelfAdjointEigenSolver<RMat> es_orig(a);
  Eigen::SelfAdjointEigenSolver<RMat> es_img(img);
  for (int i = 0; i < 4; ++i) {
    CHECK(es_img.eigenvalues()(2 * i) == doctest::Approx(es_orig.eigenvalues()(i)).epsilon(1e-10));
    CHECK(es_img.eigenvalues()(2 * i + 1) ==
          doctest::Approx(es_orig.eigenvalues()(i)).epsilon(1e-10));
  }
}

TEST_CASE("realify of [[0,i],[-i,0]]") {
  CMat h(2, 2);
  h << Cplx(0, 0), Cplx(0, 1), Cplx(0, -1), Cplx(0, 0);
  const RMat img = realify_matrix(h);
  Eigen::SelfAdjointEigenSolver<RMat> es(img);
  const RVec ev = es.eigenvalues();
  CHECK(ev(0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(ev(1) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(ev(2) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ev(3) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("realify preserves positive semidefiniteness") {
  Rng rng(17);
  for (int rep = 0; rep < 50; ++rep) {
    const CMat h = random_hermitian(rng, 3 + rep % 3);
    const RMat img = realify_matrix(h);
    Eigen::SelfAdjointEigenSolver<RMat> es(img, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() == doctest::Approx(min_eigenvalue(h)).epsilon(1e-9));
  }
}

TEST_CASE("realify rejects non-Hermitian input") {
  ConicProblem p;
  p.variable_dim = 0;
  CMat bad(2, 2);
  bad << 1.0, 2.0, 3.0, 4.0;
  p.base = bad;
  p.objective = RVec::Zero(0);
  CHECK_THROWS_AS(realify(p), std::invalid_argument);
}

TEST_CASE("solve: 2x2 correlation bound") {
  // maximize lambda s.t. [[1, lambda], [lambda, 1]] >= 0
  ConicProblem p;
  p.variable_dim = 1;
  p.base = CMat::Identity(2, 2);
  CMat d(2, 2);
  d << 0, 1, 1, 0;
  p.directions.push_back(d);
  p.objective = RVec::Ones(1);
  const ConicSolution sol = solve(p, 1e-9);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.primal_value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sol.dual_value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sol.dual_value >= sol.primal_value - 1e-6);
}

TEST_CASE("solve: equality pins the variable") {
  ConicProblem p;
  p.variable_dim = 1;
  p.base = CMat::Zero(2, 2);
  p.directions.push_back(CMat::Identity(2, 2));
  p.objective = RVec::Ones(1);
  p.equalities.push_back({RVec::Ones(1), 0.3});
  const ConicSolution sol = solve(p, 1e-9);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.primal_value == doctest::Approx(0.3).epsilon(1e-7));
  CHECK(sol.lambda(0) == doctest::Approx(0.3).epsilon(1e-7));
}

TEST_CASE("solve: contradictory equalities are infeasible") {
  ConicProblem p;
  p.variable_dim = 1;
  p.base = CMat::Identity(2, 2);
  p.directions.push_back(CMat::Identity(2, 2));
  p.objective = RVec::Ones(1);
  p.equalities.push_back({RVec::Ones(1), 0.0});
  p.equalities.push_back({RVec::Ones(1), 1.0});
  CHECK(solve(p, 1e-8).status == SolveStatus::Infeasible);
}

TEST_CASE("solve: cone infeasibility is certified") {
  // lambda = 0 forced, but the base is negative definite
  ConicProblem p;
  p.variable_dim = 1;
  p.base = -CMat::Identity(2, 2);
  p.directions.push_back(CMat::Identity(2, 2));
  p.objective = RVec::Ones(1);
  p.equalities.push_back({RVec::Ones(1), 0.0});
  CHECK(solve(p, 1e-8).status == SolveStatus::Infeasible);
}

TEST_CASE("weak duality on random bounded instances") {
  Rng rng(23);
  for (int rep = 0; rep < 20; ++rep) {
    const ConicProblem p = random_bounded_problem(rng, 4 + rep % 4, 3 + rep % 5, rep % 2 == 0);
    const ConicSolution sol = solve(p, 1e-8);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.primal_value <= sol.dual_value + 1e-6 * std::max(1.0, std::abs(sol.primal_value)));
    // primal point is feasible: base + sum lambda directions >= 0
    CMat g = p.base;
    for (int i = 0; i < p.variable_dim; ++i) g += sol.lambda(i) * p.directions[i];
    CHECK(min_eigenvalue(g) >= -1e-7);
  }
}

TEST_CASE("real and realified paths agree") {
  Rng rng(29);
  for (int rep = 0; rep < 20; ++rep) {
    const ConicProblem p = random_bounded_problem(rng, 4, 4, /*complex_matrices=*/false);
    const ConicSolution direct = solve(p, 1e-9);
    const ConicSolution embedded = solve(realify(p), 1e-9);
    REQUIRE(direct.status == SolveStatus::Optimal);
    REQUIRE(embedded.status == SolveStatus::Optimal);
    CHECK(direct.primal_value ==
          doctest::Approx(embedded.primal_value).epsilon(1e-6).scale(1.0));
    CHECK(direct.dual_value == doctest::Approx(embedded.dual_value).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("complex Hermitian problems solve through the embedding") {
  Rng rng(31);
  const ConicProblem p = random_bounded_problem(rng, 5, 4, /*complex_matrices=*/true);
  const ConicSolution sol = solve(p, 1e-8);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CMat g = p.base;
  for (int i = 0; i < p.variable_dim; ++i) g += sol.lambda(i) * p.directions[i];
  CHECK(min_eigenvalue(g) >= -1e-7);
}

TEST_CASE("sdpa export carries the problem dimensions") {
  Rng rng(41);
  ConicProblem p = random_bounded_problem(rng, 3, 2, false);
  p.equalities.push_back({RVec::Ones(2), 0.5});
  std::ostringstream os;
  write_sdpa(p, os);
  const std::string text = os.str();
  CHECK(text.find("2 = mDIM") != std::string::npos);
  CHECK(text.find("3 = nBLOCK") != std::string::npos);
  CHECK(text.find("3 1 1 = bLOCKsTRUCT") != std::string::npos);
}
