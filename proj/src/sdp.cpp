#include "dimcert/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <string>

namespace dimcert {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Inaccurate: return "inaccurate";
  }
  return "unknown";
}

void validate_problem(const ConicProblem& p) {
  if (p.variable_dim != static_cast<int>(p.directions.size()))
    throw std::invalid_argument("conic problem: variable_dim does not match direction count");
  if (p.objective.size() != p.variable_dim)
    throw std::invalid_argument("conic problem: objective length mismatch");
  const Eigen::Index n = p.base.rows();
  if (p.base.cols() != n) throw std::invalid_argument("conic problem: base not square");
  if (hermiticity_error(p.base) > 1e-10)
    throw std::invalid_argument("conic problem: base matrix not Hermitian");
  for (const CMat& d : p.directions) {
    if (d.rows() != n || d.cols() != n)
      throw std::invalid_argument("conic problem: direction size mismatch");
    if (hermiticity_error(d) > 1e-10)
      throw std::invalid_argument("conic problem: direction not Hermitian");
  }
  for (const auto& [a, r] : p.equalities) {
    (void)r;
    if (a.size() != p.variable_dim)
      throw std::invalid_argument("conic problem: equality vector length mismatch");
  }
}

ConicProblem realify(const ConicProblem& p) {
  validate_problem(p);
  ConicProblem out;
  out.variable_dim = p.variable_dim;
  out.objective = p.objective;
  out.objective_offset = p.objective_offset;
  out.equalities = p.equalities;
  out.base = realify_matrix(p.base).cast<Cplx>();
  out.directions.reserve(p.directions.size());
  for (const CMat& d : p.directions) out.directions.push_back(realify_matrix(d).cast<Cplx>());
  return out;
}

namespace {

// svec packing for real symmetric matrices (diag, then sqrt(2) * upper),
// preserving tr(AB) = rsvec(A).rsvec(B).
RVec rsvec(const RMat& a) {
  const int n = static_cast<int>(a.rows());
  RVec v(n * (n + 1) / 2);
  const double s = std::sqrt(2.0);
  int k = 0;
  for (int i = 0; i < n; ++i) v(k++) = a(i, i);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) v(k++) = s * a(i, j);
  return v;
}

double max_step_to_boundary(const Eigen::LLT<RMat>& chol, const RMat& delta) {
  // largest alpha with X + alpha * delta >= 0, via L^-1 delta L^-T
  const RMat l = chol.matrixL();
  RMat t = l.triangularView<Eigen::Lower>().solve(delta);
  t = l.triangularView<Eigen::Lower>().solve(t.transpose()).transpose();
  Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (t + t.transpose()), Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

struct RealProblem {
  int m = 0;
  int n = 0;
  int p = 0;
  int embedded_half = 0;  // n/2 when the problem is a Hermitian embedding
  RMat f0;
  std::vector<RMat> f;
  RVec c;
  RMat e;   // p x m
  RVec g;   // p
};

// Embedded problems are invariant under conjugation by J = [[0,-I],[I,0]].
// Averaging an iterate with its conjugate keeps it feasible and removes the
// drift that blocks dual steps near the optimum.
RMat embed_symmetrize(const RMat& x, int h) {
  RMat out(2 * h, 2 * h);
  out.topLeftCorner(h, h) = 0.5 * (x.topLeftCorner(h, h) + x.bottomRightCorner(h, h));
  out.bottomRightCorner(h, h) = out.topLeftCorner(h, h);
  out.topRightCorner(h, h) = 0.5 * (x.topRightCorner(h, h) - x.bottomLeftCorner(h, h));
  out.bottomLeftCorner(h, h) = -out.topRightCorner(h, h);
  return 0.5 * (out + out.transpose());
}

struct Workspace {
  RVec lambda, nu;
  RMat s, z;
  RMat rs;       // f0 + sum lambda f - s
  RVec rp;       // g - e lambda
  RVec rc;       // tr(f_i z) + c_i - (e' nu)_i
};

void compute_residuals(const RealProblem& pr, Workspace& w) {
  RMat affine = pr.f0;
  for (int i = 0; i < pr.m; ++i) affine += w.lambda(i) * pr.f[i];
  w.rs = affine - w.s;
  w.rp = pr.g - pr.e * w.lambda;
  for (int i = 0; i < pr.m; ++i) w.rc(i) = (pr.f[i].cwiseProduct(w.z)).sum() + pr.c(i);
  if (pr.p > 0) w.rc -= pr.e.transpose() * w.nu;
}

ConicSolution solve_real(const RealProblem& pr, double tol) {
  const int m = pr.m, n = pr.n, p = pr.p;
  ConicSolution sol;
  sol.lambda = RVec::Zero(m);

  // consistency of the equality system; catches contradictory constraints
  RVec lambda0 = RVec::Zero(m);
  if (p > 0) {
    lambda0 = pr.e.colPivHouseholderQr().solve(pr.g);
    const double res = (pr.e * lambda0 - pr.g).cwiseAbs().maxCoeff();
    if (res > 1e-9 * std::max(1.0, pr.g.cwiseAbs().maxCoeff())) {
      sol.status = SolveStatus::Infeasible;
      sol.primal_residual = res;
      return sol;
    }
  }

  Workspace w;
  w.lambda = lambda0;
  w.nu = RVec::Zero(p);
  RMat affine0 = pr.f0;
  for (int i = 0; i < m; ++i) affine0 += w.lambda(i) * pr.f[i];
  {
    Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (affine0 + affine0.transpose()),
                                           Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    const double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
    const double shift = std::max(0.0, -lmin) + 0.1 * std::max(1.0, lmax);
    w.s = affine0 + shift * RMat::Identity(n, n);
  }
  const double z0 = std::max(1.0, pr.c.cwiseAbs().maxCoeff());
  w.z = z0 * RMat::Identity(n, n);
  w.rc = RVec::Zero(m);

  const double f0_scale = std::max(1.0, pr.f0.norm());
  const double c_scale = std::max(1.0, pr.c.cwiseAbs().maxCoeff());
  const double g_scale = p > 0 ? std::max(1.0, pr.g.cwiseAbs().maxCoeff()) : 1.0;
  const double feas_tol = std::max(10.0 * tol, 1e-9);

  const int svec_dim = n * (n + 1) / 2;
  RMat sf(m, svec_dim);
  for (int i = 0; i < m; ++i) sf.row(i) = rsvec(pr.f[i]).transpose();
  RMat sa(m, svec_dim);

  const int max_iter = 200;
  double best_score = std::numeric_limits<double>::infinity();
  double best_rel_gap = std::numeric_limits<double>::infinity();
  double best_feas = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < max_iter; ++iter) {
    compute_residuals(pr, w);
    const double mu = (w.s.cwiseProduct(w.z)).sum() / n;
    const double pobj = pr.c.dot(w.lambda);
    const double dobj = (pr.f0.cwiseProduct(w.z)).sum() + (p > 0 ? pr.g.dot(w.nu) : 0.0);
    const double gap = (w.s.cwiseProduct(w.z)).sum();
    const double rel_gap = gap / std::max(1.0, std::abs(pobj));
    const double rs_n = w.rs.norm() / f0_scale;
    const double rp_n = p > 0 ? w.rp.cwiseAbs().maxCoeff() / g_scale : 0.0;
    const double rc_n = w.rc.cwiseAbs().maxCoeff() / c_scale;

    if (std::getenv("DIMCERT_IPM_TRACE"))
      std::fprintf(stderr,
                   "ipm iter=%3d mu=%10.3e pobj=%12.5e dobj=%12.5e rs=%9.2e rp=%9.2e rc=%9.2e\n",
                   iter, mu, pobj, dobj, rs_n, rp_n, rc_n);

    // remember the best iterate; late iterations can degrade numerically
    const double score = std::max({rel_gap, rs_n, rp_n, rc_n});
    if (score < best_score) {
      best_score = score;
      sol.primal_value = pobj;
      sol.dual_value = dobj;
      sol.lambda = w.lambda;
      sol.duality_gap = gap;
      sol.primal_residual = std::max(rs_n, rp_n);
      sol.dual_residual = rc_n;
      sol.iterations = iter;
      best_rel_gap = rel_gap;
      best_feas = std::max({rs_n, rp_n, rc_n});
    }

    if (rel_gap <= tol && rs_n <= feas_tol && rp_n <= feas_tol && rc_n <= feas_tol) {
      sol.status = SolveStatus::Optimal;
      sol.primal_value = pobj;
      sol.dual_value = dobj;
      sol.lambda = w.lambda;
      sol.duality_gap = gap;
      sol.primal_residual = std::max(rs_n, rp_n);
      sol.dual_residual = rc_n;
      sol.iterations = iter;
      return sol;
    }
    // Farkas-style certificate of primal infeasibility: a dual-feasible
    // homogeneous direction with negative dual objective.
    {
      const double zscale = w.z.trace() + (p > 0 ? w.nu.cwiseAbs().sum() : 0.0);
      if (zscale > 1e4) {
        RVec hom(m);
        for (int i = 0; i < m; ++i) hom(i) = (pr.f[i].cwiseProduct(w.z)).sum();
        if (p > 0) hom -= pr.e.transpose() * w.nu;
        const double hom_obj = (pr.f0.cwiseProduct(w.z)).sum() + (p > 0 ? pr.g.dot(w.nu) : 0.0);
        if (hom.cwiseAbs().maxCoeff() / zscale < 1e-6 && hom_obj / zscale < -1e-6) {
          sol.status = SolveStatus::Infeasible;
          return sol;
        }
      }
    }

    if (mu < 1e-15 || score > 1e3 * best_score) break;  // numerical floor reached


    // Nesterov-Todd scaling point: w_nt z w_nt = s
    Eigen::LLT<RMat> chol_s(0.5 * (w.s + w.s.transpose()));
    Eigen::LLT<RMat> chol_z(0.5 * (w.z + w.z.transpose()));
    if (chol_s.info() != Eigen::Success || chol_z.info() != Eigen::Success) break;
    const RMat ls = chol_s.matrixL();
    RMat mid = ls.transpose() * w.z * ls;
    Eigen::SelfAdjointEigenSolver<RMat> es_mid(0.5 * (mid + mid.transpose()));
    if (es_mid.info() != Eigen::Success) break;
    const RVec dmid = es_mid.eigenvalues();
    if (dmid.minCoeff() <= 0.0) break;
    const RMat q = es_mid.eigenvectors();
    const RMat w_nt = ls * q * dmid.cwiseSqrt().cwiseInverse().asDiagonal() * q.transpose() *
                      ls.transpose();
    Eigen::SelfAdjointEigenSolver<RMat> es_w(0.5 * (w_nt + w_nt.transpose()));
    if (es_w.info() != Eigen::Success || es_w.eigenvalues().minCoeff() <= 0.0) break;
    const RMat pw = es_w.eigenvectors();
    const RVec dw = es_w.eigenvalues();
    const RMat w_half = pw * dw.cwiseSqrt().asDiagonal() * pw.transpose();
    const RMat w_ihalf = pw * dw.cwiseSqrt().cwiseInverse().asDiagonal() * pw.transpose();
    const RMat omega = w_ihalf * w_ihalf;  // w_nt^-1

    // scaled variable v = w^-1/2 s w^-1/2 = w^1/2 z w^1/2
    RMat v = w_ihalf * w.s * w_ihalf;
    v = 0.5 * (v + v.transpose());
    Eigen::SelfAdjointEigenSolver<RMat> es_v(v);
    const RMat qv = es_v.eigenvectors();
    const RVec dv = es_v.eigenvalues();

    // Schur complement M_ij = tr(f_i omega f_j omega)
    for (int i = 0; i < m; ++i) {
      RMat ai = omega * pr.f[i] * omega;
      sa.row(i) = rsvec(0.5 * (ai + ai.transpose())).transpose();
    }
    RMat schur = sa * sf.transpose();
    schur = 0.5 * (schur + schur.transpose());
    const double reg = 1e-13 * std::max(1.0, schur.diagonal().cwiseAbs().maxCoeff());

    // extended precision keeps the Newton directions usable deep into the
    // endgame, where the Schur complement conditioning grows like 1/mu^2
    using LMat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    using LVec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
    LMat kkt = LMat::Zero(m + p, m + p);
    kkt.topLeftCorner(m, m) =
        (schur + reg * RMat::Identity(m, m)).cast<long double>();
    if (p > 0) {
      kkt.topRightCorner(m, p) = pr.e.transpose().cast<long double>();
      kkt.bottomLeftCorner(p, m) = pr.e.cast<long double>();
      kkt.bottomRightCorner(p, p) = -reg * LMat::Identity(p, p);
    }
    Eigen::LDLT<LMat> kkt_ldlt(kkt);
    if (kkt_ldlt.info() != Eigen::Success) break;
    const auto kkt_solve = [&](const RVec& rhs) -> RVec {
      const LVec sol_l = kkt_ldlt.solve(rhs.cast<long double>());
      return sol_l.cast<double>();
    };

    auto solve_direction = [&](const RMat& rhs_mat, RMat& ds, RMat& dz, RVec& dlam, RVec& dnu) {
      const RMat inner = omega * (rhs_mat - w.rs) * omega;
      RVec h(m + p);
      for (int i = 0; i < m; ++i)
        h(i) = w.rc(i) + (pr.f[i].cwiseProduct(inner)).sum();
      if (p > 0) h.tail(p) = w.rp;
      const RVec step = kkt_solve(h);
      dlam = step.head(m);
      dnu = p > 0 ? RVec(step.tail(p)) : RVec();
      ds = w.rs;
      for (int i = 0; i < m; ++i) ds += dlam(i) * pr.f[i];
      dz = omega * (rhs_mat - ds) * omega;
      dz = 0.5 * (dz + dz.transpose());
      // one refinement pass against the dual-feasibility equation, whose
      // residual is amplified by the ill-conditioned scaling near the optimum
      RVec err(m + p);
      for (int i = 0; i < m; ++i)
        err(i) = (pr.f[i].cwiseProduct(dz)).sum() + w.rc(i);
      if (p > 0) {
        err.head(m) -= pr.e.transpose() * dnu;
        err.tail(p) = w.rp - pr.e * dlam;
      }
      const RVec corr = kkt_solve(err);
      const RVec dlam_c = corr.head(m);
      dlam += dlam_c;
      if (p > 0) dnu += corr.tail(p);
      RMat ds_c = RMat::Zero(n, n);
      for (int i = 0; i < m; ++i) ds_c += dlam_c(i) * pr.f[i];
      ds += ds_c;
      RMat dz_c = -omega * ds_c * omega;
      dz += 0.5 * (dz_c + dz_c.transpose());
    };

    // predictor
    RMat ds_aff, dz_aff;
    RVec dlam_aff, dnu_aff;
    solve_direction(-w.s, ds_aff, dz_aff, dlam_aff, dnu_aff);
    const double ap_aff = std::min(1.0, 0.99 * max_step_to_boundary(chol_s, ds_aff));
    const double ad_aff = std::min(1.0, 0.99 * max_step_to_boundary(chol_z, dz_aff));
    const double mu_aff =
        ((w.s + ap_aff * ds_aff).cwiseProduct(w.z + ad_aff * dz_aff)).sum() / n;
    double sigma = std::pow(std::max(0.0, mu_aff / mu), 3.0);
    sigma = std::clamp(sigma, 1e-8, 1.0);

    // corrector in the scaled space; the second-order term is skipped once
    // mu is small enough that it only amplifies roundoff
    RMat rhs_v = sigma * mu * RMat::Identity(n, n) - v * v;
    if (mu > 1e-7) {
      RMat dvs = w_ihalf * ds_aff * w_ihalf;
      RMat dvz = w_half * dz_aff * w_half;
      rhs_v -= 0.5 * (dvs * dvz + dvz * dvs);
    }
    rhs_v = qv.transpose() * rhs_v * qv;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) rhs_v(i, j) = 2.0 * rhs_v(i, j) / (dv(i) + dv(j));
    const RMat dmat = qv * rhs_v * qv.transpose();
    const RMat rhs_mat = w_half * 0.5 * (dmat + dmat.transpose()) * w_half;

    RMat ds, dz;
    RVec dlam, dnu;
    solve_direction(rhs_mat, ds, dz, dlam, dnu);

    const double tau = mu > 1e-4 ? 0.98 : 0.995;
    double ap = std::min(1.0, tau * max_step_to_boundary(chol_s, ds));
    double ad = std::min(1.0, tau * max_step_to_boundary(chol_z, dz));
    if (std::min(ap, ad) < 0.1) {
      // combined direction is blocked; take a pure centering step instead
      const RMat z_inv = chol_z.solve(RMat::Identity(n, n));
      const RMat centering = mu * 0.5 * (z_inv + z_inv.transpose()) - w.s;
      RMat ds_c, dz_c;
      RVec dlam_c, dnu_c;
      solve_direction(centering, ds_c, dz_c, dlam_c, dnu_c);
      const double ap_c = std::min(1.0, tau * max_step_to_boundary(chol_s, ds_c));
      const double ad_c = std::min(1.0, tau * max_step_to_boundary(chol_z, dz_c));
      if (std::min(ap_c, ad_c) > std::min(ap, ad)) {
        ds = ds_c;
        dz = dz_c;
        dlam = dlam_c;
        dnu = dnu_c;
        ap = ap_c;
        ad = ad_c;
      }
    }
    if (std::getenv("DIMCERT_IPM_TRACE"))
      std::fprintf(stderr, "    sigma=%9.2e ap=%9.2e ad=%9.2e ap_aff=%9.2e ad_aff=%9.2e\n",
                   sigma, ap, ad, ap_aff, ad_aff);
    if (ap < 1e-10 && ad < 1e-10) break;  // stalled

    w.lambda += ap * dlam;
    w.s += ap * ds;
    w.s = 0.5 * (w.s + w.s.transpose());
    if (p > 0) w.nu += ad * dnu;
    w.z += ad * dz;
    w.z = 0.5 * (w.z + w.z.transpose());
    if (pr.embedded_half > 0) {
      w.s = embed_symmetrize(w.s, pr.embedded_half);
      w.z = embed_symmetrize(w.z, pr.embedded_half);
    }
  }

  // The requested tolerance was not reached. Accept the best iterate when it
  // is converged enough for certified bounding (the spec-level solution
  // invariant needs gap <= 1e-6 * max(1, |primal|)); otherwise report it as
  // inaccurate.
  if (best_rel_gap <= std::min(1e3 * tol, 5e-7) && best_feas <= 1e-6) {
    sol.status = SolveStatus::Optimal;
  } else {
    sol.status = SolveStatus::Inaccurate;
  }
  return sol;
}

bool problem_is_real(const ConicProblem& p) {
  const double tol = 1e-13;
  if (p.base.imag().cwiseAbs().maxCoeff() > tol) return false;
  for (const CMat& d : p.directions)
    if (d.imag().cwiseAbs().maxCoeff() > tol) return false;
  return true;
}

bool matrix_is_embedded(const RMat& x, int h) {
  const double tol = 1e-12 * (1.0 + x.cwiseAbs().maxCoeff());
  return (x.topLeftCorner(h, h) - x.bottomRightCorner(h, h)).cwiseAbs().maxCoeff() <= tol &&
         (x.topRightCorner(h, h) + x.bottomLeftCorner(h, h)).cwiseAbs().maxCoeff() <= tol;
}

// J-invariant block structure [[A,-B],[B,A]] across every problem matrix
// (always true for realified Hermitian problems, however they were produced)
bool problem_is_embedded(const RealProblem& pr) {
  if (pr.n % 2 != 0 || pr.n < 2) return false;
  const int h = pr.n / 2;
  if (!matrix_is_embedded(pr.f0, h)) return false;
  for (const RMat& f : pr.f)
    if (!matrix_is_embedded(f, h)) return false;
  return true;
}

RealProblem lower_to_real(const ConicProblem& p) {
  RealProblem pr;
  pr.m = p.variable_dim;
  pr.n = static_cast<int>(p.base.rows());
  pr.p = static_cast<int>(p.equalities.size());
  pr.f0 = p.base.real();
  pr.f.reserve(p.directions.size());
  for (const CMat& d : p.directions) pr.f.push_back(d.real());
  pr.c = p.objective;
  pr.e = RMat::Zero(pr.p, pr.m);
  pr.g = RVec::Zero(pr.p);
  for (int i = 0; i < pr.p; ++i) {
    pr.e.row(i) = p.equalities[i].first.transpose();
    pr.g(i) = p.equalities[i].second;
  }
  return pr;
}

}  // namespace

ConicSolution solve(const ConicProblem& p, double tol) {
  validate_problem(p);
  if (p.variable_dim == 0) throw std::invalid_argument("solve: problem has no variables");
  const ConicProblem* effective = &p;
  ConicProblem realified;
  bool embedded = false;
  if (!problem_is_real(p)) {
    realified = realify(p);
    effective = &realified;
    embedded = true;
  }
  RealProblem lowered = lower_to_real(*effective);
  if (embedded || problem_is_embedded(lowered)) lowered.embedded_half = lowered.n / 2;
  ConicSolution sol = solve_real(lowered, tol);
  sol.primal_value += p.objective_offset;
  sol.dual_value += p.objective_offset;
  return sol;
}

void write_sdpa(const ConicProblem& p, std::ostream& os) {
  validate_problem(p);
  const ConicProblem* effective = &p;
  ConicProblem realified;
  if (!problem_is_real(p)) {
    realified = realify(p);
    effective = &realified;
  }
  const int m = effective->variable_dim;
  const int n = static_cast<int>(effective->base.rows());
  const int neq = static_cast<int>(effective->equalities.size());
  // SDPA dual form: min c.y with sum_i y_i F_i - F_0 >= 0. Our maximization
  // maps to c_sdpa = -objective, F_0 = -base; equalities become paired 1x1
  // diagonal blocks.
  os << "* dimcert conic problem export\n";
  os << m << " = mDIM\n";
  os << (1 + 2 * neq) << " = nBLOCK\n";
  os << n;
  for (int i = 0; i < 2 * neq; ++i) os << " 1";
  os << " = bLOCKsTRUCT\n";
  for (int i = 0; i < m; ++i) os << (i ? " " : "") << -effective->objective(i);
  os << "\n";
  const auto emit = [&os](int mat, int blk, int i, int j, double v) {
    if (v != 0.0) os << mat << " " << blk << " " << i + 1 << " " << j + 1 << " " << v << "\n";
  };
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) emit(0, 1, i, j, -effective->base.real()(i, j));
  for (int k = 0; k < neq; ++k) {
    emit(0, 2 + 2 * k, 0, 0, effective->equalities[k].second);
    emit(0, 3 + 2 * k, 0, 0, -effective->equalities[k].second);
  }
  for (int v = 0; v < m; ++v) {
    const RMat d = effective->directions[v].real();
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) emit(v + 1, 1, i, j, d(i, j));
    for (int k = 0; k < neq; ++k) {
      emit(v + 1, 2 + 2 * k, 0, 0, effective->equalities[k].first(v));
      emit(v + 1, 3 + 2 * k, 0, 0, -effective->equalities[k].first(v));
    }
  }
}

}  // namespace dimcert
