#include "dimcert/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dimcert {

double hermiticity_error(const CMat& a) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const CMat& a, double tol) {
  return a.rows() == a.cols() && hermiticity_error(a) <= tol;
}

double min_eigenvalue(const CMat& a) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

RVec svec(const CMat& a) {
  const int n = static_cast<int>(a.rows());
  RVec v(n * n);
  const double s = std::sqrt(2.0);
  int k = 0;
  for (int i = 0; i < n; ++i) v(k++) = a(i, i).real();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) v(k++) = s * a(i, j).real();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) v(k++) = s * a(i, j).imag();
  return v;
}

CMat unsvec(const RVec& v, int n) {
  if (v.size() != static_cast<Eigen::Index>(n) * n)
    throw std::invalid_argument("unsvec: coordinate count does not match matrix size");
  CMat a = CMat::Zero(n, n);
  const double s = 1.0 / std::sqrt(2.0);
  int k = 0;
  for (int i = 0; i < n; ++i) a(i, i) = v(k++);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      a(i, j) += s * v(k);
      a(j, i) += s * v(k);
      ++k;
    }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      a(i, j) += Cplx(0.0, s * v(k));
      a(j, i) -= Cplx(0.0, s * v(k));
      ++k;
    }
  return a;
}

SvecIndex svec_index(int n, int i, int j) {
  if (i > j) std::swap(i, j);
  SvecIndex idx;
  if (i == j) {
    idx.re = i;
    return idx;
  }
  // position of (i,j) in the row-major upper triangle
  int off = 0;
  for (int r = 0; r < i; ++r) off += n - r - 1;
  off += j - i - 1;
  const int tri = n * (n - 1) / 2;
  idx.re = n + off;
  idx.im = n + tri + off;
  return idx;
}

RMat realify_matrix(const CMat& h) {
  const int n = static_cast<int>(h.rows());
  RMat out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = h.real();
  out.topRightCorner(n, n) = -h.imag();
  out.bottomLeftCorner(n, n) = h.imag();
  out.bottomRightCorner(n, n) = h.real();
  return out;
}

std::vector<CMat> hermitian_basis(int d) {
  std::vector<CMat> basis;
  basis.reserve(static_cast<std::size_t>(d) * d);
  const double s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < d; ++i) {
    CMat e = CMat::Zero(d, d);
    e(i, i) = 1.0;
    basis.push_back(e);
  }
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      CMat e = CMat::Zero(d, d);
      e(i, j) = s;
      e(j, i) = s;
      basis.push_back(e);
    }
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      CMat e = CMat::Zero(d, d);
      e(i, j) = Cplx(0.0, s);
      e(j, i) = Cplx(0.0, -s);
      basis.push_back(e);
    }
  return basis;
}

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::string format_matrix(const CMat& a, int precision) {
  std::ostringstream os;
  os.precision(precision);
  os << a;
  return os.str();
}

}  // namespace dimcert
