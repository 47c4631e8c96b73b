// Dense Hermitian matrix helpers shared by all modules.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace dimcert {

using Cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline CMat hermitize(const CMat& a) { return 0.5 * (a + a.adjoint()); }

double hermiticity_error(const CMat& a);
bool is_hermitian(const CMat& a, double tol = 1e-10);

// Smallest eigenvalue of a Hermitian matrix.
double min_eigenvalue(const CMat& a);

// Real symmetric vectorization of a Hermitian matrix: n*n real coordinates
// ordered [diag | sqrt(2)*Re(upper) | sqrt(2)*Im(upper)], upper triangle in
// row-major order. Preserves the inner product Re tr(A'B) = svec(A).svec(B).
RVec svec(const CMat& a);
CMat unsvec(const RVec& v, int n);

// Indices into svec coordinates for entry (i,j), i<=j. For i==j only the
// first value is meaningful.
struct SvecIndex {
  int re = -1;
  int im = -1;  // -1 on the diagonal
};
SvecIndex svec_index(int n, int i, int j);

// Hermitian H -> real symmetric [[Re H, -Im H], [Im H, Re H]] (2n x 2n).
// H is PSD iff the image is PSD; eigenvalues double in multiplicity.
RMat realify_matrix(const CMat& h);

// Orthonormal basis of d x d Hermitian matrices under Re tr(A'B):
// diagonal units, (E_ij + E_ji)/sqrt(2), i(E_ij - E_ji)/sqrt(2).
std::vector<CMat> hermitian_basis(int d);

// FNV-1a over a byte view; used to fingerprint scenarios in basis files.
std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t seed = 1469598103934665603ULL);

std::string format_matrix(const CMat& a, int precision = 4);

}  // namespace dimcert
