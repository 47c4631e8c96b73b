#include "dimcert/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dimcert {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL * (tag + 1));
  std::uint64_t a = splitmix64(s);
  std::uint64_t b = splitmix64(s);
  return a ^ (b << 1);
}

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

std::uint64_t Rng::next_u64() { return engine_(); }

double Rng::uniform() {
  // 53-bit mantissa; value in [0,1)
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

int Rng::uniform_int(int n) {
  if (n <= 0) throw std::invalid_argument("uniform_int: n must be positive");
  // rejection sampling to avoid modulo bias
  const std::uint64_t un = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<int>(x % un);
}

double Rng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

Cplx Rng::complex_gaussian() {
  const double s = 1.0 / std::sqrt(2.0);
  return {s * gaussian(), s * gaussian()};
}

CMat Rng::gaussian_matrix(int rows, int cols) {
  CMat g(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) g(i, j) = complex_gaussian();
  return g;
}

CMat Rng::haar_unitary(int d) {
  const CMat g = gaussian_matrix(d, d);
  Eigen::HouseholderQR<CMat> qr(g);
  CMat q = qr.householderQ();
  const CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    const Cplx rj = r(j, j);
    const double m = std::abs(rj);
    const Cplx phase = m > 0.0 ? rj / m : Cplx(1.0, 0.0);
    q.col(j) *= phase;
  }
  return q;
}

Eigen::VectorXcd Rng::haar_state(int d) {
  Eigen::VectorXcd v(d);
  for (int i = 0; i < d; ++i) v(i) = complex_gaussian();
  const double n = v.norm();
  if (n == 0.0) return haar_state(d);
  return v / n;
}

CMat Rng::random_pure_density(int d) {
  const Eigen::VectorXcd v = haar_state(d);
  return v * v.adjoint();
}

CMat Rng::random_mixed_density(int d, int rank) {
  if (rank < 1 || rank > d) throw std::invalid_argument("random_mixed_density: bad rank");
  const CMat g = gaussian_matrix(d, rank);
  CMat rho = g * g.adjoint();
  rho /= rho.trace().real();
  return hermitize(rho);
}

std::vector<CMat> Rng::projective_povm(int d, const std::vector<int>& ranks) {
  int total = 0;
  for (int r : ranks) {
    if (r < 0) throw std::invalid_argument("projective_povm: negative rank");
    total += r;
  }
  if (total != d) throw std::invalid_argument("projective_povm: ranks must sum to the dimension");
  const CMat u = haar_unitary(d);
  std::vector<CMat> effects;
  effects.reserve(ranks.size());
  int col = 0;
  for (int r : ranks) {
    CMat m = CMat::Zero(d, d);
    for (int k = 0; k < r; ++k, ++col) m += u.col(col) * u.col(col).adjoint();
    effects.push_back(hermitize(m));
  }
  return effects;
}

std::vector<CMat> Rng::general_povm(int d, int outcomes) {
  std::vector<CMat> raw(outcomes);
  CMat sum = CMat::Zero(d, d);
  for (int b = 0; b < outcomes; ++b) {
    const CMat g = gaussian_matrix(d, d);
    raw[b] = g * g.adjoint();
    sum += raw[b];
  }
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(sum));
  const CMat inv_sqrt = es.operatorInverseSqrt();
  std::vector<CMat> effects(outcomes);
  for (int b = 0; b < outcomes; ++b) effects[b] = hermitize(inv_sqrt * raw[b] * inv_sqrt);
  return effects;
}

}  // namespace dimcert
