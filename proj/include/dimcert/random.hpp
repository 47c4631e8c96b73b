// Deterministic random sampling: a seeded stream with hand-rolled
// distributions (std engines are portable, std distributions are not),
// plus Haar-random unitaries, density matrices and POVMs.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "dimcert/linalg.hpp"

namespace dimcert {

std::uint64_t splitmix64(std::uint64_t& state);

// Derive an independent stream seed from (seed, tag). Identical inputs give
// identical streams on every platform.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  double uniform();                    // [0, 1)
  int uniform_int(int n);              // [0, n)
  double gaussian();                   // standard normal, Box-Muller
  Cplx complex_gaussian();             // Re, Im ~ N(0, 1/2)

  CMat gaussian_matrix(int rows, int cols);     // complex, entries ~ CN(0,1)
  CMat haar_unitary(int d);                     // QR with phase correction
  Eigen::VectorXcd haar_state(int d);           // Haar-random unit vector

  CMat random_pure_density(int d);
  CMat random_mixed_density(int d, int rank);   // Wishart, normalized to trace 1

  // Projective POVM from a Haar unitary with the given rank profile
  // (non-negative ranks summing to d; zero ranks give zero effects).
  std::vector<CMat> projective_povm(int d, const std::vector<int>& ranks);
  // General POVM: Gaussian-positive effects conjugated to a resolution of
  // the identity.
  std::vector<CMat> general_povm(int d, int outcomes);

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace dimcert
