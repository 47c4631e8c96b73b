// Binary container for moment bases; layout documented in docs/formats.md.
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "dimcert/certifier.hpp"

namespace dimcert {

namespace {

constexpr char kMagic[16] = {'D', 'I', 'M', 'C', 'E', 'R', 'T', '-',
                             'B', 'A', 'S', 'I', 'S', '-', 'v', '1'};

void put_u32(std::ostream& os, std::uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }
void put_u64(std::ostream& os, std::uint64_t v) { os.write(reinterpret_cast<const char*>(&v), 8); }
void put_f64(std::ostream& os, double v) { os.write(reinterpret_cast<const char*>(&v), 8); }

std::uint32_t get_u32(std::istream& is) {
  std::uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), 4);
  return v;
}
std::uint64_t get_u64(std::istream& is) {
  std::uint64_t v = 0;
  is.read(reinterpret_cast<char*>(&v), 8);
  return v;
}
double get_f64(std::istream& is) {
  double v = 0;
  is.read(reinterpret_cast<char*>(&v), 8);
  return v;
}

void put_matrix(std::ostream& os, const CMat& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      put_f64(os, m(i, j).real());
      put_f64(os, m(i, j).imag());
    }
}

CMat get_matrix(std::istream& is, int rows, int cols) {
  CMat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      const double re = get_f64(is);
      const double im = get_f64(is);
      m(i, j) = Cplx(re, im);
    }
  return m;
}

}  // namespace

void save_basis(const MomentBasis& basis, const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("save_basis: cannot open " + path + " for writing");
  os.write(kMagic, sizeof(kMagic));

  const Scenario& s = basis.scenario;
  put_u32(os, static_cast<std::uint32_t>(s.n_prep));
  put_u32(os, static_cast<std::uint32_t>(s.n_meas));
  put_u32(os, static_cast<std::uint32_t>(s.n_out));
  put_u32(os, static_cast<std::uint32_t>(s.dim));
  for (int b = 0; b < s.n_out; ++b)
    for (int x = 0; x < s.num_inputs(); ++x) put_f64(os, s.payoff(b, x));

  put_u64(os, basis.meta.scenario_hash);
  put_u64(os, basis.meta.seed);
  put_u64(os, basis.meta.sample_count);
  put_u32(os, static_cast<std::uint32_t>(basis.meta.policy.level));
  put_u32(os, static_cast<std::uint32_t>(basis.meta.policy.stall));
  put_f64(os, basis.meta.policy.sv_cutoff);
  put_u32(os, static_cast<std::uint32_t>(basis.meta.policy.max_samples));
  put_f64(os, basis.meta.policy.mixed_state_fraction);
  put_f64(os, basis.meta.policy.general_povm_fraction);

  put_u32(os, static_cast<std::uint32_t>(basis.monomials.size()));
  for (const Monomial& m : basis.monomials) {
    put_u32(os, static_cast<std::uint32_t>(m.kind));
    put_u32(os, static_cast<std::uint32_t>(m.z + 1));
    put_u32(os, static_cast<std::uint32_t>(m.y + 1));
    put_u32(os, static_cast<std::uint32_t>(m.b + 1));
  }

  put_u32(os, static_cast<std::uint32_t>(basis.affine_dim()));
  put_matrix(os, basis.center);
  for (const CMat& d : basis.directions) put_matrix(os, d);

  put_u64(os, static_cast<std::uint64_t>(basis.meta.saturation_log.size()));
  for (const SaturationEntry& e : basis.meta.saturation_log) {
    put_u64(os, e.sample_index);
    put_u32(os, static_cast<std::uint32_t>(e.dimension));
  }
  if (!os) throw std::runtime_error("save_basis: write to " + path + " failed");
}

MomentBasis load_basis(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_basis: cannot open " + path);
  char magic[16];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("load_basis: " + path + " is not a DIMCERT-BASIS-v1 file");

  MomentBasis basis;
  Scenario& s = basis.scenario;
  s.n_prep = static_cast<int>(get_u32(is));
  s.n_meas = static_cast<int>(get_u32(is));
  s.n_out = static_cast<int>(get_u32(is));
  s.dim = static_cast<int>(get_u32(is));
  if (!is || s.n_prep <= 0 || s.n_meas <= 0 || s.n_out <= 0 || s.dim <= 0)
    throw std::runtime_error("load_basis: corrupt scenario header");
  s.payoff = RMat::Zero(s.n_out, s.num_inputs());
  for (int b = 0; b < s.n_out; ++b)
    for (int x = 0; x < s.num_inputs(); ++x) s.payoff(b, x) = get_f64(is);

  basis.meta.scenario_hash = get_u64(is);
  basis.meta.seed = get_u64(is);
  basis.meta.sample_count = get_u64(is);
  basis.meta.dim = s.dim;
  basis.meta.policy.level = static_cast<int>(get_u32(is));
  basis.meta.policy.stall = static_cast<int>(get_u32(is));
  basis.meta.policy.sv_cutoff = get_f64(is);
  basis.meta.policy.max_samples = static_cast<int>(get_u32(is));
  basis.meta.policy.mixed_state_fraction = get_f64(is);
  basis.meta.policy.general_povm_fraction = get_f64(is);

  const std::uint32_t n_mono = get_u32(is);
  if (!is || n_mono == 0 || n_mono > 1u << 20)
    throw std::runtime_error("load_basis: corrupt monomial count");
  basis.monomials.resize(n_mono);
  for (Monomial& m : basis.monomials) {
    m.kind = static_cast<Monomial::Kind>(get_u32(is));
    m.z = static_cast<int>(get_u32(is)) - 1;
    m.y = static_cast<int>(get_u32(is)) - 1;
    m.b = static_cast<int>(get_u32(is)) - 1;
  }

  const std::uint32_t m_dirs = get_u32(is);
  const int n = static_cast<int>(n_mono);
  basis.center = get_matrix(is, n, n);
  basis.directions.reserve(m_dirs);
  for (std::uint32_t i = 0; i < m_dirs; ++i) basis.directions.push_back(get_matrix(is, n, n));

  const std::uint64_t log_size = get_u64(is);
  if (!is || log_size > 1ULL << 32) throw std::runtime_error("load_basis: corrupt saturation log");
  basis.meta.saturation_log.resize(log_size);
  for (SaturationEntry& e : basis.meta.saturation_log) {
    e.sample_index = get_u64(is);
    e.dimension = static_cast<int>(get_u32(is));
  }
  if (!is) throw std::runtime_error("load_basis: truncated file " + path);
  if (basis.meta.scenario_hash != scenario_hash(s))
    throw std::runtime_error("load_basis: scenario hash mismatch");
  return basis;
}

}  // namespace dimcert
