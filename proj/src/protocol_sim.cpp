#include "dimcert/protocol_sim.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "dimcert/random.hpp"

namespace dimcert {

void validate_protocol_config(const Scenario& s, const ProtocolConfig& cfg) {
  if (cfg.rounds < 1) throw std::invalid_argument("protocol config: rounds must be at least 1");
  if (cfg.mean_group_size < 2.0)
    throw std::invalid_argument("protocol config: mean group size must be at least 2");
  if (cfg.visibility < 0.0 || cfg.visibility > 1.0)
    throw std::invalid_argument("protocol config: visibility must lie in [0,1]");
  validate_generation_set(s, cfg.xprime);
}

Strategy noisy_strategy(const Strategy& ideal, double visibility) {
  if (visibility < 0.0 || visibility > 1.0)
    throw std::invalid_argument("noisy_strategy: visibility must lie in [0,1]");
  Strategy st = ideal;
  for (CMat& rho : st.states) {
    const int d = static_cast<int>(rho.rows());
    rho = visibility * rho + (1.0 - visibility) / d * CMat::Identity(d, d);
  }
  return st;
}

namespace {

int sample_outcome(const Behavior& q, int x, double u) {
  double acc = 0.0;
  const int n = q.n_out();
  for (int b = 0; b < n; ++b) {
    acc += q.p(b, x);
    if (u < acc) return b;
  }
  return n - 1;
}

}  // namespace

SimulationResult simulate_rounds(const Scenario& s, const ProtocolConfig& cfg,
                                 const Strategy& st) {
  validate_protocol_config(s, cfg);
  const Behavior q = behavior_of(s, st);
  Rng rng(derive_seed(cfg.seed, 0x51e7ULL));

  SimulationResult result;
  result.counts = make_counts_table(s);
  result.log.rounds.reserve(cfg.rounds);

  const double p_stop = 1.0 / cfg.mean_group_size;
  std::uint64_t done = 0;
  std::uint64_t group = 0;
  while (done < cfg.rounds) {
    // geometric size with mean g: 1 + floor(ln u / ln(1-p))
    double u = rng.uniform();
    while (u <= 0.0) u = rng.uniform();
    std::uint64_t size =
        1 + static_cast<std::uint64_t>(std::floor(std::log(u) / std::log1p(-p_stop)));
    size = std::min(size, cfg.rounds - done);

    // first round: parameter estimation with an input from all of X
    const int x_est = rng.uniform_int(s.num_inputs());
    const int b_est = sample_outcome(q, x_est, rng.uniform());
    result.counts.at(s.z_of(x_est), s.y_of(x_est), b_est) += 1;
    result.log.rounds.push_back(
        {group, RoundRole::Estimation, s.z_of(x_est), s.y_of(x_est), b_est});
    ++done;

    // remaining rounds share one generation input from X'
    if (size > 1) {
      const Input in = cfg.xprime.inputs[rng.uniform_int(cfg.xprime.size())];
      const int x_gen = s.x_index(in.z, in.y);
      for (std::uint64_t r = 1; r < size; ++r) {
        const int b = sample_outcome(q, x_gen, rng.uniform());
        result.log.rounds.push_back({group, RoundRole::Generation, in.z, in.y, b});
        ++done;
      }
    }
    ++group;
  }
  return result;
}

void write_round_log(const RoundLog& log, std::ostream& os) {
  os << "group,role,z,y,b\n";
  for (const RoundRecord& r : log.rounds)
    os << r.group << ',' << (r.role == RoundRole::Estimation ? "estimation" : "generation")
       << ',' << r.z << ',' << r.y << ',' << r.b << '\n';
}

}  // namespace dimcert
