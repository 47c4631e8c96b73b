// Round-structure simulation: estimation/generation groups against a noisy
// strategy, producing count data shaped like an experimental record.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "dimcert/ingest.hpp"
#include "dimcert/scenario.hpp"
#include "dimcert/strategy.hpp"

namespace dimcert {

struct ProtocolConfig {
  std::uint64_t rounds = 0;
  double mean_group_size = 2.0;  // geometric group sizes, mean >= 2
  GenerationSet xprime;
  double visibility = 1.0;
  std::uint64_t seed = 1;
};

enum class RoundRole { Estimation, Generation };

struct RoundRecord {
  std::uint64_t group = 0;
  RoundRole role = RoundRole::Estimation;
  int z = 0;
  int y = 0;
  int b = 0;
};

struct RoundLog {
  std::vector<RoundRecord> rounds;
};

void validate_protocol_config(const Scenario& s, const ProtocolConfig& cfg);

// Depolarized preparation: each state becomes v*rho + (1-v)*I/d.
Strategy noisy_strategy(const Strategy& ideal, double visibility);

struct SimulationResult {
  CountsTable counts;  // estimation rounds only
  RoundLog log;
};

SimulationResult simulate_rounds(const Scenario& s, const ProtocolConfig& cfg,
                                 const Strategy& st);

void write_round_log(const RoundLog& log, std::ostream& os);

}  // namespace dimcert
