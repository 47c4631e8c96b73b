// Experimental count files: parsing, behavior estimation and the security
// parameter with propagated uncertainty.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "dimcert/scenario.hpp"

namespace dimcert {

struct CountsTable {
  int n_prep = 0;
  int n_meas = 0;
  int n_out = 0;
  // counts[b + n_out * x] with x = z * n_meas + y
  std::vector<std::uint64_t> counts;

  std::uint64_t& at(int z, int y, int b) {
    return counts[b + static_cast<std::size_t>(n_out) * (z * n_meas + y)];
  }
  std::uint64_t at(int z, int y, int b) const {
    return counts[b + static_cast<std::size_t>(n_out) * (z * n_meas + y)];
  }
  std::uint64_t input_total(int x) const {
    std::uint64_t t = 0;
    for (int b = 0; b < n_out; ++b) t += counts[b + static_cast<std::size_t>(n_out) * x];
    return t;
  }
};

struct ParseError : std::runtime_error {
  std::size_t line = 0;
  ParseError(std::size_t line_number, const std::string& message)
      : std::runtime_error("line " + std::to_string(line_number) + ": " + message),
        line(line_number) {}
};

CountsTable make_counts_table(const Scenario& s);

// CSV with header exactly "a0,a1,y,b,count"; '#' lines are comments,
// duplicate rows are summed. Every input (z, y) must end up with a nonzero
// outcome total.
CountsTable parse_counts(std::istream& is, const Scenario& s);
CountsTable parse_counts_file(const std::string& path, const Scenario& s);

// Canonical form: all rows in (a0, a1, y, b) order, LF line endings.
void serialize_counts(const CountsTable& c, const Scenario& s, std::ostream& os);

struct BehaviorEstimate {
  Behavior behavior;
  std::vector<std::uint64_t> totals;  // per input x
};

BehaviorEstimate estimate_behavior(const CountsTable& c);

struct TEstimate {
  double t_hat = 0.0;
  double std_err = 0.0;
};

// Plug-in estimate of T with multinomial error propagation per input,
// combined in quadrature with the payoff weights.
TEstimate estimate_T(const CountsTable& c, const Scenario& s);

}  // namespace dimcert
