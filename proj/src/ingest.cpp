#include "dimcert/ingest.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace dimcert {

CountsTable make_counts_table(const Scenario& s) {
  CountsTable t;
  t.n_prep = s.n_prep;
  t.n_meas = s.n_meas;
  t.n_out = s.n_out;
  t.counts.assign(static_cast<std::size_t>(s.n_out) * s.num_inputs(), 0);
  return t;
}

namespace {

std::string strip(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

long long parse_int(const std::string& field, std::size_t line, const char* name) {
  if (field.empty()) throw ParseError(line, std::string("empty field '") + name + "'");
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(field, &pos);
  } catch (const std::exception&) {
    throw ParseError(line, std::string("field '") + name + "' is not an integer: " + field);
  }
  if (pos != field.size())
    throw ParseError(line, std::string("trailing characters in field '") + name + "': " + field);
  return v;
}

}  // namespace

CountsTable parse_counts(std::istream& is, const Scenario& s) {
  CountsTable table = make_counts_table(s);
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  const int d = s.n_out;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string text = strip(line);
    if (text.empty() || text[0] == '#') continue;
    if (!header_seen) {
      if (text != "a0,a1,y,b,count")
        throw ParseError(lineno, "expected header 'a0,a1,y,b,count', got '" + text + "'");
      header_seen = true;
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(text);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(strip(field));
    if (fields.size() != 5)
      throw ParseError(lineno, "expected 5 comma-separated fields, got " +
                                   std::to_string(fields.size()));
    const long long a0 = parse_int(fields[0], lineno, "a0");
    const long long a1 = parse_int(fields[1], lineno, "a1");
    const long long y = parse_int(fields[2], lineno, "y");
    const long long b = parse_int(fields[3], lineno, "b");
    const long long count = parse_int(fields[4], lineno, "count");
    if (a0 < 0 || a0 >= d) throw ParseError(lineno, "a0 out of range [0," + std::to_string(d) + ")");
    if (a1 < 0 || a1 >= s.n_prep / d)
      throw ParseError(lineno, "a1 out of range [0," + std::to_string(s.n_prep / d) + ")");
    if (y < 0 || y >= s.n_meas) throw ParseError(lineno, "y out of range");
    if (b < 0 || b >= s.n_out) throw ParseError(lineno, "b out of range");
    if (count < 0) throw ParseError(lineno, "negative count " + std::to_string(count));
    const int z = static_cast<int>(a0) + d * static_cast<int>(a1);
    table.at(z, static_cast<int>(y), static_cast<int>(b)) += static_cast<std::uint64_t>(count);
  }
  if (!header_seen) throw ParseError(lineno, "missing header 'a0,a1,y,b,count'");
  for (int z = 0; z < s.n_prep; ++z)
    for (int y = 0; y < s.n_meas; ++y)
      if (table.input_total(s.x_index(z, y)) == 0)
        throw ParseError(lineno, "no counts for input z=(" + std::to_string(digit0(z, d)) + "," +
                                     std::to_string(digit1(z, d)) + ") y=" + std::to_string(y));
  return table;
}

CountsTable parse_counts_file(const std::string& path, const Scenario& s) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open counts file " + path);
  return parse_counts(is, s);
}

void serialize_counts(const CountsTable& c, const Scenario& s, std::ostream& os) {
  os << "a0,a1,y,b,count\n";
  const int d = s.n_out;
  for (int a1 = 0; a1 < s.n_prep / d; ++a1)
    for (int a0 = 0; a0 < d; ++a0)
      for (int y = 0; y < s.n_meas; ++y)
        for (int b = 0; b < s.n_out; ++b)
          os << a0 << ',' << a1 << ',' << y << ',' << b << ','
             << c.at(a0 + d * a1, y, b) << '\n';
}

BehaviorEstimate estimate_behavior(const CountsTable& c) {
  BehaviorEstimate est;
  const int n_x = c.n_prep * c.n_meas;
  est.behavior.p = RMat::Zero(c.n_out, n_x);
  est.totals.resize(n_x);
  for (int x = 0; x < n_x; ++x) {
    const std::uint64_t total = c.input_total(x);
    if (total == 0)
      throw std::invalid_argument("estimate_behavior: no counts for input x=" +
                                  std::to_string(x));
    est.totals[x] = total;
    for (int b = 0; b < c.n_out; ++b)
      est.behavior.p(b, x) =
          static_cast<double>(c.counts[b + static_cast<std::size_t>(c.n_out) * x]) /
          static_cast<double>(total);
  }
  return est;
}

TEstimate estimate_T(const CountsTable& c, const Scenario& s) {
  if (c.n_prep != s.n_prep || c.n_meas != s.n_meas || c.n_out != s.n_out)
    throw std::invalid_argument("estimate_T: counts table does not match scenario");
  const BehaviorEstimate est = estimate_behavior(c);
  TEstimate out;
  out.t_hat = eval_T(s, est.behavior);
  double var = 0.0;
  for (int x = 0; x < s.num_inputs(); ++x) {
    const double n = static_cast<double>(est.totals[x]);
    // Var(sum_b c_b phat_b) for one multinomial sample of size n
    double first = 0.0, mean = 0.0;
    for (int b = 0; b < s.n_out; ++b) {
      const double cb = s.payoff(b, x);
      const double pb = est.behavior.p(b, x);
      first += cb * cb * pb;
      mean += cb * pb;
    }
    var += (first - mean * mean) / n;
  }
  out.std_err = std::sqrt(std::max(0.0, var));
  return out;
}

}  // namespace dimcert
