#include "dimcert/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dimcert/certifier.hpp"
#include "dimcert/ingest.hpp"
#include "dimcert/protocol_sim.hpp"
#include "dimcert/sdp.hpp"

namespace dimcert {

using nlohmann::json;

GenerationSet parse_xprime(const std::string& text) {
  GenerationSet g;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("xprime entries must look like z:y, got '" + item + "'");
    try {
      g.inputs.push_back({std::stoi(item.substr(0, colon)), std::stoi(item.substr(colon + 1))});
    } catch (const std::exception&) {
      throw std::invalid_argument("xprime entry is not a pair of integers: '" + item + "'");
    }
  }
  if (g.inputs.empty()) throw std::invalid_argument("xprime list is empty");
  return g;
}

GenerationSet resolve_xprime(const Scenario& s, const std::optional<GenerationSet>& override_set,
                             int K) {
  if (override_set) {
    validate_generation_set(s, *override_set);
    return *override_set;
  }
  return default_generation_set(s, K);
}

double floor6(double h) { return std::floor(h * 1e6) / 1e6; }

namespace {

const char* mode_name(GuessMode m) { return m == GuessMode::Full ? "full" : "binarized"; }

GuessMode parse_mode(const std::string& text) {
  if (text == "full") return GuessMode::Full;
  if (text == "binarized") return GuessMode::Binarized;
  throw std::invalid_argument("mode must be 'full' or 'binarized', got '" + text + "'");
}

json xprime_json(const GenerationSet& g) {
  json arr = json::array();
  for (const Input& in : g.inputs) arr.push_back({{"z", in.z}, {"y", in.y}});
  return arr;
}

json meta_json(const BasisMeta& meta) {
  return {{"scenario_hash", meta.scenario_hash},
          {"dim", meta.dim},
          {"seed", meta.seed},
          {"sample_count", meta.sample_count},
          {"monomial_level", meta.policy.level}};
}

json bound_json(const EntropyBound& b) {
  json assignments = json::array();
  for (const AssignmentBound& ab : b.per_assignment)
    assignments.push_back({{"choices", ab.assignment.choices},
                           {"bound", ab.bound},
                           {"status", to_string(ab.status)},
                           {"duality_gap", ab.gap}});
  return {{"t", b.t},
          {"K", b.K},
          {"mode", mode_name(b.mode)},
          {"xprime", xprime_json(b.xprime)},
          {"p_star", b.p_star},
          {"p_star_raw", b.p_star_raw},
          {"H_bits", floor6(b.H_bits)},
          {"H_bits_unrounded", b.H_bits},
          {"assignments", assignments},
          {"solver_tol", b.solver_tol},
          {"max_duality_gap", b.max_gap},
          {"basis", meta_json(b.basis_meta)}};
}

void emit(const json& doc, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << doc.dump(2) << "\n";
  } else {
    std::ofstream os(out_path);
    if (!os) throw std::runtime_error("cannot open output file " + out_path);
    os << doc.dump(2) << "\n";
  }
}

struct CliState {
  RunConfig cfg;
  std::string mode_text = "binarized";
  std::string xprime_text;
  // basis
  int level = 1;
  int stall = 64;
  double cutoff = 1e-7;
  int max_samples = 20000;
  // bound / curve
  double t = 0.0;
  double t_from = 0.0, t_to = 0.0;
  int steps = 0;
  std::vector<int> k_list;
  // certify
  std::string counts_path;
  double sigma_shift = 0.0;
  // attack / seesaw
  int restarts = 8;
  int iterations = 150;
  // simulate
  double visibility = 1.0;
  std::uint64_t rounds = 0;
  double group_mean = 2.0;
  std::string counts_out, log_out;
};

std::optional<GenerationSet> optional_xprime(const CliState& st) {
  if (st.xprime_text.empty()) return std::nullopt;
  return parse_xprime(st.xprime_text);
}

int cmd_basis(const CliState& st) {
  const Scenario s = make_qrac_scenario(st.cfg.d);
  SamplingPolicy policy;
  policy.level = st.level;
  policy.stall = st.stall;
  policy.sv_cutoff = st.cutoff;
  policy.max_samples = st.max_samples;
  const MomentBasis basis = build_moment_basis(s, st.cfg.seed, policy);
  save_basis(basis, st.cfg.basis_path);
  emit({{"command", "basis"},
        {"d", st.cfg.d},
        {"seed", st.cfg.seed},
        {"matrix_size", basis.size()},
        {"affine_dimension", basis.affine_dim()},
        {"sample_count", basis.meta.sample_count},
        {"path", st.cfg.basis_path}},
       st.cfg.out_path);
  return 0;
}

int cmd_bound(const CliState& st) {
  const MomentBasis basis = load_basis(st.cfg.basis_path);
  const GenerationSet xp = resolve_xprime(basis.scenario, optional_xprime(st), st.cfg.K);
  CertifyOptions opt{st.cfg.tol, st.cfg.threads};
  const EntropyBound b = certify(basis, st.t, xp, parse_mode(st.mode_text), opt);
  json doc = bound_json(b);
  doc["command"] = "bound";
  doc["status"] = "ok";
  emit(doc, st.cfg.out_path);
  return 0;
}

int cmd_curve(const CliState& st) {
  if (st.k_list.empty()) throw CLI::ValidationError("--K", "at least one K value is required");
  if (st.steps < 1) throw CLI::ValidationError("--steps", "must be at least 1");
  const MomentBasis basis = load_basis(st.cfg.basis_path);
  std::vector<double> grid;
  for (int i = 0; i < st.steps; ++i)
    grid.push_back(st.steps == 1
                       ? st.t_from
                       : st.t_from + (st.t_to - st.t_from) * i / (st.steps - 1));
  std::ostringstream csv;
  csv << "t,K,mode,p_star,H_bits,status\n";
  const GuessMode mode = parse_mode(st.mode_text);
  CertifyOptions opt{st.cfg.tol, st.cfg.threads};
  for (int K : st.k_list) {
    const GenerationSet xp = resolve_xprime(basis.scenario, optional_xprime(st), K);
    const std::vector<CurvePoint> pts = entropy_curve(basis, xp, mode, grid, opt);
    for (const CurvePoint& pt : pts) {
      csv << pt.t << ',' << K << ',' << mode_name(mode) << ',';
      if (pt.feasible && pt.bound) {
        csv << pt.bound->p_star << ',' << floor6(pt.bound->H_bits) << ",ok\n";
      } else {
        csv << ",," << (pt.error.find("no point") != std::string::npos ? "infeasible" : "error")
            << "\n";
      }
    }
  }
  if (st.cfg.out_path.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream os(st.cfg.out_path);
    if (!os) throw std::runtime_error("cannot open output file " + st.cfg.out_path);
    os << csv.str();
  }
  return 0;
}

int cmd_certify(const CliState& st) {
  const MomentBasis basis = load_basis(st.cfg.basis_path);
  const Scenario& s = basis.scenario;
  const CountsTable counts = parse_counts_file(st.counts_path, s);
  const TEstimate est = estimate_T(counts, s);
  const double t_used = est.t_hat - st.sigma_shift * est.std_err;
  const GenerationSet xp = resolve_xprime(s, optional_xprime(st), st.cfg.K);
  CertifyOptions opt{st.cfg.tol, st.cfg.threads};
  const EntropyBound b = certify(basis, t_used, xp, parse_mode(st.mode_text), opt);
  json doc = bound_json(b);
  doc["command"] = "certify";
  doc["status"] = "ok";
  doc["t_hat"] = est.t_hat;
  doc["std_err"] = est.std_err;
  doc["sigma_shift"] = st.sigma_shift;
  doc["t_used"] = t_used;
  doc["counts_path"] = st.counts_path;
  emit(doc, st.cfg.out_path);
  return 0;
}

int cmd_attack(const CliState& st) {
  const Scenario s = make_qrac_scenario(st.cfg.d);
  const GenerationSet xp = resolve_xprime(s, optional_xprime(st), st.cfg.K);
  AttackOptions opt;
  opt.seed = st.cfg.seed;
  opt.restarts = st.restarts;
  opt.max_iterations = st.iterations;
  const AttackResult res = seesaw_attack(s, xp, parse_mode(st.mode_text), st.t, opt);
  emit({{"command", "attack"},
        {"status", res.reached_target ? "ok" : "target_not_reached"},
        {"t_target", st.t},
        {"K", xp.size()},
        {"mode", st.mode_text},
        {"xprime", xprime_json(xp)},
        {"T", res.T},
        {"p_guess", res.p_guess},
        {"reached_target", res.reached_target},
        {"penalty_rounds", res.penalty_rounds}},
       st.cfg.out_path);
  return 0;
}

int cmd_classical(const CliState& st) {
  const Scenario s = make_qrac_scenario(st.cfg.d);
  const ClassicalOptimum opt = classical_optimum(s);
  emit({{"command", "classical"},
        {"status", "ok"},
        {"d", st.cfg.d},
        {"value", opt.value},
        {"encoding", opt.strategy.encoding},
        {"decodings", opt.strategy.decodings}},
       st.cfg.out_path);
  return 0;
}

int cmd_seesaw(const CliState& st) {
  const Scenario s = make_qrac_scenario(st.cfg.d);
  SeesawOptions opt;
  opt.seed = st.cfg.seed;
  opt.restarts = st.restarts;
  opt.max_iterations = st.iterations;
  const SeesawResult res = seesaw_max_T(s, opt);
  emit({{"command", "seesaw"},
        {"status", "ok"},
        {"d", st.cfg.d},
        {"T", res.T},
        {"iterations", res.iterations},
        {"restarts", st.restarts}},
       st.cfg.out_path);
  return 0;
}

int cmd_simulate(const CliState& st) {
  const Scenario s = make_qrac_scenario(st.cfg.d);
  ProtocolConfig cfg;
  cfg.rounds = st.rounds;
  cfg.mean_group_size = st.group_mean;
  cfg.visibility = st.visibility;
  cfg.seed = st.cfg.seed;
  cfg.xprime = resolve_xprime(s, optional_xprime(st), st.cfg.K);
  const Strategy noisy = noisy_strategy(ideal_qrac_strategy(st.cfg.d), st.visibility);
  const SimulationResult sim = simulate_rounds(s, cfg, noisy);
  {
    std::ofstream os(st.counts_out);
    if (!os) throw std::runtime_error("cannot open counts output " + st.counts_out);
    serialize_counts(sim.counts, s, os);
  }
  if (!st.log_out.empty()) {
    std::ofstream os(st.log_out);
    if (!os) throw std::runtime_error("cannot open round-log output " + st.log_out);
    write_round_log(sim.log, os);
  }
  std::uint64_t estimation_rounds = 0;
  for (const RoundRecord& r : sim.log.rounds)
    if (r.role == RoundRole::Estimation) ++estimation_rounds;
  const TEstimate est = estimate_T(sim.counts, s);
  emit({{"command", "simulate"},
        {"status", "ok"},
        {"d", st.cfg.d},
        {"visibility", st.visibility},
        {"rounds", st.rounds},
        {"estimation_rounds", estimation_rounds},
        {"t_hat", est.t_hat},
        {"std_err", est.std_err},
        {"counts_path", st.counts_out},
        {"log_path", st.log_out}},
       st.cfg.out_path);
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"dimcert: min-entropy certification for dimension-bounded prepare-and-measure devices"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from an INI-style config file");

  CliState st;
  int rc = 0;

  auto add_common = [&](CLI::App* cmd, bool with_threads = true) {
    cmd->add_option("--out", st.cfg.out_path, "write the report here instead of stdout");
    if (with_threads)
      cmd->add_option("--threads", st.cfg.threads, "worker threads (0: machine cores)");
  };

  CLI::App* basis = app.add_subcommand("basis", "sample a moment basis and cache it");
  basis->add_option("--d", st.cfg.d, "Hilbert-space dimension bound")->check(CLI::Range(2, 16));
  basis->add_option("--seed", st.cfg.seed, "sampling seed");
  basis->add_option("--out-basis,--basis", st.cfg.basis_path, "basis file path")->required();
  basis->add_option("--level", st.level, "monomial level (1 or 2)")->check(CLI::Range(1, 2));
  basis->add_option("--stall", st.stall, "samples without new directions before stopping");
  basis->add_option("--cutoff", st.cutoff, "relative singular-value cutoff");
  basis->add_option("--max-samples", st.max_samples, "hard cap on samples");
  add_common(basis, false);
  basis->callback([&] { rc = cmd_basis(st); });

  CLI::App* bound = app.add_subcommand("bound", "certified entropy bound at a given T");
  bound->add_option("--basis", st.cfg.basis_path, "basis file")->required();
  bound->add_option("--t", st.t, "security parameter value")->required()->check(CLI::Range(0.0, 1.0));
  bound->add_option("--K", st.cfg.K, "generation-set size");
  bound->add_option("--mode", st.mode_text, "binarized or full");
  bound->add_option("--xprime", st.xprime_text, "explicit generation set, e.g. 0:0,1:1");
  bound->add_option("--tol", st.cfg.tol, "solver tolerance");
  add_common(bound);
  bound->callback([&] { rc = cmd_bound(st); });

  CLI::App* curve = app.add_subcommand("curve", "entropy bounds over a grid of T values");
  curve->add_option("--basis", st.cfg.basis_path, "basis file")->required();
  curve->add_option("--t-from", st.t_from, "grid start")->required();
  curve->add_option("--t-to", st.t_to, "grid end")->required();
  curve->add_option("--steps", st.steps, "number of grid points")->required();
  curve->add_option("--K", st.k_list, "generation-set sizes");
  curve->add_option("--mode", st.mode_text, "binarized or full");
  curve->add_option("--tol", st.cfg.tol, "solver tolerance");
  add_common(curve);
  curve->callback([&] { rc = cmd_curve(st); });

  CLI::App* certify_cmd = app.add_subcommand("certify", "certify entropy from a counts file");
  certify_cmd->add_option("--basis", st.cfg.basis_path, "basis file")->required();
  certify_cmd->add_option("--counts", st.counts_path, "counts CSV file")->required();
  certify_cmd->add_option("--K", st.cfg.K, "generation-set size");
  certify_cmd->add_option("--mode", st.mode_text, "binarized or full");
  certify_cmd->add_option("--xprime", st.xprime_text, "explicit generation set");
  certify_cmd->add_option("--tol", st.cfg.tol, "solver tolerance");
  certify_cmd->add_option("--sigma-shift", st.sigma_shift,
                          "certify at t_hat - k*std_err (not a statistical guarantee)");
  add_common(certify_cmd);
  certify_cmd->callback([&] { rc = cmd_certify(st); });

  CLI::App* attack = app.add_subcommand("attack", "see-saw adversary at a target T");
  attack->add_option("--d", st.cfg.d, "dimension")->check(CLI::Range(2, 16));
  attack->add_option("--t", st.t, "target security parameter")->required();
  attack->add_option("--K", st.cfg.K, "generation-set size");
  attack->add_option("--mode", st.mode_text, "binarized or full");
  attack->add_option("--xprime", st.xprime_text, "explicit generation set");
  attack->add_option("--seed", st.cfg.seed, "restart seed");
  attack->add_option("--restarts", st.restarts, "restarts per penalty round");
  attack->add_option("--iterations", st.iterations, "iteration cap");
  add_common(attack, false);
  attack->callback([&] { rc = cmd_attack(st); });

  CLI::App* classical = app.add_subcommand("classical", "brute-force classical optimum");
  classical->add_option("--d", st.cfg.d, "dimension")->check(CLI::Range(2, 6));
  add_common(classical, false);
  classical->callback([&] { rc = cmd_classical(st); });

  CLI::App* seesaw = app.add_subcommand("seesaw", "see-saw maximization of T");
  seesaw->add_option("--d", st.cfg.d, "dimension")->check(CLI::Range(2, 16));
  seesaw->add_option("--seed", st.cfg.seed, "restart seed");
  seesaw->add_option("--restarts", st.restarts, "random restarts");
  seesaw->add_option("--iterations", st.iterations, "iteration cap");
  add_common(seesaw, false);
  seesaw->callback([&] { rc = cmd_seesaw(st); });

  CLI::App* simulate = app.add_subcommand("simulate", "simulate protocol rounds");
  simulate->add_option("--d", st.cfg.d, "dimension")->check(CLI::Range(2, 16));
  simulate->add_option("--v", st.visibility, "depolarizing visibility")->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--rounds", st.rounds, "total rounds")->required();
  simulate->add_option("--group-mean", st.group_mean, "mean group size (>= 2)");
  simulate->add_option("--K", st.cfg.K, "generation-set size");
  simulate->add_option("--xprime", st.xprime_text, "explicit generation set");
  simulate->add_option("--seed", st.cfg.seed, "simulation seed");
  simulate->add_option("--counts", st.counts_out, "counts CSV output path")->required();
  simulate->add_option("--round-log", st.log_out, "round-log CSV output path");
  add_common(simulate, false);
  simulate->callback([&] { rc = cmd_simulate(st); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 4;
  } catch (const InfeasibleError& e) {
    json doc = {{"status", "infeasible"}, {"error", e.what()}};
    std::cout << doc.dump(2) << "\n";
    return 3;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 5;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return rc;
}

}  // namespace dimcert
