// Command-line surface: generate instances, solve the rank-k problem,
// certify local maxima, run bound-verification experiment grids, and round
// factorizations to sign vectors.
//
// Exit codes: 0 success, 1 soft failure (nothing converged), 2 usage or
// input error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

#include "elliptope/certify.hpp"
#include "elliptope/experiment.hpp"
#include "elliptope/instances.hpp"
#include "elliptope/manifold.hpp"
#include "elliptope/parallel.hpp"
#include "elliptope/refsdp.hpp"
#include "elliptope/rng.hpp"
#include "elliptope/rounding.hpp"
#include "elliptope/solver.hpp"
#include "elliptope/sym_matrix.hpp"

namespace {

using namespace elliptope;
using nlohmann::json;

json default_config_json() {
  json j;
  SolverConfig sc;
  j["solver"] = {{"method", method_name(sc.method)},
                 {"grad_tol", sc.grad_tol},
                 {"obj_tol", sc.obj_tol},
                 {"max_sweeps", sc.max_sweeps},
                 {"max_iters", sc.max_iters},
                 {"line_search",
                  {{"init_step", sc.line_search.init_step},
                   {"shrink", sc.line_search.shrink},
                   {"sufficient_increase", sc.line_search.sufficient_increase},
                   {"max_halvings", sc.line_search.max_halvings}}},
                 {"random_sweep_order", sc.random_sweep_order},
                 {"perturb_on_stall", sc.perturb_on_stall},
                 {"seed", sc.seed}};
  TolProfile tol;
  j["certify"] = {{"identity_rel", tol.identity_rel},
                  {"norm_rel", tol.norm_rel},
                  {"eig_abs", tol.eig_abs},
                  {"stationarity", tol.stationarity},
                  {"submatrix_samples", tol.submatrix_samples}};
  ReferenceConfig rc;
  j["sdp_ref"] = {{"restarts", rc.restarts},
                  {"dual_tol", rc.dual_tol},
                  {"max_escalations", rc.max_escalations},
                  {"obj_tol", rc.solver.obj_tol},
                  {"max_sweeps", rc.solver.max_sweeps}};
  ExperimentGrid grid;
  j["experiment"] = {{"restarts", grid.restarts},
                     {"method", method_name(grid.method)},
                     {"allow_k1", grid.allow_k1}};
  return j;
}

json parse_json_arg(const std::string& arg) {
  // Inline JSON, or @path / plain path to a JSON file.
  std::string text = arg;
  if (!arg.empty() && arg[0] == '@') {
    std::ifstream in(arg.substr(1));
    if (!in) throw std::invalid_argument("cannot open " + arg.substr(1));
    text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  } else if (!arg.empty() && arg[0] != '{' && arg[0] != '[') {
    std::ifstream in(arg);
    if (!in) throw std::invalid_argument("cannot open " + arg);
    text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  return json::parse(text);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

int cmd_generate(const std::string& spec_arg, const std::string& out_path) {
  InstanceSpec spec = parse_instance_spec(parse_json_arg(spec_arg));
  PlantedInstance inst = realize(spec);
  write_matrix_market(inst.a, out_path);
  if (inst.truth) {
    std::ofstream truth(out_path + ".truth");
    if (!truth) throw std::runtime_error("cannot open for writing: " + out_path + ".truth");
    for (int i = 0; i < inst.truth->size(); ++i) {
      truth << ((*inst.truth)[i] > 0 ? "+1" : "-1") << "\n";
    }
  }
  std::cerr << "[generate] wrote " << out_path << " (n=" << inst.a.n() << ")\n";
  return 0;
}

struct SolveArgs {
  std::string matrix_path;
  int k = 2;
  std::string method = "coordinate";
  int restarts = 8;
  std::uint64_t seed = 0;
  double grad_tol = -1.0;
  double obj_tol = -1.0;
  int max_sweeps = -1;
  int max_iters = -1;
  std::string out_json;
  std::string out_sigma;
  int threads = 0;
};

int cmd_solve(const SolveArgs& args) {
  const SymMatrix a = read_matrix_market(args.matrix_path);
  SolverConfig cfg;
  cfg.method = method_from_name(args.method);
  cfg.seed = args.seed;
  if (args.grad_tol > 0) cfg.grad_tol = args.grad_tol;
  if (args.obj_tol > 0) cfg.obj_tol = args.obj_tol;
  if (args.max_sweeps > 0) cfg.max_sweeps = args.max_sweeps;
  if (args.max_iters > 0) cfg.max_iters = args.max_iters;

  const MultiRestartResult mr = multi_restart(a, args.k, args.restarts, cfg, args.threads);

  json j;
  j["objective"] = mr.best.objective;
  j["grad_norm"] = mr.best.grad_norm;
  j["iterations"] = mr.best.iterations;
  j["converged"] = mr.best.converged;
  j["restart_seed"] = mr.best.restart_seed;
  if (!args.out_sigma.empty()) {
    write_sigma_csv(mr.best.sigma, args.out_sigma);
    j["sigma_path"] = args.out_sigma;
  }
  const std::string text = j.dump(2) + "\n";
  if (!args.out_json.empty()) {
    write_text(args.out_json, text);
  } else {
    std::cout << text;
  }
  for (const auto& rep : mr.all) {
    if (rep.converged) return 0;
  }
  return 1;
}

struct CertifyArgs {
  std::string matrix_path;
  std::string sigma_path;
  std::string sdp_ref = "auto";
  double slack = -1.0;
  std::uint64_t seed = 0;
  std::string out_json;
  int threads = 0;
};

int cmd_certify(const CertifyArgs& args) {
  const SymMatrix a = read_matrix_market(args.matrix_path);
  const SpherePoint sigma = read_sigma_csv(args.sigma_path, 1e-6);
  if (a.n() != sigma.n()) {
    throw std::invalid_argument("matrix and sigma dimensions disagree");
  }
  const double a_norm = op_norm(a, 1e-8, 50000, derive_key(args.seed, StreamTag::op_norm, 0)).value;

  std::optional<double> ref_value;
  double slack = args.slack >= 0 ? args.slack : 1e-6 * a.n() * a_norm;
  json ref_json;
  if (args.sdp_ref == "auto") {
    ReferenceConfig rc;
    rc.seed = args.seed;
    rc.threads = args.threads;
    const ReferenceValue ref = sdp_reference(a, rc);
    ref_value = ref.value;
    if (args.slack < 0) slack = ref.certified_error + 1e-6 * a.n() * a_norm;
    ref_json = reference_to_json(ref);
  } else if (args.sdp_ref != "none") {
    ref_value = std::stod(args.sdp_ref);
  }

  TolProfile tol;
  tol.seed = derive_key(args.seed, StreamTag::submatrix, 0);
  const Certificate cert = certify(a, sigma, tol, a_norm, ref_value, slack);
  json j = certificate_to_json(cert);
  if (!ref_json.is_null()) j["reference"] = ref_json;
  const std::string text = j.dump(2) + "\n";
  if (!args.out_json.empty()) {
    write_text(args.out_json, text);
  } else {
    std::cout << text;
  }
  return 0;
}

struct ExperimentArgs {
  std::string grid_arg;
  std::string out_dir;
  int threads = 0;
  int restarts = -1;
  std::string method;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool allow_k1 = false;
};

int cmd_experiment(const ExperimentArgs& args) {
  nlohmann::json grid_json = parse_json_arg(args.grid_arg);
  if (args.allow_k1) grid_json["allow_k1"] = true;
  ExperimentGrid grid = parse_grid(grid_json);
  if (args.restarts > 0) grid.restarts = args.restarts;  // flags beat the grid file
  if (!args.method.empty()) grid.method = method_from_name(args.method);
  if (args.seed_set) grid.seed = args.seed;

  const ExperimentResult result = run_experiment(grid, args.threads);

  std::filesystem::create_directories(args.out_dir);
  const std::string csv_path = args.out_dir + "/results.csv";
  const std::string summary_path = args.out_dir + "/summary.json";
  write_rows_csv(result.rows, csv_path);
  write_text(summary_path, summary_to_json(result.summary).dump(2) + "\n");
  std::cerr << "[experiment] " << result.rows.size() << " rows, " << result.summary.holds_rows
            << " hold; wrote " << csv_path << "\n";
  return 0;
}

struct RoundArgs {
  std::string matrix_path;
  std::string sigma_path;
  std::string mode = "hyperplane";
  int trials = 100;
  std::string truth_path;
  std::uint64_t seed = 0;
  std::string out_path;
};

int cmd_round(const RoundArgs& args) {
  const SymMatrix a = read_matrix_market(args.matrix_path);
  const SpherePoint sigma = read_sigma_csv(args.sigma_path, 1e-6);
  if (a.n() != sigma.n()) throw std::invalid_argument("matrix and sigma dimensions disagree");
  const int n = sigma.n();

  RoundResult best;
  if (args.mode == "sign_first_col") {
    best = round_sign_first_col(a, sigma);
  } else if (args.mode == "hyperplane") {
    best = round_hyperplane(a, sigma, args.trials, args.seed);
  } else {
    throw std::invalid_argument("round: mode must be 'hyperplane' or 'sign_first_col'");
  }

  json j;
  j["mode"] = args.mode;
  j["trials"] = args.mode == "hyperplane" ? args.trials : 1;
  j["objective"] = best.objective;
  j["cut_value"] = best.cut_value;  // treats A as a negated adjacency

  if (!args.truth_path.empty()) {
    std::ifstream truth(args.truth_path);
    if (!truth) throw std::invalid_argument("cannot open truth file: " + args.truth_path);
    Eigen::VectorXi x0(n);
    for (int i = 0; i < n; ++i) {
      int v = 0;
      if (!(truth >> v) || (v != 1 && v != -1)) {
        throw std::invalid_argument("truth file: expected n lines of +1/-1");
      }
      x0[i] = v;
    }
    j["overlap"] = overlap(best.x, x0);
  }

  json assignment = json::array();
  for (int i = 0; i < n; ++i) assignment.push_back(best.x[i] > 0 ? 1 : -1);
  j["assignment"] = assignment;
  std::cout << j.dump(2) << "\n";
  if (!args.out_path.empty()) {
    std::ostringstream lines;
    for (int i = 0; i < n; ++i) lines << (best.x[i] > 0 ? "+1" : "-1") << "\n";
    write_text(args.out_path, lines.str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rank-k factorization solver and certifier for the unit-diagonal SDP"};
  app.require_subcommand(0, 1);
  bool dump_config = false;
  app.add_flag("--dump-config", dump_config, "print all defaults as JSON and exit");

  std::string gen_spec, gen_out;
  CLI::App* gen = app.add_subcommand("generate", "write an instance as a Matrix Market file");
  gen->add_option("spec", gen_spec, "instance spec JSON (inline or @file)")->required();
  gen->add_option("out", gen_out, "output .mtx path")->required();

  SolveArgs solve_args;
  CLI::App* solve = app.add_subcommand("solve", "multi-restart ascent on the rank-k problem");
  solve->add_option("matrix", solve_args.matrix_path, "Matrix Market input")->required();
  solve->add_option("--k", solve_args.k, "factorization rank")->required();
  solve->add_option("--method", solve_args.method, "coordinate | rgrad");
  solve->add_option("--restarts", solve_args.restarts, "number of restarts");
  solve->add_option("--seed", solve_args.seed, "base RNG seed");
  solve->add_option("--tol", solve_args.grad_tol, "gradient tolerance (rgrad)");
  solve->add_option("--obj-tol", solve_args.obj_tol, "per-sweep objective tolerance");
  solve->add_option("--max-sweeps", solve_args.max_sweeps, "coordinate sweep cap");
  solve->add_option("--max-iters", solve_args.max_iters, "rgrad iteration cap");
  solve->add_option("--out", solve_args.out_json, "report JSON path (default stdout)");
  solve->add_option("--sigma", solve_args.out_sigma, "write the best point as CSV");
  solve->add_option("--threads", solve_args.threads, "worker cap (0 = auto)");

  CertifyArgs certify_args;
  CLI::App* cert = app.add_subcommand("certify", "certificate for a solved point");
  cert->add_option("matrix", certify_args.matrix_path, "Matrix Market input")->required();
  cert->add_option("sigma", certify_args.sigma_path, "sigma CSV input")->required();
  cert->add_option("--sdp-ref", certify_args.sdp_ref, "auto | none | <value>");
  cert->add_option("--slack", certify_args.slack, "gap slack override");
  cert->add_option("--seed", certify_args.seed, "RNG seed");
  cert->add_option("--out", certify_args.out_json, "certificate JSON path (default stdout)");
  cert->add_option("--threads", certify_args.threads, "worker cap (0 = auto)");

  ExperimentArgs exp_args;
  CLI::App* exp = app.add_subcommand("experiment", "solve + certify over a grid");
  exp->add_option("grid", exp_args.grid_arg, "grid JSON (inline or @file)")->required();
  exp->add_option("--out", exp_args.out_dir, "output directory")->required();
  exp->add_option("--threads", exp_args.threads, "worker cap (0 = auto)");
  exp->add_option("--restarts", exp_args.restarts, "override grid restarts");
  exp->add_option("--method", exp_args.method, "override grid method");
  exp->add_option("--seed", exp_args.seed, "override grid seed")
      ->each([&](const std::string&) { exp_args.seed_set = true; });
  exp->add_flag("--allow-k1", exp_args.allow_k1, "permit k = 1 cells (gap checks inapplicable)");

  RoundArgs round_args;
  CLI::App* round = app.add_subcommand("round", "round a factorization to signs");
  round->add_option("matrix", round_args.matrix_path, "Matrix Market input")->required();
  round->add_option("sigma", round_args.sigma_path, "sigma CSV input")->required();
  round->add_option("--mode", round_args.mode, "hyperplane | sign_first_col");
  round->add_option("--trials", round_args.trials, "hyperplane directions to try");
  round->add_option("--truth", round_args.truth_path, "planted signs for overlap");
  round->add_option("--seed", round_args.seed, "RNG seed");
  round->add_option("--out", round_args.out_path, "write the assignment as +1/-1 lines");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (dump_config) {
      std::cout << default_config_json().dump(2) << "\n";
      return 0;
    }
    if (gen->parsed()) return cmd_generate(gen_spec, gen_out);
    if (solve->parsed()) return cmd_solve(solve_args);
    if (cert->parsed()) return cmd_certify(certify_args);
    if (exp->parsed()) return cmd_experiment(exp_args);
    if (round->parsed()) return cmd_round(round_args);
    std::cout << app.help();
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
