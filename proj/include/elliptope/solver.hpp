#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "elliptope/manifold.hpp"
#include "elliptope/sym_matrix.hpp"

namespace elliptope {

enum class Method { coordinate, rgrad };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

struct LineSearchParams {
  double init_step = 1.0;
  double shrink = 0.5;
  double sufficient_increase = 1e-4;
  int max_halvings = 60;
};

struct SolverConfig {
  Method method = Method::coordinate;
  /// Gradient stop for rgrad, scale-free: converged once the Riemannian
  /// gradient Frobenius norm is <= grad_tol * max(1, ||A||_2) * sqrt(n).
  double grad_tol = 1e-8;
  /// Coordinate-ascent stop: per-sweep objective gain <= obj_tol * (1 + |F|).
  double obj_tol = 1e-10;
  int max_sweeps = 2000;
  int max_iters = 5000;
  LineSearchParams line_search;
  std::uint64_t seed = 0;
  bool random_sweep_order = false;
  bool perturb_on_stall = false;
  /// Precomputed ||A||_2 estimate; negative means compute internally.
  double op_norm_hint = -1.0;
};

struct SolveReport {
  SpherePoint sigma;
  std::vector<double> objective_trace;  // initial value, then one per sweep/iteration
  double objective = 0.0;
  double grad_norm = 0.0;  // Riemannian gradient Frobenius norm at the final point
  int iterations = 0;
  bool converged = false;
  std::uint64_t restart_seed = 0;
};

/// Sweeps rows in fixed ascending order; each update sets sigma_i to the
/// normalized off-diagonal combination h_i = sum_{j != i} A_ij sigma_j, which
/// maximizes F over row i exactly, so the objective never decreases. Rows
/// with |h_i| < 1e-14 keep their value.
SolveReport coordinate_ascent(const SymMatrix& a, SpherePoint sigma0, const SolverConfig& cfg);

/// Projected gradient ascent with backtracking line search enforcing
/// F(new) >= F(old) + c * t * |grad|_F^2, retraction by row normalization.
SolveReport riemannian_ascent(const SymMatrix& a, SpherePoint sigma0, const SolverConfig& cfg);

/// Dispatches on cfg.method; with perturb_on_stall, adds one tangent
/// perturbation of Frobenius norm 1e-6 after convergence and re-solves,
/// keeping the better objective.
SolveReport solve_one(const SymMatrix& a, SpherePoint sigma0, const SolverConfig& cfg);

struct MultiRestartResult {
  SolveReport best;
  std::vector<SolveReport> all;
  int best_index = -1;
};

/// Restart r draws its start point from the stream (cfg.seed, restart, r);
/// the result is independent of execution order and thread count. Ties in
/// the final objective resolve to the lowest restart index.
MultiRestartResult multi_restart(const SymMatrix& a, int k, int restarts,
                                 const SolverConfig& cfg, int threads = 0);

}  // namespace elliptope
