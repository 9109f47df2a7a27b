#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

#include "elliptope/solver.hpp"
#include "elliptope/sym_matrix.hpp"

namespace elliptope {

struct ReferenceValue {
  double value = 0.0;            // best certified objective (lower bound on SDP)
  double upper_bound = 0.0;      // best dual bound Tr(Lambda) + n*eps
  double certified_error = 0.0;  // upper_bound - value
  std::string method = "highrank_bm";
  int k_used = 0;
  int escalations = 0;
  bool dual_converged = true;
};

struct ReferenceConfig {
  int restarts = 5;
  /// Escalate the rank while eps > dual_tol * max(1, ||A||_2).
  double dual_tol = 1e-3;
  int max_escalations = 3;
  std::uint64_t seed = 0;
  int threads = 0;
  SolverConfig solver;

  ReferenceConfig() {
    solver.obj_tol = 1e-13;
    solver.max_sweeps = 6000;
  }
};

/// Reference SDP value by a high-rank solve: starts at
/// k = min(n, ceil(sqrt(2n)) + 1), takes the best multi-restart objective,
/// and doubles the rank (final fallback k = n) while the dual certificate
/// stays loose. Never fails hard; the returned certified_error is honest.
ReferenceValue sdp_reference(const SymMatrix& a, ReferenceConfig cfg = {});

/// Grid oracle over rank-2 factorizations parametrized by angles, theta_0
/// fixed at zero: a coarse pass at `resolution` points per free angle, then
/// three refinement rounds each 10x finer around the incumbent. For n <= 5
/// a rank-2 optimal extreme point always exists, so this reaches the SDP
/// value up to grid error; it is still a lower bound by construction.
double brute_force_sdp(const SymMatrix& a, int resolution);

/// max <A, X> over the 2x2 elliptope: A11 + A22 + 2|A12|.
double closed_form_sdp_2x2(const SymMatrix& a);

nlohmann::json reference_to_json(const ReferenceValue& r);

}  // namespace elliptope
