#pragma once

#include <cstdint>
#include <limits>
#include <optional>

#include <Eigen/Dense>

#include "json.hpp"

#include "elliptope/manifold.hpp"
#include "elliptope/sym_matrix.hpp"

namespace elliptope {

/// Diagonal Lagrange multipliers lambda_i = |sum_j A_ij sigma_j|. Defined for
/// any sigma; at a local maximum they satisfy (Lambda - A) sigma = 0 and are
/// nonnegative by construction (for k = 1 this still holds even though the
/// submatrix argument behind nonnegativity needs k >= 2).
struct Multipliers {
  Eigen::VectorXd lambda;
  double trace = 0.0;
};

Multipliers multipliers(const SymMatrix& a, const SpherePoint& sigma);

/// |(Lambda - A) sigma|_F; zero exactly at stationary points that are
/// candidate maxima (rows aligned, not anti-aligned, with their gradients).
double first_order_residual(const SymMatrix& a, const SpherePoint& sigma,
                            const Multipliers& m);

struct TolProfile {
  double identity_rel = 1e-8;  // trace identity and Gram bound, relative
  double norm_rel = 1e-6;      // multiplier norm bound, relative
  double eig_abs = 1e-6;       // eigenvalue checks, times ||A||_2
  double stationarity = 1e-4;  // residual gate, times max(1,||A||_2)*sqrt(n)
  int submatrix_samples = 50;
  std::uint64_t seed = 0;
};

struct Certificate {
  int n = 0;
  int k = 0;
  double objective = 0.0;
  double op_norm_value = 0.0;

  double first_order_residual = 0.0;
  bool at_stationary_point = false;

  double multiplier_trace = 0.0;
  double trace_gap = 0.0;  // |F - Tr(Lambda)|
  bool trace_matches_objective = false;

  double multiplier_norm_sq = 0.0;     // sum lambda_i^2
  double multiplier_norm_bound = 0.0;  // n * ||A||_2^2
  bool multiplier_norm_ok = false;

  double gram_min_eig = 0.0;  // smallest eigenvalue of sigma^T sigma
  double gram_bound = 0.0;    // n / k
  bool gram_ok = false;
  double delta_norm = 0.0;   // |sigma x| for the bottom Gram eigenvector x
  double delta_bound = 0.0;  // sqrt(n / k)

  int submatrix_psd_failures = 0;
  int submatrix_samples = 0;

  double dual_min_eig = 0.0;  // smallest eigenvalue of Lambda - A
  double dual_eps = 0.0;      // max(0, -dual_min_eig)
  double sdp_upper_bound = 0.0;
  bool dual_indeterminate = false;
  bool is_global_certified = false;

  bool theorem_applicable = false;  // requires k >= 2
  double sdp_reference = std::numeric_limits<double>::quiet_NaN();
  double theorem_gap = std::numeric_limits<double>::quiet_NaN();
  double theorem_bound = std::numeric_limits<double>::quiet_NaN();        // (8/sqrt k) n ||A||_2
  double theorem_bound_proof = std::numeric_limits<double>::quiet_NaN();  // (5 sqrt 2/sqrt k) n ||A||_2
  double theorem_slack = 0.0;
  bool theorem_holds = false;
};

/// Stationary-point checks: trace identity, sampled principal-submatrix
/// positive semidefiniteness on index sets of size <= k-1, multiplier norm
/// bound, and the Gram bottom-eigenvalue bound n/k. All outcomes are data;
/// nothing throws on a failed check.
Certificate check_local_maximum(const SymMatrix& a, const SpherePoint& sigma,
                                const Multipliers& m, const TolProfile& tol,
                                double a_op_norm);

struct DualResult {
  double sdp_upper_bound = 0.0;
  double dual_min_eig = 0.0;
  double eps = 0.0;
  bool is_global_certified = false;
  bool indeterminate = false;
};

/// eps = max(0, -min_eig(Lambda - A)); Lambda + eps I is then dual feasible,
/// so Tr(Lambda) + n*eps bounds the SDP value from above. Certification as a
/// global optimum additionally needs a small first-order residual and the
/// trace identity (a stationary non-maximum can have Lambda - A PSD while
/// Tr(Lambda) != F).
DualResult dual_certificate(const SymMatrix& a, const SpherePoint& sigma,
                            const Multipliers& m, const TolProfile& tol,
                            double a_op_norm);

struct GapReport {
  double gap = 0.0;
  double bound = 0.0;        // (8/sqrt k) n ||A||_2
  double bound_proof = 0.0;  // (5 sqrt 2/sqrt k) n ||A||_2
  double slack = 0.0;
  bool holds = false;
  bool applicable = false;  // k >= 2
};

/// gap = sdp_reference - F(sigma); holds when gap <= bound + slack, where the
/// slack should cover the reference's certified error.
GapReport suboptimality_report(const SymMatrix& a, const SpherePoint& sigma,
                               double sdp_reference, double slack, double a_op_norm);

/// Full certificate: multipliers, stationarity checks, dual bound, and (when
/// a reference value is supplied) the suboptimality gap report.
Certificate certify(const SymMatrix& a, const SpherePoint& sigma, const TolProfile& tol,
                    double a_op_norm, std::optional<double> sdp_reference = std::nullopt,
                    double slack = 0.0);

nlohmann::json certificate_to_json(const Certificate& c);

}  // namespace elliptope
