#include "elliptope/refsdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "elliptope/certify.hpp"
#include "elliptope/parallel.hpp"
#include "elliptope/rng.hpp"

namespace elliptope {

ReferenceValue sdp_reference(const SymMatrix& a, ReferenceConfig cfg) {
  const int n = a.n();
  const double a_norm =
      op_norm(a, 1e-8, 50000, derive_key(cfg.seed, StreamTag::op_norm, 1)).value;

  int k = std::min(n, static_cast<int>(std::ceil(std::sqrt(2.0 * n))) + 1);
  int restarts = cfg.restarts;
  if (n <= 16) restarts = std::max(restarts, 8);

  SolverConfig sc = cfg.solver;
  sc.method = Method::coordinate;
  sc.op_norm_hint = a_norm;

  TolProfile tol;
  tol.seed = derive_key(cfg.seed, StreamTag::submatrix, 0);

  ReferenceValue ref;
  ref.method = "highrank_bm";
  ref.value = -std::numeric_limits<double>::infinity();
  double best_upper = std::numeric_limits<double>::infinity();
  bool any_dual = false;

  for (int attempt = 0;; ++attempt) {
    sc.seed = derive_key(cfg.seed, StreamTag::cell, 1000 + attempt);
    const MultiRestartResult mr = multi_restart(a, k, restarts, sc, cfg.threads);
    const Multipliers m = multipliers(a, mr.best.sigma);
    const DualResult dual = dual_certificate(a, mr.best.sigma, m, tol, a_norm);

    if (mr.best.objective > ref.value) {
      ref.value = mr.best.objective;
      ref.k_used = k;
    }
    if (!dual.indeterminate) {
      best_upper = std::min(best_upper, dual.sdp_upper_bound);
      any_dual = true;
    } else {
      ref.dual_converged = false;
    }

    const bool certified = !dual.indeterminate && dual.eps <= cfg.dual_tol * std::max(1.0, a_norm);
    if (certified || attempt >= cfg.max_escalations || k >= n) break;
    // Doubling escalation; the last allowed escalation falls back to k = n.
    k = (attempt == cfg.max_escalations - 1) ? n : std::min(n, 2 * k);
    ++ref.escalations;
  }

  if (!any_dual) {
    // No converged dual bound at all; report the trivial spectral bound.
    best_upper = a_norm * n;
    ref.dual_converged = false;
  }
  ref.upper_bound = std::max(best_upper, ref.value);
  ref.certified_error = ref.upper_bound - ref.value;
  return ref;
}

namespace {

struct AnglePairTerm {
  int i, j;
  double coeff;  // 2 * A_ij
};

double angle_objective(const std::vector<AnglePairTerm>& terms, double diag,
                       const std::vector<double>& theta) {
  double acc = diag;
  for (const auto& t : terms) {
    acc += t.coeff * std::cos(theta[t.i] - theta[t.j]);
  }
  return acc;
}

}  // namespace

double brute_force_sdp(const SymMatrix& a, int resolution) {
  const int n = a.n();
  if (n > 5) throw std::invalid_argument("brute_force_sdp: only n <= 5 supported");
  if (resolution < 4) throw std::invalid_argument("brute_force_sdp: resolution too coarse");
  const double diag = a.diag_sum();
  if (n == 1) return diag;

  std::vector<AnglePairTerm> terms;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      const double v = a.coeff(i, j);
      if (v != 0.0) terms.push_back({i, j, 2.0 * v});
    }
  }

  const int d = n - 1;  // free angles; theta_0 = 0 breaks the global rotation
  const double two_pi = 2.0 * std::acos(-1.0);
  const double coarse_step = two_pi / resolution;

  // Coarse pass, parallel over the first free angle; merged by max with ties
  // to the lowest slice index.
  std::vector<double> slice_best(resolution, -std::numeric_limits<double>::infinity());
  std::vector<std::vector<double>> slice_arg(resolution);
  parallel_for(
      resolution,
      [&](int s) {
        std::vector<double> theta(n, 0.0);
        theta[1] = s * coarse_step;
        std::vector<int> idx(d, 0);
        double best = -std::numeric_limits<double>::infinity();
        std::vector<double> arg;
        for (;;) {
          for (int t = 1; t < d; ++t) theta[t + 1] = idx[t] * coarse_step;
          const double f = angle_objective(terms, diag, theta);
          if (f > best) {
            best = f;
            arg = theta;
          }
          int pos = d - 1;
          while (pos >= 1 && ++idx[pos] == resolution) idx[pos--] = 0;
          if (pos < 1) break;  // idx[0] is the slice dimension
        }
        slice_best[s] = best;
        slice_arg[s] = std::move(arg);
      },
      0);

  int winner = 0;
  for (int s = 1; s < resolution; ++s) {
    if (slice_best[s] > slice_best[winner]) winner = s;
  }
  double best = slice_best[winner];
  std::vector<double> center = slice_arg[winner];

  // Three refinement rounds: 21 points per dimension across +-step, so the
  // grid gets 10x finer each round.
  double step = coarse_step;
  constexpr int kRefinePoints = 21;
  for (int round = 0; round < 3; ++round) {
    std::vector<int> idx(d, 0);
    std::vector<double> theta(n, 0.0);
    std::vector<double> round_arg = center;
    for (;;) {
      for (int t = 0; t < d; ++t) {
        theta[t + 1] = center[t + 1] + (idx[t] - (kRefinePoints - 1) / 2) *
                                           (2.0 * step / (kRefinePoints - 1));
      }
      const double f = angle_objective(terms, diag, theta);
      if (f > best) {
        best = f;
        round_arg = theta;
      }
      int pos = d - 1;
      while (pos >= 0 && ++idx[pos] == kRefinePoints) idx[pos--] = 0;
      if (pos < 0) break;
    }
    center = round_arg;
    step /= 10.0;
  }
  return best;
}

double closed_form_sdp_2x2(const SymMatrix& a) {
  if (a.n() != 2) throw std::invalid_argument("closed_form_sdp_2x2: need n == 2");
  return a.coeff(0, 0) + a.coeff(1, 1) + 2.0 * std::abs(a.coeff(0, 1));
}

nlohmann::json reference_to_json(const ReferenceValue& r) {
  nlohmann::json j;
  j["value"] = r.value;
  j["upper_bound"] = r.upper_bound;
  j["certified_error"] = r.certified_error;
  j["method"] = r.method;
  j["k_used"] = r.k_used;
  j["escalations"] = r.escalations;
  j["dual_converged"] = r.dual_converged;
  return j;
}

}  // namespace elliptope
