#include "elliptope/certify.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "elliptope/rng.hpp"

namespace elliptope {

namespace {

SymMatrix diag_minus_matrix(const Eigen::VectorXd& d, const SymMatrix& a) {
  const int n = a.n();
  if (!a.is_sparse()) {
    std::vector<double> lower(a.lower());
    for (auto& v : lower) v = -v;
    for (int i = 0; i < n; ++i) {
      lower[static_cast<std::size_t>(i) * (i + 1) / 2 + i] += d[i];
    }
    return SymMatrix::from_lower(n, std::move(lower));
  }
  std::vector<Triplet> trip;
  trip.reserve(a.triplets().size() + n);
  std::vector<bool> diag_seen(n, false);
  for (const auto& t : a.triplets()) {
    if (t.row == t.col) {
      trip.push_back({t.row, t.col, d[t.row] - t.value});
      diag_seen[t.row] = true;
    } else {
      trip.push_back({t.row, t.col, -t.value});
    }
  }
  for (int i = 0; i < n; ++i) {
    if (!diag_seen[i]) trip.push_back({i, i, d[i]});
  }
  return SymMatrix::from_triplets(n, std::move(trip));
}

// All index subsets of size <= max_size, if there are at most `cap` of them.
bool enumerate_small_subsets(int n, int max_size, int cap,
                             std::vector<std::vector<int>>& out) {
  out.clear();
  for (int size = 1; size <= max_size; ++size) {
    std::vector<int> combo(size);
    for (int i = 0; i < size; ++i) combo[i] = i;
    for (;;) {
      out.push_back(combo);
      if (static_cast<int>(out.size()) > cap) return false;
      int pos = size - 1;
      while (pos >= 0 && combo[pos] == n - size + pos) --pos;
      if (pos < 0) break;
      ++combo[pos];
      for (int i = pos + 1; i < size; ++i) combo[i] = combo[i - 1] + 1;
    }
  }
  return true;
}

std::vector<std::vector<int>> sample_subsets(int n, int max_size, int count,
                                             std::uint64_t seed) {
  std::vector<std::vector<int>> subsets;
  if (max_size < 1) return subsets;
  if (enumerate_small_subsets(n, max_size, count, subsets)) return subsets;
  subsets.clear();
  subsets.reserve(count);
  for (int t = 0; t < count; ++t) {
    Rng rng(derive_key(seed, StreamTag::submatrix, t));
    const int size = 1 + static_cast<int>(rng.next_u64() %
                                          static_cast<std::uint64_t>(max_size));
    // Partial Fisher-Yates over 0..n-1.
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;
    std::vector<int> pick(size);
    for (int i = 0; i < size; ++i) {
      const int j = i + static_cast<int>(rng.next_u64() %
                                         static_cast<std::uint64_t>(n - i));
      std::swap(pool[i], pool[j]);
      pick[i] = pool[i];
    }
    std::sort(pick.begin(), pick.end());
    subsets.push_back(std::move(pick));
  }
  return subsets;
}

}  // namespace

Multipliers multipliers(const SymMatrix& a, const SpherePoint& sigma) {
  if (a.n() != sigma.n()) throw std::invalid_argument("multipliers: dimension mismatch");
  const RowMat g = a.apply(sigma.rows());
  Multipliers m;
  m.lambda.resize(sigma.n());
  for (int i = 0; i < sigma.n(); ++i) {
    m.lambda[i] = g.row(i).norm();
    m.trace += m.lambda[i];
  }
  return m;
}

double first_order_residual(const SymMatrix& a, const SpherePoint& sigma,
                            const Multipliers& m) {
  const RowMat g = a.apply(sigma.rows());
  double acc = 0.0;
  for (int i = 0; i < sigma.n(); ++i) {
    acc += (m.lambda[i] * sigma.rows().row(i) - g.row(i)).squaredNorm();
  }
  return std::sqrt(acc);
}

Certificate check_local_maximum(const SymMatrix& a, const SpherePoint& sigma,
                                const Multipliers& m, const TolProfile& tol,
                                double a_op_norm) {
  const int n = sigma.n(), k = sigma.k();
  Certificate c;
  c.n = n;
  c.k = k;
  c.op_norm_value = a_op_norm;
  c.objective = objective(a, sigma);

  c.first_order_residual = first_order_residual(a, sigma, m);
  c.at_stationary_point =
      c.first_order_residual <= tol.stationarity * std::max(1.0, a_op_norm) * std::sqrt(double(n));

  c.multiplier_trace = m.trace;
  c.trace_gap = std::abs(c.objective - m.trace);
  c.trace_matches_objective = c.trace_gap <= tol.identity_rel * (1.0 + std::abs(c.objective));

  c.multiplier_norm_sq = m.lambda.squaredNorm();
  c.multiplier_norm_bound = n * a_op_norm * a_op_norm;
  c.multiplier_norm_ok = c.multiplier_norm_sq <= c.multiplier_norm_bound * (1.0 + tol.norm_rel);

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < n; ++i) {
    gram.selfadjointView<Eigen::Lower>().rankUpdate(sigma.rows().row(i).transpose());
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  c.gram_min_eig = es.eigenvalues()(0);
  c.gram_bound = double(n) / k;
  c.gram_ok = c.gram_min_eig <= c.gram_bound + tol.identity_rel * n;
  // Bottom Gram eigenvector x gives the flattest mixture sigma * x.
  Eigen::VectorXd x = es.eigenvectors().col(0);
  double delta_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double coord = sigma.rows().row(i).dot(x.transpose());
    delta_sq += coord * coord;
  }
  c.delta_norm = std::sqrt(delta_sq);
  c.delta_bound = std::sqrt(double(n) / k);

  const auto subsets = sample_subsets(n, k - 1, tol.submatrix_samples, tol.seed);
  c.submatrix_samples = static_cast<int>(subsets.size());
  for (const auto& s : subsets) {
    const int sz = static_cast<int>(s.size());
    Eigen::MatrixXd block(sz, sz);
    for (int p = 0; p < sz; ++p) {
      for (int q = 0; q < sz; ++q) {
        const double apq = a.coeff(s[p], s[q]);
        block(p, q) = (p == q ? m.lambda[s[p]] - apq : -apq);
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> bes(block, Eigen::EigenvaluesOnly);
    if (bes.eigenvalues()(0) < -tol.eig_abs * a_op_norm) ++c.submatrix_psd_failures;
  }
  return c;
}

DualResult dual_certificate(const SymMatrix& a, const SpherePoint& sigma,
                            const Multipliers& m, const TolProfile& tol,
                            double a_op_norm) {
  const int n = sigma.n();
  DualResult d;
  const SymMatrix gap_matrix = diag_minus_matrix(m.lambda, a);
  const EigEstimate me = min_eig_estimate(gap_matrix, 1e-10, tol.seed);
  d.dual_min_eig = me.value;
  d.indeterminate = !me.converged;
  d.eps = std::max(0.0, -me.value);
  d.sdp_upper_bound = m.trace + n * d.eps;

  const double resid = first_order_residual(a, sigma, m);
  const double objective_value = objective(a, sigma);
  const bool stationary =
      resid <= tol.stationarity * std::max(1.0, a_op_norm) * std::sqrt(double(n));
  const bool trace_ok =
      std::abs(objective_value - m.trace) <= tol.identity_rel * (1.0 + std::abs(objective_value));
  d.is_global_certified = !d.indeterminate && stationary && trace_ok &&
                          d.eps <= tol.eig_abs * std::max(1.0, a_op_norm);
  return d;
}

GapReport suboptimality_report(const SymMatrix& a, const SpherePoint& sigma,
                               double sdp_reference, double slack, double a_op_norm) {
  if (!std::isfinite(sdp_reference)) {
    throw std::invalid_argument("suboptimality_report: reference value required");
  }
  const int n = sigma.n(), k = sigma.k();
  GapReport r;
  r.applicable = k >= 2;
  r.slack = slack;
  r.gap = sdp_reference - objective(a, sigma);
  r.bound = 8.0 * n * a_op_norm / std::sqrt(double(k));
  r.bound_proof = 5.0 * std::sqrt(2.0) * n * a_op_norm / std::sqrt(double(k));
  r.holds = r.applicable && r.gap <= r.bound + slack;
  return r;
}

Certificate certify(const SymMatrix& a, const SpherePoint& sigma, const TolProfile& tol,
                    double a_op_norm, std::optional<double> sdp_reference, double slack) {
  const Multipliers m = multipliers(a, sigma);
  Certificate c = check_local_maximum(a, sigma, m, tol, a_op_norm);
  const DualResult d = dual_certificate(a, sigma, m, tol, a_op_norm);
  c.dual_min_eig = d.dual_min_eig;
  c.dual_eps = d.eps;
  c.sdp_upper_bound = d.sdp_upper_bound;
  c.dual_indeterminate = d.indeterminate;
  c.is_global_certified = d.is_global_certified;
  c.theorem_applicable = sigma.k() >= 2;
  if (sdp_reference) {
    const GapReport g = suboptimality_report(a, sigma, *sdp_reference, slack, a_op_norm);
    c.sdp_reference = *sdp_reference;
    c.theorem_gap = g.gap;
    c.theorem_bound = g.bound;
    c.theorem_bound_proof = g.bound_proof;
    c.theorem_slack = slack;
    c.theorem_holds = g.holds;
  }
  return c;
}

nlohmann::json certificate_to_json(const Certificate& c) {
  nlohmann::json j;
  j["n"] = c.n;
  j["k"] = c.k;
  j["objective"] = c.objective;
  j["op_norm"] = c.op_norm_value;
  j["first_order_residual"] = c.first_order_residual;
  j["at_stationary_point"] = c.at_stationary_point;
  j["multiplier_trace"] = c.multiplier_trace;
  j["trace_gap"] = c.trace_gap;
  j["trace_matches_objective"] = c.trace_matches_objective;
  j["multiplier_norm_sq"] = c.multiplier_norm_sq;
  j["multiplier_norm_bound"] = c.multiplier_norm_bound;
  j["multiplier_norm_ok"] = c.multiplier_norm_ok;
  j["gram_min_eig"] = c.gram_min_eig;
  j["gram_bound"] = c.gram_bound;
  j["gram_ok"] = c.gram_ok;
  j["delta_norm"] = c.delta_norm;
  j["delta_bound"] = c.delta_bound;
  j["submatrix_psd_failures"] = c.submatrix_psd_failures;
  j["submatrix_samples"] = c.submatrix_samples;
  j["dual_min_eig"] = c.dual_min_eig;
  j["dual_eps"] = c.dual_eps;
  j["sdp_upper_bound"] = c.sdp_upper_bound;
  j["dual_indeterminate"] = c.dual_indeterminate;
  j["is_global_certified"] = c.is_global_certified;
  if (c.theorem_applicable) {
    j["theorem_applicable"] = true;
    if (std::isfinite(c.sdp_reference)) {
      j["sdp_reference"] = c.sdp_reference;
      j["theorem_gap"] = c.theorem_gap;
      j["theorem_bound"] = c.theorem_bound;
      j["theorem_bound_proof"] = c.theorem_bound_proof;
      j["theorem_slack"] = c.theorem_slack;
      j["theorem_holds"] = c.theorem_holds;
    }
  } else {
    j["theorem_applicable"] = false;
    j["theorem_status"] = "inapplicable_k1";
  }
  return j;
}

}  // namespace elliptope
