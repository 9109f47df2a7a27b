#include <cmath>

#include "doctest.h"

#include "elliptope/certify.hpp"
#include "elliptope/instances.hpp"
#include "elliptope/rng.hpp"
#include "elliptope/solver.hpp"

using namespace elliptope;

namespace {

SpherePoint triangle_optimum() {
  RowMat rows(3, 2);
  rows << 1.0, 0.0, -0.5, std::sqrt(3.0) / 2.0, -0.5, -std::sqrt(3.0) / 2.0;
  return SpherePoint::from_rows(rows);
}

SpherePoint antipodal_pair() {
  RowMat rows(2, 2);
  rows << 1.0, 0.0, -1.0, 0.0;
  return SpherePoint::from_rows(rows);
}

}  // namespace

TEST_SUITE("certify") {

TEST_CASE("multipliers on closed forms") {
  // all-ones matrix, all rows equal: g_i = n sigma_1, lambda_i = n
  const int n = 4;
  SymMatrix ones = SymMatrix::from_eigen(Eigen::MatrixXd::Ones(n, n));
  RowMat rows(n, 2);
  for (int i = 0; i < n; ++i) rows.row(i) << 1.0, 0.0;
  SpherePoint s = SpherePoint::from_rows(rows);
  auto m = multipliers(ones, s);
  for (int i = 0; i < n; ++i) CHECK(m.lambda[i] == doctest::Approx(double(n)));
  CHECK(m.trace == doctest::Approx(double(n * n)));

  SymMatrix zero = SymMatrix::dense_zero(3);
  Rng rng(derive_key(1, StreamTag::probe, 0));
  auto mz = multipliers(zero, SpherePoint::random(3, 2, rng));
  CHECK(mz.lambda.norm() == 0.0);
  CHECK(mz.trace == 0.0);

  auto mt = multipliers(fixture("triangle").a, triangle_optimum());
  for (int i = 0; i < 3; ++i) CHECK(mt.lambda[i] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mt.trace == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("identity matrix passes every stationarity check exactly") {
  const int n = 6;
  SymMatrix eye = SymMatrix::from_eigen(Eigen::MatrixXd::Identity(n, n));
  Rng rng(derive_key(2, StreamTag::probe, 0));
  SpherePoint s = SpherePoint::random(n, 3, rng);
  auto m = multipliers(eye, s);
  TolProfile tol;
  auto cert = certify(eye, s, tol, /*a_op_norm=*/1.0);
  CHECK(cert.objective == doctest::Approx(double(n)));
  CHECK(cert.trace_matches_objective);
  CHECK(cert.multiplier_norm_ok);
  CHECK(cert.gram_ok);
  CHECK(cert.submatrix_psd_failures == 0);
  CHECK(cert.dual_eps == doctest::Approx(0.0));
  CHECK(cert.sdp_upper_bound == doctest::Approx(double(n)));
  CHECK(cert.is_global_certified);
}

TEST_CASE("gram bound boundary case passes") {
  // rows (e1, e2, e1, e2): sigma^T sigma = diag(2, 2), xi_min = n/k exactly
  RowMat rows(4, 2);
  rows << 1, 0, 0, 1, 1, 0, 0, 1;
  SpherePoint s = SpherePoint::from_rows(rows);
  SymMatrix eye = SymMatrix::from_eigen(Eigen::MatrixXd::Identity(4, 4));
  auto m = multipliers(eye, s);
  TolProfile tol;
  auto cert = check_local_maximum(eye, s, m, tol, 1.0);
  CHECK(cert.gram_min_eig == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(cert.gram_bound == doctest::Approx(2.0));
  CHECK(cert.gram_ok);
  CHECK(cert.delta_norm <= cert.delta_bound + 1e-9);
}

TEST_CASE("converged GOE solve passes all checks at tight tolerance") {
  SymMatrix a = gen_goe(100, 19);
  const double a_norm = op_norm(a, 1e-8, 30000, 1).value;
  SolverConfig cfg;
  cfg.seed = 23;
  cfg.obj_tol = 1e-12;
  cfg.op_norm_hint = a_norm;
  auto mr = multi_restart(a, 20, 3, cfg);
  REQUIRE(mr.best.converged);

  TolProfile tol;
  tol.identity_rel = 1e-8;
  tol.eig_abs = 1e-8;
  tol.seed = 5;
  auto m = multipliers(a, mr.best.sigma);
  auto cert = check_local_maximum(a, mr.best.sigma, m, tol, a_norm);
  CHECK(cert.at_stationary_point);
  CHECK(cert.trace_matches_objective);
  CHECK(cert.multiplier_norm_ok);
  CHECK(cert.gram_ok);
  CHECK(cert.submatrix_samples == 50);
  CHECK(cert.submatrix_psd_failures == 0);
}

TEST_CASE("dual certificate on closed forms") {
  const int n = 5;
  SymMatrix eye = SymMatrix::from_eigen(Eigen::MatrixXd::Identity(n, n));
  Rng rng(derive_key(3, StreamTag::probe, 0));
  SpherePoint s = SpherePoint::random(n, 2, rng);
  auto m = multipliers(eye, s);
  TolProfile tol;
  auto dual = dual_certificate(eye, s, m, tol, 1.0);
  CHECK(dual.eps == doctest::Approx(0.0));
  CHECK(dual.sdp_upper_bound == doctest::Approx(double(n)));
  CHECK(dual.is_global_certified);

  // triangle optimum: Lambda - A = all-ones, eigenvalues {3, 0, 0}
  const SymMatrix tri = fixture("triangle").a;
  SpherePoint opt = triangle_optimum();
  auto mt = multipliers(tri, opt);
  auto dt = dual_certificate(tri, opt, mt, tol, 2.0);
  CHECK(dt.dual_min_eig == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(dt.eps <= 1e-10);
  CHECK(dt.sdp_upper_bound == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(dt.is_global_certified);
}

TEST_CASE("the antipodal saddle is not certified despite a PSD dual matrix") {
  SymMatrix swap = SymMatrix::from_triplets(2, {{1, 0, 1.0}});
  SpherePoint saddle = antipodal_pair();
  auto m = multipliers(swap, saddle);
  CHECK(m.lambda[0] == doctest::Approx(1.0));
  CHECK(m.trace == doctest::Approx(2.0));

  TolProfile tol;
  auto cert = certify(swap, saddle, tol, 1.0);
  // Lambda - A = [[1,-1],[-1,1]] is PSD, so the upper bound is Tr(Lambda) = 2,
  // but F = -2: the trace identity and the residual both rule out certification.
  CHECK(cert.objective == doctest::Approx(-2.0));
  CHECK(cert.dual_eps == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(cert.sdp_upper_bound == doctest::Approx(2.0));
  CHECK_FALSE(cert.trace_matches_objective);
  CHECK_FALSE(cert.at_stationary_point);
  CHECK_FALSE(cert.is_global_certified);
}

TEST_CASE("weak duality holds against arbitrary feasible points") {
  SymMatrix a = gen_goe(30, 29);
  const double a_norm = op_norm(a, 1e-8, 20000, 1).value;
  SolverConfig cfg;
  cfg.seed = 31;
  auto mr = multi_restart(a, 6, 2, cfg);
  TolProfile tol;
  auto m = multipliers(a, mr.best.sigma);
  auto dual = dual_certificate(a, mr.best.sigma, m, tol, a_norm);

  Rng rng(derive_key(5, StreamTag::probe, 0));
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 1 + static_cast<int>(rng.next_u64() % 30);
    SpherePoint probe = SpherePoint::random(30, k, rng);
    CHECK(dual.sdp_upper_bound >= objective(a, probe) - 1e-8 * 30 * std::max(1.0, a_norm));
  }
  for (const auto& rep : mr.all) {
    CHECK(dual.sdp_upper_bound >= rep.objective - 1e-8 * 30 * std::max(1.0, a_norm));
  }
}

TEST_CASE("trace identity at solver fixed points") {
  SymMatrix a = gen_goe(60, 43);
  SolverConfig cfg;
  cfg.seed = 3;
  auto mr = multi_restart(a, 8, 3, cfg);
  for (const auto& rep : mr.all) {
    if (!rep.converged) continue;
    auto m = multipliers(a, rep.sigma);
    CHECK(std::abs(rep.objective - m.trace) <= 1e-8 * (1.0 + std::abs(rep.objective)) * 60);
  }
}

TEST_CASE("suboptimality bound is monotone decreasing in k") {
  SymMatrix a = gen_goe(25, 47);
  const double a_norm = op_norm(a, 1e-8, 20000, 1).value;
  Rng rng(derive_key(7, StreamTag::probe, 0));
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 2; k <= 12; ++k) {
    SpherePoint s = SpherePoint::random(25, k, rng);
    auto rep = suboptimality_report(a, s, /*sdp_reference=*/10.0, 0.0, a_norm);
    CHECK(rep.bound < prev);
    CHECK(rep.bound_proof < rep.bound);  // 5*sqrt(2) < 8
    prev = rep.bound;
  }
}

TEST_CASE("gram bound holds for arbitrary points, not only maxima") {
  Rng rng(derive_key(9, StreamTag::probe, 0));
  SymMatrix eye = SymMatrix::from_eigen(Eigen::MatrixXd::Identity(20, 20));
  TolProfile tol;
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 1 + static_cast<int>(rng.next_u64() % 8);
    SpherePoint s = SpherePoint::random(20, k, rng);
    auto m = multipliers(eye, s);
    auto cert = check_local_maximum(eye, s, m, tol, 1.0);
    CHECK(cert.gram_min_eig <= 20.0 / k + 1e-9);
  }
}

TEST_CASE("k = 1 certificates skip the rank-dependent pieces") {
  SymMatrix swap = SymMatrix::from_triplets(2, {{1, 0, 1.0}});
  RowMat rows(2, 1);
  rows << 1.0, 1.0;
  SpherePoint s = SpherePoint::from_rows(rows);
  TolProfile tol;
  auto cert = certify(swap, s, tol, 1.0);
  CHECK_FALSE(cert.theorem_applicable);
  CHECK(cert.submatrix_samples == 0);
  for (int i = 0; i < 2; ++i) CHECK(cert.k >= 1);
  auto j = certificate_to_json(cert);
  CHECK(j.at("theorem_status") == "inapplicable_k1");
}

TEST_CASE("certificate JSON carries raw numbers and booleans") {
  const SymMatrix tri = fixture("triangle").a;
  SpherePoint opt = triangle_optimum();
  TolProfile tol;
  auto cert = certify(tri, opt, tol, 2.0, /*sdp_reference=*/3.0, /*slack=*/1e-8);
  auto j = certificate_to_json(cert);
  CHECK(j.at("objective").get<double>() == doctest::Approx(3.0));
  CHECK(j.at("is_global_certified").get<bool>());
  CHECK(j.at("theorem_holds").get<bool>());
  CHECK(j.at("theorem_gap").get<double>() == doctest::Approx(0.0).epsilon(1e-9));
  // stated-constant and proof-constant bounds both present
  const double b8 = j.at("theorem_bound").get<double>();
  const double b7 = j.at("theorem_bound_proof").get<double>();
  CHECK(b8 == doctest::Approx(8.0 * 3 * 2.0 / std::sqrt(2.0)));
  CHECK(b7 == doctest::Approx(5.0 * std::sqrt(2.0) * 3 * 2.0 / std::sqrt(2.0)));
  CHECK(j.dump().find("theorem_slack") != std::string::npos);
}

}  // TEST_SUITE
