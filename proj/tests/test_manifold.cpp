#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "doctest.h"

#include "elliptope/instances.hpp"
#include "elliptope/manifold.hpp"
#include "elliptope/rng.hpp"
#include "elliptope/solver.hpp"

using namespace elliptope;

namespace {

std::string scratch_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "elliptope_manifold_tests";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

SpherePoint two_rows(const Eigen::RowVector2d& r0, const Eigen::RowVector2d& r1) {
  RowMat rows(2, 2);
  rows.row(0) = r0;
  rows.row(1) = r1;
  return SpherePoint::from_rows(rows);
}

SpherePoint triangle_optimum() {
  RowMat rows(3, 2);
  rows << 1.0, 0.0, -0.5, std::sqrt(3.0) / 2.0, -0.5, -std::sqrt(3.0) / 2.0;
  return SpherePoint::from_rows(rows);
}

// First Taylor coefficient of t -> F(geodesic(sigma, u, t)) at t = 0.
double analytic_first(const SymMatrix& a, const SpherePoint& s, const TangentVector& u) {
  const RowMat g = a.apply(s.rows());
  double acc = 0.0;
  for (int i = 0; i < s.n(); ++i) acc += u.rows.row(i).dot(g.row(i));
  return 2.0 * acc;
}

// Second Taylor coefficient: 2 * (sum_ij A_ij <u_i,u_j> - sum_i |u_i|^2 <sigma_i,g_i>).
double analytic_second(const SymMatrix& a, const SpherePoint& s, const TangentVector& u) {
  const RowMat g = a.apply(s.rows());
  const RowMat au = a.apply(u.rows);
  double quad = 0.0, radial = 0.0;
  for (int i = 0; i < s.n(); ++i) {
    quad += u.rows.row(i).dot(au.row(i));
    radial += u.rows.row(i).squaredNorm() * s.rows().row(i).dot(g.row(i));
  }
  return 2.0 * (quad - radial);
}

}  // namespace

TEST_SUITE("manifold") {

TEST_CASE("objective on closed forms") {
  Rng rng(derive_key(4, StreamTag::probe, 0));
  SymMatrix eye = SymMatrix::from_eigen(Eigen::MatrixXd::Identity(6, 6));
  SpherePoint s = SpherePoint::random(6, 3, rng);
  CHECK(objective(eye, s) == doctest::Approx(6.0).epsilon(1e-12));

  SymMatrix swap = SymMatrix::from_triplets(2, {{1, 0, 1.0}});
  SpherePoint aligned = two_rows({1.0, 0.0}, {1.0, 0.0});
  CHECK(objective(swap, aligned) == doctest::Approx(2.0));

  CHECK(objective(fixture("triangle").a, triangle_optimum()) ==
        doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("triangle optimum confirmed by an angle grid") {
  // Independent oracle: exhaustive grid over the two free angles at 1e-3 of
  // a turn, F = -2[cos(t2) + cos(t3) + cos(t2 - t3)].
  const double two_pi = 2.0 * std::acos(-1.0);
  double best = -1e300;
  const int res = 1000;
  for (int i = 0; i < res; ++i) {
    for (int j = 0; j < res; ++j) {
      const double t2 = i * two_pi / res, t3 = j * two_pi / res;
      const double f = -2.0 * (std::cos(t2) + std::cos(t3) + std::cos(t2 - t3));
      best = std::max(best, f);
    }
  }
  CHECK(best == doctest::Approx(3.0).epsilon(1e-4));
}

TEST_CASE("objective equals the explicit Gram form") {
  for (std::uint64_t seed : {5u, 6u}) {
    SymMatrix a = gen_goe(48, seed);
    Rng rng(derive_key(seed, StreamTag::probe, 1));
    SpherePoint s = SpherePoint::random(48, 5, rng);
    const Eigen::MatrixXd dense = a.to_eigen();
    Eigen::MatrixXd sig(48, 5);
    for (int i = 0; i < 48; ++i) sig.row(i) = s.rows().row(i);
    const double gram_form = (dense * sig * sig.transpose()).trace();
    CHECK(objective(a, s) == doctest::Approx(gram_form).epsilon(1e-10));
  }
}

TEST_CASE("gradients on closed forms") {
  Rng rng(derive_key(8, StreamTag::probe, 0));
  SymMatrix eye = SymMatrix::from_eigen(Eigen::MatrixXd::Identity(4, 4));
  SpherePoint s = SpherePoint::random(4, 2, rng);
  CHECK((euclidean_grad(eye, s) - 2.0 * s.rows()).norm() == doctest::Approx(0.0));
  CHECK(riemannian_grad(eye, s).frob_norm() == doctest::Approx(0.0).epsilon(1e-14));

  SymMatrix zero = SymMatrix::dense_zero(4);
  SpherePoint s4 = SpherePoint::random(4, 2, rng);
  CHECK(euclidean_grad(zero, s4).norm() == 0.0);

  SymMatrix swap = SymMatrix::from_triplets(2, {{1, 0, 1.0}});
  SpherePoint basis = two_rows({1.0, 0.0}, {0.0, 1.0});
  RowMat g = euclidean_grad(swap, basis);
  CHECK(g(0, 0) == 0.0);
  CHECK(g(0, 1) == 2.0);
  CHECK(g(1, 0) == 2.0);
  CHECK(g(1, 1) == 0.0);
  // already tangent at this point
  TangentVector rg = riemannian_grad(swap, basis);
  CHECK((rg.rows - g).norm() == doctest::Approx(0.0));
}

TEST_CASE("retract basics") {
  SpherePoint basis = two_rows({1.0, 0.0}, {0.0, 1.0});
  TangentVector u;
  u.base = &basis;
  u.rows = RowMat::Zero(2, 2);
  u.rows(0, 1) = 1.0;

  SpherePoint unchanged = retract(basis, u, 0.0);
  CHECK((unchanged.rows() - basis.rows()).norm() == 0.0);

  SpherePoint moved = retract(basis, u, 1.0);
  CHECK(moved.rows()(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(moved.rows()(0, 1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(moved.max_row_norm_error() <= 1e-15);

  // step that collapses row 0
  TangentVector bad;
  bad.base = &basis;
  bad.rows = RowMat::Zero(2, 2);
  bad.rows(0, 0) = -1.0;
  CHECK_THROWS_AS(retract(basis, bad, 1.0), std::runtime_error);
}

TEST_CASE("geodesic curve basics") {
  Rng rng(derive_key(12, StreamTag::probe, 0));
  SpherePoint s = SpherePoint::random(10, 3, rng);

  TangentVector u = random_tangent(s, rng);
  SpherePoint at0 = geodesic_curve(s, u, 0.0);
  CHECK((at0.rows() - s.rows()).norm() == 0.0);
  CHECK(at0.max_row_norm_error() <= 1e-12);

  // half period on a single row: |u_0| = pi flips the row
  Eigen::RowVector3d dir = u.rows.row(0);
  if (dir.norm() < 1e-12) dir << 0.0, 1.0, 0.0;
  TangentVector probe;
  probe.base = &s;
  probe.rows = RowMat::Zero(10, 3);
  probe.rows.row(0) = dir / dir.norm() * std::acos(-1.0);
  SpherePoint flipped = geodesic_curve(s, probe, 1.0);
  CHECK((flipped.rows().row(0) + s.rows().row(0)).norm() ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK((flipped.rows().row(1) - s.rows().row(1)).norm() == 0.0);
}

TEST_CASE("first derivative along geodesics matches the analytic coefficient") {
  SymMatrix a = gen_goe(30, 41);
  Rng rng(derive_key(41, StreamTag::probe, 2));
  const double h = 1e-5;
  for (int trial = 0; trial < 20; ++trial) {
    SpherePoint s = SpherePoint::random(30, 4, rng);
    TangentVector u = random_tangent(s, rng);
    const double fd = (objective(a, geodesic_curve(s, u, h)) -
                       objective(a, geodesic_curve(s, u, -h))) /
                      (2.0 * h);
    const double exact = analytic_first(a, s, u);
    CHECK(std::abs(fd - exact) <= 1e-6 * (1.0 + std::abs(exact)));
  }
}

TEST_CASE("first-derivative error shrinks quadratically in h") {
  SymMatrix a = gen_goe(24, 51);
  Rng rng(derive_key(51, StreamTag::probe, 3));
  std::vector<double> ratios;
  int clearly_quadratic = 0;
  for (int trial = 0; trial < 20; ++trial) {
    SpherePoint s = SpherePoint::random(24, 3, rng);
    TangentVector u = random_tangent(s, rng);
    const double exact = analytic_first(a, s, u);
    auto fd_error = [&](double h) {
      const double fd = (objective(a, geodesic_curve(s, u, h)) -
                         objective(a, geodesic_curve(s, u, -h))) /
                        (2.0 * h);
      return std::abs(fd - exact);
    };
    const double e3 = fd_error(1e-3), e4 = fd_error(1e-4);
    if (e4 <= e3 / 20.0 + 1e-12) ++clearly_quadratic;
    if (e4 > 1e-14) ratios.push_back(e3 / e4);
  }
  CHECK(clearly_quadratic >= 15);  // ~100x expected; a few flat directions allowed
  if (!ratios.empty()) {
    std::sort(ratios.begin(), ratios.end());
    const double median = ratios[ratios.size() / 2];
    CHECK(median >= 20.0);
    CHECK(median <= 1000.0);
  }
}

TEST_CASE("second difference matches the curvature coefficient") {
  SymMatrix a = gen_goe(30, 61);
  Rng rng(derive_key(61, StreamTag::probe, 4));
  SpherePoint s = SpherePoint::random(30, 4, rng);
  const double h = 1e-3;
  for (int trial = 0; trial < 10; ++trial) {
    TangentVector u = random_tangent(s, rng);
    const double f0 = objective(a, s);
    const double fd2 = (objective(a, geodesic_curve(s, u, h)) +
                        objective(a, geodesic_curve(s, u, -h)) - 2.0 * f0) /
                       (h * h);
    const double exact = analytic_second(a, s, u);
    CHECK(std::abs(fd2 - exact) <= 1e-4 * (1.0 + std::abs(exact)));
  }
}

TEST_CASE("second difference at a converged point equals -2 * second_order_form") {
  SymMatrix a = gen_goe(24, 71);
  SolverConfig cfg;
  cfg.seed = 5;
  cfg.obj_tol = 1e-13;
  auto mr = multi_restart(a, 4, 3, cfg);
  const SpherePoint& s = mr.best.sigma;

  // multipliers lambda_i = |g_i| coincide with <sigma_i, g_i> at a maximum
  const RowMat g = a.apply(s.rows());
  Eigen::VectorXd lambda(s.n());
  for (int i = 0; i < s.n(); ++i) lambda[i] = g.row(i).norm();

  Rng rng(derive_key(71, StreamTag::probe, 5));
  const double h = 1e-3;
  for (int trial = 0; trial < 5; ++trial) {
    TangentVector u = random_tangent(s, rng);
    const double fd2 = (objective(a, geodesic_curve(s, u, h)) +
                        objective(a, geodesic_curve(s, u, -h)) -
                        2.0 * objective(a, s)) /
                       (h * h);
    const double form = second_order_form(a, lambda, u);
    CHECK(std::abs(fd2 + 2.0 * form) <= 1e-4 * (1.0 + std::abs(form)));
  }
}

TEST_CASE("retract agrees with the geodesic to second order") {
  Rng rng(derive_key(81, StreamTag::probe, 6));
  SpherePoint s = SpherePoint::random(20, 3, rng);
  TangentVector u = random_tangent(s, rng);
  const double d2 = (retract(s, u, 1e-2).rows() - geodesic_curve(s, u, 1e-2).rows()).norm();
  const double d3 = (retract(s, u, 1e-3).rows() - geodesic_curve(s, u, 1e-3).rows()).norm();
  // Both curves share first and second Taylor terms, so the difference decays
  // at least quadratically (the observed rate is cubic).
  CHECK(d2 <= 1.0 * 1e-4);
  CHECK(d3 <= 1.0 * 1e-6);
  if (d3 > 1e-16) CHECK(d2 / d3 >= 50.0);
}

TEST_CASE("second_order_form edge cases and near-positivity at maxima") {
  SymMatrix zero = SymMatrix::dense_zero(5);
  Rng rng(derive_key(91, StreamTag::probe, 7));
  SpherePoint s = SpherePoint::random(5, 2, rng);
  TangentVector u;
  u.base = &s;
  u.rows = RowMat::Zero(5, 2);
  CHECK(second_order_form(zero, Eigen::VectorXd::Zero(5), u) == 0.0);

  TangentVector r = random_tangent(s, rng);
  CHECK(second_order_form(zero, Eigen::VectorXd::Zero(5), r) == doctest::Approx(0.0));

  SymMatrix a = gen_goe(30, 101);
  const double a_norm = op_norm(a, 1e-8, 20000, 1).value;
  SolverConfig cfg;
  cfg.seed = 3;
  cfg.obj_tol = 1e-13;
  auto mr = multi_restart(a, 5, 3, cfg);
  const RowMat g = a.apply(mr.best.sigma.rows());
  Eigen::VectorXd lambda(30);
  for (int i = 0; i < 30; ++i) lambda[i] = g.row(i).norm();
  for (int trial = 0; trial < 20; ++trial) {
    TangentVector t = random_tangent(mr.best.sigma, rng);
    CHECK(second_order_form(a, lambda, t) >= -1e-6 * 30 * a_norm);
  }
}

TEST_CASE("tangent projection respects the orthogonality invariant") {
  Rng rng(derive_key(111, StreamTag::probe, 8));
  SpherePoint s = SpherePoint::random(40, 6, rng);
  for (int trial = 0; trial < 10; ++trial) {
    TangentVector u = random_tangent(s, rng);
    CHECK(max_tangency_error(s, u) <= 1e-10);
  }
}

TEST_CASE("sigma CSV round trip") {
  Rng rng(derive_key(121, StreamTag::probe, 9));
  SpherePoint s = SpherePoint::random(12, 4, rng);
  const std::string path = scratch_path("sigma.csv");
  write_sigma_csv(s, path);
  SpherePoint back = read_sigma_csv(path);
  CHECK(back.n() == 12);
  CHECK(back.k() == 4);
  CHECK((back.rows() - s.rows()).norm() <= 1e-15);

  // corrupt row norms are rejected at the 1e-6 gate
  RowMat bad = s.rows();
  bad.row(3) *= 1.5;
  const std::string bad_path = scratch_path("sigma_bad.csv");
  {
    std::ofstream out(bad_path);
    out << "# n=12 k=4\n";
    char buf[64];
    for (int i = 0; i < 12; ++i) {
      for (int a = 0; a < 4; ++a) {
        std::snprintf(buf, sizeof(buf), "%.17g", bad(i, a));
        out << buf << (a + 1 < 4 ? "," : "\n");
      }
    }
  }
  CHECK_THROWS(read_sigma_csv(bad_path));
}

}  // TEST_SUITE
