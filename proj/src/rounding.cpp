#include "elliptope/rounding.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "elliptope/rng.hpp"

namespace elliptope {

namespace {
double sign_objective(const SymMatrix& a, const Eigen::VectorXd& x) {
  return x.dot(a.matvec(x));
}

RoundResult finish(const SymMatrix& a, Eigen::VectorXd x, double objective) {
  RoundResult r;
  r.x = std::move(x);
  r.objective = objective;
  r.cut_value = (objective + 2.0 * a.offdiag_abs_weight()) / 4.0;
  return r;
}
}  // namespace

RoundResult round_sign_first_col(const SymMatrix& a, const SpherePoint& sigma) {
  if (a.n() != sigma.n()) throw std::invalid_argument("round: dimension mismatch");
  const int n = sigma.n();
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = sigma.rows()(i, 0) < 0.0 ? -1.0 : 1.0;
  return finish(a, x, sign_objective(a, x));
}

RoundResult round_hyperplane(const SymMatrix& a, const SpherePoint& sigma, int trials,
                             std::uint64_t seed) {
  if (a.n() != sigma.n()) throw std::invalid_argument("round: dimension mismatch");
  if (trials < 1) throw std::invalid_argument("round: trials must be >= 1");
  const int n = sigma.n(), k = sigma.k();
  Eigen::VectorXd best_x(n), x(n);
  double best_f = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_key(seed, StreamTag::hyperplane, t));
    Eigen::VectorXd r(k);
    double norm = 0.0;
    do {
      for (int c = 0; c < k; ++c) r[c] = rng.next_gaussian();
      norm = r.norm();
    } while (norm < 1e-12);
    r /= norm;
    for (int i = 0; i < n; ++i) {
      x[i] = sigma.rows().row(i).dot(r.transpose()) < 0.0 ? -1.0 : 1.0;
    }
    const double f = sign_objective(a, x);
    if (f > best_f) {
      best_f = f;
      best_x = x;
    }
  }
  return finish(a, best_x, best_f);
}

double overlap(const Eigen::VectorXd& x, const Eigen::VectorXi& x0) {
  if (x.size() != x0.size()) throw std::invalid_argument("overlap: dimension mismatch");
  double acc = 0.0;
  for (int i = 0; i < x.size(); ++i) acc += x[i] * x0[i];
  return std::abs(acc) / x.size();
}

}  // namespace elliptope
