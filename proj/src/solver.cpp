#include "elliptope/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "elliptope/parallel.hpp"
#include "elliptope/rng.hpp"

namespace elliptope {

namespace {
constexpr double kZeroRowTol = 1e-14;

double resolve_op_norm(const SymMatrix& a, const SolverConfig& cfg) {
  if (cfg.op_norm_hint >= 0.0) return cfg.op_norm_hint;
  return op_norm(a, 1e-6, 20000, derive_key(cfg.seed, StreamTag::op_norm, 0)).value;
}
}  // namespace

std::string method_name(Method m) {
  return m == Method::coordinate ? "coordinate" : "rgrad";
}

Method method_from_name(const std::string& name) {
  if (name == "coordinate") return Method::coordinate;
  if (name == "rgrad") return Method::rgrad;
  throw std::invalid_argument("unknown method '" + name + "'");
}

SolveReport coordinate_ascent(const SymMatrix& a, SpherePoint sigma, const SolverConfig& cfg) {
  if (a.n() != sigma.n()) throw std::invalid_argument("coordinate_ascent: dimension mismatch");
  const int n = sigma.n(), k = sigma.k();

  SolveReport rep;
  rep.restart_seed = cfg.seed;
  rep.objective_trace.push_back(objective(a, sigma));

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng order_rng(derive_key(cfg.seed, StreamTag::sweep_order, 0));
  Eigen::RowVectorXd h(k);

  int sweeps = 0;
  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    sweeps = sweep;
    if (cfg.random_sweep_order) {
      for (int i = n - 1; i > 0; --i) {
        const int j = static_cast<int>(order_rng.next_u64() % static_cast<std::uint64_t>(i + 1));
        std::swap(order[i], order[j]);
      }
    }
    // Replacing row i by h_i/|h_i| changes F by exactly 2(|h_i| - <h_i, old
    // row>) >= 0, so the sweep gain is a sum of nonnegative row gains and the
    // recorded trace is non-decreasing by construction.
    double gain = 0.0;
    for (const int i : order) {
      a.row_combination(i, sigma.rows(), h.data(), /*exclude_diagonal=*/true);
      const double norm = h.norm();
      if (norm < kZeroRowTol) continue;  // keep the current row
      gain += 2.0 * (norm - h.dot(sigma.rows().row(i)));
      sigma.rows().row(i) = h / norm;
    }
    const double f = rep.objective_trace.back() + gain;
    rep.objective_trace.push_back(f);
    if (gain <= cfg.obj_tol * (1.0 + std::abs(f))) {
      rep.converged = true;
      break;
    }
  }

  rep.iterations = sweeps;
  rep.sigma = std::move(sigma);
  rep.objective = objective(a, rep.sigma);
  rep.grad_norm = riemannian_grad(a, rep.sigma).frob_norm();
  return rep;
}

SolveReport riemannian_ascent(const SymMatrix& a, SpherePoint sigma, const SolverConfig& cfg) {
  if (a.n() != sigma.n()) throw std::invalid_argument("riemannian_ascent: dimension mismatch");
  const int n = sigma.n(), k = sigma.k();
  const double a_norm = resolve_op_norm(a, cfg);
  const double grad_stop = cfg.grad_tol * std::max(1.0, a_norm) * std::sqrt(double(n));

  SolveReport rep;
  rep.restart_seed = cfg.seed;
  double f = objective(a, sigma);
  rep.objective_trace.push_back(f);

  // The line search evaluates the step gain through the exact identity
  // F(sigma + d) - F(sigma) = 2 <d, A sigma> + <d, A d>, whose rounding error
  // scales with |d| instead of |F|. Near convergence the gains sit far below
  // one ulp of F, so a plain subtraction of objectives would stall the search.
  RowMat g_amb = a.apply(sigma.rows());
  auto step_gain = [&](const RowMat& delta) {
    const RowMat ad = a.apply(delta);
    double lin = 0.0, quad = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int col = 0; col < k; ++col) {
        lin += delta(i, col) * g_amb(i, col);
        quad += delta(i, col) * ad(i, col);
      }
    }
    return 2.0 * lin + quad;
  };

  int it = 0;
  for (it = 1; it <= cfg.max_iters; ++it) {
    TangentVector grad;
    grad.base = &sigma;
    grad.rows = 2.0 * g_amb;
    for (int i = 0; i < n; ++i) {
      const double radial = sigma.rows().row(i).dot(grad.rows.row(i));
      grad.rows.row(i) -= radial * sigma.rows().row(i);
    }
    const double gn = grad.frob_norm();
    rep.grad_norm = gn;
    if (gn <= grad_stop) {
      rep.converged = true;
      --it;
      break;
    }
    const double gsq = gn * gn;
    double t = cfg.line_search.init_step;
    bool accepted = false;
    for (int h = 0; h <= cfg.line_search.max_halvings; ++h) {
      SpherePoint candidate;
      try {
        candidate = retract(sigma, grad, t);
      } catch (const std::runtime_error&) {
        t *= cfg.line_search.shrink;
        continue;
      }
      const double gain = step_gain(candidate.rows() - sigma.rows());
      if (gain >= cfg.line_search.sufficient_increase * t * gsq) {
        sigma = std::move(candidate);
        f += gain;
        accepted = true;
        break;
      }
      t *= cfg.line_search.shrink;
    }
    if (!accepted) {
      rep.converged = false;  // line search exhausted; return the current point
      break;
    }
    g_amb = a.apply(sigma.rows());
    rep.objective_trace.push_back(f);
  }
  rep.iterations = std::min(it, cfg.max_iters);

  rep.sigma = std::move(sigma);
  rep.objective = objective(a, rep.sigma);
  if (!rep.converged || rep.grad_norm == 0.0) {
    rep.grad_norm = riemannian_grad(a, rep.sigma).frob_norm();
  }
  return rep;
}

SolveReport solve_one(const SymMatrix& a, SpherePoint sigma0, const SolverConfig& cfg) {
  auto run = [&](SpherePoint s0) {
    return cfg.method == Method::coordinate ? coordinate_ascent(a, std::move(s0), cfg)
                                            : riemannian_ascent(a, std::move(s0), cfg);
  };
  SolveReport rep = run(std::move(sigma0));
  if (cfg.perturb_on_stall) {
    Rng rng(derive_key(cfg.seed, StreamTag::perturb, 0));
    TangentVector dir = random_tangent(rep.sigma, rng);
    dir.rows *= 1e-6;
    SolveReport again = run(retract(rep.sigma, dir, 1.0));
    if (again.objective > rep.objective) {
      again.iterations += rep.iterations;
      again.restart_seed = rep.restart_seed;
      rep = std::move(again);
    }
  }
  return rep;
}

MultiRestartResult multi_restart(const SymMatrix& a, int k, int restarts,
                                 const SolverConfig& cfg, int threads) {
  if (restarts < 1) throw std::invalid_argument("multi_restart: restarts must be >= 1");
  if (k < 1) throw std::invalid_argument("multi_restart: k must be >= 1");

  SolverConfig base = cfg;
  if (base.op_norm_hint < 0.0 && base.method == Method::rgrad) {
    base.op_norm_hint = resolve_op_norm(a, cfg);
  }

  MultiRestartResult result;
  result.all.resize(restarts);
  parallel_for(
      restarts,
      [&](int r) {
        const std::uint64_t restart_seed = derive_key(cfg.seed, StreamTag::restart, r);
        Rng rng(restart_seed);
        SpherePoint s0 = SpherePoint::random(a.n(), k, rng);
        SolverConfig local = base;
        local.seed = restart_seed;
        result.all[r] = solve_one(a, std::move(s0), local);
        result.all[r].restart_seed = restart_seed;
      },
      threads);

  result.best_index = 0;
  for (int r = 1; r < restarts; ++r) {
    if (result.all[r].objective > result.all[result.best_index].objective) {
      result.best_index = r;
    }
  }
  result.best = result.all[result.best_index];
  return result;
}

}  // namespace elliptope
