#include "elliptope/manifold.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace elliptope {

namespace {
constexpr double kZeroRowTol = 1e-14;
}

SpherePoint SpherePoint::random(int n, int k, Rng& rng) {
  if (n < 1 || k < 1) throw std::invalid_argument("SpherePoint: n and k must be positive");
  SpherePoint s;
  s.rows_.resize(n, k);
  for (int i = 0; i < n; ++i) {
    double norm = 0.0;
    do {
      for (int a = 0; a < k; ++a) s.rows_(i, a) = rng.next_gaussian();
      norm = s.rows_.row(i).norm();
    } while (norm < 1e-8);
    s.rows_.row(i) /= norm;
  }
  return s;
}

SpherePoint SpherePoint::from_rows(RowMat rows, double norm_tol) {
  if (rows.rows() < 1 || rows.cols() < 1) {
    throw std::invalid_argument("SpherePoint: empty row block");
  }
  for (int i = 0; i < rows.rows(); ++i) {
    const double norm = rows.row(i).norm();
    if (std::abs(norm - 1.0) > norm_tol) {
      throw std::invalid_argument("SpherePoint: row " + std::to_string(i) +
                                  " has norm " + std::to_string(norm));
    }
    rows.row(i) /= norm;
  }
  SpherePoint s;
  s.rows_ = std::move(rows);
  return s;
}

double SpherePoint::max_row_norm_error() const {
  double worst = 0.0;
  for (int i = 0; i < rows_.rows(); ++i) {
    worst = std::max(worst, std::abs(rows_.row(i).norm() - 1.0));
  }
  return worst;
}

void SpherePoint::renormalize() {
  for (int i = 0; i < rows_.rows(); ++i) {
    const double norm = rows_.row(i).norm();
    if (norm < kZeroRowTol) {
      throw std::runtime_error("SpherePoint::renormalize: zero row " + std::to_string(i));
    }
    rows_.row(i) /= norm;
  }
}

TangentVector project_to_tangent(const SpherePoint& base, const RowMat& ambient) {
  if (ambient.rows() != base.n() || ambient.cols() != base.k()) {
    throw std::invalid_argument("project_to_tangent: dimension mismatch");
  }
  TangentVector u;
  u.base = &base;
  u.rows = ambient;
  for (int i = 0; i < base.n(); ++i) {
    const double radial = base.rows().row(i).dot(ambient.row(i));
    u.rows.row(i) -= radial * base.rows().row(i);
  }
  return u;
}

TangentVector random_tangent(const SpherePoint& base, Rng& rng) {
  RowMat g(base.n(), base.k());
  for (int i = 0; i < base.n(); ++i) {
    for (int a = 0; a < base.k(); ++a) g(i, a) = rng.next_gaussian();
  }
  TangentVector u = project_to_tangent(base, g);
  const double norm = u.frob_norm();
  if (norm > 0.0) u.rows /= norm;
  return u;
}

double max_tangency_error(const SpherePoint& base, const TangentVector& u) {
  double worst = 0.0;
  for (int i = 0; i < base.n(); ++i) {
    worst = std::max(worst, std::abs(base.rows().row(i).dot(u.rows.row(i))));
  }
  return worst;
}

double objective(const SymMatrix& a, const SpherePoint& s) {
  if (a.n() != s.n()) throw std::invalid_argument("objective: dimension mismatch");
  const RowMat g = a.apply(s.rows());
  const int n = s.n(), k = s.k();
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int col = 0; col < k; ++col) acc += s.rows()(i, col) * g(i, col);
  }
  return acc;
}

RowMat euclidean_grad(const SymMatrix& a, const SpherePoint& s) {
  if (a.n() != s.n()) throw std::invalid_argument("euclidean_grad: dimension mismatch");
  return 2.0 * a.apply(s.rows());
}

TangentVector riemannian_grad(const SymMatrix& a, const SpherePoint& s) {
  return project_to_tangent(s, euclidean_grad(a, s));
}

SpherePoint retract(const SpherePoint& s, const TangentVector& u, double t) {
  if (u.rows.rows() != s.n() || u.rows.cols() != s.k()) {
    throw std::invalid_argument("retract: dimension mismatch");
  }
  RowMat out = s.rows() + t * u.rows;
  for (int i = 0; i < s.n(); ++i) {
    const double norm = out.row(i).norm();
    if (norm < kZeroRowTol) {
      throw std::runtime_error("retract: step collapsed row " + std::to_string(i));
    }
    out.row(i) /= norm;
  }
  SpherePoint r;
  r.rows() = std::move(out);
  return r;
}

SpherePoint geodesic_curve(const SpherePoint& s, const TangentVector& u, double t) {
  if (u.rows.rows() != s.n() || u.rows.cols() != s.k()) {
    throw std::invalid_argument("geodesic_curve: dimension mismatch");
  }
  RowMat out(s.n(), s.k());
  for (int i = 0; i < s.n(); ++i) {
    const double speed = u.rows.row(i).norm();
    if (speed < kZeroRowTol) {
      out.row(i) = s.rows().row(i);
      continue;
    }
    const double angle = speed * t;
    out.row(i) = s.rows().row(i) * std::cos(angle) +
                 (u.rows.row(i) / speed) * std::sin(angle);
  }
  SpherePoint r;
  r.rows() = std::move(out);
  return r;
}

double second_order_form(const SymMatrix& a, const Eigen::VectorXd& lambda,
                         const TangentVector& u) {
  const int n = static_cast<int>(u.rows.rows());
  const int k = static_cast<int>(u.rows.cols());
  if (a.n() != n || lambda.size() != n) {
    throw std::invalid_argument("second_order_form: dimension mismatch");
  }
  const RowMat au = a.apply(u.rows);
  double quad = 0.0, diag = 0.0;
  for (int i = 0; i < n; ++i) {
    double row_sq = 0.0, row_quad = 0.0;
    for (int col = 0; col < k; ++col) {
      row_sq += u.rows(i, col) * u.rows(i, col);
      row_quad += u.rows(i, col) * au(i, col);
    }
    diag += lambda[i] * row_sq;
    quad += row_quad;
  }
  return diag - quad;
}

void write_sigma_csv(const SpherePoint& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "# n=" << s.n() << " k=" << s.k() << "\n";
  char buf[64];
  for (int i = 0; i < s.n(); ++i) {
    for (int a = 0; a < s.k(); ++a) {
      std::snprintf(buf, sizeof(buf), "%.17g", s.rows()(i, a));
      out << buf << (a + 1 < s.k() ? "," : "\n");
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

SpherePoint read_sigma_csv(const std::string& path, double norm_tol) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  int n = 0, k = 0;
  if (std::sscanf(line.c_str(), "# n=%d k=%d", &n, &k) != 2 || n < 1 || k < 1) {
    throw std::runtime_error(path + ": bad header, expected '# n=<n> k=<k>'");
  }
  RowMat rows(n, k);
  for (int i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw std::runtime_error(path + ": missing row " + std::to_string(i));
    std::istringstream ss(line);
    std::string cell;
    for (int a = 0; a < k; ++a) {
      if (!std::getline(ss, cell, ',')) {
        throw std::runtime_error(path + ": row " + std::to_string(i) + " too short");
      }
      try {
        rows(i, a) = std::stod(cell);
      } catch (...) {
        throw std::runtime_error(path + ": bad value in row " + std::to_string(i));
      }
    }
  }
  return SpherePoint::from_rows(std::move(rows), norm_tol);
}

}  // namespace elliptope
