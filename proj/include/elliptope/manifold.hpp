#pragma once

#include <string>

#include <Eigen/Dense>

#include "elliptope/rng.hpp"
#include "elliptope/sym_matrix.hpp"

namespace elliptope {

/// Point on the product of n unit spheres S^{k-1}, one row per sphere.
/// Row norms are kept within 1e-12 of one; every update path re-normalizes.
class SpherePoint {
 public:
  SpherePoint() = default;

  /// Rows drawn uniformly on S^{k-1} (normalized Gaussians).
  static SpherePoint random(int n, int k, Rng& rng);
  /// Accepts rows whose norms are within norm_tol of one, then re-normalizes.
  static SpherePoint from_rows(RowMat rows, double norm_tol = 1e-9);

  int n() const { return static_cast<int>(rows_.rows()); }
  int k() const { return static_cast<int>(rows_.cols()); }
  const RowMat& rows() const { return rows_; }
  RowMat& rows() { return rows_; }

  double max_row_norm_error() const;
  void renormalize();

 private:
  RowMat rows_;
};

/// Row-wise tangent direction at `base`: <sigma_i, u_i> = 0 within 1e-10.
struct TangentVector {
  RowMat rows;
  const SpherePoint* base = nullptr;

  double frob_norm() const { return rows.norm(); }
};

TangentVector project_to_tangent(const SpherePoint& base, const RowMat& ambient);
/// Gaussian rows projected to the tangent space and scaled to unit Frobenius
/// norm (rows of zero-gradient spheres stay zero).
TangentVector random_tangent(const SpherePoint& base, Rng& rng);
double max_tangency_error(const SpherePoint& base, const TangentVector& u);

/// F(sigma) = sum_ij A_ij <sigma_i, sigma_j>, evaluated as <sigma, A sigma>
/// row by row so the summation order is fixed.
double objective(const SymMatrix& a, const SpherePoint& s);

/// Ambient gradient: row i equals 2 * sum_j A_ij sigma_j.
RowMat euclidean_grad(const SymMatrix& a, const SpherePoint& s);

/// Ambient gradient projected row-wise onto the tangent space.
TangentVector riemannian_grad(const SymMatrix& a, const SpherePoint& s);

/// Row-normalization retraction: row i -> (sigma_i + t u_i)/|sigma_i + t u_i|.
/// Throws if a step collapses a row below 1e-14.
SpherePoint retract(const SpherePoint& s, const TangentVector& u, double t);

/// Exact trigonometric curve sigma_i(t) = sigma_i cos(|u_i| t) + u_i/|u_i| sin(|u_i| t);
/// rows with |u_i| < 1e-14 stay fixed.
SpherePoint geodesic_curve(const SpherePoint& s, const TangentVector& u, double t);

/// sum_i lambda_i |u_i|^2 - sum_ij A_ij <u_i, u_j>. Nonnegative for every
/// tangent direction at a local maximum.
double second_order_form(const SymMatrix& a, const Eigen::VectorXd& lambda,
                         const TangentVector& u);

/// CSV serialization: header line `# n=<n> k=<k>`, then one comma-separated
/// row per line at 17 significant digits.
void write_sigma_csv(const SpherePoint& s, const std::string& path);
SpherePoint read_sigma_csv(const std::string& path, double norm_tol = 1e-6);

}  // namespace elliptope
