#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace elliptope {

/// Row-major dense block; points on the sphere product and gradients are
/// stored this way because all updates touch one row at a time.
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// Symmetric n x n matrix, immutable after construction and safe to share
/// across threads. Exactly one triangle is stored (packed dense lower, or
/// sorted lower-triangle triplets); a full mirror is kept so that row access
/// is contiguous. All products sum in ascending column order, which makes
/// results reproducible and makes the dense and sparse storages of the same
/// matrix agree to rounding.
class SymMatrix {
 public:
  SymMatrix() = default;

  static SymMatrix dense_zero(int n);
  /// Packed lower triangle, row-major: entry (i,j), j <= i, at i*(i+1)/2 + j.
  static SymMatrix from_lower(int n, std::vector<double> lower);
  /// Entries may address either triangle; duplicates (after mirroring) are an
  /// error, not summed.
  static SymMatrix from_triplets(int n, std::vector<Triplet> entries);
  /// Dense construction from the lower triangle of m (m must be square).
  static SymMatrix from_eigen(const Eigen::MatrixXd& m);

  int n() const { return n_; }
  bool is_sparse() const { return sparse_; }
  std::size_t stored_nnz() const { return sparse_ ? entries_.size() : lower_.size(); }

  double coeff(int i, int j) const;

  /// y = A x, rows summed in ascending column order.
  void matvec(const double* x, int len, double* y) const;
  Eigen::VectorXd matvec(const Eigen::VectorXd& x) const;

  /// Y = A * rhs for an n x k block, one column at a time.
  RowMat apply(const RowMat& rhs) const;

  /// out[0..k) = sum_j A(i,j) * rhs.row(j), ascending j, optionally skipping
  /// the diagonal term.
  void row_combination(int i, const RowMat& rhs, double* out, bool exclude_diagonal) const;

  double frob_norm() const;
  double offdiag_abs_weight() const;  // sum over i<j of |A_ij|
  double diag_sum() const;

  Eigen::MatrixXd to_eigen() const;
  const std::vector<Triplet>& triplets() const;  // sparse storage only
  const std::vector<double>& lower() const;      // dense storage only

  bool value_equal(const SymMatrix& other, double tol = 0.0) const;

 private:
  void build_mirror();

  int n_ = 0;
  bool sparse_ = false;
  std::vector<double> lower_;     // dense: packed lower triangle, n(n+1)/2
  std::vector<Triplet> entries_;  // sparse: canonical row >= col, sorted

  // symmetrized mirrors for fast row access
  std::vector<double> full_;  // dense only, n*n row-major
  std::vector<int> csr_ptr_;  // sparse only
  std::vector<int> csr_col_;
  std::vector<double> csr_val_;
};

struct OpNormEstimate {
  double value = 0.0;
  double rel_tol_achieved = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct EigEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = true;
};

/// Largest singular value (max |eigenvalue| for symmetric A), by power
/// iteration on A^2 from a seeded random start; reports the square root of
/// the Rayleigh quotient. Stops once the eigen-residual of A^2 drops below
/// rel_tol relative to the quotient.
OpNormEstimate op_norm(const SymMatrix& a, double rel_tol = 1e-8, int max_iter = 20000,
                       std::uint64_t seed = 0);

/// Dense symmetric eigensolver below this size; shifted power iteration above.
inline constexpr int kDenseEigThreshold = 2048;

/// Smallest eigenvalue within abs_tol * max(1, ||M||_2).
EigEstimate min_eig_estimate(const SymMatrix& m, double abs_tol = 1e-9,
                             std::uint64_t seed = 0);
double min_eig(const SymMatrix& m, double abs_tol = 1e-9);

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& path, int line, const std::string& what)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + what),
        line_number(line) {}
  int line_number;
};

/// Matrix Market I/O. Coordinate files load as sparse storage, array files as
/// dense; the writer picks the format matching the storage. Headers are
/// emitted byte-exact; values use 17 significant digits so read(write(A))
/// reproduces A exactly.
SymMatrix read_matrix_market(const std::string& path);
void write_matrix_market(const SymMatrix& a, const std::string& path);

}  // namespace elliptope
