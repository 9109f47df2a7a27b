#include "elliptope/sym_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include <Eigen/Eigenvalues>

#include "elliptope/rng.hpp"

namespace elliptope {

namespace {
inline std::size_t tri_size(int n) {
  return static_cast<std::size_t>(n) * (static_cast<std::size_t>(n) + 1) / 2;
}
inline std::size_t tri_index(int i, int j) {  // requires j <= i
  return static_cast<std::size_t>(i) * (static_cast<std::size_t>(i) + 1) / 2 +
         static_cast<std::size_t>(j);
}
}  // namespace

SymMatrix SymMatrix::dense_zero(int n) {
  if (n < 1) throw std::invalid_argument("SymMatrix: n must be positive");
  SymMatrix a;
  a.n_ = n;
  a.sparse_ = false;
  a.lower_.assign(tri_size(n), 0.0);
  a.build_mirror();
  return a;
}

SymMatrix SymMatrix::from_lower(int n, std::vector<double> lower) {
  if (n < 1) throw std::invalid_argument("SymMatrix: n must be positive");
  if (lower.size() != tri_size(n)) {
    throw std::invalid_argument("SymMatrix: lower triangle has wrong size");
  }
  SymMatrix a;
  a.n_ = n;
  a.sparse_ = false;
  a.lower_ = std::move(lower);
  a.build_mirror();
  return a;
}

SymMatrix SymMatrix::from_triplets(int n, std::vector<Triplet> entries) {
  if (n < 1) throw std::invalid_argument("SymMatrix: n must be positive");
  for (auto& t : entries) {
    if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n) {
      throw std::invalid_argument("SymMatrix: triplet index out of range");
    }
    if (t.col > t.row) std::swap(t.row, t.col);
  }
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].row == entries[i - 1].row && entries[i].col == entries[i - 1].col) {
      throw std::invalid_argument("SymMatrix: duplicate entry (" +
                                  std::to_string(entries[i].row) + "," +
                                  std::to_string(entries[i].col) + ")");
    }
  }
  SymMatrix a;
  a.n_ = n;
  a.sparse_ = true;
  a.entries_ = std::move(entries);
  a.build_mirror();
  return a;
}

SymMatrix SymMatrix::from_eigen(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("SymMatrix: matrix not square");
  const int n = static_cast<int>(m.rows());
  std::vector<double> low(tri_size(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) low[tri_index(i, j)] = m(i, j);
  }
  return from_lower(n, std::move(low));
}

void SymMatrix::build_mirror() {
  if (!sparse_) {
    full_.assign(static_cast<std::size_t>(n_) * n_, 0.0);
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j <= i; ++j) {
        const double v = lower_[tri_index(i, j)];
        full_[static_cast<std::size_t>(i) * n_ + j] = v;
        full_[static_cast<std::size_t>(j) * n_ + i] = v;
      }
    }
    return;
  }
  // Symmetrized CSR with ascending columns inside each row.
  std::vector<int> counts(n_ + 1, 0);
  for (const auto& t : entries_) {
    ++counts[t.row + 1];
    if (t.row != t.col) ++counts[t.col + 1];
  }
  csr_ptr_.assign(n_ + 1, 0);
  for (int i = 0; i < n_; ++i) csr_ptr_[i + 1] = csr_ptr_[i] + counts[i + 1];
  csr_col_.assign(csr_ptr_[n_], 0);
  csr_val_.assign(csr_ptr_[n_], 0.0);
  std::vector<int> cursor(csr_ptr_.begin(), csr_ptr_.end() - 1);
  // entries_ is sorted by (row, col); inserting mirrored copies in a second
  // pass keeps each row's column list unsorted, so sort rows afterwards.
  for (const auto& t : entries_) {
    csr_col_[cursor[t.row]] = t.col;
    csr_val_[cursor[t.row]] = t.value;
    ++cursor[t.row];
    if (t.row != t.col) {
      csr_col_[cursor[t.col]] = t.row;
      csr_val_[cursor[t.col]] = t.value;
      ++cursor[t.col];
    }
  }
  for (int i = 0; i < n_; ++i) {
    const int lo = csr_ptr_[i], hi = csr_ptr_[i + 1];
    std::vector<std::pair<int, double>> row;
    row.reserve(hi - lo);
    for (int p = lo; p < hi; ++p) row.emplace_back(csr_col_[p], csr_val_[p]);
    std::sort(row.begin(), row.end());
    for (int p = lo; p < hi; ++p) {
      csr_col_[p] = row[p - lo].first;
      csr_val_[p] = row[p - lo].second;
    }
  }
}

double SymMatrix::coeff(int i, int j) const {
  if (i < 0 || i >= n_ || j < 0 || j >= n_) {
    throw std::invalid_argument("SymMatrix::coeff: index out of range");
  }
  if (!sparse_) {
    return j <= i ? lower_[tri_index(i, j)] : lower_[tri_index(j, i)];
  }
  const int lo = csr_ptr_[i], hi = csr_ptr_[i + 1];
  auto it = std::lower_bound(csr_col_.begin() + lo, csr_col_.begin() + hi, j);
  if (it != csr_col_.begin() + hi && *it == j) {
    return csr_val_[it - csr_col_.begin()];
  }
  return 0.0;
}

void SymMatrix::matvec(const double* x, int len, double* y) const {
  if (len != n_) throw std::invalid_argument("SymMatrix::matvec: dimension mismatch");
  if (!sparse_) {
    for (int i = 0; i < n_; ++i) {
      const double* row = full_.data() + static_cast<std::size_t>(i) * n_;
      double acc = 0.0;
      for (int j = 0; j < n_; ++j) acc += row[j] * x[j];
      y[i] = acc;
    }
    return;
  }
  for (int i = 0; i < n_; ++i) {
    double acc = 0.0;
    for (int p = csr_ptr_[i]; p < csr_ptr_[i + 1]; ++p) {
      acc += csr_val_[p] * x[csr_col_[p]];
    }
    y[i] = acc;
  }
}

Eigen::VectorXd SymMatrix::matvec(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y(n_);
  matvec(x.data(), static_cast<int>(x.size()), y.data());
  return y;
}

RowMat SymMatrix::apply(const RowMat& rhs) const {
  if (rhs.rows() != n_) throw std::invalid_argument("SymMatrix::apply: dimension mismatch");
  const int k = static_cast<int>(rhs.cols());
  RowMat out(n_, k);
  Eigen::VectorXd col(n_), res(n_);
  for (int a = 0; a < k; ++a) {
    for (int i = 0; i < n_; ++i) col[i] = rhs(i, a);
    matvec(col.data(), n_, res.data());
    for (int i = 0; i < n_; ++i) out(i, a) = res[i];
  }
  return out;
}

void SymMatrix::row_combination(int i, const RowMat& rhs, double* out,
                                bool exclude_diagonal) const {
  if (rhs.rows() != n_ || i < 0 || i >= n_) {
    throw std::invalid_argument("SymMatrix::row_combination: dimension mismatch");
  }
  const int k = static_cast<int>(rhs.cols());
  for (int a = 0; a < k; ++a) out[a] = 0.0;
  if (!sparse_) {
    const double* row = full_.data() + static_cast<std::size_t>(i) * n_;
    for (int j = 0; j < n_; ++j) {
      if (exclude_diagonal && j == i) continue;
      const double c = row[j];
      if (c == 0.0) continue;
      const double* rj = rhs.data() + static_cast<std::size_t>(j) * k;
      for (int a = 0; a < k; ++a) out[a] += c * rj[a];
    }
    return;
  }
  for (int p = csr_ptr_[i]; p < csr_ptr_[i + 1]; ++p) {
    const int j = csr_col_[p];
    if (exclude_diagonal && j == i) continue;
    const double c = csr_val_[p];
    const double* rj = rhs.data() + static_cast<std::size_t>(j) * k;
    for (int a = 0; a < k; ++a) out[a] += c * rj[a];
  }
}

double SymMatrix::frob_norm() const {
  double acc = 0.0;
  if (!sparse_) {
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j <= i; ++j) {
        const double v = lower_[tri_index(i, j)];
        acc += (i == j ? 1.0 : 2.0) * v * v;
      }
    }
  } else {
    for (const auto& t : entries_) {
      acc += (t.row == t.col ? 1.0 : 2.0) * t.value * t.value;
    }
  }
  return std::sqrt(acc);
}

double SymMatrix::offdiag_abs_weight() const {
  double acc = 0.0;
  if (!sparse_) {
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < i; ++j) acc += std::abs(lower_[tri_index(i, j)]);
    }
  } else {
    for (const auto& t : entries_) {
      if (t.row != t.col) acc += std::abs(t.value);
    }
  }
  return acc;
}

double SymMatrix::diag_sum() const {
  double acc = 0.0;
  if (!sparse_) {
    for (int i = 0; i < n_; ++i) acc += lower_[tri_index(i, i)];
  } else {
    for (const auto& t : entries_) {
      if (t.row == t.col) acc += t.value;
    }
  }
  return acc;
}

Eigen::MatrixXd SymMatrix::to_eigen() const {
  Eigen::MatrixXd m(n_, n_);
  if (!sparse_) {
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) m(i, j) = full_[static_cast<std::size_t>(i) * n_ + j];
    }
  } else {
    m.setZero();
    for (const auto& t : entries_) {
      m(t.row, t.col) = t.value;
      m(t.col, t.row) = t.value;
    }
  }
  return m;
}

const std::vector<Triplet>& SymMatrix::triplets() const {
  if (!sparse_) throw std::logic_error("SymMatrix::triplets: dense storage");
  return entries_;
}

const std::vector<double>& SymMatrix::lower() const {
  if (sparse_) throw std::logic_error("SymMatrix::lower: sparse storage");
  return lower_;
}

bool SymMatrix::value_equal(const SymMatrix& other, double tol) const {
  if (n_ != other.n_) return false;
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j <= i; ++j) {
      if (std::abs(coeff(i, j) - other.coeff(i, j)) > tol) return false;
    }
  }
  return true;
}

OpNormEstimate op_norm(const SymMatrix& a, double rel_tol, int max_iter,
                       std::uint64_t seed) {
  if (rel_tol <= 0.0) throw std::invalid_argument("op_norm: rel_tol must be positive");
  const int n = a.n();
  Rng rng(derive_key(seed, StreamTag::op_norm, 0));
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.next_gaussian();
  double vn = v.norm();
  if (vn == 0.0) v.setOnes(), vn = v.norm();
  v /= vn;

  OpNormEstimate est;
  Eigen::VectorXd w(n), z(n);
  for (int it = 1; it <= max_iter; ++it) {
    a.matvec(v.data(), n, w.data());
    a.matvec(w.data(), n, z.data());  // z = A^2 v
    const double rho = v.dot(z);
    est.value = std::sqrt(std::max(rho, 0.0));
    est.iterations = it;
    const double zn = z.norm();
    if (zn == 0.0) {
      // v was annihilated by A^2; with a random start this means A v = 0.
      est.rel_tol_achieved = 0.0;
      est.converged = true;
      return est;
    }
    const double resid = (z - rho * v).norm();
    est.rel_tol_achieved = resid / std::max(rho, 1e-300);
    if (est.rel_tol_achieved <= rel_tol) {
      est.converged = true;
      return est;
    }
    v = z / zn;
  }
  est.converged = false;
  return est;
}

namespace {
EigEstimate min_eig_dense(const SymMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.to_eigen(), Eigen::EigenvaluesOnly);
  EigEstimate e;
  e.value = es.eigenvalues()(0);
  e.iterations = 0;
  e.converged = (es.info() == Eigen::Success);
  return e;
}

EigEstimate min_eig_shifted(const SymMatrix& m, double abs_tol, std::uint64_t seed) {
  const int n = m.n();
  const OpNormEstimate nrm = op_norm(m, 1e-6, 20000, derive_key(seed, StreamTag::min_eig, 1));
  // mu >= lambda_max(M) so that mu*I - M is PSD with top eigenvalue mu - lambda_min.
  const double mu = nrm.value * (1.0 + 1e-4) + 1e-12;
  const double scale = std::max(1.0, nrm.value);

  Rng rng(derive_key(seed, StreamTag::min_eig, 2));
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.next_gaussian();
  v /= v.norm();

  EigEstimate e;
  Eigen::VectorXd mv(n), bv(n);
  const int max_iter = 100000;
  for (int it = 1; it <= max_iter; ++it) {
    m.matvec(v.data(), n, mv.data());
    bv = mu * v - mv;
    const double rho = v.dot(bv);
    e.value = mu - rho;
    e.iterations = it;
    const double bn = bv.norm();
    if (bn == 0.0) {
      e.converged = true;  // v is an exact eigenvector of M with eigenvalue mu
      return e;
    }
    const double resid = (bv - rho * v).norm();
    if (resid <= abs_tol * scale) {
      e.converged = true;
      return e;
    }
    v = bv / bn;
  }
  e.converged = false;
  return e;
}
}  // namespace

EigEstimate min_eig_estimate(const SymMatrix& m, double abs_tol, std::uint64_t seed) {
  if (m.n() <= kDenseEigThreshold) return min_eig_dense(m);
  return min_eig_shifted(m, abs_tol, seed);
}

double min_eig(const SymMatrix& m, double abs_tol) {
  return min_eig_estimate(m, abs_tol).value;
}

}  // namespace elliptope
