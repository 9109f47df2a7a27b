#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "elliptope/manifold.hpp"
#include "elliptope/sym_matrix.hpp"

namespace elliptope {

struct RoundResult {
  Eigen::VectorXd x;        // entries in {-1, +1}
  double objective = 0.0;   // x^T A x
  double cut_value = 0.0;   // (objective + 2 * sum_{i<j} |A_ij|) / 4
};

/// x_i = sign(first column of sigma), zeros mapped to +1.
RoundResult round_sign_first_col(const SymMatrix& a, const SpherePoint& sigma);

/// Draws `trials` random unit directions r (stream (seed, hyperplane, trial)),
/// rounds x_i = sign(<sigma_i, r>), and keeps the best-scoring assignment;
/// ties go to the earliest trial.
RoundResult round_hyperplane(const SymMatrix& a, const SpherePoint& sigma, int trials,
                             std::uint64_t seed);

/// |<x, x0>| / n against a planted sign vector.
double overlap(const Eigen::VectorXd& x, const Eigen::VectorXi& x0);

}  // namespace elliptope
