#pragma once

#include <cstdint>

namespace elliptope {

// Stream tags for keyed random draws. Every random scalar in the project is
// addressed as (seed, tag, index), so values never depend on the order in
// which they are consumed. Sequential streams (Rng) are seeded from the same
// derivation and drawn in a documented order.
enum class StreamTag : std::uint64_t {
  goe_entry = 1,    // matrix entry (i,j), i >= j, index = i*(i+1)/2 + j
  truth = 2,        // planted sign for vertex i, index = i
  sbm_edge = 3,     // edge coin for pair (i,j), i < j, index = j*(j+1)/2 + i
  restart = 4,      // per-restart stream, index = restart number
  op_norm = 5,      // power-iteration start vectors
  min_eig = 6,      // shifted power-iteration start vectors
  submatrix = 7,    // principal-submatrix sampling in certificates
  hyperplane = 8,   // rounding directions, index = trial number
  sweep_order = 9,  // per-sweep permutations (random_sweep_order only)
  perturb = 10,     // post-stall tangent perturbation
  cell = 11,        // experiment cell streams
  probe = 12,       // miscellaneous test probes
};

std::uint64_t mix64(std::uint64_t z);
std::uint64_t derive_key(std::uint64_t seed, StreamTag tag, std::uint64_t index);

/// Inverse of the standard normal CDF (Wichura's AS 241, double precision).
double inverse_normal_cdf(double p);

/// Deterministic splitmix64 stream. Cheap to construct; make one instance per
/// logical stream (restart, probe set, ...) from derive_key.
class Rng {
 public:
  explicit Rng(std::uint64_t key) : state_(key) {}

  std::uint64_t next_u64();
  double next_unit();      // uniform on (0,1), never exactly 0 or 1
  double next_gaussian();  // standard normal via inverse CDF

 private:
  std::uint64_t state_;
};

// Single keyed draws for the counter-based instance generators.
double unit_from_key(std::uint64_t key);
double gaussian_from_key(std::uint64_t key);

}  // namespace elliptope
