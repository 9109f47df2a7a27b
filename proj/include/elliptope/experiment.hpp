#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "json.hpp"

#include "elliptope/certify.hpp"
#include "elliptope/instances.hpp"
#include "elliptope/refsdp.hpp"
#include "elliptope/solver.hpp"

namespace elliptope {

struct ExperimentGrid {
  std::vector<InstanceSpec> instances;
  std::vector<int> k_values;
  int restarts = 10;
  std::uint64_t seed = 0;
  Method method = Method::coordinate;
  bool allow_k1 = false;
  SolverConfig solver;
  ReferenceConfig ref;
};

ExperimentGrid parse_grid(const nlohmann::json& j);

struct ExperimentRow {
  std::string family;
  int n = 0;
  int k = 0;
  int restart = 0;
  std::uint64_t seed = 0;  // instance seed
  double objective = 0.0;
  double sdp_ref = 0.0;
  double gap = 0.0;
  double bound8 = 0.0;
  double bound5sqrt2 = 0.0;
  double dual_eps = 0.0;
  double xi_min = 0.0;
  double grad_norm = 0.0;
  int iters = 0;
  std::string method;
  bool holds = false;
  std::string status = "ok";
  bool converged = false;  // not serialized; used by the acceptance suite
};

struct PerKSummary {
  int k = 0;
  int rows = 0;
  double max_gap = 0.0;
  double mean_gap = 0.0;
};

struct ExperimentSummary {
  int rows = 0;
  int holds_rows = 0;
  int converged_rows = 0;
  int failed_rows = 0;
  std::vector<PerKSummary> per_k;
  /// Least-squares exponent of max_gap ~ C * k^(-alpha) on the log-log grid;
  /// NaN when fewer than two positive points exist.
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double wall_seconds = 0.0;  // excluded from determinism comparisons
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;
  ExperimentSummary summary;
};

/// Runs solve + certify for every (instance, k, restart) cell. One reference
/// solve per instance; per-row gap uses slack = certified_error of the
/// reference + 1e-6 * n * ||A||_2. Rows come back sorted by
/// (family, n, k, restart) and are bit-reproducible for a fixed grid,
/// regardless of thread count. Per-row failures land in the status column.
ExperimentResult run_experiment(const ExperimentGrid& grid, int threads = 0,
                                std::vector<Certificate>* certificates = nullptr);

/// Fixed header, 17-significant-digit values, one line per row.
extern const char* const kExperimentCsvHeader;
void write_rows_csv(const std::vector<ExperimentRow>& rows, const std::string& path);
std::string rows_to_csv(const std::vector<ExperimentRow>& rows);

nlohmann::json summary_to_json(const ExperimentSummary& s);

}  // namespace elliptope
