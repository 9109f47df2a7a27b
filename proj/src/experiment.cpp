#include "elliptope/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "elliptope/parallel.hpp"
#include "elliptope/rng.hpp"

namespace elliptope {

ExperimentGrid parse_grid(const nlohmann::json& j) {
  ExperimentGrid grid;
  if (!j.is_object()) throw std::invalid_argument("grid: expected a JSON object");
  if (!j.contains("instances") || !j.at("instances").is_array() || j.at("instances").empty()) {
    throw std::invalid_argument("grid: 'instances' must be a non-empty array");
  }
  for (const auto& spec : j.at("instances")) {
    grid.instances.push_back(parse_instance_spec(spec));
  }
  if (!j.contains("k_values") || !j.at("k_values").is_array() || j.at("k_values").empty()) {
    throw std::invalid_argument("grid: 'k_values' must be a non-empty array");
  }
  for (const auto& k : j.at("k_values")) grid.k_values.push_back(k.get<int>());
  if (j.contains("restarts")) grid.restarts = j.at("restarts").get<int>();
  if (j.contains("seed")) grid.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("method")) grid.method = method_from_name(j.at("method").get<std::string>());
  if (j.contains("allow_k1")) grid.allow_k1 = j.at("allow_k1").get<bool>();
  if (j.contains("obj_tol")) grid.solver.obj_tol = j.at("obj_tol").get<double>();
  if (j.contains("grad_tol")) grid.solver.grad_tol = j.at("grad_tol").get<double>();
  if (j.contains("max_sweeps")) grid.solver.max_sweeps = j.at("max_sweeps").get<int>();
  if (j.contains("max_iters")) grid.solver.max_iters = j.at("max_iters").get<int>();
  if (j.contains("ref")) {
    const auto& r = j.at("ref");
    if (r.contains("restarts")) grid.ref.restarts = r.at("restarts").get<int>();
    if (r.contains("dual_tol")) grid.ref.dual_tol = r.at("dual_tol").get<double>();
    if (r.contains("max_escalations")) grid.ref.max_escalations = r.at("max_escalations").get<int>();
  }

  if (grid.restarts < 1) throw std::invalid_argument("grid: restarts must be >= 1");
  for (const int k : grid.k_values) {
    if (k < 1 || (k < 2 && !grid.allow_k1)) {
      throw std::invalid_argument("grid: k must be >= 2 (or set allow_k1)");
    }
  }
  return grid;
}

ExperimentResult run_experiment(const ExperimentGrid& grid, int threads,
                                std::vector<Certificate>* certificates) {
  if (grid.instances.empty()) throw std::invalid_argument("experiment: no instances");
  if (grid.k_values.empty()) throw std::invalid_argument("experiment: no k values");
  const auto t0 = std::chrono::steady_clock::now();

  ExperimentResult result;
  if (certificates) certificates->clear();

  for (std::size_t ii = 0; ii < grid.instances.size(); ++ii) {
    const InstanceSpec& spec = grid.instances[ii];
    const PlantedInstance inst = realize(spec);
    const int n = inst.a.n();
    const double a_norm =
        op_norm(inst.a, 1e-8, 50000, derive_key(spec.seed, StreamTag::op_norm, 0)).value;

    ReferenceConfig rc = grid.ref;
    rc.threads = threads;
    rc.seed = derive_key(grid.seed, StreamTag::cell, 0x0FFu * (ii + 1));
    const ReferenceValue ref = sdp_reference(inst.a, rc);
    const double slack = ref.certified_error + 1e-6 * n * a_norm;

    for (std::size_t ki = 0; ki < grid.k_values.size(); ++ki) {
      const int k = grid.k_values[ki];
      const std::uint64_t cell_seed =
          derive_key(grid.seed, StreamTag::cell, ii * grid.k_values.size() + ki + 1);

      SolverConfig sc = grid.solver;
      sc.method = grid.method;
      sc.seed = cell_seed;
      sc.op_norm_hint = a_norm;

      const MultiRestartResult mr = multi_restart(inst.a, k, grid.restarts, sc, threads);

      std::vector<ExperimentRow> cell_rows(grid.restarts);
      std::vector<Certificate> cell_certs(grid.restarts);
      parallel_for(
          grid.restarts,
          [&](int r) {
            ExperimentRow row;
            row.family = spec.family;
            row.n = n;
            row.k = k;
            row.restart = r;
            row.seed = spec.seed;
            row.method = method_name(grid.method);
            const SolveReport& rep = mr.all[r];
            row.objective = rep.objective;
            row.sdp_ref = ref.value;
            row.grad_norm = rep.grad_norm;
            row.iters = rep.iterations;
            row.converged = rep.converged;
            try {
              TolProfile tol;
              tol.seed = derive_key(cell_seed, StreamTag::submatrix, r);
              const Certificate cert =
                  certify(inst.a, rep.sigma, tol, a_norm, ref.value, slack);
              row.gap = cert.theorem_gap;
              row.bound8 = cert.theorem_bound;
              row.bound5sqrt2 = cert.theorem_bound_proof;
              row.dual_eps = cert.dual_eps;
              row.xi_min = cert.gram_min_eig;
              row.holds = cert.theorem_holds;
              if (!cert.theorem_applicable) row.status = "inapplicable_k1";
              cell_certs[r] = cert;
            } catch (const std::exception& e) {
              std::string what = e.what();
              std::replace(what.begin(), what.end(), ',', ';');
              std::replace(what.begin(), what.end(), '\n', ' ');
              row.status = "error: " + what;
            }
            cell_rows[r] = std::move(row);
          },
          threads);
      for (int r = 0; r < grid.restarts; ++r) {
        result.rows.push_back(std::move(cell_rows[r]));
        if (certificates) certificates->push_back(std::move(cell_certs[r]));
      }
    }
  }

  // Sort rows by (family, n, k, restart); certificates follow the same
  // permutation so certificates[i] stays paired with rows[i].
  std::vector<std::size_t> perm(result.rows.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t ia, std::size_t ib) {
    const ExperimentRow& a = result.rows[ia];
    const ExperimentRow& b = result.rows[ib];
    if (a.family != b.family) return a.family < b.family;
    if (a.n != b.n) return a.n < b.n;
    if (a.k != b.k) return a.k < b.k;
    return a.restart < b.restart;
  });
  std::vector<ExperimentRow> sorted_rows;
  sorted_rows.reserve(result.rows.size());
  for (const std::size_t i : perm) sorted_rows.push_back(std::move(result.rows[i]));
  result.rows = std::move(sorted_rows);
  if (certificates) {
    std::vector<Certificate> sorted_certs;
    sorted_certs.reserve(certificates->size());
    for (const std::size_t i : perm) sorted_certs.push_back(std::move((*certificates)[i]));
    *certificates = std::move(sorted_certs);
  }

  ExperimentSummary& s = result.summary;
  s.rows = static_cast<int>(result.rows.size());
  for (const int k : grid.k_values) {
    PerKSummary pk;
    pk.k = k;
    double acc = 0.0;
    double max_gap = -std::numeric_limits<double>::infinity();
    for (const auto& row : result.rows) {
      if (row.k != k || row.status != "ok") continue;
      ++pk.rows;
      acc += row.gap;
      max_gap = std::max(max_gap, row.gap);
    }
    pk.max_gap = pk.rows > 0 ? max_gap : std::numeric_limits<double>::quiet_NaN();
    pk.mean_gap = pk.rows > 0 ? acc / pk.rows : std::numeric_limits<double>::quiet_NaN();
    s.per_k.push_back(pk);
  }
  for (const auto& row : result.rows) {
    if (row.holds) ++s.holds_rows;
    if (row.converged) ++s.converged_rows;
    if (row.status.rfind("error", 0) == 0) ++s.failed_rows;
  }

  // gap ~ C * k^(-alpha) least squares on log-log, positive max gaps only.
  std::vector<std::pair<double, double>> pts;
  for (const auto& pk : s.per_k) {
    if (pk.rows > 0 && pk.max_gap > 0.0) {
      pts.emplace_back(std::log(double(pk.k)), std::log(pk.max_gap));
    }
  }
  if (pts.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [x, y] : pts) {
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double m = pts.size();
    const double denom = m * sxx - sx * sx;
    if (denom > 0.0) s.alpha = -(m * sxy - sx * sy) / denom;
  }

  s.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

const char* const kExperimentCsvHeader =
    "family,n,k,restart,seed,objective,sdp_ref,gap,bound8,bound5sqrt2,dual_eps,"
    "xi_min,grad_norm,iters,method,holds,status";

namespace {
std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

std::string rows_to_csv(const std::vector<ExperimentRow>& rows) {
  std::ostringstream out;
  out << kExperimentCsvHeader << "\n";
  for (const auto& r : rows) {
    out << r.family << ',' << r.n << ',' << r.k << ',' << r.restart << ',' << r.seed << ','
        << fmt17(r.objective) << ',' << fmt17(r.sdp_ref) << ',' << fmt17(r.gap) << ','
        << fmt17(r.bound8) << ',' << fmt17(r.bound5sqrt2) << ',' << fmt17(r.dual_eps) << ','
        << fmt17(r.xi_min) << ',' << fmt17(r.grad_norm) << ',' << r.iters << ',' << r.method
        << ',' << (r.holds ? 1 : 0) << ',' << r.status << "\n";
  }
  return out.str();
}

void write_rows_csv(const std::vector<ExperimentRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << rows_to_csv(rows);
  if (!out) throw std::runtime_error("write failed: " + path);
}

nlohmann::json summary_to_json(const ExperimentSummary& s) {
  nlohmann::json j;
  j["rows"] = s.rows;
  j["holds_rows"] = s.holds_rows;
  j["converged_rows"] = s.converged_rows;
  j["failed_rows"] = s.failed_rows;
  j["per_k"] = nlohmann::json::array();
  for (const auto& pk : s.per_k) {
    nlohmann::json e;
    e["k"] = pk.k;
    e["rows"] = pk.rows;
    e["max_gap"] = pk.max_gap;
    e["mean_gap"] = pk.mean_gap;
    j["per_k"].push_back(e);
  }
  if (std::isfinite(s.alpha)) {
    j["alpha"] = s.alpha;
  } else {
    j["alpha"] = nullptr;
  }
  j["wall_seconds"] = s.wall_seconds;
  return j;
}

}  // namespace elliptope
