#include "elliptope/instances.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "elliptope/rng.hpp"

namespace elliptope {

namespace {
inline std::size_t tri_index(int i, int j) {  // j <= i
  return static_cast<std::size_t>(i) * (static_cast<std::size_t>(i) + 1) / 2 +
         static_cast<std::size_t>(j);
}

Eigen::VectorXi planted_signs(int n, std::uint64_t seed) {
  Eigen::VectorXi x(n);
  for (int i = 0; i < n; ++i) {
    x[i] = unit_from_key(derive_key(seed, StreamTag::truth, i)) < 0.5 ? -1 : 1;
  }
  return x;
}
}  // namespace

SymMatrix gen_goe(int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("gen_goe: n must be positive");
  std::vector<double> lower(tri_index(n - 1, n - 1) + 1);
  const double diag_sd = std::sqrt(2.0 / n);
  const double off_sd = std::sqrt(1.0 / n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      const std::size_t idx = tri_index(i, j);
      const double z = gaussian_from_key(derive_key(seed, StreamTag::goe_entry, idx));
      lower[idx] = z * (i == j ? diag_sd : off_sd);
    }
  }
  return SymMatrix::from_lower(n, std::move(lower));
}

PlantedInstance gen_z2sync(int n, double lambda, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("gen_z2sync: n must be positive");
  if (lambda < 0.0) throw std::invalid_argument("gen_z2sync: lambda must be nonnegative");
  PlantedInstance inst;
  Eigen::VectorXi x0 = planted_signs(n, seed);
  if (lambda == 0.0) {
    inst.a = gen_goe(n, seed);
  } else {
    SymMatrix w = gen_goe(n, seed);
    std::vector<double> lower = w.lower();
    const double scale = lambda / n;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j <= i; ++j) {
        lower[tri_index(i, j)] += scale * x0[i] * x0[j];
      }
    }
    inst.a = SymMatrix::from_lower(n, std::move(lower));
  }
  inst.truth = std::move(x0);
  return inst;
}

PlantedInstance gen_sbm(int n, double a, double b, std::uint64_t seed,
                        const std::string& centering) {
  if (n < 1) throw std::invalid_argument("gen_sbm: n must be positive");
  // a == b is allowed here (no signal, centered Erdos-Renyi); the CLI-facing
  // instance-spec validation requires a strict gap.
  if (a < b || b < 0.0) throw std::invalid_argument("gen_sbm: need a >= b >= 0");
  if (a > n || b > n) throw std::invalid_argument("gen_sbm: edge probability above one");
  if (centering != "density" && centering != "none") {
    throw std::invalid_argument("gen_sbm: centering must be 'density' or 'none'");
  }
  const double shift = centering == "density" ? (a + b) / (2.0 * n) : 0.0;
  Eigen::VectorXi x0 = planted_signs(n, seed);
  std::vector<double> lower(tri_index(n - 1, n - 1) + 1, 0.0);
  for (int j = 1; j < n; ++j) {
    for (int i = 0; i < j; ++i) {
      const std::size_t pair = tri_index(j, i);
      const double u = unit_from_key(derive_key(seed, StreamTag::sbm_edge, pair));
      const double p = (x0[i] == x0[j] ? a : b) / n;
      const double adj = u < p ? 1.0 : 0.0;
      lower[pair] = adj - shift;
    }
  }
  PlantedInstance inst;
  inst.a = SymMatrix::from_lower(n, std::move(lower));
  inst.truth = std::move(x0);
  return inst;
}

SymMatrix gen_maxcut(int n, const std::vector<std::pair<int, int>>& edges) {
  if (n < 1) throw std::invalid_argument("gen_maxcut: n must be positive");
  std::set<std::pair<int, int>> seen;
  std::vector<Triplet> trip;
  trip.reserve(edges.size());
  for (const auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n) {
      throw std::invalid_argument("gen_maxcut: vertex out of range");
    }
    if (u == v) throw std::invalid_argument("gen_maxcut: self-loop at vertex " + std::to_string(u));
    const auto key = std::minmax(u, v);
    if (!seen.insert(key).second) {
      throw std::invalid_argument("gen_maxcut: duplicate edge (" + std::to_string(u) + "," +
                                  std::to_string(v) + ")");
    }
    trip.push_back({std::max(u, v), std::min(u, v), -1.0});
  }
  return SymMatrix::from_triplets(n, std::move(trip));
}

std::vector<std::pair<int, int>> read_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list: " + path);
  std::vector<std::pair<int, int>> edges;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    long long u, v;
    if (!(ss >> u)) continue;  // blank line
    if (!(ss >> v)) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected 'u v' pair");
    }
    std::string extra;
    if (ss >> extra) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": trailing tokens");
    }
    if (u < 0 || v < 0) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": negative vertex id");
    }
    edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
  }
  return edges;
}

std::vector<Fixture> fixtures() {
  std::vector<Fixture> out;
  out.push_back({"zero", SymMatrix::dense_zero(4), 0.0});

  {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(4, 4);
    out.push_back({"identity", SymMatrix::from_eigen(m), 4.0});
  }
  {
    Eigen::MatrixXd m = Eigen::MatrixXd::Ones(4, 4);
    out.push_back({"ones", SymMatrix::from_eigen(m), 16.0});
  }
  {
    Eigen::MatrixXd m(2, 2);
    m << 1.0, -2.0, -2.0, 1.0;
    // 2x2 closed form: A11 + A22 + 2|A12|
    out.push_back({"two_by_two", SymMatrix::from_eigen(m), 6.0});
  }
  {
    Eigen::MatrixXd m = -(Eigen::MatrixXd::Ones(3, 3) - Eigen::MatrixXd::Identity(3, 3));
    out.push_back({"triangle", SymMatrix::from_eigen(m), 3.0});
  }
  return out;
}

Fixture fixture(const std::string& name) {
  for (auto& f : fixtures()) {
    if (f.name == name) return f;
  }
  throw std::invalid_argument("unknown fixture '" + name + "'");
}

InstanceSpec parse_instance_spec(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("family")) {
    throw std::invalid_argument("instance spec: missing 'family'");
  }
  InstanceSpec spec;
  spec.family = j.at("family").get<std::string>();
  if (j.contains("n")) spec.n = j.at("n").get<int>();
  if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("lambda")) spec.lambda = j.at("lambda").get<double>();
  if (j.contains("a")) spec.a = j.at("a").get<double>();
  if (j.contains("b")) spec.b = j.at("b").get<double>();
  if (j.contains("path")) spec.path = j.at("path").get<std::string>();
  if (j.contains("name")) spec.name = j.at("name").get<std::string>();
  if (j.contains("sbm_centering")) spec.sbm_centering = j.at("sbm_centering").get<std::string>();

  if (spec.family == "goe" || spec.family == "z2sync" || spec.family == "sbm") {
    if (spec.n < 1) throw std::invalid_argument("instance spec: n must be >= 1");
  }
  if (spec.family == "z2sync" && spec.lambda < 0.0) {
    throw std::invalid_argument("instance spec: z2sync needs lambda >= 0");
  }
  if (spec.family == "sbm" && (!(spec.a > spec.b) || spec.b < 0.0)) {
    throw std::invalid_argument("instance spec: sbm needs a > b >= 0");
  }
  if ((spec.family == "maxcut" || spec.family == "file") && spec.path.empty()) {
    throw std::invalid_argument("instance spec: '" + spec.family + "' needs a path");
  }
  if (spec.family == "fixture" && spec.name.empty()) {
    throw std::invalid_argument("instance spec: fixture needs a name");
  }
  if (spec.family != "goe" && spec.family != "z2sync" && spec.family != "sbm" &&
      spec.family != "maxcut" && spec.family != "file" && spec.family != "fixture") {
    throw std::invalid_argument("instance spec: unknown family '" + spec.family + "'");
  }
  return spec;
}

nlohmann::json instance_spec_to_json(const InstanceSpec& spec) {
  nlohmann::json j;
  j["family"] = spec.family;
  j["seed"] = spec.seed;
  if (spec.n > 0) j["n"] = spec.n;
  if (spec.family == "z2sync") j["lambda"] = spec.lambda;
  if (spec.family == "sbm") {
    j["a"] = spec.a;
    j["b"] = spec.b;
    j["sbm_centering"] = spec.sbm_centering;
  }
  if (!spec.path.empty()) j["path"] = spec.path;
  if (!spec.name.empty()) j["name"] = spec.name;
  return j;
}

PlantedInstance realize(const InstanceSpec& spec) {
  if (spec.family == "goe") {
    return {gen_goe(spec.n, spec.seed), std::nullopt};
  }
  if (spec.family == "z2sync") {
    return gen_z2sync(spec.n, spec.lambda, spec.seed);
  }
  if (spec.family == "sbm") {
    return gen_sbm(spec.n, spec.a, spec.b, spec.seed, spec.sbm_centering);
  }
  if (spec.family == "maxcut") {
    auto edges = read_edge_list(spec.path);
    int max_vertex = -1;
    for (const auto& [u, v] : edges) max_vertex = std::max({max_vertex, u, v});
    const int n = std::max(spec.n, max_vertex + 1);
    return {gen_maxcut(n, edges), std::nullopt};
  }
  if (spec.family == "file") {
    return {read_matrix_market(spec.path), std::nullopt};
  }
  if (spec.family == "fixture") {
    return {fixture(spec.name).a, std::nullopt};
  }
  throw std::invalid_argument("realize: unknown family '" + spec.family + "'");
}

}  // namespace elliptope
