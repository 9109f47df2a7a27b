#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "elliptope/sym_matrix.hpp"

namespace elliptope {

// All generators are pure functions of (parameters, seed): each random scalar
// is keyed as (seed, StreamTag, draw index), so the same inputs reproduce the
// same matrix bit for bit regardless of evaluation order or thread count.
// gen_z2sync shares the goe_entry layout for its noise part, so lambda = 0
// reproduces gen_goe(n, seed) exactly.

struct PlantedInstance {
  SymMatrix a;
  std::optional<Eigen::VectorXi> truth;  // entries in {-1, +1} when present
};

/// W_ii ~ N(0, 2/n), W_ij ~ N(0, 1/n) for i < j, symmetric.
SymMatrix gen_goe(int n, std::uint64_t seed);

/// A = (lambda/n) x0 x0^T + W with x0 uniform in {-1,+1}^n.
PlantedInstance gen_z2sync(int n, double lambda, std::uint64_t seed);

/// Two balanced planted communities: edge probability a/n inside, b/n across.
/// centering == "density" subtracts (a+b)/(2n) from every off-diagonal entry;
/// "none" keeps the raw adjacency. Diagonal is zero either way.
PlantedInstance gen_sbm(int n, double a, double b, std::uint64_t seed,
                        const std::string& centering = "density");

/// A = -adjacency of the given simple graph (0-based vertex pairs).
SymMatrix gen_maxcut(int n, const std::vector<std::pair<int, int>>& edges);

/// Whitespace-separated `u v` pairs, 0-based, one edge per line.
std::vector<std::pair<int, int>> read_edge_list(const std::string& path);

struct Fixture {
  std::string name;
  SymMatrix a;
  double sdp_value;
};

/// Deterministic test set with closed-form optima.
std::vector<Fixture> fixtures();
Fixture fixture(const std::string& name);

struct InstanceSpec {
  std::string family;  // goe | z2sync | sbm | maxcut | file | fixture
  int n = 0;
  double lambda = 0.0;  // z2sync
  double a = 0.0;       // sbm expected in-degree
  double b = 0.0;       // sbm expected cross-degree
  std::string path;     // maxcut edge list or matrix market file
  std::string name;     // fixture name
  std::string sbm_centering = "density";
  std::uint64_t seed = 0;
};

/// Parses `{"family":"z2sync","n":400,"lambda":3.0,"seed":42}` style specs.
InstanceSpec parse_instance_spec(const nlohmann::json& j);
nlohmann::json instance_spec_to_json(const InstanceSpec& spec);

PlantedInstance realize(const InstanceSpec& spec);

}  // namespace elliptope
