#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "heff/graphs.hpp"
#include "heff/objectives.hpp"
#include "heff/search.hpp"
#include "heff/simlab.hpp"

namespace heff {

// Parsed, schema-checked project configuration. Unknown keys anywhere are
// rejected; unit-bearing keys carry the unit in the name (omega_max_khz,
// dt_us, sigma_dip_khz, ...).
struct ProjectConfig {
  // network
  int n = 4;
  std::string topology = "all_to_all";
  std::vector<std::pair<int, int>> explicit_edges;
  Eigen::Matrix3d d_tensor = NetworkSpec::dipolar_tensor();
  bool include_error = true;

  // control
  double omega_max_khz = 250.0;
  double dt_us = 2.0;
  bool endpoint_rule = true;

  // ensemble (stored in internal units)
  EnsembleSpec ensemble;

  // design
  struct GraphTarget {
    std::vector<std::string> edges;
    PauliTargetMap target;  // empty: decouple
    double t_prime = 1.0;
  };
  struct Design {
    std::string u_target_kind = "identity";
    char rotation_axis = 'X';
    double rotation_angle = 0.0;
    std::vector<std::pair<int, double>> zeroth_preserve;  // (component, scale)
    std::vector<GraphTarget> graph_targets;
    std::map<int, double> weights = {{0, 10.0}, {1, 1.0}, {2, 0.3}, {3, 0.1}};
  } design;

  SearchConfig search;

  struct Simulation {
    int n = 6;
    int k_max = 100;
    int n_realizations = 100;
    char observable = 'X';
    std::uint64_t seed = 0;
    double window_ms = 12.0;
    std::vector<double> horizons_ms;
    std::vector<double> sigma_dip_grid_khz;
    std::vector<double> rho_grid;
  } simulation;

  std::uint64_t seed = 0;

  static ProjectConfig from_json(const nlohmann::json& j);
  static ProjectConfig load(const std::string& path);
  nlohmann::json to_json() const;

  NetworkSpec network() const;
  double omega_max() const { return khz_to_rad_per_us(omega_max_khz); }
  int max_order() const;  // R implied by the graph targets
};

// Design-spec assembly: builds constraint systems for every configured graph
// on the given basis. Throws InfeasibleError when a target is out of range.
DesignSpec build_design_spec(const ProjectConfig& cfg, const CSpaceBasis& basis,
                             const NetworkSpec& net);

// 64-bit FNV-1a, hex encoded; used for config hashes in metadata records.
std::string fnv1a_hex(const std::string& text);

}  // namespace heff
