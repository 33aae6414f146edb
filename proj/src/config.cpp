#include "heff/config.hpp"

#include <fstream>
#include <set>

#include "heff/operator_algebra.hpp"

namespace heff {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& where,
                const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      throw ConfigError("unknown key \"" + key + "\" in " + where);
    }
  }
}

double number(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) throw ConfigError(std::string(key) + " must be a number");
  return obj[key].get<double>();
}

std::int64_t integer(const json& obj, const char* key, std::int64_t fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer()) {
    throw ConfigError(std::string(key) + " must be an integer");
  }
  return obj[key].get<std::int64_t>();
}

bool boolean(const json& obj, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_boolean()) throw ConfigError(std::string(key) + " must be a bool");
  return obj[key].get<bool>();
}

std::string text(const json& obj, const char* key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_string()) throw ConfigError(std::string(key) + " must be a string");
  return obj[key].get<std::string>();
}

char axis_char(const std::string& s, const char* what) {
  if (s.size() == 1) {
    const char c = std::toupper(s[0]);
    if (c == 'X' || c == 'Y' || c == 'Z') return c;
  }
  throw ConfigError(std::string(what) + " must be one of x, y, z");
}

std::vector<double> number_list(const json& obj, const char* key) {
  std::vector<double> out;
  if (!obj.contains(key)) return out;
  if (!obj[key].is_array()) throw ConfigError(std::string(key) + " must be an array");
  for (const auto& v : obj[key]) {
    if (!v.is_number()) throw ConfigError(std::string(key) + " entries must be numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

int component_key(const std::string& name) {
  if (name == "error") return 0;
  if (name == "detuning") return 1;
  if (name == "coupling") return 2;
  throw ConfigError("unknown component \"" + name +
                    "\" (expected error, detuning or coupling)");
}

int weight_key(const std::string& name) {
  if (name == "w_pri") return 0;
  if (name.rfind("w_", 0) == 0) {
    try {
      const int order = std::stoi(name.substr(2));
      if (order >= 0 && order <= 3) return order + 1;
    } catch (...) {
    }
  }
  throw ConfigError("unknown weight \"" + name + "\" (expected w_pri, w_0..w_3)");
}

int stop_key(const std::string& name) {
  if (name == "f_pri") return 0;
  if (name.rfind("f", 0) == 0 && name.size() == 2 && isdigit(name[1])) {
    return name[1] - '0' + 1;
  }
  throw ConfigError("unknown stop criterion \"" + name +
                    "\" (expected total, f_pri, f0..f3)");
}

}  // namespace

ProjectConfig ProjectConfig::from_json(const json& j) {
  check_keys(j, "config",
             {"network", "control", "ensemble", "design", "search", "simulation",
              "seed"});
  ProjectConfig cfg;
  cfg.seed = static_cast<std::uint64_t>(integer(j, "seed", 0));

  if (j.contains("network")) {
    const json& net = j["network"];
    check_keys(net, "network", {"n", "topology", "edges", "d_tensor",
                                "include_error"});
    cfg.n = static_cast<int>(integer(net, "n", cfg.n));
    cfg.topology = text(net, "topology", cfg.topology);
    cfg.include_error = boolean(net, "include_error", cfg.include_error);
    if (net.contains("edges")) {
      if (!net["edges"].is_array()) throw ConfigError("network.edges must be an array");
      for (const auto& e : net["edges"]) {
        if (!e.is_array() || e.size() != 2) {
          throw ConfigError("network.edges entries must be [i, j] pairs");
        }
        cfg.explicit_edges.emplace_back(e[0].get<int>(), e[1].get<int>());
      }
      cfg.topology = "explicit";
    }
    if (net.contains("d_tensor")) {
      if (net["d_tensor"].is_string()) {
        const std::string name = net["d_tensor"].get<std::string>();
        if (name == "dipolar") {
          cfg.d_tensor = NetworkSpec::dipolar_tensor();
        } else if (name == "isotropic") {
          cfg.d_tensor = Eigen::Matrix3d::Identity();
        } else {
          throw ConfigError("unknown d_tensor \"" + name + "\"");
        }
      } else {
        const json& rows = net["d_tensor"];
        if (!rows.is_array() || rows.size() != 3) {
          throw ConfigError("d_tensor must be a 3x3 array");
        }
        for (int a = 0; a < 3; ++a) {
          if (!rows[a].is_array() || rows[a].size() != 3) {
            throw ConfigError("d_tensor must be a 3x3 array");
          }
          for (int b = 0; b < 3; ++b) cfg.d_tensor(a, b) = rows[a][b].get<double>();
        }
      }
    }
  }

  if (j.contains("control")) {
    const json& ctl = j["control"];
    check_keys(ctl, "control", {"omega_max_khz", "dt_us", "endpoint_rule"});
    cfg.omega_max_khz = number(ctl, "omega_max_khz", cfg.omega_max_khz);
    cfg.dt_us = number(ctl, "dt_us", cfg.dt_us);
    cfg.endpoint_rule = boolean(ctl, "endpoint_rule", cfg.endpoint_rule);
    if (cfg.omega_max_khz <= 0 || cfg.dt_us <= 0) {
      throw ConfigError("omega_max_khz and dt_us must be positive");
    }
  }

  if (j.contains("ensemble")) {
    const json& ens = j["ensemble"];
    check_keys(ens, "ensemble",
               {"sigma_dip_khz", "sigma_z_khz", "sigma_eps", "rho_corr", "seed"});
    cfg.ensemble.sigma_dip = khz_to_rad_per_us(number(ens, "sigma_dip_khz", 0.0));
    cfg.ensemble.sigma_z = khz_to_rad_per_us(number(ens, "sigma_z_khz", 0.0));
    cfg.ensemble.sigma_eps = number(ens, "sigma_eps", 0.0);
    cfg.ensemble.rho_corr = number(ens, "rho_corr", 0.0);
    cfg.ensemble.seed = static_cast<std::uint64_t>(integer(ens, "seed", cfg.seed));
    cfg.ensemble.validate();
  } else {
    cfg.ensemble.seed = cfg.seed;
  }

  if (j.contains("design")) {
    const json& design = j["design"];
    check_keys(design, "design",
               {"u_target", "zeroth_targets", "orders", "weights"});
    if (design.contains("u_target")) {
      const json& target = design["u_target"];
      if (target.is_string()) {
        if (target.get<std::string>() != "identity") {
          throw ConfigError("u_target string form must be \"identity\"");
        }
        cfg.design.u_target_kind = "identity";
      } else {
        check_keys(target, "design.u_target", {"axis", "angle_rad"});
        cfg.design.u_target_kind = "collective_rotation";
        cfg.design.rotation_axis = axis_char(text(target, "axis", "x"), "axis");
        cfg.design.rotation_angle = number(target, "angle_rad", 0.0);
      }
    }
    if (design.contains("zeroth_targets")) {
      const json& targets = design["zeroth_targets"];
      if (!targets.is_array()) throw ConfigError("zeroth_targets must be an array");
      for (const auto& entry : targets) {
        check_keys(entry, "zeroth_targets[]", {"component", "scale"});
        cfg.design.zeroth_preserve.emplace_back(
            component_key(text(entry, "component", "")),
            number(entry, "scale", 1.0));
      }
    }
    if (design.contains("orders")) {
      const json& orders = design["orders"];
      if (!orders.is_array()) throw ConfigError("design.orders must be an array");
      for (const auto& entry : orders) {
        check_keys(entry, "design.orders[]", {"edges", "target", "t_prime"});
        GraphTarget gt;
        if (!entry.contains("edges") || !entry["edges"].is_array()) {
          throw ConfigError("design.orders[] entries need an edges array");
        }
        for (const auto& e : entry["edges"]) gt.edges.push_back(e.get<std::string>());
        if (entry.contains("target")) {
          for (const auto& [letters, coeff] : entry["target"].items()) {
            gt.target[letters] = coeff.get<double>();
          }
        }
        gt.t_prime = number(entry, "t_prime", 1.0);
        cfg.design.graph_targets.push_back(std::move(gt));
      }
    }
    if (design.contains("weights")) {
      cfg.design.weights.clear();
      for (const auto& [name, value] : design["weights"].items()) {
        if (!value.is_number() || value.get<double>() <= 0) {
          throw ConfigError("weight " + name + " must be a positive number");
        }
        cfg.design.weights[weight_key(name)] = value.get<double>();
      }
    }
  }

  if (j.contains("search")) {
    const json& search = j["search"];
    check_keys(search, "search",
               {"q_min", "q_max", "q_step", "population", "max_evals", "restarts",
                "sigma0", "seed", "stop", "stagnation_generations",
                "nodes_per_segment", "threads"});
    cfg.search.q_min = static_cast<int>(integer(search, "q_min", cfg.search.q_min));
    cfg.search.q_max = static_cast<int>(integer(search, "q_max", cfg.search.q_max));
    cfg.search.q_step = static_cast<int>(integer(search, "q_step", cfg.search.q_step));
    cfg.search.population =
        static_cast<int>(integer(search, "population", cfg.search.population));
    cfg.search.max_evals = integer(search, "max_evals", cfg.search.max_evals);
    cfg.search.restarts = static_cast<int>(integer(search, "restarts", cfg.search.restarts));
    cfg.search.sigma0 = number(search, "sigma0", cfg.search.sigma0);
    cfg.search.seed = static_cast<std::uint64_t>(integer(search, "seed", cfg.seed));
    cfg.search.stagnation_generations = static_cast<int>(
        integer(search, "stagnation_generations", cfg.search.stagnation_generations));
    cfg.search.nodes_per_segment = static_cast<int>(
        integer(search, "nodes_per_segment", cfg.search.nodes_per_segment));
    cfg.search.threads = static_cast<int>(integer(search, "threads", cfg.search.threads));
    if (search.contains("stop")) {
      for (const auto& [name, value] : search["stop"].items()) {
        if (name == "total") {
          cfg.search.total_threshold = value.get<double>();
        } else {
          cfg.search.term_thresholds[stop_key(name)] = value.get<double>();
        }
      }
    }
  } else {
    cfg.search.seed = cfg.seed;
  }
  cfg.search.dt_us = cfg.dt_us;
  cfg.search.omega_max = cfg.omega_max();

  if (j.contains("simulation")) {
    const json& sim = j["simulation"];
    check_keys(sim, "simulation",
               {"n", "k_max", "n_realizations", "observable", "seed", "window_ms",
                "horizons_ms", "sigma_dip_grid_khz", "rho_grid"});
    cfg.simulation.n = static_cast<int>(integer(sim, "n", cfg.simulation.n));
    cfg.simulation.k_max = static_cast<int>(integer(sim, "k_max", cfg.simulation.k_max));
    cfg.simulation.n_realizations = static_cast<int>(
        integer(sim, "n_realizations", cfg.simulation.n_realizations));
    cfg.simulation.observable = axis_char(text(sim, "observable", "x"), "observable");
    cfg.simulation.seed = static_cast<std::uint64_t>(integer(sim, "seed", cfg.seed));
    cfg.simulation.window_ms = number(sim, "window_ms", cfg.simulation.window_ms);
    cfg.simulation.horizons_ms = number_list(sim, "horizons_ms");
    cfg.simulation.sigma_dip_grid_khz = number_list(sim, "sigma_dip_grid_khz");
    cfg.simulation.rho_grid = number_list(sim, "rho_grid");
  } else {
    cfg.simulation.seed = cfg.seed;
  }
  return cfg;
}

ProjectConfig ProjectConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  try {
    return from_json(j);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

nlohmann::json ProjectConfig::to_json() const {
  json j;
  j["seed"] = seed;
  j["network"] = {{"n", n},
                  {"topology", topology},
                  {"include_error", include_error}};
  json d_rows = json::array();
  for (int a = 0; a < 3; ++a) {
    d_rows.push_back({d_tensor(a, 0), d_tensor(a, 1), d_tensor(a, 2)});
  }
  j["network"]["d_tensor"] = d_rows;
  if (!explicit_edges.empty()) {
    json edges = json::array();
    for (const auto& [a, b] : explicit_edges) edges.push_back({a, b});
    j["network"]["edges"] = edges;
  }
  j["control"] = {{"omega_max_khz", omega_max_khz},
                  {"dt_us", dt_us},
                  {"endpoint_rule", endpoint_rule}};
  j["ensemble"] = {{"sigma_dip_khz", rad_per_us_to_khz(ensemble.sigma_dip)},
                   {"sigma_z_khz", rad_per_us_to_khz(ensemble.sigma_z)},
                   {"sigma_eps", ensemble.sigma_eps},
                   {"rho_corr", ensemble.rho_corr},
                   {"seed", ensemble.seed}};
  json orders = json::array();
  for (const auto& gt : design.graph_targets) {
    json entry;
    entry["edges"] = gt.edges;
    if (!gt.target.empty()) {
      json t;
      for (const auto& [letters, coeff] : gt.target) t[letters] = coeff;
      entry["target"] = t;
      entry["t_prime"] = gt.t_prime;
    }
    orders.push_back(entry);
  }
  json weights;
  for (const auto& [key, w] : design.weights) {
    weights[key == 0 ? "w_pri" : "w_" + std::to_string(key - 1)] = w;
  }
  j["design"] = {{"u_target", design.u_target_kind},
                 {"orders", orders},
                 {"weights", weights}};
  j["search"] = {{"q_min", search.q_min},
                 {"q_max", search.q_max},
                 {"q_step", search.q_step},
                 {"population", search.population},
                 {"max_evals", search.max_evals},
                 {"restarts", search.restarts},
                 {"sigma0", search.sigma0},
                 {"seed", search.seed},
                 {"nodes_per_segment", search.nodes_per_segment}};
  j["simulation"] = {{"n", simulation.n},
                     {"k_max", simulation.k_max},
                     {"n_realizations", simulation.n_realizations},
                     {"observable", std::string(1, simulation.observable)},
                     {"seed", simulation.seed},
                     {"window_ms", simulation.window_ms}};
  return j;
}

NetworkSpec ProjectConfig::network() const {
  if (topology == "all_to_all") {
    return NetworkSpec::all_to_all(n, d_tensor, include_error);
  }
  if (topology == "chain") {
    return NetworkSpec::chain(n, d_tensor, include_error);
  }
  if (topology == "pair") {
    return NetworkSpec::all_to_all(2, d_tensor, include_error);
  }
  if (topology == "explicit") {
    NetworkSpec net;
    net.n = n;
    net.d_tensor = d_tensor;
    for (auto [a, b] : explicit_edges) {
      if (a > b) std::swap(a, b);
      net.edges.emplace_back(a, b);
    }
    for (int q = 1; q <= n; ++q) net.detuned_qubits.push_back(q);
    if (include_error) net.error_ids.push_back(0);
    net.validate();
    return net;
  }
  throw ConfigError("unknown topology \"" + topology + "\"");
}

int ProjectConfig::max_order() const {
  int r_max = 1;
  for (const auto& gt : design.graph_targets) {
    r_max = std::max(r_max, static_cast<int>(gt.edges.size()));
  }
  return r_max;
}

DesignSpec build_design_spec(const ProjectConfig& cfg, const CSpaceBasis& basis,
                             const NetworkSpec& net) {
  DesignSpec spec;
  const Eigen::Index dim = Eigen::Index(1) << net.n;
  if (cfg.design.u_target_kind == "identity") {
    spec.u_target = Mat::Identity(dim, dim);
  } else {
    Mat g = Mat::Zero(dim, dim);
    for (int q = 0; q < net.n; ++q) {
      std::string letters(net.n, 'I');
      letters[q] = cfg.design.rotation_axis;
      g += 0.5 * build_pauli({letters, 1.0}, net.n);
    }
    spec.u_target = expm_skew(g, cfg.design.rotation_angle);
  }

  spec.zeroth_target = RVec::Zero(basis.dim());
  for (const auto& [component_kind, scale] : cfg.design.zeroth_preserve) {
    bool found = false;
    for (std::size_t w = 0; w < basis.components.size(); ++w) {
      const auto& comp = basis.components[w];
      const int kind_key = comp.kind == PerturbationComponent::Kind::control_error
                               ? 0
                               : comp.kind == PerturbationComponent::Kind::detuning ? 1 : 2;
      if (kind_key != component_kind) continue;
      if (comp.time_dependent()) {
        throw ConfigError("zeroth_targets cannot preserve the control-error "
                          "component (it has no static pattern)");
      }
      ControlSegment idle;
      const ProjectionResult proj = project(comp.op_for_segment(net, idle), basis);
      spec.zeroth_target += scale * proj.coeffs;
      found = true;
    }
    if (!found) {
      throw ConfigError("zeroth_targets names a component absent from the network");
    }
  }

  for (const auto& gt : cfg.design.graph_targets) {
    const ParameterGraph graph = ParameterGraph::parse(gt.edges);
    spec.order_constraints.push_back(
        constraint_system(graph, basis, gt.target, gt.t_prime));
  }
  spec.weights = cfg.design.weights;
  spec.max_order = cfg.max_order();
  spec.validate();
  return spec;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace heff
