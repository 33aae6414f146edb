#include "heff/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "heff/operator_algebra.hpp"

namespace heff {

double ControlSequence::total_duration_us() const {
  double t = 0.0;
  for (const auto& seg : segments) t += seg.duration_us;
  return t;
}

void ControlSequence::validate() const {
  if (segments.empty() || total_duration_us() <= 0.0) {
    throw ConfigError("control sequence must have positive total duration");
  }
  const double bound_tol = 1e-12 * std::max(1.0, omega_max);
  for (std::size_t q = 0; q < segments.size(); ++q) {
    const auto& seg = segments[q];
    if (seg.duration_us <= 0.0) {
      throw ConfigError("segment " + std::to_string(q + 1) +
                        " has non-positive duration");
    }
    if (seg.omega1 < -bound_tol || seg.omega1 > omega_max + bound_tol) {
      throw ConfigError("segment " + std::to_string(q + 1) +
                        ": omega1 outside [0, omega_max]");
    }
    if (std::abs(seg.delta_omega) > omega_max + bound_tol) {
      throw ConfigError("segment " + std::to_string(q + 1) +
                        ": |delta_omega| exceeds omega_max");
    }
  }
  if (endpoint_rule) {
    for (std::size_t q : {std::size_t(0), segments.size() - 1}) {
      if (segments[q].omega1 != 0.0 || segments[q].delta_omega != 0.0) {
        throw ConfigError(
            "endpoint rule: first and last segments must have zero amplitude "
            "and detuning");
      }
    }
  }
}

ControlSequence read_sequence_csv(std::istream& in, double omega_max_khz,
                                  bool endpoint_rule) {
  ControlSequence seq;
  seq.omega_max = khz_to_rad_per_us(omega_max_khz);
  seq.endpoint_rule = endpoint_rule;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty sequence file");
  // Tolerate a UTF-8 BOM and trailing CR.
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "duration_us,omega1_khz,phi_rad,delta_omega_khz") {
    throw ConfigError("bad sequence header \"" + line + "\"");
  }
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    double v[4];
    for (int k = 0; k < 4; ++k) {
      if (!std::getline(row, field, ',')) {
        throw ConfigError("sequence line " + std::to_string(lineno) +
                          ": expected 4 comma-separated fields");
      }
      try {
        v[k] = std::stod(field);
      } catch (const std::exception&) {
        throw ConfigError("sequence line " + std::to_string(lineno) +
                          ": cannot parse \"" + field + "\"");
      }
    }
    ControlSegment seg;
    seg.duration_us = v[0];
    seg.omega1 = khz_to_rad_per_us(v[1]);
    seg.phi = v[2];
    seg.delta_omega = khz_to_rad_per_us(v[3]);
    seq.segments.push_back(seg);
  }
  if (!seq.segments.empty()) seq.dt_default_us = seq.segments.front().duration_us;
  seq.validate();
  return seq;
}

ControlSequence read_sequence_file(const std::string& path, double omega_max_khz,
                                   bool endpoint_rule) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open sequence file " + path);
  try {
    return read_sequence_csv(in, omega_max_khz, endpoint_rule);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void write_sequence_csv(std::ostream& out, const ControlSequence& seq) {
  out << "duration_us,omega1_khz,phi_rad,delta_omega_khz\n";
  char buf[160];
  for (const auto& seg : seq.segments) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", seg.duration_us,
                  rad_per_us_to_khz(seg.omega1), seg.phi,
                  rad_per_us_to_khz(seg.delta_omega));
    out << buf;
  }
}

void write_sequence_file(const std::string& path, const ControlSequence& seq) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write sequence file " + path);
  write_sequence_csv(out, seq);
}

Eigen::Matrix3d NetworkSpec::dipolar_tensor() {
  Eigen::Matrix3d d = Eigen::Matrix3d::Zero();
  d(0, 0) = -1.0;
  d(1, 1) = -1.0;
  d(2, 2) = 2.0;
  return d;
}

NetworkSpec NetworkSpec::all_to_all(int n, const Eigen::Matrix3d& d,
                                    bool with_error) {
  NetworkSpec net;
  net.n = n;
  net.d_tensor = d;
  for (int i = 1; i <= n; ++i) {
    net.detuned_qubits.push_back(i);
    for (int j = i + 1; j <= n; ++j) net.edges.emplace_back(i, j);
  }
  if (with_error) net.error_ids.push_back(0);
  net.validate();
  return net;
}

NetworkSpec NetworkSpec::chain(int n, const Eigen::Matrix3d& d, bool with_error) {
  NetworkSpec net;
  net.n = n;
  net.d_tensor = d;
  for (int i = 1; i <= n; ++i) {
    net.detuned_qubits.push_back(i);
    if (i < n) net.edges.emplace_back(i, i + 1);
  }
  if (with_error) net.error_ids.push_back(0);
  net.validate();
  return net;
}

bool NetworkSpec::has_edge(int i, int j) const {
  if (i > j) std::swap(i, j);
  return std::find(edges.begin(), edges.end(), std::make_pair(i, j)) != edges.end();
}

std::vector<ParamId> NetworkSpec::param_ids() const {
  std::vector<ParamId> ids;
  for (int q : detuned_qubits) ids.push_back(ParamId::detuning(q));
  for (const auto& [i, j] : edges) ids.push_back(ParamId::coupling(i, j));
  for (int k : error_ids) ids.push_back(ParamId::error(k));
  return ids;
}

void NetworkSpec::validate() const {
  if (n < 1) throw ConfigError("network must have at least one qubit");
  for (const auto& [i, j] : edges) {
    if (i < 1 || j > n || i >= j) {
      throw ConfigError("bad edge (" + std::to_string(i) + "," +
                        std::to_string(j) + ") for n = " + std::to_string(n));
    }
  }
  for (int q : detuned_qubits) {
    if (q < 1 || q > n) throw ConfigError("detuned qubit out of range");
  }
  if (max_abs(Mat((d_tensor - d_tensor.transpose()).cast<cxd>())) > 1e-12) {
    throw ConfigError("D tensor must be symmetric");
  }
}

double ParameterRealization::value(const ParamId& id) const {
  auto it = values.find(id);
  if (it == values.end()) {
    throw std::invalid_argument("realization is missing parameter " + id.str());
  }
  return it->second;
}

ParameterRealization ParameterRealization::zero(const NetworkSpec& net) {
  ParameterRealization real;
  for (const auto& id : net.param_ids()) real.values[id] = 0.0;
  return real;
}

void EnsembleSpec::validate() const {
  if (sigma_dip < 0 || sigma_z < 0 || sigma_eps < 0) {
    throw ConfigError("ensemble sigmas must be nonnegative");
  }
  if (std::abs(rho_corr) > 1.0) throw ConfigError("|rho_corr| must be <= 1");
  if (rho_corr != 0.0 && sigma_z == 0.0) {
    throw ConfigError("correlated sampling (rho_corr != 0) requires sigma_z > 0");
  }
}

namespace {

Mat collective(char axis, int n_qubits) {
  const Eigen::Index dim = Eigen::Index(1) << n_qubits;
  Mat sum = Mat::Zero(dim, dim);
  for (int q = 0; q < n_qubits; ++q) {
    std::string letters(n_qubits, 'I');
    letters[q] = axis;
    sum += build_pauli({letters, 1.0}, n_qubits);
  }
  return sum;
}

}  // namespace

Mat control_hamiltonian(const ControlSegment& seg, int n_qubits, double eps) {
  const Eigen::Index dim = Eigen::Index(1) << n_qubits;
  Mat h = Mat::Zero(dim, dim);
  if (seg.omega1 != 0.0) {
    h += (seg.omega1 / 2.0) * (std::cos(seg.phi) * collective('X', n_qubits) +
                               std::sin(seg.phi) * collective('Y', n_qubits));
  }
  if (seg.delta_omega != 0.0) {
    h += (seg.delta_omega / 2.0) * collective('Z', n_qubits);
  }
  return (1.0 + eps) * h;
}

Mat coupling_block(const NetworkSpec& net, int i, int j) {
  static const char axes[] = {'X', 'Y', 'Z'};
  const Eigen::Index dim = Eigen::Index(1) << net.n;
  Mat block = Mat::Zero(dim, dim);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      if (net.d_tensor(a, b) == 0.0) continue;
      std::string letters(net.n, 'I');
      letters[i - 1] = axes[a];
      letters[j - 1] = axes[b];
      block += 0.25 * net.d_tensor(a, b) * build_pauli({letters, 1.0}, net.n);
    }
  }
  return block;
}

Mat internal_hamiltonian(const NetworkSpec& net, const ParameterRealization& real) {
  const Eigen::Index dim = Eigen::Index(1) << net.n;
  Mat h = Mat::Zero(dim, dim);
  for (int q : net.detuned_qubits) {
    std::string letters(net.n, 'I');
    letters[q - 1] = 'Z';
    h += 0.5 * real.value(ParamId::detuning(q)) * build_pauli({letters, 1.0}, net.n);
  }
  for (const auto& [i, j] : net.edges) {
    h += real.value(ParamId::coupling(i, j)) * coupling_block(net, i, j);
  }
  return h;
}

ParametricOperator PerturbationComponent::op_for_segment(
    const NetworkSpec& net, const ControlSegment& seg) const {
  ParametricOperator op;
  op.component = index;
  switch (kind) {
    case Kind::control_error:
      for (const auto& id : params) {
        op.blocks.emplace(id, control_hamiltonian(seg, net.n, 0.0));
      }
      break;
    case Kind::detuning:
      for (const auto& id : params) {
        std::string letters(net.n, 'I');
        letters[id.i - 1] = 'Z';
        op.blocks.emplace(id, 0.5 * build_pauli({letters, 1.0}, net.n));
      }
      break;
    case Kind::coupling:
      for (const auto& id : params) {
        op.blocks.emplace(id, coupling_block(net, id.i, id.j));
      }
      break;
  }
  return op;
}

std::vector<ParametricOperator> PerturbationComponent::seed_directions(
    const NetworkSpec& net) const {
  if (!time_dependent()) {
    ControlSegment idle;
    return {op_for_segment(net, idle)};
  }
  // The control error sweeps the collective x/y/z directions as the drive
  // parameters vary; each direction seeds the closure separately.
  std::vector<ParametricOperator> dirs;
  for (char axis : {'X', 'Y', 'Z'}) {
    ParametricOperator op;
    op.component = index;
    for (const auto& id : params) {
      op.blocks.emplace(id, 0.5 * collective(axis, net.n));
    }
    dirs.push_back(std::move(op));
  }
  return dirs;
}

std::vector<PerturbationComponent> perturbation_components(const NetworkSpec& net) {
  std::vector<PerturbationComponent> comps;
  int index = 0;
  if (!net.error_ids.empty()) {
    PerturbationComponent c;
    c.kind = PerturbationComponent::Kind::control_error;
    c.index = index++;
    for (int k : net.error_ids) c.params.push_back(ParamId::error(k));
    comps.push_back(std::move(c));
  }
  if (!net.detuned_qubits.empty()) {
    PerturbationComponent c;
    c.kind = PerturbationComponent::Kind::detuning;
    c.index = index++;
    for (int q : net.detuned_qubits) c.params.push_back(ParamId::detuning(q));
    comps.push_back(std::move(c));
  }
  if (!net.edges.empty()) {
    PerturbationComponent c;
    c.kind = PerturbationComponent::Kind::coupling;
    c.index = index++;
    for (const auto& [i, j] : net.edges) c.params.push_back(ParamId::coupling(i, j));
    comps.push_back(std::move(c));
  }
  return comps;
}

ParameterRealization sample_realization(const NetworkSpec& net,
                                        const EnsembleSpec& ens,
                                        std::uint64_t stream_index) {
  ens.validate();
  Philox rng(ens.seed, make_stream(StreamPurpose::ensemble, stream_index));
  ParameterRealization real;
  std::map<int, double> delta;
  for (int q : net.detuned_qubits) {
    delta[q] = ens.sigma_z * rng.normal();
    real.values[ParamId::detuning(q)] = delta[q];
  }
  for (int k : net.error_ids) {
    real.values[ParamId::error(k)] = ens.sigma_eps * rng.normal();
  }
  for (const auto& [i, j] : net.edges) {
    double b = 0.0;
    if (ens.rho_corr != 0.0) {
      const double di = delta.count(i) ? delta[i] : 0.0;
      const double dj = delta.count(j) ? delta[j] : 0.0;
      b = ens.rho_corr * ens.sigma_dip / (std::sqrt(2.0) * ens.sigma_z) * (di + dj) +
          std::sqrt(1.0 - ens.rho_corr * ens.rho_corr) * ens.sigma_dip * rng.normal();
    } else {
      b = ens.sigma_dip * rng.normal();
    }
    real.values[ParamId::coupling(i, j)] = b;
  }
  return real;
}

Mat total_propagator(const ControlSequence& seq, const NetworkSpec& net,
                     const ParameterRealization& real, double eps) {
  if (seq.segments.empty()) {
    throw std::invalid_argument("total_propagator: empty sequence");
  }
  const Mat h_int = internal_hamiltonian(net, real);
  Mat u = Mat::Identity(h_int.rows(), h_int.cols());
  for (const auto& seg : seq.segments) {
    const Mat h = control_hamiltonian(seg, net.n, eps) + h_int;
    u = expm_skew(h, seg.duration_us) * u;
  }
  return u;
}

Mat primary_propagator(const ControlSequence& seq, int n_qubits) {
  const Eigen::Index dim = Eigen::Index(1) << n_qubits;
  Mat u = Mat::Identity(dim, dim);
  for (const auto& seg : seq.segments) {
    u = expm_skew(control_hamiltonian(seg, n_qubits, 0.0), seg.duration_us) * u;
  }
  return u;
}

}  // namespace heff
