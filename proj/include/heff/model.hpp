#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "heff/parametric.hpp"
#include "heff/rng.hpp"
#include "heff/types.hpp"

namespace heff {

// One piecewise-constant control interval. Frequencies are angular, rad/us.
struct ControlSegment {
  double duration_us = 2.0;
  double omega1 = 0.0;       // Rabi amplitude, >= 0
  double phi = 0.0;          // phase, rad
  double delta_omega = 0.0;  // detuning of the drive
};

struct ControlSequence {
  std::vector<ControlSegment> segments;
  double dt_default_us = 2.0;
  double omega_max = khz_to_rad_per_us(250.0);
  bool endpoint_rule = true;  // first/last segments have omega1 = delta_omega = 0

  double total_duration_us() const;
  int size() const { return static_cast<int>(segments.size()); }
  // Throws ConfigError when bounds or the endpoint rule are violated.
  void validate() const;
};

// Sequence files are CSV with a fixed header; amplitudes in kHz, durations in
// us. Round-trips are bit-exact.
ControlSequence read_sequence_csv(std::istream& in, double omega_max_khz = 250.0,
                                  bool endpoint_rule = false);
ControlSequence read_sequence_file(const std::string& path,
                                   double omega_max_khz = 250.0,
                                   bool endpoint_rule = false);
void write_sequence_csv(std::ostream& out, const ControlSequence& seq);
void write_sequence_file(const std::string& path, const ControlSequence& seq);

// Qubit network: which couplings, detunings and error strengths exist, and
// the rank-2 tensor D defining the two-qubit interaction form.
struct NetworkSpec {
  int n = 2;
  std::vector<std::pair<int, int>> edges;  // 1-based, i < j
  std::vector<int> detuned_qubits;         // usually 1..n
  std::vector<int> error_ids;              // {0} for the single-epsilon model
  Eigen::Matrix3d d_tensor = Eigen::Matrix3d::Identity();

  static Eigen::Matrix3d dipolar_tensor();  // diag(-1,-1,2)
  static NetworkSpec all_to_all(int n, const Eigen::Matrix3d& d, bool with_error);
  static NetworkSpec chain(int n, const Eigen::Matrix3d& d, bool with_error);

  bool has_edge(int i, int j) const;
  // Canonical ordering: detunings by qubit, couplings lexicographic, errors.
  std::vector<ParamId> param_ids() const;
  void validate() const;
};

// Values for every parameter id of a network.
struct ParameterRealization {
  std::map<ParamId, double> values;

  double value(const ParamId& id) const;  // throws naming the id when missing
  static ParameterRealization zero(const NetworkSpec& net);
};

// Gaussian ensemble of realizations. rho_corr couples B_ij to delta_i+delta_j.
struct EnsembleSpec {
  double sigma_dip = 0.0;  // rad/us
  double sigma_z = 0.0;    // rad/us
  double sigma_eps = 0.0;  // dimensionless
  double rho_corr = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

// (1+eps) * [ omega1/2 (cos phi SX + sin phi SY) + delta_omega/2 SZ ] with
// SA = sum_i sigma_a^i.
Mat control_hamiltonian(const ControlSegment& seg, int n_qubits, double eps = 0.0);

// (1/2) sum_i delta_i sz^i + (1/4) sum_{i<j} B_ij vec(sigma_i) . D . vec(sigma_j)
Mat internal_hamiltonian(const NetworkSpec& net, const ParameterRealization& real);

// The coupling block (1/4) vec(sigma_i) . D . vec(sigma_j) for one edge.
Mat coupling_block(const NetworkSpec& net, int i, int j);

// Perturbation partition H_pert = H^1 (control error) + H^2 (detunings)
// + H^3 (couplings). Components 2-3 are time independent.
struct PerturbationComponent {
  enum class Kind { control_error, detuning, coupling };
  Kind kind;
  int index = 0;  // position w in the composite ordering
  std::vector<ParamId> params;

  bool time_dependent() const { return kind == Kind::control_error; }
  // Blocks at unit parameters for a given segment (segment only matters for
  // the control-error component).
  ParametricOperator op_for_segment(const NetworkSpec& net,
                                    const ControlSegment& seg) const;
  // Operator content spanned over time/controls, used to seed the C-space
  // closure. Static components return their single operator.
  std::vector<ParametricOperator> seed_directions(const NetworkSpec& net) const;
};

std::vector<PerturbationComponent> perturbation_components(const NetworkSpec& net);

// delta_i ~ N(0, sigma_z^2), eps ~ N(0, sigma_eps^2) and, when rho != 0,
// B_ij = rho sigma_dip/(sqrt2 sigma_z) (delta_i+delta_j) + N(0,(1-rho^2) sigma_dip^2).
// Deterministic for a given (ensemble seed, stream index).
ParameterRealization sample_realization(const NetworkSpec& net,
                                        const EnsembleSpec& ens,
                                        std::uint64_t stream_index);

// Time-ordered propagator of H = (1+eps) H_c(t) + H_int over the sequence;
// segment q acts first for q = 1, i.e. U = E_Q ... E_2 E_1.
Mat total_propagator(const ControlSequence& seq, const NetworkSpec& net,
                     const ParameterRealization& real, double eps);

// Propagator of the bare control Hamiltonian on n qubits.
Mat primary_propagator(const ControlSequence& seq, int n_qubits);

}  // namespace heff
