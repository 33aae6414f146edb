#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "heff/pauli.hpp"
#include "heff/types.hpp"

namespace heff {

// Identifier of one perturbative parameter: a coupling B_ij (i<j), a detuning
// delta_i (written as the loop "ii"), or a control-error strength e_k.
// Qubits are 1-based to match the usual "11"/"12"/"23" graph notation.
struct ParamId {
  enum class Kind : std::uint8_t { detuning = 0, coupling = 1, error = 2 };

  Kind kind = Kind::coupling;
  int i = 0;
  int j = 0;

  static ParamId coupling(int i, int j);
  static ParamId detuning(int i) { return {Kind::detuning, i, i}; }
  static ParamId error(int k = 0) { return {Kind::error, k, k}; }

  bool is_coupling() const { return kind == Kind::coupling; }
  bool is_detuning() const { return kind == Kind::detuning; }
  bool is_error() const { return kind == Kind::error; }

  auto operator<=>(const ParamId&) const = default;

  // "12", "11", "e" (or "e1" for k>0).
  std::string str() const;
  // Accepts the formats produced by str().
  static ParamId parse(const std::string& text);
};

// Operator-valued linear form sum_m eta_m O_m: one Hermitian block per
// parameter id, no constant part. component tags which H_pert^w it belongs to.
struct ParametricOperator {
  int component = -1;
  std::map<ParamId, Mat> blocks;

  Eigen::Index dim() const;
  bool empty() const { return blocks.empty(); }
  const Mat* block(const ParamId& id) const;

  ParametricOperator& operator+=(const ParametricOperator& other);
  ParametricOperator& operator*=(double scale);

  // Blockwise i[g, O_m]; maps Hermitian blocks to Hermitian blocks.
  ParametricOperator adjoint_map(const Mat& g) const;

  // Instantiation sum_m eta_m O_m at concrete parameter values (missing ids
  // are treated as zero).
  Mat instantiate(const std::map<ParamId, double>& values) const;
};

// Parametric Hilbert-Schmidt inner product: sum over shared parameter ids of
// hs_inner(A_m, B_m). Real for Hermitian blocks.
double param_inner(const ParametricOperator& a, const ParametricOperator& b);
double param_norm(const ParametricOperator& a);

// Fixed real-coordinate chart for parametric operators: one block of 4^n
// Pauli coefficients per parameter id, concatenated in id order. Euclidean
// inner products in this chart equal param_inner.
struct CoordinateLayout {
  std::vector<ParamId> params;
  int n_qubits = 0;

  std::int64_t block_len() const { return std::int64_t(1) << (2 * n_qubits); }
  std::int64_t dim() const { return block_len() * std::int64_t(params.size()); }
  std::int64_t offset_of(const ParamId& id) const;  // -1 when absent
};

RVec coordinates(const ParametricOperator& op, const CoordinateLayout& layout);
ParametricOperator from_coordinates(const RVec& x, const CoordinateLayout& layout,
                                    int component, double threshold = 1e-14);

}  // namespace heff
