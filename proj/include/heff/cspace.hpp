#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "heff/model.hpp"
#include "heff/parametric.hpp"

namespace heff {

// Rank decisions during the closure and in all subspace comparisons use this
// relative threshold on singular values / projection residuals.
inline constexpr double kRankTol = 1e-9;

// Orthonormal basis of the composite C space: the direct sum over
// perturbation components of the smallest operator subspaces that contain the
// toggling-frame image of each component for every control.
struct CSpaceBasis {
  std::vector<ParametricOperator> elements;              // pairwise orthonormal
  std::vector<std::pair<int, int>> component_ranges;     // [begin,end) per component
  std::vector<PerturbationComponent> components;
  CoordinateLayout layout;  // global chart over all network parameters
  RMat coords;              // layout.dim() x size(), orthonormal columns

  int dim() const { return static_cast<int>(elements.size()); }
  std::vector<int> component_dims() const;
};

struct ProjectionResult {
  RVec coeffs;
  double residual = 0.0;
};

// Commutator closure of the primary control algebra. For collective drive
// this is exactly {SX/2, SY/2, SZ/2}.
std::vector<Mat> primary_generators(const NetworkSpec& net);

// Closure of each component under the adjoint maps i[g, .] of the primary
// generators, seeded with generic combinations of the component's operator
// content, then Gram-Schmidt orthonormalized. Components occupy disjoint
// index ranges. Throws when the span keeps growing past max_rounds.
CSpaceBasis minimal_composite_cspace(const std::vector<PerturbationComponent>& comps,
                                     const NetworkSpec& net,
                                     const std::vector<Mat>& gens,
                                     std::uint64_t seed = 0, int max_rounds = 64);

ProjectionResult project(const ParametricOperator& op, const CSpaceBasis& basis);

// Dimension of the closure seeded with joint direct-sum vectors instead of
// per-component ones. When components transform under inequivalent actions
// this equals the composite dimension; a smaller value means the direct-sum
// basis is redundant (never wrong, only larger than necessary).
int joint_closure_dimension(const std::vector<PerturbationComponent>& comps,
                            const NetworkSpec& net, const std::vector<Mat>& gens,
                            std::uint64_t seed = 0, int max_rounds = 64);

// JSON report: per-component dimensions plus, per element, its nonzero
// (parameter id, Pauli string, coefficient) triples.
std::string basis_report_json(const CSpaceBasis& basis);

}  // namespace heff
