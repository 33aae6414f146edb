#pragma once

#include <array>
#include <vector>

#include "heff/cspace.hpp"
#include "heff/indexing.hpp"
#include "heff/model.hpp"

namespace heff {

// Gauss-Legendre rule on [-1,1] plus the spectral cumulative-integration
// matrix S: (S f)_j = integral from -1 to x_j of the degree-(K-1) interpolant
// of the samples f.
struct QuadratureRule {
  RVec nodes;    // K, increasing
  RVec weights;  // K
  RMat cumulative;

  static const QuadratureRule& get(int k);  // cached per node count
};

// Coefficient traces c_i(t) of the toggling-frame Hamiltonian sampled on
// composite Gauss-Legendre nodes, segment by segment.
struct ToggleTrace {
  int nodes_per_segment = 16;
  std::vector<double> seg_start_us;
  std::vector<double> seg_duration_us;
  RVec node_times_us;   // strictly increasing across [0, T_seq]
  RVec node_weights;    // GL weights scaled to segment length
  RMat values;          // |C| rows x total node count
  double t_total_us = 0.0;

  int segment_count() const { return static_cast<int>(seg_start_us.size()); }
  int basis_dim() const { return static_cast<int>(values.rows()); }
};

// Reference implementation: accumulates U_pri(t) exactly from per-segment
// eigendecompositions, conjugates every parameter block and projects onto the
// basis. Throws when any node's projection residual exceeds the bound, which
// signals a basis/space mismatch.
ToggleTrace toggling_trace(const ControlSequence& seq, const NetworkSpec& net,
                           const CSpaceBasis& basis, int nodes_per_segment = 16);

// Hot-path evaluator: the same trace computed from the orthogonal rotations
// the control induces on C-space coordinates. Agrees with toggling_trace to
// machine precision and never touches 2^n-dimensional matrices.
struct TogglingEngine {
  std::array<RMat, 3> adjoint;  // generators of the coordinate rotation, x/y/z
  RVec p_static;                // coordinates of the static perturbation
  std::array<RVec, 3> p_error;  // coordinates of the error blocks, x/y/z
  int dim = 0;
};

TogglingEngine make_toggling_engine(const CSpaceBasis& basis,
                                    const NetworkSpec& net);
ToggleTrace toggling_trace_fast(const TogglingEngine& engine,
                                const ControlSequence& seq,
                                int nodes_per_segment = 16);

// All time-ordered integrals
//   cbar_{i1..ir} = int dt1 int^{t1} dt2 ... c_{i1}(t1) ... c_{ir}(tr)
// up to order R; i1 is the outermost (latest) time. Entries are dimensionless
// (rad/us times us absorbed).
struct CIntegralTensor {
  int order = 0;
  int dim = 0;
  double t_total_us = 0.0;
  std::vector<RVec> tensors;  // tensors[r-1] has dim^r entries, TupleIndexer order

  const RVec& at_order(int r) const { return tensors.at(r - 1); }
  TupleIndexer indexer(int r) const { return {dim, r}; }
};

inline constexpr int kMaxCIntegralOrder = 4;

CIntegralTensor c_integrals(const ToggleTrace& trace, int order);

// Root-sum-square of cbar_{i1..ir} - (-1)^r cbar_{ir..i1} over all tuples
// except i1=...=ir. Zero certifies that the (r-1)th Magnus term vanishes.
double parity_residual(const CIntegralTensor& cint, int r);

}  // namespace heff
