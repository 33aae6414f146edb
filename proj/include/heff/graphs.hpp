#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "heff/cspace.hpp"
#include "heff/indexing.hpp"
#include "heff/magnus.hpp"

namespace heff {

// Multiset of parameter ids attached to one polynomial coefficient of a
// Magnus term. Coupling edges join two qubits, detunings are loops, and an
// error edge acts collectively, so it counts as incident to every vertex.
struct ParameterGraph {
  std::vector<ParamId> edges;  // sorted

  static ParameterGraph make(std::vector<ParamId> edges);
  static ParameterGraph parse(const std::vector<std::string>& edge_names);

  int r() const { return static_cast<int>(edges.size()); }
  std::vector<int> vertices() const;  // sorted distinct qubit labels
  bool connected() const;
  // Relabeling-invariant key: minimum over vertex permutations of the sorted
  // edge encoding; error edges are fixed points.
  std::string canonical_key() const;
  bool isomorphic_to(const ParameterGraph& other) const;
  std::string str() const;  // e.g. "{11,12}"
};

// All connected multigraphs with r edges drawn from the network's parameter
// ids, up to isomorphism. Each class is reported by its lexicographically
// smallest concrete member, in deterministic order. allowed_kinds optionally
// restricts the edge alphabet (e.g. couplings only).
std::vector<ParameterGraph> enumerate_graphs(
    const NetworkSpec& net, int r, bool include_error,
    std::optional<std::set<ParamId::Kind>> allowed_kinds = std::nullopt);

// Target operator as a Pauli-string map; letters name qubits 1..L and are
// padded with identities to the network size.
using PauliTargetMap = std::map<std::string, double>;

// Linear system A(G) c = d(G): columns are vec[dF_G(i1..ir)] over the union
// of Pauli supports, d = vec of the target derivative times t_prime.
struct ConstraintSystem {
  ParameterGraph graph;
  int order = 0;                     // r = |G|
  int c_dim = 0;                     // |C| of the basis the columns index
  std::vector<std::int64_t> support; // sorted Pauli codes forming vec[.]
  RMat a;                            // support.size() x |C|^r
  RVec d;
  double t_prime = 0.0;

  TupleIndexer indexer() const { return {c_dim, order}; }
};

// Throws InfeasibleError (reporting the out-of-range residual) when the
// target is not in the column space of A.
ConstraintSystem constraint_system(const ParameterGraph& graph,
                                   const CSpaceBasis& basis,
                                   const PauliTargetMap& target = {},
                                   double t_prime = 0.0);

// Orthonormal basis of S(G) = span{dF_G}, optionally with the C-integral
// directions restricted to a nullspace (columns recombined before the span is
// extracted).
struct SubspaceBasis {
  std::vector<std::int64_t> support;
  RMat coords;  // support.size() x dim, orthonormal columns

  int dim() const { return static_cast<int>(coords.cols()); }
  std::vector<Mat> operators(int n_qubits) const;
};

SubspaceBasis achievable_subspace(const ParameterGraph& graph,
                                  const CSpaceBasis& basis,
                                  const RMat* restriction = nullptr);

// Smallest principal angle test: true iff the row spaces of A(G1) and A(G2)
// coincide, i.e. the graphs impose the same constraints.
bool graphs_equivalent(const ParameterGraph& g1, const ParameterGraph& g2,
                       const CSpaceBasis& basis);

// Sequential feasibility over a list of constraint systems sharing one tuple
// index space: maintains a particular solution and the intersection of
// nullspaces.
struct FeasibleStep {
  std::string graph;
  double residual = 0.0;
  bool feasible = true;
  int null_dim_after = 0;
};

struct FeasibleResult {
  bool feasible = true;
  RVec solution;   // particular solution c
  RMat nullspace;  // orthonormal basis of the intersected nullspaces
  std::vector<FeasibleStep> steps;
};

FeasibleResult feasible_targets(const std::vector<ConstraintSystem>& systems);

// Affine image A(G_next) [c + N] reachable for the next graph given the
// solved prefix: offset A c and an orthonormal basis of span(A N).
struct AffineImage {
  RVec offset;
  RMat directions;  // orthonormal columns
  std::vector<std::int64_t> support;

  int dim() const { return static_cast<int>(directions.cols()); }
};

AffineImage image_through(const ConstraintSystem& next, const FeasibleResult& state);

// Distance of a proposed d from the affine image; positive means rejected.
double image_distance(const AffineImage& image, const RVec& d);

std::string graphs_report_json(const std::vector<ParameterGraph>& graphs,
                               const CSpaceBasis& basis, int n_qubits);

}  // namespace heff
