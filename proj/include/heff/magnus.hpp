#pragma once

#include <vector>

#include "heff/cspace.hpp"
#include "heff/model.hpp"
#include "heff/toggling.hpp"

namespace heff {

inline constexpr int kMaxMagnusOrder = 4;  // r! permutation growth cap

// Weight of one permutation in the operator coefficient F_{i1..ir}:
// (-i)^(r-1) (-1)^descents ascents! descents! / r!, with ascents/descents
// counted on the permutation word.
struct PermutationWeight {
  std::vector<int> word;  // images (pi(1)..pi(r)), 0-based
  int ascents = 0;
  int descents = 0;
  cxd weight;
};

std::vector<PermutationWeight> permutation_weights(int r);

// F(h_1,...,h_r) = sum over permutations of weight * reordered product. Slot
// 1 corresponds to the latest time, so contracting with cbar_{i1..ir}
// reproduces the Magnus terms: r=1 is the identity and r=2 equals
// -(i/2)[h_1,h_2].
Mat f_coefficient(const std::vector<Mat>& ops);

// Magnus terms from C-integrals: Hbar^(r-1) T = sum F(h_{i1}(eta),...) cbar.
// Returns Hbar^(0..R-1), Hermitian.
std::vector<Mat> reconstruct_magnus(const CIntegralTensor& cint,
                                    const CSpaceBasis& basis,
                                    const ParameterRealization& real, int order);

// Brute-force discretized evaluation of the nested-commutator integrals for
// r <= 3, used as an oracle in tests. slices is per segment.
std::vector<Mat> magnus_oracle(const ControlSequence& seq, const NetworkSpec& net,
                               const ParameterRealization& real, int order,
                               int slices_per_segment);

// Polynomial coefficient of prod_{m in G} eta_m in F_{i1..ir}(h(eta)): the sum
// over distinct assignments of the edge multiset to slots of F applied to the
// per-slot parameter blocks. Zero when |G| != r or a block is absent.
Mat graph_derivative_f(const std::vector<int>& tuple,
                       const std::vector<ParamId>& edges,
                       const CSpaceBasis& basis);

}  // namespace heff
