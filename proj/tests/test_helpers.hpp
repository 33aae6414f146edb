#pragma once

#include <vector>

#include "heff/cspace.hpp"
#include "heff/model.hpp"
#include "heff/operator_algebra.hpp"
#include "heff/rng.hpp"

namespace heff::testing {

inline Mat random_hermitian(int dim, Philox& rng) {
  Mat a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = cxd(rng.normal(), rng.normal());
  return 0.5 * (a + a.adjoint());
}

inline ControlSequence random_sequence(int q, Philox& rng,
                                       bool endpoint_rule = true) {
  ControlSequence seq;
  seq.endpoint_rule = endpoint_rule;
  seq.segments.assign(q, ControlSegment{2.0, 0.0, 0.0, 0.0});
  const int first = endpoint_rule ? 1 : 0;
  const int last = endpoint_rule ? q - 1 : q;
  for (int k = first; k < last; ++k) {
    auto& seg = seq.segments[k];
    seg.omega1 = seq.omega_max * rng.uniform();
    seg.phi = kTwoPi * rng.uniform() - kPi;
    seg.delta_omega = seq.omega_max * (2.0 * rng.uniform() - 1.0);
  }
  return seq;
}

inline ParameterRealization random_realization(const NetworkSpec& net,
                                               double scale, Philox& rng) {
  ParameterRealization real;
  for (const auto& id : net.param_ids()) real.values[id] = scale * rng.normal();
  return real;
}

inline CSpaceBasis flagship_basis(const NetworkSpec& net) {
  return minimal_composite_cspace(perturbation_components(net), net,
                                  primary_generators(net));
}

}  // namespace heff::testing
