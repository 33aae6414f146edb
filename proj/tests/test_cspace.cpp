#include "doctest.h"
#include "heff/cspace.hpp"
#include "heff/operator_algebra.hpp"
#include "test_helpers.hpp"

using namespace heff;
using heff::testing::flagship_basis;

TEST_CASE("primary generators: collective su(2) closes at three elements") {
  NetworkSpec net = NetworkSpec::all_to_all(3, NetworkSpec::dipolar_tensor(), true);
  const auto gens = primary_generators(net);
  REQUIRE(gens.size() == 3);
  // [SX/2, SY/2] = i SZ/2.
  CHECK(max_abs(Mat(commutator(gens[0], gens[1]) - kImag * gens[2])) < 1e-13);

  NetworkSpec single = NetworkSpec::all_to_all(1, Eigen::Matrix3d::Identity(), false);
  const auto g1 = primary_generators(single);
  REQUIRE(g1.size() == 3);
  CHECK(max_abs(Mat(g1[0] - 0.5 * build_pauli({"X", 1.0}, 1))) < 1e-15);
}

TEST_CASE("flagship component dimensions 3, 3, 5 and composite 11") {
  for (int n = 3; n <= 4; ++n) {
    CAPTURE(n);
    NetworkSpec net = NetworkSpec::all_to_all(n, NetworkSpec::dipolar_tensor(), true);
    const CSpaceBasis basis = flagship_basis(net);
    const auto dims = basis.component_dims();
    REQUIRE(dims.size() == 3);
    CHECK(dims[0] == 3);  // control error
    CHECK(dims[1] == 3);  // detunings
    CHECK(dims[2] == 5);  // dipolar couplings
    CHECK(basis.dim() == 11);
    // For this system the joint closure confirms the direct sum is minimal.
    CHECK(joint_closure_dimension(perturbation_components(net), net,
                                  primary_generators(net)) == 11);
  }
}

TEST_CASE("isotropic Heisenberg coupling is rotation invariant: dimension 1") {
  NetworkSpec net = NetworkSpec::all_to_all(3, Eigen::Matrix3d::Identity(), false);
  const CSpaceBasis basis = flagship_basis(net);
  const auto dims = basis.component_dims();
  REQUIRE(dims.size() == 2);
  CHECK(dims[0] == 3);  // detunings
  CHECK(dims[1] == 1);  // isotropic coupling
}

TEST_CASE("basis gram matrix is the identity") {
  NetworkSpec net = NetworkSpec::all_to_all(3, NetworkSpec::dipolar_tensor(), true);
  const CSpaceBasis basis = flagship_basis(net);
  for (int a = 0; a < basis.dim(); ++a) {
    for (int b = 0; b < basis.dim(); ++b) {
      const double inner = param_inner(basis.elements[a], basis.elements[b]);
      CHECK(std::abs(inner - (a == b ? 1.0 : 0.0)) < 1e-10);
    }
  }
  const RMat gram = basis.coords.transpose() * basis.coords;
  CHECK(max_abs(Mat((gram - RMat::Identity(basis.dim(), basis.dim())).cast<cxd>())) <
        1e-10);
}

TEST_CASE("basis is seed independent up to span") {
  NetworkSpec net = NetworkSpec::all_to_all(3, NetworkSpec::dipolar_tensor(), true);
  const auto comps = perturbation_components(net);
  const auto gens = primary_generators(net);
  const CSpaceBasis a = minimal_composite_cspace(comps, net, gens, 1);
  const CSpaceBasis b = minimal_composite_cspace(comps, net, gens, 2);
  REQUIRE(a.dim() == b.dim());
  for (const auto& el : b.elements) {
    CHECK(project(el, a).residual < 1e-9);
  }
  for (const auto& el : a.elements) {
    CHECK(project(el, b).residual < 1e-9);
  }
}

TEST_CASE("composite space is invariant under the primary adjoint maps") {
  NetworkSpec net = NetworkSpec::all_to_all(3, NetworkSpec::dipolar_tensor(), true);
  const CSpaceBasis basis = flagship_basis(net);
  for (const Mat& g : primary_generators(net)) {
    for (const auto& el : basis.elements) {
      CHECK(project(el.adjoint_map(g), basis).residual < 1e-10);
    }
  }
}

TEST_CASE("projection: basis elements, zero, toggled perturbations") {
  NetworkSpec net = NetworkSpec::all_to_all(3, NetworkSpec::dipolar_tensor(), true);
  const CSpaceBasis basis = flagship_basis(net);

  const ProjectionResult unit = project(basis.elements[2], basis);
  CHECK(unit.residual < 1e-10);
  for (int k = 0; k < basis.dim(); ++k) {
    CHECK(std::abs(unit.coeffs[k] - (k == 2 ? 1.0 : 0.0)) < 1e-10);
  }

  ParametricOperator zero;
  zero.blocks.emplace(ParamId::detuning(1), Mat::Zero(8, 8));
  const ProjectionResult zp = project(zero, basis);
  CHECK(zp.coeffs.norm() == 0.0);
  CHECK(zp.residual == 0.0);

  // Minimality: conjugating the full perturbation by random collective
  // rotations never leaves the span.
  Philox rng(17, make_stream(StreamPurpose::test, 11));
  const auto gens = primary_generators(net);
  ControlSegment seg{2.0, 0.8, 0.4, -0.3};
  ParametricOperator pert;
  for (const auto& comp : basis.components) pert += comp.op_for_segment(net, seg);
  for (int trial = 0; trial < 100; ++trial) {
    Mat g = Mat::Zero(8, 8);
    for (const auto& gen : gens) g += rng.normal() * gen;
    const Mat u = expm_skew(g, 1.0);
    ParametricOperator rotated;
    for (const auto& [id, mat] : pert.blocks) {
      rotated.blocks.emplace(id, u.adjoint() * mat * u);
    }
    CHECK(project(rotated, basis).residual < 1e-10);
  }
}
