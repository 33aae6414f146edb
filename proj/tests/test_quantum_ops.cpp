#include "doctest.h"
#include "heff/operator_algebra.hpp"
#include "heff/pauli.hpp"
#include "heff/rng.hpp"
#include "test_helpers.hpp"

#include <string>

using namespace heff;
using heff::testing::random_hermitian;

namespace {

Mat pauli(const std::string& letters, cxd coeff = 1.0) {
  return build_pauli({letters, coeff}, static_cast<int>(letters.size()));
}

}  // namespace

TEST_CASE("build_pauli basics") {
  const Mat x = pauli("X");
  CHECK(x(0, 1) == cxd(1, 0));
  CHECK(x(1, 0) == cxd(1, 0));
  CHECK(x(0, 0) == cxd(0, 0));

  const Mat zz = pauli("ZZ");
  for (int k = 0; k < 4; ++k) {
    const double expected = (k == 0 || k == 3) ? 1.0 : -1.0;
    CHECK(zz(k, k).real() == doctest::Approx(expected));
  }

  const Mat xy = pauli("XY");
  CHECK(std::abs(xy.trace()) < 1e-15);
  CHECK(max_abs(Mat(xy * xy - Mat::Identity(4, 4))) < 1e-15);

  CHECK(is_hermitian(pauli("XYZ", 1.0)));
  CHECK_THROWS_WITH_AS(build_pauli({"XY", 1.0}, 3),
                       doctest::Contains("expected 3 letters, got 2"),
                       std::invalid_argument);
}

TEST_CASE("commutator identities") {
  CHECK(max_abs(Mat(commutator(pauli("X"), pauli("Y")) - 2.0 * kImag * pauli("Z"))) <
        1e-15);
  const Mat a = pauli("XZ");
  CHECK(max_abs(commutator(a, a)) == 0.0);

  // [sum sigma_x, sum_i delta_i sigma_z^i] with delta = (1, 2).
  const Mat sx = pauli("XI") + pauli("IX");
  const Mat dz = pauli("ZI") + 2.0 * pauli("IZ");
  const Mat expected = -2.0 * kImag * (pauli("YI") + 2.0 * pauli("IY"));
  CHECK(max_abs(Mat(commutator(sx, dz) - expected)) < 1e-14);

  CHECK_THROWS_AS(commutator(pauli("X"), pauli("XX")), std::invalid_argument);
}

TEST_CASE("hs_inner normalization") {
  CHECK(hs_inner(pauli("X"), pauli("X")).real() == doctest::Approx(1.0));
  CHECK(std::abs(hs_inner(pauli("X"), pauli("Y"))) < 1e-16);
  CHECK(hs_inner(pauli("ZZI"), pauli("ZZI")).real() == doctest::Approx(1.0));
}

TEST_CASE("expm_skew examples") {
  const Mat u = expm_skew(0.5 * kPi * 0.5 * pauli("X"), 1.0);
  CHECK(std::norm(u(0, 0)) == doctest::Approx(0.5).epsilon(1e-12));

  CHECK(max_abs(Mat(expm_skew(Mat::Zero(4, 4), 2.0) - Mat::Identity(4, 4))) <
        1e-15);

  const Mat z = pauli("Z");
  CHECK(max_abs(Mat(expm_skew(z, 0.7) * expm_skew(z, -0.7) - Mat::Identity(2, 2))) <
        1e-12);

  Philox rng(3, make_stream(StreamPurpose::test, 4));
  const Mat h = random_hermitian(8, rng);
  const Mat u1 = expm_skew(h, 0.3) * expm_skew(h, 0.5);
  CHECK(max_abs(Mat(u1 - expm_skew(h, 0.8))) < 1e-10);

  CHECK_THROWS_AS(expm_skew(pauli("XY", kImag), 1.0), std::invalid_argument);
}

TEST_CASE("logm_unitary examples and round trip") {
  CHECK(max_abs(logm_unitary(Mat::Identity(4, 4))) < 1e-12);

  const Mat u = expm_skew(pauli("Z"), 0.3);
  CHECK(max_abs(Mat(logm_unitary(u) - 0.3 * pauli("Z"))) < 1e-12);

  Philox rng(5, make_stream(StreamPurpose::test, 5));
  for (int trial = 0; trial < 10; ++trial) {
    Mat h = random_hermitian(8, rng);
    h *= (kPi - 1e-3) * 0.9 / spectral_norm_hermitian(h) * rng.uniform();
    CHECK(max_abs(Mat(logm_unitary(expm_skew(h, 1.0)) - h)) < 1e-9);
  }

  // Eigenphase at pi is branch ambiguous.
  CHECK_THROWS_WITH_AS(logm_unitary(expm_skew(pauli("Z"), kPi)),
                       doctest::Contains("shorter evaluation time"),
                       std::runtime_error);
  CHECK_THROWS_AS(logm_unitary(2.0 * Mat::Identity(2, 2)), std::invalid_argument);
}

TEST_CASE("hermitian algebra closure under i[.,.]") {
  Philox rng(9, make_stream(StreamPurpose::test, 6));
  for (int trial = 0; trial < 20; ++trial) {
    const Mat a = random_hermitian(4, rng);
    const Mat b = random_hermitian(4, rng);
    const cxd inner = hs_inner(a, Mat(kImag * commutator(a, b)));
    CHECK(std::abs(inner.imag()) < 1e-12 * (1.0 + std::abs(inner)));
  }
}

TEST_CASE("fast Pauli transform inverts and matches traces") {
  Philox rng(11, make_stream(StreamPurpose::test, 7));
  for (int n = 1; n <= 4; ++n) {
    const int dim = 1 << n;
    Mat a(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) a(i, j) = cxd(rng.normal(), rng.normal());
    const Vec coeffs = pauli_coefficients(a);
    CHECK(max_abs(Mat(from_pauli_coefficients(coeffs, n) - a)) < 1e-12);
    // Spot-check a few codes against the defining trace formula.
    for (std::int64_t code : {std::int64_t(0), std::int64_t(dim - 1),
                              std::int64_t(coeffs.size() - 1)}) {
      const Mat p = build_pauli({pauli_code_to_string(code, n), 1.0}, n);
      CHECK(std::abs(coeffs[code] - hs_inner(p, a)) < 1e-12);
    }
  }
}

TEST_CASE("pauli code string round trip") {
  CHECK(pauli_code_to_string(pauli_string_to_code("XIZY"), 4) == "XIZY");
  CHECK(pauli_string_to_code("II") == 0);
}
