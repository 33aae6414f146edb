#pragma once

#include "heff/types.hpp"

namespace heff {

// Tolerances fixed by the library contract.
inline constexpr double kHermitianTol = 1e-12;   // relative to max |entry|
inline constexpr double kUnitaryTol = 1e-8;      // max |U^dag U - 1|
inline constexpr double kBranchGuard = 1e-6;     // eigenphase distance to +-pi

double max_abs(const Mat& a);
bool is_hermitian(const Mat& a, double rel_tol = kHermitianTol);

// ab - ba. Throws on dimension mismatch.
Mat commutator(const Mat& a, const Mat& b);

// Tr(a^dag b) / 2^n, normalized so Pauli strings are orthonormal.
cxd hs_inner(const Mat& a, const Mat& b);

// Frobenius norm under the same normalization: sqrt(<a,a>).
double hs_norm(const Mat& a);

// Largest |eigenvalue| of a Hermitian matrix.
double spectral_norm_hermitian(const Mat& a);

// exp(-i h t) for Hermitian h, via eigendecomposition of (h + h^dag)/2.
// Throws when h is not Hermitian within tolerance.
Mat expm_skew(const Mat& h, double t);

// Hermitian H with exp(-i H) = u and eigenphases in (-pi, pi). Requires u
// unitary within 1e-8; throws when an eigenphase sits within 1e-6 of +-pi,
// since the branch is then ambiguous (use a shorter evaluation time).
Mat logm_unitary(const Mat& u);

}  // namespace heff
