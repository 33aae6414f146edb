#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "heff/types.hpp"

namespace heff {

// Pauli string on an N-qubit register, e.g. {"XIZ", 0.5} for
// 0.5 * sigma_x^1 sigma_z^3. Strings with identical letters denote the same
// basis element; the letters are 'I','X','Y','Z', one per qubit.
struct PauliString {
  std::string letters;
  cxd coeff = 1.0;
};

const Eigen::Matrix2cd& pauli_matrix(char letter);

// coeff * (tensor product of single-qubit Paulis). Throws on a length
// mismatch, naming the expected and actual letter counts.
Mat build_pauli(const PauliString& p, int n_qubits);

// A Pauli-string code packs the letters base-4 (I=0,X=1,Y=2,Z=3), first qubit
// in the most significant digit, matching the tensor order of build_pauli.
std::string pauli_code_to_string(std::int64_t code, int n_qubits);
std::int64_t pauli_string_to_code(const std::string& letters);

// Coefficients c_P = Tr(P A)/2^n for all 4^n Pauli strings, indexed by code.
// Computed by block recursion in O(4^n n) instead of one trace per string.
Vec pauli_coefficients(const Mat& a);

// Inverse of pauli_coefficients: A = sum_P c_P P.
Mat from_pauli_coefficients(const Vec& coeffs, int n_qubits);

// Sparse view of a decomposition: codes with |coeff| > threshold.
struct PauliTerm {
  std::int64_t code;
  cxd coeff;
};
std::vector<PauliTerm> pauli_terms(const Mat& a, double threshold = 1e-12);

}  // namespace heff
