#include "heff/pauli.hpp"

#include <stdexcept>

namespace heff {

namespace {

int qubit_count_for_dim(Eigen::Index dim, const char* what) {
  int n = 0;
  Eigen::Index d = dim;
  while (d > 1 && d % 2 == 0) {
    d /= 2;
    ++n;
  }
  if (d != 1 || dim < 1) {
    throw std::invalid_argument(std::string(what) + ": dimension " +
                                std::to_string(dim) + " is not a power of two");
  }
  return n;
}

void pauli_coefficients_rec(const Mat& a, int n, cxd scale, std::int64_t base,
                            Vec& out) {
  if (n == 0) {
    out[base] += scale * a(0, 0);
    return;
  }
  const Eigen::Index h = a.rows() / 2;
  const Mat a00 = a.topLeftCorner(h, h);
  const Mat a01 = a.topRightCorner(h, h);
  const Mat a10 = a.bottomLeftCorner(h, h);
  const Mat a11 = a.bottomRightCorner(h, h);
  const std::int64_t step = std::int64_t(1) << (2 * (n - 1));
  const cxd half = scale * 0.5;
  pauli_coefficients_rec(a00 + a11, n - 1, half, base + 0 * step, out);
  pauli_coefficients_rec(a01 + a10, n - 1, half, base + 1 * step, out);
  pauli_coefficients_rec(kImag * (a01 - a10), n - 1, half, base + 2 * step, out);
  pauli_coefficients_rec(a00 - a11, n - 1, half, base + 3 * step, out);
}

void from_pauli_rec(const Vec& coeffs, int n, std::int64_t base, Mat& out) {
  if (n == 0) {
    out(0, 0) += coeffs[base];
    return;
  }
  const Eigen::Index h = out.rows() / 2;
  const std::int64_t step = std::int64_t(1) << (2 * (n - 1));
  Mat b = Mat::Zero(h, h), c = Mat::Zero(h, h), d = Mat::Zero(h, h),
      e = Mat::Zero(h, h);
  from_pauli_rec(coeffs, n - 1, base + 0 * step, b);
  from_pauli_rec(coeffs, n - 1, base + 1 * step, c);
  from_pauli_rec(coeffs, n - 1, base + 2 * step, d);
  from_pauli_rec(coeffs, n - 1, base + 3 * step, e);
  out.topLeftCorner(h, h) += b + e;
  out.topRightCorner(h, h) += c - kImag * d;
  out.bottomLeftCorner(h, h) += c + kImag * d;
  out.bottomRightCorner(h, h) += b - e;
}

}  // namespace

const Eigen::Matrix2cd& pauli_matrix(char letter) {
  static const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  static const Eigen::Matrix2cd sx = (Eigen::Matrix2cd() << 0, 1, 1, 0).finished();
  static const Eigen::Matrix2cd sy =
      (Eigen::Matrix2cd() << 0, -kImag, kImag, 0).finished();
  static const Eigen::Matrix2cd sz = (Eigen::Matrix2cd() << 1, 0, 0, -1).finished();
  switch (letter) {
    case 'I': return id;
    case 'X': return sx;
    case 'Y': return sy;
    case 'Z': return sz;
  }
  throw std::invalid_argument(std::string("unknown Pauli letter '") + letter +
                              "' (expected I, X, Y or Z)");
}

Mat build_pauli(const PauliString& p, int n_qubits) {
  if (n_qubits < 1) {
    throw std::invalid_argument("build_pauli: qubit count must be >= 1, got " +
                                std::to_string(n_qubits));
  }
  if (static_cast<int>(p.letters.size()) != n_qubits) {
    throw std::invalid_argument(
        "build_pauli: letter count mismatch, expected " +
        std::to_string(n_qubits) + " letters, got " +
        std::to_string(p.letters.size()) + " in \"" + p.letters + "\"");
  }
  // First letter outermost: "XY" = sigma_x (x) sigma_y.
  Mat result = Mat::Constant(1, 1, p.coeff);
  for (char letter : p.letters) {
    const Eigen::Matrix2cd& s = pauli_matrix(letter);
    Mat next(result.rows() * 2, result.cols() * 2);
    for (Eigen::Index i = 0; i < result.rows(); ++i)
      for (Eigen::Index j = 0; j < result.cols(); ++j)
        next.block(i * 2, j * 2, 2, 2) = result(i, j) * s;
    result.swap(next);
  }
  return result;
}

std::string pauli_code_to_string(std::int64_t code, int n_qubits) {
  static const char letters[] = "IXYZ";
  std::string s(n_qubits, 'I');
  for (int q = n_qubits - 1; q >= 0; --q) {
    s[q] = letters[code & 3];
    code >>= 2;
  }
  return s;
}

std::int64_t pauli_string_to_code(const std::string& letters) {
  std::int64_t code = 0;
  for (char letter : letters) {
    int digit;
    switch (letter) {
      case 'I': digit = 0; break;
      case 'X': digit = 1; break;
      case 'Y': digit = 2; break;
      case 'Z': digit = 3; break;
      default:
        throw std::invalid_argument(std::string("unknown Pauli letter '") +
                                    letter + "' in \"" + letters + "\"");
    }
    code = code * 4 + digit;
  }
  return code;
}

Vec pauli_coefficients(const Mat& a) {
  const int n = qubit_count_for_dim(a.rows(), "pauli_coefficients");
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("pauli_coefficients: matrix must be square");
  }
  Vec out = Vec::Zero(std::int64_t(1) << (2 * n));
  pauli_coefficients_rec(a, n, 1.0, 0, out);
  return out;
}

Mat from_pauli_coefficients(const Vec& coeffs, int n_qubits) {
  const std::int64_t expected = std::int64_t(1) << (2 * n_qubits);
  if (coeffs.size() != expected) {
    throw std::invalid_argument("from_pauli_coefficients: expected " +
                                std::to_string(expected) + " coefficients, got " +
                                std::to_string(coeffs.size()));
  }
  Mat out = Mat::Zero(std::int64_t(1) << n_qubits, std::int64_t(1) << n_qubits);
  from_pauli_rec(coeffs, n_qubits, 0, out);
  return out;
}

std::vector<PauliTerm> pauli_terms(const Mat& a, double threshold) {
  const Vec coeffs = pauli_coefficients(a);
  std::vector<PauliTerm> terms;
  for (std::int64_t code = 0; code < coeffs.size(); ++code) {
    if (std::abs(coeffs[code]) > threshold) terms.push_back({code, coeffs[code]});
  }
  return terms;
}

}  // namespace heff
