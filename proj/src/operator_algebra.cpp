#include "heff/operator_algebra.hpp"

#include <Eigen/Eigenvalues>
#include <stdexcept>
#include <string>

namespace heff {

namespace {

void require_same_dim(const Mat& a, const Mat& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch, " +
                                std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + " vs " +
                                std::to_string(b.rows()) + "x" +
                                std::to_string(b.cols()));
  }
}

}  // namespace

double max_abs(const Mat& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

bool is_hermitian(const Mat& a, double rel_tol) {
  const double scale = max_abs(a);
  if (scale == 0.0) return true;
  return max_abs(Mat(a - a.adjoint())) <= rel_tol * scale;
}

Mat commutator(const Mat& a, const Mat& b) {
  require_same_dim(a, b, "commutator");
  return a * b - b * a;
}

cxd hs_inner(const Mat& a, const Mat& b) {
  require_same_dim(a, b, "hs_inner");
  return a.conjugate().cwiseProduct(b).sum() / static_cast<double>(a.rows());
}

double hs_norm(const Mat& a) {
  return a.norm() / std::sqrt(static_cast<double>(a.rows()));
}

double spectral_norm_hermitian(const Mat& a) {
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (a + a.adjoint()),
                                        Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Mat expm_skew(const Mat& h, double t) {
  if (!is_hermitian(h)) {
    throw std::invalid_argument(
        "expm_skew: input is not Hermitian within tolerance (max |H - H^dag| = " +
        std::to_string(max_abs(Mat(h - h.adjoint()))) + ")");
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h + h.adjoint()));
  const Vec phases =
      (-kImag * t * es.eigenvalues().cast<cxd>()).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Mat logm_unitary(const Mat& u) {
  const Mat defect = u.adjoint() * u - Mat::Identity(u.rows(), u.cols());
  if (max_abs(defect) > kUnitaryTol) {
    throw std::invalid_argument(
        "logm_unitary: input is not unitary within tolerance (max |U^dag U - 1| = " +
        std::to_string(max_abs(defect)) + ")");
  }
  // A unitary matrix is normal, so its Schur form is diagonal up to rounding;
  // the Schur basis stays orthonormal even with clustered eigenphases, which a
  // plain eigenvector solver does not guarantee.
  Eigen::ComplexSchur<Mat> schur(u);
  const Mat& t = schur.matrixT();
  const Mat& q = schur.matrixU();
  Vec phases(t.rows());
  for (Eigen::Index k = 0; k < t.rows(); ++k) {
    const double theta = -std::arg(t(k, k));
    if (kPi - std::abs(theta) < kBranchGuard) {
      throw std::runtime_error(
          "logm_unitary: eigenphase within 1e-6 of +-pi; the branch is "
          "ambiguous. Use a shorter evaluation time so all eigenphases stay "
          "inside (-pi, pi).");
    }
    phases[k] = theta;
  }
  Mat h = q * phases.asDiagonal() * q.adjoint();
  return 0.5 * (h + h.adjoint());
}

}  // namespace heff
