#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace heff {

using cxd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr cxd kImag{0.0, 1.0};

// Angular frequencies are carried internally in rad/us; files and configs use
// kHz. omega = 2*pi*f with f in cycles/us = 1e-3 * f_kHz.
inline double khz_to_rad_per_us(double f_khz) { return kTwoPi * f_khz * 1e-3; }
inline double rad_per_us_to_khz(double omega) { return omega / (kTwoPi * 1e-3); }

// Error taxonomy mapped to CLI exit codes (0 ok, 2 config, 3 infeasible,
// 4 non-converged).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonConvergedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace heff
