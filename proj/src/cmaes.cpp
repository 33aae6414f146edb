#include "heff/cmaes.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace heff {

CmaEs::CmaEs(const RVec& x0, const Options& opts)
    : n_(static_cast<int>(x0.size())),
      mean_(x0),
      sigma_(opts.sigma0),
      sigma0_(opts.sigma0),
      rng_(opts.seed, make_stream(StreamPurpose::search, opts.stream_index)) {
  if (n_ < 1) throw std::invalid_argument("CmaEs: empty parameter vector");
  if (opts.sigma0 <= 0) throw std::invalid_argument("CmaEs: sigma0 must be > 0");
  lambda_ = opts.lambda > 0 ? opts.lambda
                            : 4 + static_cast<int>(3.0 * std::log(double(n_)));
  if (lambda_ < 4) lambda_ = 4;
  mu_ = lambda_ / 2;
  weights_.resize(mu_);
  for (int i = 0; i < mu_; ++i) {
    weights_[i] = std::log(mu_ + 0.5) - std::log(double(i + 1));
  }
  weights_ /= weights_.sum();
  mu_eff_ = 1.0 / weights_.squaredNorm();

  c_sigma_ = (mu_eff_ + 2.0) / (n_ + mu_eff_ + 5.0);
  d_sigma_ = 1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff_ - 1.0) / (n_ + 1.0)) - 1.0) +
             c_sigma_;
  c_c_ = (4.0 + mu_eff_ / n_) / (n_ + 4.0 + 2.0 * mu_eff_ / n_);
  c_1_ = 2.0 / ((n_ + 1.3) * (n_ + 1.3) + mu_eff_);
  c_mu_ = std::min(1.0 - c_1_, 2.0 * (mu_eff_ - 2.0 + 1.0 / mu_eff_) /
                                   ((n_ + 2.0) * (n_ + 2.0) + mu_eff_));
  chi_n_ = std::sqrt(double(n_)) *
           (1.0 - 1.0 / (4.0 * n_) + 1.0 / (21.0 * double(n_) * n_));

  cov_ = RMat::Identity(n_, n_);
  path_sigma_ = RVec::Zero(n_);
  path_c_ = RVec::Zero(n_);
  update_eigen();
}

void CmaEs::update_eigen() {
  cov_ = 0.5 * (cov_ + cov_.transpose());
  Eigen::SelfAdjointEigenSolver<RMat> es(cov_);
  eig_basis_ = es.eigenvectors();
  eig_scale_ = es.eigenvalues().cwiseMax(1e-30).cwiseSqrt();
}

const std::vector<RVec>& CmaEs::ask() {
  population_.assign(lambda_, RVec(n_));
  pop_y_.assign(lambda_, RVec(n_));
  pop_z_.assign(lambda_, RVec(n_));
  for (int k = 0; k < lambda_; ++k) {
    RVec z(n_);
    for (int i = 0; i < n_; ++i) z[i] = rng_.normal();
    pop_z_[k] = z;
    pop_y_[k] = eig_basis_ * (eig_scale_.asDiagonal() * z);
    population_[k] = mean_ + sigma_ * pop_y_[k];
  }
  return population_;
}

void CmaEs::tell(const std::vector<double>& fitness) {
  if (static_cast<int>(fitness.size()) != lambda_ || population_.empty()) {
    throw std::invalid_argument("CmaEs::tell: need one fitness per asked point");
  }
  std::vector<int> order(lambda_);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return fitness[a] < fitness[b]; });

  RVec y_w = RVec::Zero(n_);
  RVec z_w = RVec::Zero(n_);
  for (int i = 0; i < mu_; ++i) {
    y_w += weights_[i] * pop_y_[order[i]];
    z_w += weights_[i] * pop_z_[order[i]];
  }
  mean_ += sigma_ * y_w;

  path_sigma_ = (1.0 - c_sigma_) * path_sigma_ +
                std::sqrt(c_sigma_ * (2.0 - c_sigma_) * mu_eff_) * (eig_basis_ * z_w);
  const double ps_norm = path_sigma_.norm();
  const double decay = 1.0 - std::pow(1.0 - c_sigma_, 2.0 * (generation_ + 1));
  const bool h_sigma =
      ps_norm / std::sqrt(decay) < (1.4 + 2.0 / (n_ + 1.0)) * chi_n_;

  path_c_ = (1.0 - c_c_) * path_c_ +
            (h_sigma ? std::sqrt(c_c_ * (2.0 - c_c_) * mu_eff_) : 0.0) * y_w;

  RMat rank_mu = RMat::Zero(n_, n_);
  for (int i = 0; i < mu_; ++i) {
    rank_mu += weights_[i] * (pop_y_[order[i]] * pop_y_[order[i]].transpose());
  }
  const double delta_h = (1.0 - (h_sigma ? 1.0 : 0.0)) * c_c_ * (2.0 - c_c_);
  cov_ = (1.0 - c_1_ - c_mu_) * cov_ +
         c_1_ * (path_c_ * path_c_.transpose() + delta_h * cov_) + c_mu_ * rank_mu;

  sigma_ *= std::exp((c_sigma_ / d_sigma_) * (ps_norm / chi_n_ - 1.0));
  ++generation_;
  update_eigen();
  population_.clear();
}

bool CmaEs::degenerate() const {
  if (!std::isfinite(sigma_) || sigma_ <= 1e-14 * sigma0_ || sigma_ > 1e8 * sigma0_) {
    return true;
  }
  const double dmax = eig_scale_.maxCoeff();
  const double dmin = eig_scale_.minCoeff();
  return !(dmin > 0) || dmax / dmin > 1e8;
}

}  // namespace heff
