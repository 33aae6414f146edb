#pragma once

#include <cstdint>
#include <vector>

#include "heff/rng.hpp"
#include "heff/types.hpp"

namespace heff {

// (mu/mu_w, lambda) covariance matrix adaptation evolution strategy with the
// standard parameter settings. Minimizes. Ask/tell interface so the caller
// owns evaluation order, parallelism and stopping; sampling is driven by a
// counter-based stream, so runs are reproducible bit for bit.
class CmaEs {
 public:
  struct Options {
    int lambda = 0;  // 0: 4 + floor(3 ln n)
    double sigma0 = 0.5;
    std::uint64_t seed = 0;
    std::uint64_t stream_index = 0;
  };

  CmaEs(const RVec& x0, const Options& opts);

  const std::vector<RVec>& ask();
  void tell(const std::vector<double>& fitness);

  int lambda() const { return lambda_; }
  int generation() const { return generation_; }
  double sigma() const { return sigma_; }
  const RVec& mean() const { return mean_; }
  // True when the sampler can no longer make progress (collapsed or blown-up
  // step size, ill-conditioned covariance); restart with a fresh instance.
  bool degenerate() const;

 private:
  void update_eigen();

  int n_;
  int lambda_;
  int mu_;
  RVec weights_;
  double mu_eff_;
  double c_sigma_, d_sigma_, c_c_, c_1_, c_mu_, chi_n_;

  RVec mean_;
  double sigma_;
  double sigma0_;
  RMat cov_;
  RVec path_sigma_, path_c_;
  RMat eig_basis_;  // B
  RVec eig_scale_;  // D (sqrt of eigenvalues)
  int generation_ = 0;
  Philox rng_;

  std::vector<RVec> population_;
  std::vector<RVec> pop_y_;  // x = m + sigma * y
  std::vector<RVec> pop_z_;  // y = B D z
};

}  // namespace heff
