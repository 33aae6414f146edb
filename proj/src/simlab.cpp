#include "heff/simlab.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "heff/operator_algebra.hpp"
#include "heff/pauli.hpp"

namespace heff {

void SimulationCampaign::validate() const {
  sequence.validate();
  ensemble.validate();
  if (n_qubits < 1 || n_qubits > 12) {
    throw ConfigError("simulation network size out of range");
  }
  if (k_max < 1) throw ConfigError("k_max must be >= 1");
  if (n_realizations < 1) throw ConfigError("n_realizations must be >= 1");
  if (observable != 'X' && observable != 'Y' && observable != 'Z') {
    throw ConfigError("observable must be X, Y or Z");
  }
  if (threads < 1) throw ConfigError("threads must be >= 1");
}

namespace {

Mat collective_state(char axis, int n) {
  const Eigen::Index dim = Eigen::Index(1) << n;
  Mat rho = Mat::Zero(dim, dim);
  for (int q = 0; q < n; ++q) {
    std::string letters(n, 'I');
    letters[q] = axis;
    rho += build_pauli({letters, 1.0}, n);
  }
  return rho;
}

std::vector<double> run_realization(const SimulationCampaign& campaign,
                                    const NetworkSpec& net, const Mat& rho0,
                                    std::uint64_t index) {
  const ParameterRealization real =
      sample_realization(net, campaign.ensemble, index);
  double eps = 0.0;
  for (int k : net.error_ids) eps = real.value(ParamId::error(k));
  const Mat u = total_propagator(campaign.sequence, net, real, eps);
  const Mat defect = u.adjoint() * u - Mat::Identity(u.rows(), u.cols());
  if (max_abs(defect) > 1e-6) {
    throw std::runtime_error("autocorrelation: propagator drifted from "
                             "unitarity by " + std::to_string(max_abs(defect)) +
                             " in realization " + std::to_string(index));
  }
  const double norm = static_cast<double>(campaign.n_qubits) *
                      std::pow(2.0, campaign.n_qubits);
  std::vector<double> series(campaign.k_max + 1);
  Mat rho = rho0;
  series[0] = rho0.cwiseProduct(rho0.conjugate()).sum().real() / norm;
  for (int k = 1; k <= campaign.k_max; ++k) {
    rho = u * rho * u.adjoint();
    series[k] = rho.cwiseProduct(rho0.conjugate()).sum().real() / norm;
  }
  return series;
}

}  // namespace

AutocorrelationResult autocorrelation(const SimulationCampaign& campaign) {
  campaign.validate();
  const NetworkSpec net = NetworkSpec::all_to_all(
      campaign.n_qubits, NetworkSpec::dipolar_tensor(), true);
  const Mat rho0 = collective_state(campaign.observable, campaign.n_qubits);

  AutocorrelationResult result;
  result.s_realizations.assign(campaign.n_realizations, {});
  const int workers = std::min(campaign.threads, campaign.n_realizations);
  if (workers <= 1) {
    for (int z = 0; z < campaign.n_realizations; ++z) {
      result.s_realizations[z] = run_realization(campaign, net, rho0, z);
    }
  } else {
    std::vector<std::thread> pool;
    std::vector<std::string> errors(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w]() {
        try {
          for (int z = w; z < campaign.n_realizations; z += workers) {
            result.s_realizations[z] = run_realization(campaign, net, rho0, z);
          }
        } catch (const std::exception& e) {
          errors[w] = e.what();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& err : errors) {
      if (!err.empty()) throw std::runtime_error(err);
    }
  }

  const double t_seq_ms = campaign.sequence.total_duration_us() * 1e-3;
  result.t_ms.resize(campaign.k_max + 1);
  result.s_mean.assign(campaign.k_max + 1, 0.0);
  result.s_stderr.assign(campaign.k_max + 1, 0.0);
  for (int k = 0; k <= campaign.k_max; ++k) {
    result.t_ms[k] = k * t_seq_ms;
    double mean = 0.0;
    for (const auto& series : result.s_realizations) mean += series[k];
    mean /= campaign.n_realizations;
    double var = 0.0;
    for (const auto& series : result.s_realizations) {
      var += (series[k] - mean) * (series[k] - mean);
    }
    result.s_mean[k] = mean;
    result.s_stderr[k] =
        campaign.n_realizations > 1
            ? std::sqrt(var / (campaign.n_realizations - 1.0) /
                        campaign.n_realizations)
            : 0.0;
  }
  return result;
}

ThreeBodyConsistency three_body_consistency(const SimulationCampaign& campaign) {
  ThreeBodyConsistency result;
  for (char axis : {'X', 'Y', 'Z'}) {
    SimulationCampaign c = campaign;
    c.observable = axis;  // matched seeds: same ensemble stream per realization
    result.curves.push_back(autocorrelation(c));
  }
  for (std::size_t a = 0; a < result.curves.size(); ++a) {
    for (std::size_t b = a + 1; b < result.curves.size(); ++b) {
      for (std::size_t k = 0; k < result.curves[a].s_mean.size(); ++k) {
        result.max_deviation =
            std::max(result.max_deviation,
                     std::abs(result.curves[a].s_mean[k] - result.curves[b].s_mean[k]));
      }
    }
  }
  return result;
}

GaussianFit fit_gaussian_decay(const std::vector<double>& t_ms,
                               const std::vector<double>& s, double window_ms) {
  if (t_ms.size() != s.size()) {
    throw std::invalid_argument("fit_gaussian_decay: series length mismatch");
  }
  // log S = -(sigma^2/2) t^2 through the origin (S(0) = 1 by normalization).
  double num = 0.0, den = 0.0;
  int used = 0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (t_ms[k] <= 0.0 || t_ms[k] > window_ms || s[k] <= 0.1) continue;
    const double x = t_ms[k] * t_ms[k];
    num += x * std::log(s[k]);
    den += x * x;
    ++used;
  }
  if (used < 5) {
    throw std::runtime_error("fit_gaussian_decay: fewer than 5 usable points "
                             "inside the window");
  }
  GaussianFit fit;
  const double slope = num / den;
  fit.sigma = std::sqrt(std::max(0.0, -2.0 * slope));
  fit.points_used = used;
  double rss = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (t_ms[k] <= 0.0 || t_ms[k] > window_ms || s[k] <= 0.1) continue;
    const double err = std::log(s[k]) - slope * t_ms[k] * t_ms[k];
    rss += err * err;
  }
  fit.residual = std::sqrt(rss);
  return fit;
}

double time_to_threshold(const std::vector<double>& t_ms,
                         const std::vector<double>& s, double threshold) {
  for (std::size_t k = 1; k < s.size(); ++k) {
    if (s[k] <= threshold && s[k - 1] > threshold) {
      const double frac = (s[k - 1] - threshold) / (s[k - 1] - s[k]);
      return t_ms[k - 1] + frac * (t_ms[k] - t_ms[k - 1]);
    }
  }
  return -1.0;
}

RegimeSweep regime_sweep(
    const SimulationCampaign& base,
    const std::vector<std::pair<std::string, ControlSequence>>& sequences,
    const std::vector<double>& sigma_dip_grid_khz,
    const std::vector<double>& horizons_ms) {
  RegimeSweep sweep;
  sweep.horizons_ms = horizons_ms;
  for (const auto& [name, seq] : sequences) {
    for (double sigma_dip_khz : sigma_dip_grid_khz) {
      SweepCell cell;
      cell.sequence_name = name;
      cell.sigma_dip_khz = sigma_dip_khz;
      try {
        SimulationCampaign campaign = base;
        campaign.sequence = seq;
        campaign.ensemble.sigma_dip = khz_to_rad_per_us(sigma_dip_khz);
        const AutocorrelationResult run = autocorrelation(campaign);
        cell.time_to_1e_ms =
            time_to_threshold(run.t_ms, run.s_mean, std::exp(-1.0));
        for (double horizon : horizons_ms) {
          double value = run.s_mean.back();
          for (std::size_t k = 0; k < run.t_ms.size(); ++k) {
            if (run.t_ms[k] >= horizon) {
              value = run.s_mean[k];
              break;
            }
          }
          cell.s_at_horizons.push_back(value);
        }
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
      sweep.cells.push_back(std::move(cell));
    }
  }
  return sweep;
}

std::string autocorrelation_csv(const AutocorrelationResult& result) {
  std::string csv = "t_ms,S_mean,S_stderr\n";
  char buf[120];
  for (std::size_t k = 0; k < result.t_ms.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", result.t_ms[k],
                  result.s_mean[k], result.s_stderr[k]);
    csv += buf;
  }
  return csv;
}

std::string regime_sweep_csv(const RegimeSweep& sweep) {
  std::string csv = "sequence,sigma_dip_khz,time_to_1e_ms";
  for (double horizon : sweep.horizons_ms) {
    char head[48];
    std::snprintf(head, sizeof head, ",S_at_%g_ms", horizon);
    csv += head;
  }
  csv += ",error\n";
  char buf[120];
  for (const auto& cell : sweep.cells) {
    csv += cell.sequence_name;
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g", cell.sigma_dip_khz,
                  cell.time_to_1e_ms);
    csv += buf;
    for (double s : cell.s_at_horizons) {
      std::snprintf(buf, sizeof buf, ",%.17g", s);
      csv += buf;
    }
    if (cell.s_at_horizons.empty()) {
      for (std::size_t k = 0; k < sweep.horizons_ms.size(); ++k) csv += ",";
    }
    csv += "," + cell.error + "\n";
  }
  return csv;
}

}  // namespace heff
