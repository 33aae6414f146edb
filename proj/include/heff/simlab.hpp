#pragma once

#include <optional>
#include <string>
#include <vector>

#include "heff/model.hpp"

namespace heff {

// Stroboscopic ensemble simulation of one sequence.
struct SimulationCampaign {
  ControlSequence sequence;
  int n_qubits = 6;
  EnsembleSpec ensemble;
  int k_max = 100;          // sequence repetitions
  int n_realizations = 100;
  char observable = 'X';    // collective initial state axis
  int threads = 1;

  void validate() const;
};

// S(k T_seq) = Tr(U^k rho0 U^dag k rho0) / (N 2^N) with rho0 = sum sigma_a^i;
// S(0) = 1 by normalization.
struct AutocorrelationResult {
  std::vector<double> t_ms;                      // k * T_seq, k = 0..k_max
  std::vector<double> s_mean;
  std::vector<double> s_stderr;
  std::vector<std::vector<double>> s_realizations;  // per realization series
};

AutocorrelationResult autocorrelation(const SimulationCampaign& campaign);

// Runs the x/y/z collective initial states on matched realizations and
// returns the largest pairwise curve deviation.
struct ThreeBodyConsistency {
  double max_deviation = 0.0;
  std::vector<AutocorrelationResult> curves;  // x, y, z
};

ThreeBodyConsistency three_body_consistency(const SimulationCampaign& campaign);

// Least-squares fit of log S against t^2 through the origin over the window,
// restricted to points with S > 0.1: S ~ exp(-t^2 sigma^2 / 2). Returns
// sigma >= 0 in 1/ms and the fit residual.
struct GaussianFit {
  double sigma = 0.0;
  double residual = 0.0;
  int points_used = 0;
};

GaussianFit fit_gaussian_decay(const std::vector<double>& t_ms,
                               const std::vector<double>& s, double window_ms);

// Decay metrics for a (sequence, regime) grid.
struct SweepCell {
  std::string sequence_name;
  double sigma_dip_khz = 0.0;
  double time_to_1e_ms = -1.0;  // -1: never crossed within the horizon
  std::vector<double> s_at_horizons;
  std::string error;  // empty on success
};

struct RegimeSweep {
  std::vector<double> horizons_ms;
  std::vector<SweepCell> cells;
};

RegimeSweep regime_sweep(const SimulationCampaign& base,
                         const std::vector<std::pair<std::string, ControlSequence>>& sequences,
                         const std::vector<double>& sigma_dip_grid_khz,
                         const std::vector<double>& horizons_ms);

// First crossing below the threshold, linearly interpolated; -1 if none.
double time_to_threshold(const std::vector<double>& t_ms,
                         const std::vector<double>& s, double threshold);

std::string autocorrelation_csv(const AutocorrelationResult& result);
std::string regime_sweep_csv(const RegimeSweep& sweep);

}  // namespace heff
