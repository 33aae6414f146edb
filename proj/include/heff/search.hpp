#pragma once

#include <map>
#include <string>
#include <vector>

#include "heff/cmaes.hpp"
#include "heff/objectives.hpp"

namespace heff {

struct SearchConfig {
  int q_min = 8;
  int q_max = 24;
  int q_step = 2;
  int population = 0;  // 0: CMA-ES default for the dimension
  long long max_evals = 100000;
  int restarts = 1;           // extra attempts per segment count
  double sigma0 = 1.0;        // in normalized gene coordinates
  std::uint64_t seed = 0;
  double total_threshold = 0.0;            // stop when total <= this (0: off)
  std::map<int, double> term_thresholds;   // stop when all present terms pass
  int stagnation_generations = 80;
  int nodes_per_segment = 16;
  int threads = 1;
  double dt_us = 2.0;                          // segment duration
  double omega_max = khz_to_rad_per_us(250.0);

  void validate() const;
};

// Decoding of the unconstrained CMA-ES genome into a sequence: 3 genes per
// interior segment, omega1 = omega_max * sigmoid(a), phi = b (free), and
// delta_omega = omega_max * (2 sigmoid(c) - 1). The first and last segments
// are pinned to zero amplitude and detuning, so box constraints and the
// endpoint rule hold by construction.
ControlSequence decode_genes(const RVec& genes, int q_segments, double dt_us,
                             double omega_max);
int gene_count(int q_segments);

struct OptimizeResult {
  ControlSequence best;
  CostBreakdown best_cost;
  bool converged = false;
  long long evaluations = 0;
  std::vector<std::string> trace_lines;  // one JSON object per generation
};

// Progressive segment-count CMA-ES search over the design objectives. The
// result is deterministic for a given config (thread count included).
OptimizeResult optimize(const DesignSpec& spec, const SearchConfig& cfg,
                        const NetworkSpec& net, const CSpaceBasis& basis);

// Appends the time-reversed schedule: segments in reverse order with phases
// shifted by pi and detunings negated, so the primary propagator retraces its
// path and the static toggling coefficients become symmetric about the
// midpoint. Requires the base cycle to return to the identity (checked on the
// single-qubit rotation, which is what collective control acts with).
ControlSequence symmetrize(const ControlSequence& seq);

// Rank of the space spanned by vectorized order-r C-integrals of random
// bounded sequences, plus an orthonormal basis of that span.
struct SpanProbeResult {
  int rank = 0;
  RMat span;  // dim^r x rank, orthonormal columns
  int samples = 0;
};

SpanProbeResult span_probe(const NetworkSpec& net, const CSpaceBasis& basis, int r,
                           int n_sequences, int q_segments, std::uint64_t seed,
                           int nodes_per_segment = 16);

// Distance from the affine solution set {c + N y} to the probed span; a value
// above the tolerance means the required C-integral direction was never
// reached by random sequences ("probably unachievable").
double span_probe_gap(const SpanProbeResult& probe, const RVec& solution,
                      const RMat& nullspace);

}  // namespace heff
