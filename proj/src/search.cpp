#include "heff/search.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "heff/operator_algebra.hpp"

namespace heff {

namespace {

double sigmoid(double x) {
  x = std::clamp(x, -40.0, 40.0);
  return 1.0 / (1.0 + std::exp(-x));
}

}  // namespace

void SearchConfig::validate() const {
  if (q_min < 3) throw ConfigError("q_min must be >= 3 (endpoint rule uses two segments)");
  if (q_max < q_min) throw ConfigError("q_max must be >= q_min");
  if (q_step < 1) throw ConfigError("q_step must be >= 1");
  if (population != 0 && population < 4) throw ConfigError("population must be >= 4");
  if (max_evals < 1) throw ConfigError("max_evals must be >= 1");
  if (sigma0 <= 0) throw ConfigError("sigma0 must be > 0");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (dt_us <= 0) throw ConfigError("dt_us must be > 0");
}

int gene_count(int q_segments) { return 3 * (q_segments - 2); }

ControlSequence decode_genes(const RVec& genes, int q_segments, double dt_us,
                             double omega_max) {
  if (genes.size() != gene_count(q_segments)) {
    throw std::invalid_argument("decode_genes: expected " +
                                std::to_string(gene_count(q_segments)) +
                                " genes, got " + std::to_string(genes.size()));
  }
  ControlSequence seq;
  seq.dt_default_us = dt_us;
  seq.omega_max = omega_max;
  seq.endpoint_rule = true;
  seq.segments.assign(q_segments, ControlSegment{dt_us, 0.0, 0.0, 0.0});
  for (int s = 0; s + 2 < q_segments; ++s) {
    ControlSegment& seg = seq.segments[s + 1];
    seg.omega1 = omega_max * sigmoid(genes[3 * s]);
    seg.phi = std::remainder(genes[3 * s + 1], kTwoPi);
    seg.delta_omega = omega_max * (2.0 * sigmoid(genes[3 * s + 2]) - 1.0);
  }
  return seq;
}

namespace {

struct Objective {
  const DesignSpec* spec;
  const TogglingEngine* engine;
  int n_qubits;
  int q_segments;
  const SearchConfig* cfg;

  CostBreakdown operator()(const RVec& genes) const {
    const ControlSequence seq =
        decode_genes(genes, q_segments, cfg->dt_us, cfg->omega_max);
    return cost_total(seq, *engine, n_qubits, *spec, cfg->nodes_per_segment);
  }
};

bool thresholds_met(const CostBreakdown& cost, const SearchConfig& cfg) {
  if (cfg.total_threshold > 0 && cost.total <= cfg.total_threshold) return true;
  if (cfg.term_thresholds.empty()) return false;
  for (const auto& [key, limit] : cfg.term_thresholds) {
    const double value =
        key == 0 ? cost.f_primary
                 : (cost.f_order.count(key) ? cost.f_order.at(key)
                                            : std::numeric_limits<double>::infinity());
    if (value > limit) return false;
  }
  return true;
}

void evaluate_population(const Objective& objective,
                         const std::vector<RVec>& population, int threads,
                         std::vector<CostBreakdown>& out) {
  const int count = static_cast<int>(population.size());
  out.assign(count, CostBreakdown{});
  if (threads <= 1 || count < 2) {
    for (int k = 0; k < count; ++k) out[k] = objective(population[k]);
    return;
  }
  const int workers = std::min(threads, count);
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (int k = w; k < count; k += workers) out[k] = objective(population[k]);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

OptimizeResult optimize(const DesignSpec& spec, const SearchConfig& cfg,
                        const NetworkSpec& net, const CSpaceBasis& basis) {
  cfg.validate();
  spec.validate();
  const TogglingEngine engine = make_toggling_engine(basis, net);

  OptimizeResult result;
  double best_total = std::numeric_limits<double>::infinity();
  RVec best_genes;
  int best_q = 0;

  long long evals = 0;
  std::uint64_t run_index = 0;
  for (int q = cfg.q_min; q <= cfg.q_max && evals < cfg.max_evals;
       q += cfg.q_step) {
    const int dim = gene_count(q);
    Objective objective{&spec, &engine, net.n, q, &cfg};
    for (int attempt = 0; attempt <= cfg.restarts && evals < cfg.max_evals;
         ++attempt) {
      RVec x0 = RVec::Zero(dim);
      if (attempt == 0 && best_q > 0 && best_q < q) {
        // Warm start: keep the previous interior genes and append idle
        // segments (large negative amplitude gene ~ zero drive).
        for (int s = 0; s + 2 < best_q; ++s) {
          for (int c = 0; c < 3; ++c) x0[3 * s + c] = best_genes[3 * s + c];
        }
        for (int s = best_q - 2; s + 2 < q + 0; ++s) x0[3 * s] = -8.0;
      }
      CmaEs::Options opts;
      opts.lambda = cfg.population;
      opts.sigma0 = cfg.sigma0;
      opts.seed = cfg.seed;
      opts.stream_index = run_index++;
      CmaEs cma(x0, opts);

      double stage_best = std::numeric_limits<double>::infinity();
      int stale_generations = 0;
      std::vector<CostBreakdown> costs;
      std::vector<double> fitness(cma.lambda());
      while (evals < cfg.max_evals && !cma.degenerate() &&
             stale_generations < cfg.stagnation_generations) {
        const auto& population = cma.ask();
        evaluate_population(objective, population, cfg.threads, costs);
        int gen_best = 0;
        for (int k = 0; k < cma.lambda(); ++k) {
          fitness[k] = costs[k].total;
          if (fitness[k] < fitness[gen_best]) gen_best = k;
        }
        evals += cma.lambda();
        if (fitness[gen_best] < best_total) {
          best_total = fitness[gen_best];
          best_genes = population[gen_best];
          best_q = q;
          result.best_cost = costs[gen_best];
        }
        if (fitness[gen_best] < stage_best * (1.0 - 1e-12) - 1e-300) {
          stage_best = fitness[gen_best];
          stale_generations = 0;
        } else {
          ++stale_generations;
        }
        result.trace_lines.push_back(costs[gen_best].json_line(evals, q));
        if (thresholds_met(costs[gen_best], cfg)) {
          result.best = decode_genes(population[gen_best], q, cfg.dt_us,
                                     cfg.omega_max);
          result.best_cost = costs[gen_best];
          result.converged = true;
          result.evaluations = evals;
          return result;
        }
        cma.tell(fitness);
      }
    }
  }
  if (best_q == 0) throw NonConvergedError("optimize: no evaluation budget");
  result.best = decode_genes(best_genes, best_q, cfg.dt_us, cfg.omega_max);
  result.converged = false;
  result.evaluations = evals;
  return result;
}

ControlSequence symmetrize(const ControlSequence& seq) {
  seq.validate();
  // Collective control acts as u^(x)n; the identity-cycle condition is a
  // single-qubit statement.
  const Mat u = primary_propagator(seq, 1);
  const double fidelity = std::abs(u.trace()) / 2.0;
  if (fidelity < 1.0 - 1e-6) {
    throw InfeasibleError(
        "symmetrize: the base cycle does not return to the identity "
        "(|Tr U_pri|/2 = " + std::to_string(fidelity) +
        "); symmetrization assumes an identity cycle, append a closing "
        "rotation first");
  }
  ControlSequence doubled = seq;
  for (auto it = seq.segments.rbegin(); it != seq.segments.rend(); ++it) {
    ControlSegment seg = *it;
    seg.phi = std::remainder(seg.phi + kPi, kTwoPi);
    seg.delta_omega = -seg.delta_omega;
    doubled.segments.push_back(seg);
  }
  return doubled;
}

SpanProbeResult span_probe(const NetworkSpec& net, const CSpaceBasis& basis, int r,
                           int n_sequences, int q_segments, std::uint64_t seed,
                           int nodes_per_segment) {
  const TogglingEngine engine = make_toggling_engine(basis, net);
  const TupleIndexer idx{basis.dim(), r};
  if (n_sequences < idx.size()) {
    throw std::invalid_argument(
        "span_probe: need at least as many sequences as the probed dimension (" +
        std::to_string(idx.size()) + ")");
  }
  RMat rows(n_sequences, idx.size());
  for (int s = 0; s < n_sequences; ++s) {
    Philox rng(seed, make_stream(StreamPurpose::probe, s));
    ControlSequence seq;
    seq.endpoint_rule = true;
    seq.segments.assign(q_segments, ControlSegment{2.0, 0.0, 0.0, 0.0});
    for (int k = 1; k + 1 < q_segments; ++k) {
      auto& seg = seq.segments[k];
      seg.omega1 = seq.omega_max * rng.uniform();
      seg.phi = kTwoPi * rng.uniform() - kPi;
      seg.delta_omega = seq.omega_max * (2.0 * rng.uniform() - 1.0);
    }
    const ToggleTrace trace = toggling_trace_fast(engine, seq, nodes_per_segment);
    rows.row(s) = c_integrals(trace, r).at_order(r).transpose();
  }
  SpanProbeResult result;
  result.samples = n_sequences;
  Eigen::BDCSVD<RMat> svd(rows, Eigen::ComputeThinV);
  const double sigma_max = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
  int rank = 0;
  for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
    if (svd.singularValues()[k] > 1e-8 * sigma_max) ++rank;
  }
  result.rank = rank;
  result.span = svd.matrixV().leftCols(rank);
  return result;
}

double span_probe_gap(const SpanProbeResult& probe, const RVec& solution,
                      const RMat& nullspace) {
  const auto project_out = [&](const RVec& v) -> RVec {
    return v - probe.span * (probe.span.transpose() * v);
  };
  RVec base = project_out(solution);
  if (nullspace.size() == 0 || nullspace.cols() == 0) return base.norm();
  RMat dirs(nullspace.rows(), nullspace.cols());
  for (Eigen::Index c = 0; c < nullspace.cols(); ++c) {
    dirs.col(c) = project_out(nullspace.col(c));
  }
  Eigen::BDCSVD<RMat> svd(dirs, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVec y = svd.solve(-base);
  return (base + dirs * y).norm();
}

}  // namespace heff
