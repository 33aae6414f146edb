#include "heff/toggling.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "heff/operator_algebra.hpp"

namespace heff {

namespace {

double legendre(int k, double x) {
  double p0 = 1.0, p1 = x;
  if (k == 0) return p0;
  for (int m = 2; m <= k; ++m) {
    const double p2 = ((2 * m - 1) * x * p1 - (m - 1) * p0) / m;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

QuadratureRule build_rule(int k) {
  QuadratureRule rule;
  rule.nodes.resize(k);
  rule.weights.resize(k);
  // Newton iteration from the Chebyshev estimate; standard Golub-Welsch-free
  // construction, fine for the node counts used here.
  for (int i = 0; i < k; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (k + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const double p = legendre(k, x);
      const double pm = legendre(k - 1, x);
      const double dp = k * (x * p - pm) / (x * x - 1.0);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double pm = legendre(k - 1, x);
    const double dp = k * (x * legendre(k, x) - pm) / (x * x - 1.0);
    rule.nodes[k - 1 - i] = x;
    rule.weights[k - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  // Cumulative matrix: expand samples in the Legendre basis (V a = f) and
  // evaluate the antiderivatives from -1 at the nodes.
  RMat v(k, k), w(k, k);
  for (int j = 0; j < k; ++j) {
    const double x = rule.nodes[j];
    for (int m = 0; m < k; ++m) {
      v(j, m) = legendre(m, x);
      w(j, m) = m == 0 ? x + 1.0
                       : (legendre(m + 1, x) - legendre(m - 1, x)) / (2 * m + 1);
    }
  }
  rule.cumulative = w * v.inverse();
  return rule;
}

std::mutex rule_mutex;
std::map<int, QuadratureRule> rule_cache;

}  // namespace

const QuadratureRule& QuadratureRule::get(int k) {
  if (k < 2) throw std::invalid_argument("quadrature needs at least 2 nodes");
  std::lock_guard<std::mutex> lock(rule_mutex);
  auto it = rule_cache.find(k);
  if (it == rule_cache.end()) it = rule_cache.emplace(k, build_rule(k)).first;
  return it->second;
}

namespace {

ToggleTrace trace_shell(const ControlSequence& seq, int basis_dim, int k) {
  if (k < 4) {
    throw std::invalid_argument("toggling trace needs >= 4 nodes per segment");
  }
  seq.validate();
  const QuadratureRule& rule = QuadratureRule::get(k);
  ToggleTrace trace;
  trace.nodes_per_segment = k;
  const int q_count = seq.size();
  trace.seg_start_us.resize(q_count);
  trace.seg_duration_us.resize(q_count);
  trace.node_times_us.resize(q_count * k);
  trace.node_weights.resize(q_count * k);
  trace.values.resize(basis_dim, q_count * k);
  double t0 = 0.0;
  for (int q = 0; q < q_count; ++q) {
    const double dt = seq.segments[q].duration_us;
    trace.seg_start_us[q] = t0;
    trace.seg_duration_us[q] = dt;
    for (int m = 0; m < k; ++m) {
      trace.node_times_us[q * k + m] = t0 + 0.5 * dt * (rule.nodes[m] + 1.0);
      trace.node_weights[q * k + m] = 0.5 * dt * rule.weights[m];
    }
    t0 += dt;
  }
  trace.t_total_us = t0;
  return trace;
}

ParametricOperator composite_perturbation(const NetworkSpec& net,
                                          const std::vector<PerturbationComponent>& comps,
                                          const ControlSegment& seg) {
  ParametricOperator op;
  for (const auto& comp : comps) op += comp.op_for_segment(net, seg);
  return op;
}

}  // namespace

ToggleTrace toggling_trace(const ControlSequence& seq, const NetworkSpec& net,
                           const CSpaceBasis& basis, int nodes_per_segment) {
  ToggleTrace trace = trace_shell(seq, basis.dim(), nodes_per_segment);
  const QuadratureRule& rule = QuadratureRule::get(nodes_per_segment);
  const Eigen::Index dim = Eigen::Index(1) << net.n;
  Mat u_prefix = Mat::Identity(dim, dim);
  const int k = nodes_per_segment;
  for (int q = 0; q < seq.size(); ++q) {
    const ControlSegment& seg = seq.segments[q];
    Eigen::SelfAdjointEigenSolver<Mat> es(control_hamiltonian(seg, net.n, 0.0));
    const ParametricOperator pert = composite_perturbation(net, basis.components, seg);
    for (int m = 0; m < k; ++m) {
      const double offset = 0.5 * seg.duration_us * (rule.nodes[m] + 1.0);
      const Vec phases =
          (-kImag * offset * es.eigenvalues().cast<cxd>()).array().exp();
      const Mat u_node =
          es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint() *
          u_prefix;
      ParametricOperator toggled;
      for (const auto& [id, mat] : pert.blocks) {
        toggled.blocks.emplace(id, u_node.adjoint() * mat * u_node);
      }
      const ProjectionResult proj = project(toggled, basis);
      const double scale = std::max(1.0, proj.coeffs.norm());
      if (proj.residual > 1e-9 * scale) {
        throw std::runtime_error(
            "toggling_trace: projection residual " +
            std::to_string(proj.residual) +
            " at t = " + std::to_string(trace.node_times_us[q * k + m]) +
            " us; the basis does not span the toggled perturbation "
            "(basis/space mismatch)");
      }
      trace.values.col(q * k + m) = proj.coeffs;
    }
    const Vec full = (-kImag * seg.duration_us * es.eigenvalues().cast<cxd>())
                         .array()
                         .exp();
    u_prefix = es.eigenvectors() * full.asDiagonal() * es.eigenvectors().adjoint() *
               u_prefix;
  }
  return trace;
}

TogglingEngine make_toggling_engine(const CSpaceBasis& basis,
                                    const NetworkSpec& net) {
  TogglingEngine engine;
  engine.dim = basis.dim();
  const std::vector<Mat> gens = primary_generators(net);
  for (int a = 0; a < 3; ++a) {
    RMat ad(engine.dim, engine.dim);
    for (int j = 0; j < engine.dim; ++j) {
      const ParametricOperator mapped = basis.elements[j].adjoint_map(gens[a]);
      ad.col(j) = basis.coords.transpose() * coordinates(mapped, basis.layout);
    }
    engine.adjoint[a] = ad;
  }
  ParametricOperator statics;
  ControlSegment idle;
  bool have_error = false;
  for (const auto& comp : basis.components) {
    if (comp.time_dependent()) {
      const auto dirs = comp.seed_directions(net);
      for (int a = 0; a < 3; ++a) {
        engine.p_error[a] = basis.coords.transpose() *
                            coordinates(dirs[a], basis.layout);
      }
      have_error = true;
    } else {
      statics += comp.op_for_segment(net, idle);
    }
  }
  engine.p_static = statics.empty()
                        ? RVec::Zero(engine.dim)
                        : RVec(basis.coords.transpose() *
                               coordinates(statics, basis.layout));
  if (!have_error) {
    for (int a = 0; a < 3; ++a) engine.p_error[a] = RVec::Zero(engine.dim);
  }
  return engine;
}

ToggleTrace toggling_trace_fast(const TogglingEngine& engine,
                                const ControlSequence& seq,
                                int nodes_per_segment) {
  ToggleTrace trace = trace_shell(seq, engine.dim, nodes_per_segment);
  const QuadratureRule& rule = QuadratureRule::get(nodes_per_segment);
  const int k = nodes_per_segment;
  RMat prefix = RMat::Identity(engine.dim, engine.dim);
  for (int q = 0; q < seq.size(); ++q) {
    const ControlSegment& seg = seq.segments[q];
    const double cx = seg.omega1 * std::cos(seg.phi);
    const double cy = seg.omega1 * std::sin(seg.phi);
    const double cz = seg.delta_omega;
    const RMat gen = cx * engine.adjoint[0] + cy * engine.adjoint[1] +
                     cz * engine.adjoint[2];
    const RVec p_seg = engine.p_static + cx * engine.p_error[0] +
                       cy * engine.p_error[1] + cz * engine.p_error[2];
    // gen is real antisymmetric, so i*gen is Hermitian and exp(s*gen) comes
    // from one eigendecomposition per segment.
    Eigen::SelfAdjointEigenSolver<Mat> es(kImag * gen.cast<cxd>());
    const Vec q0 = es.eigenvectors().adjoint() * p_seg.cast<cxd>();
    for (int m = 0; m < k; ++m) {
      const double offset = 0.5 * seg.duration_us * (rule.nodes[m] + 1.0);
      const Vec phases =
          (-kImag * offset * es.eigenvalues().cast<cxd>()).array().exp();
      const Vec rotated = es.eigenvectors() * (phases.asDiagonal() * q0);
      trace.values.col(q * k + m) = prefix * rotated.real();
    }
    const Vec full = (-kImag * seg.duration_us * es.eigenvalues().cast<cxd>())
                         .array()
                         .exp();
    const Mat rot = es.eigenvectors() * full.asDiagonal() * es.eigenvectors().adjoint();
    prefix = prefix * rot.real();
  }
  return trace;
}

CIntegralTensor c_integrals(const ToggleTrace& trace, int order) {
  if (order < 1) throw std::invalid_argument("c_integrals: order must be >= 1");
  if (order > kMaxCIntegralOrder) {
    throw std::invalid_argument("c_integrals: order " + std::to_string(order) +
                                " exceeds the cap " +
                                std::to_string(kMaxCIntegralOrder));
  }
  const int dim = trace.basis_dim();
  const int k = trace.nodes_per_segment;
  const QuadratureRule& rule = QuadratureRule::get(k);

  CIntegralTensor out;
  out.order = order;
  out.dim = dim;
  out.t_total_us = trace.t_total_us;

  std::vector<RVec> bnd(order);     // cumulative tensors at the segment start
  std::vector<RMat> cur(order);     // in-segment cumulative values at nodes
  std::vector<RMat> integrand(order);
  std::int64_t size = 1;
  for (int r = 0; r < order; ++r) {
    size *= dim;
    bnd[r] = RVec::Zero(size);
    cur[r].resize(size, k);
    integrand[r].resize(size, k);
  }

  for (int q = 0; q < trace.segment_count(); ++q) {
    const double half_dt = 0.5 * trace.seg_duration_us[q];
    const RMat seg_cumulative = half_dt * rule.cumulative;
    const RVec seg_weights = half_dt * rule.weights;
    const auto c_seg = trace.values.middleCols(q * k, k);  // dim x K

    std::int64_t rows = dim;
    for (int r = 0; r < order; ++r, rows *= dim) {
      if (r == 0) {
        integrand[0] = c_seg;
      } else {
        // integrand[r](i1,rest; m) = c_{i1}(m) * cur[r-1](rest; m)
        const std::int64_t inner = cur[r - 1].rows();
        for (int i1 = 0; i1 < dim; ++i1) {
          integrand[r].middleRows(i1 * inner, inner) =
              cur[r - 1].array().rowwise() * c_seg.row(i1).array();
        }
      }
      cur[r] = integrand[r] * seg_cumulative.transpose();
      cur[r].colwise() += bnd[r];
      bnd[r] += integrand[r] * seg_weights;
    }
  }
  out.tensors = std::move(bnd);
  return out;
}

double parity_residual(const CIntegralTensor& cint, int r) {
  if (r < 1 || r > cint.order) {
    throw std::invalid_argument("parity_residual: order out of range");
  }
  const RVec& t = cint.at_order(r);
  const TupleIndexer idx = cint.indexer(r);
  const double sign = (r % 2 == 0) ? 1.0 : -1.0;
  double sum = 0.0;
  for (std::int64_t a = 0; a < idx.size(); ++a) {
    const auto tuple = idx.unpack(a);
    bool all_equal = true;
    for (int x : tuple) all_equal = all_equal && x == tuple[0];
    if (all_equal) continue;
    const double diff = t[a] - sign * t[idx.reversed(a)];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

}  // namespace heff
