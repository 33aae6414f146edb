#include "heff/cspace.hpp"

#include <nlohmann/json.hpp>
#include <stdexcept>

#include "heff/operator_algebra.hpp"
#include "heff/rng.hpp"

namespace heff {

namespace {

// Incrementally grown span with an orthonormal coordinate basis. Keeps the
// raw accepted vectors so the final basis can be produced by Gram-Schmidt in
// acceptance order.
struct SpanBuilder {
  RMat ortho;  // dim x count, orthonormal columns
  std::vector<RVec> raw;
  double scale = 0.0;  // largest accepted vector norm, for the relative test

  int count() const { return static_cast<int>(raw.size()); }

  bool accept(const RVec& x) {
    RVec r = x;
    if (count() > 0) r -= ortho * (ortho.transpose() * x);
    // One re-orthogonalization pass keeps the columns orthonormal to machine
    // precision even for nearly dependent candidates.
    if (count() > 0) r -= ortho * (ortho.transpose() * r);
    const double ref = std::max(x.norm(), scale);
    if (ref == 0.0 || r.norm() <= kRankTol * ref) return false;
    ortho.conservativeResize(x.size(), count() + 1);
    ortho.col(count()) = r / r.norm();
    raw.push_back(x);
    scale = std::max(scale, x.norm());
    return true;
  }
};

std::vector<RVec> gram_schmidt(const std::vector<RVec>& raw) {
  std::vector<RVec> ortho;
  for (const RVec& x : raw) {
    RVec r = x;
    for (const RVec& q : ortho) r -= q.dot(r) * q;
    for (const RVec& q : ortho) r -= q.dot(r) * q;
    if (r.norm() == 0.0) {
      throw std::runtime_error("gram_schmidt: dependent vector slipped through");
    }
    ortho.push_back(r / r.norm());
  }
  return ortho;
}

// Closure of the given seed coordinate vectors under the adjoint maps,
// expressed in the given layout. Returns orthonormalized vectors.
std::vector<RVec> closure(const std::vector<RVec>& seeds,
                          const CoordinateLayout& layout,
                          const std::vector<Mat>& gens, int max_rounds,
                          const char* what) {
  SpanBuilder span;
  std::vector<ParametricOperator> frontier;
  for (const RVec& s : seeds) {
    if (span.accept(s)) frontier.push_back(from_coordinates(s, layout, -1));
  }
  for (int round = 0; round < max_rounds && !frontier.empty(); ++round) {
    std::vector<ParametricOperator> next;
    for (const auto& op : frontier) {
      for (const Mat& g : gens) {
        const ParametricOperator mapped = op.adjoint_map(g);
        const RVec x = coordinates(mapped, layout);
        if (span.accept(x)) next.push_back(mapped);
      }
    }
    frontier.swap(next);
  }
  if (!frontier.empty()) {
    throw std::runtime_error(std::string(what) +
                             ": closure did not stabilize; dimension so far " +
                             std::to_string(span.count()));
  }
  return gram_schmidt(span.raw);
}

std::vector<RVec> generic_seeds(const std::vector<ParametricOperator>& directions,
                                const CoordinateLayout& layout, Philox& rng) {
  // Generic full-rank recombination of the directions; the spanned seed space
  // is unchanged but no seed is axis-aligned.
  const int k = static_cast<int>(directions.size());
  std::vector<RVec> coords;
  coords.reserve(k);
  for (const auto& dir : directions) coords.push_back(coordinates(dir, layout));
  if (k == 1) return coords;
  std::vector<RVec> seeds;
  for (int row = 0; row < k; ++row) {
    RVec s = RVec::Zero(layout.dim());
    for (int col = 0; col < k; ++col) s += rng.normal() * coords[col];
    seeds.push_back(s);
  }
  return seeds;
}

}  // namespace

std::vector<int> CSpaceBasis::component_dims() const {
  std::vector<int> dims;
  for (const auto& [begin, end] : component_ranges) dims.push_back(end - begin);
  return dims;
}

std::vector<Mat> primary_generators(const NetworkSpec& net) {
  const Eigen::Index dim = Eigen::Index(1) << net.n;
  std::vector<Mat> gens;
  for (char axis : {'X', 'Y', 'Z'}) {
    Mat g = Mat::Zero(dim, dim);
    for (int q = 0; q < net.n; ++q) {
      std::string letters(net.n, 'I');
      letters[q] = axis;
      g += 0.5 * build_pauli({letters, 1.0}, net.n);
    }
    gens.push_back(std::move(g));
  }
  // Commutator closure; collective su(2) is already closed, but the loop is
  // what defines the contract.
  SpanBuilder span;
  for (const Mat& g : gens) span.accept(pauli_coefficients(g).real());
  std::size_t checked = 0;
  while (checked < gens.size()) {
    const std::size_t frozen = gens.size();
    for (std::size_t a = checked; a < frozen; ++a) {
      for (std::size_t b = 0; b < frozen; ++b) {
        const Mat c = kImag * commutator(gens[a], gens[b]);
        if (span.accept(pauli_coefficients(c).real())) gens.push_back(c);
      }
    }
    checked = frozen;
  }
  return gens;
}

CSpaceBasis minimal_composite_cspace(const std::vector<PerturbationComponent>& comps,
                                     const NetworkSpec& net,
                                     const std::vector<Mat>& gens,
                                     std::uint64_t seed, int max_rounds) {
  if (comps.empty()) {
    throw std::invalid_argument("minimal_composite_cspace: no components");
  }
  CSpaceBasis basis;
  basis.components = comps;
  basis.layout.n_qubits = net.n;
  basis.layout.params = net.param_ids();

  Philox rng(seed, make_stream(StreamPurpose::cspace, 0));
  std::vector<RVec> global_columns;
  for (const auto& comp : comps) {
    CoordinateLayout local{comp.params, net.n};
    const auto seeds = generic_seeds(comp.seed_directions(net), local, rng);
    const auto ortho =
        closure(seeds, local, gens, max_rounds, "minimal_composite_cspace");
    const int begin = static_cast<int>(basis.elements.size());
    for (const RVec& x : ortho) {
      ParametricOperator el = from_coordinates(x, local, comp.index);
      el.component = comp.index;
      basis.elements.push_back(std::move(el));
      global_columns.push_back(coordinates(basis.elements.back(), basis.layout));
    }
    basis.component_ranges.emplace_back(begin,
                                        static_cast<int>(basis.elements.size()));
  }
  basis.coords.resize(basis.layout.dim(), basis.dim());
  for (int k = 0; k < basis.dim(); ++k) basis.coords.col(k) = global_columns[k];
  return basis;
}

ProjectionResult project(const ParametricOperator& op, const CSpaceBasis& basis) {
  const RVec x = coordinates(op, basis.layout);
  ProjectionResult result;
  result.coeffs = basis.coords.transpose() * x;
  result.residual = (x - basis.coords * result.coeffs).norm();
  return result;
}

int joint_closure_dimension(const std::vector<PerturbationComponent>& comps,
                            const NetworkSpec& net, const std::vector<Mat>& gens,
                            std::uint64_t seed, int max_rounds) {
  CoordinateLayout layout{net.param_ids(), net.n};
  Philox rng(seed, make_stream(StreamPurpose::cspace, 1));

  ParametricOperator statics;
  std::vector<ParametricOperator> swept;
  ControlSegment idle;
  for (const auto& comp : comps) {
    if (comp.time_dependent()) {
      for (auto& dir : comp.seed_directions(net)) swept.push_back(std::move(dir));
    } else {
      statics += comp.op_for_segment(net, idle);
    }
  }
  // Joint seeds are reachable toggling vectors: the static part alone (drive
  // off) and the static part plus each generic swept direction.
  std::vector<RVec> seeds;
  const RVec base = coordinates(statics, layout);
  if (base.norm() > 0) seeds.push_back(base);
  for (std::size_t k = 0; k < swept.size(); ++k) {
    RVec s = base;
    for (const auto& dir : swept) s += rng.normal() * coordinates(dir, layout);
    seeds.push_back(s);
  }
  const auto ortho = closure(seeds, layout, gens, max_rounds,
                             "joint_closure_dimension");
  return static_cast<int>(ortho.size());
}

std::string basis_report_json(const CSpaceBasis& basis) {
  nlohmann::json report;
  report["composite_dim"] = basis.dim();
  report["component_dims"] = basis.component_dims();
  nlohmann::json elements = nlohmann::json::array();
  for (const auto& el : basis.elements) {
    nlohmann::json entry;
    entry["component"] = el.component;
    nlohmann::json blocks = nlohmann::json::array();
    for (const auto& [id, mat] : el.blocks) {
      for (const auto& term : pauli_terms(mat)) {
        blocks.push_back({{"param", id.str()},
                          {"pauli", pauli_code_to_string(
                                        term.code, basis.layout.n_qubits)},
                          {"coeff", term.coeff.real()}});
      }
    }
    entry["terms"] = std::move(blocks);
    elements.push_back(std::move(entry));
  }
  report["elements"] = std::move(elements);
  return report.dump(2);
}

}  // namespace heff
