#include "heff/graphs.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <nlohmann/json.hpp>
#include <numeric>
#include <stdexcept>

#include "heff/operator_algebra.hpp"

namespace heff {

namespace {

int svd_rank(const Eigen::BDCSVD<RMat>& svd, double sigma_max) {
  if (sigma_max <= 0.0) return 0;
  int rank = 0;
  for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
    if (svd.singularValues()[k] > kRankTol * sigma_max) ++rank;
  }
  return rank;
}

// Orthonormal basis of the column space, with the rank cut relative to the
// supplied sigma reference (or the matrix's own largest singular value).
RMat column_space(const RMat& m, double sigma_ref = -1.0) {
  if (m.size() == 0 || m.norm() == 0.0) return RMat::Zero(m.rows(), 0);
  Eigen::BDCSVD<RMat> svd(m, Eigen::ComputeThinU);
  const double ref = sigma_ref > 0 ? sigma_ref : svd.singularValues()[0];
  const int rank = svd_rank(svd, ref);
  return svd.matrixU().leftCols(rank);
}

RMat null_space(const RMat& m) {
  if (m.size() == 0) return RMat::Identity(m.cols(), m.cols());
  if (m.norm() == 0.0) return RMat::Identity(m.cols(), m.cols());
  Eigen::BDCSVD<RMat> svd(m, Eigen::ComputeFullV);
  const int rank = svd_rank(svd, svd.singularValues()[0]);
  return svd.matrixV().rightCols(m.cols() - rank);
}

}  // namespace

ParameterGraph ParameterGraph::make(std::vector<ParamId> edges) {
  std::sort(edges.begin(), edges.end());
  return ParameterGraph{std::move(edges)};
}

ParameterGraph ParameterGraph::parse(const std::vector<std::string>& edge_names) {
  std::vector<ParamId> edges;
  for (const auto& name : edge_names) edges.push_back(ParamId::parse(name));
  return make(std::move(edges));
}

std::vector<int> ParameterGraph::vertices() const {
  std::set<int> verts;
  for (const auto& e : edges) {
    if (e.is_error()) continue;
    verts.insert(e.i);
    verts.insert(e.j);
  }
  return {verts.begin(), verts.end()};
}

bool ParameterGraph::connected() const {
  if (edges.empty()) return false;
  // A collective error edge touches every qubit, joining all components.
  for (const auto& e : edges) {
    if (e.is_error()) return true;
  }
  const auto verts = vertices();
  if (verts.empty()) return false;
  std::map<int, std::vector<int>> adj;
  for (const auto& e : edges) {
    if (!e.is_coupling()) continue;
    adj[e.i].push_back(e.j);
    adj[e.j].push_back(e.i);
  }
  std::set<int> seen{verts.front()};
  std::vector<int> queue{verts.front()};
  while (!queue.empty()) {
    const int v = queue.back();
    queue.pop_back();
    for (int w : adj[v]) {
      if (seen.insert(w).second) queue.push_back(w);
    }
  }
  return seen.size() == verts.size();
}

std::string ParameterGraph::str() const {
  std::string s = "{";
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (k) s += ",";
    s += edges[k].str();
  }
  return s + "}";
}

std::string ParameterGraph::canonical_key() const {
  const auto verts = vertices();
  const int v_count = static_cast<int>(verts.size());
  std::vector<int> perm(v_count);
  std::iota(perm.begin(), perm.end(), 0);
  std::string best;
  do {
    std::map<int, int> relabel;
    for (int k = 0; k < v_count; ++k) relabel[verts[k]] = perm[k] + 1;
    std::vector<ParamId> mapped;
    for (const auto& e : edges) {
      if (e.is_error()) {
        mapped.push_back(e);
      } else if (e.is_detuning()) {
        mapped.push_back(ParamId::detuning(relabel[e.i]));
      } else {
        mapped.push_back(ParamId::coupling(relabel[e.i], relabel[e.j]));
      }
    }
    std::sort(mapped.begin(), mapped.end());
    std::string key;
    for (const auto& e : mapped) key += e.str() + ";";
    if (best.empty() || key < best) best = key;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

bool ParameterGraph::isomorphic_to(const ParameterGraph& other) const {
  return canonical_key() == other.canonical_key();
}

std::vector<ParameterGraph> enumerate_graphs(
    const NetworkSpec& net, int r, bool include_error,
    std::optional<std::set<ParamId::Kind>> allowed_kinds) {
  if (r < 1) throw std::invalid_argument("enumerate_graphs: r must be >= 1");
  std::vector<ParamId> alphabet;
  for (const auto& id : net.param_ids()) {
    if (id.is_error() && !include_error) continue;
    if (allowed_kinds && !allowed_kinds->count(id.kind)) continue;
    alphabet.push_back(id);
  }
  std::sort(alphabet.begin(), alphabet.end());

  std::map<std::string, ParameterGraph> classes;
  std::vector<ParamId> pick(r);
  const auto recurse = [&](auto&& self, int slot, std::size_t start) -> void {
    if (slot == r) {
      ParameterGraph g = ParameterGraph::make(pick);
      if (!g.connected()) return;
      const std::string key = g.canonical_key();
      auto it = classes.find(key);
      if (it == classes.end() || g.edges < it->second.edges) {
        classes.insert_or_assign(key, std::move(g));
      }
      return;
    }
    for (std::size_t k = start; k < alphabet.size(); ++k) {
      pick[slot] = alphabet[k];
      self(self, slot + 1, k);
    }
  };
  recurse(recurse, 0, 0);

  std::vector<ParameterGraph> result;
  for (auto& [key, g] : classes) result.push_back(std::move(g));
  std::sort(result.begin(), result.end(),
            [](const ParameterGraph& a, const ParameterGraph& b) {
              return a.edges < b.edges;
            });
  return result;
}

namespace {

// Sparse assembly pass shared by constraint_system and achievable_subspace:
// evaluates dF_G for every tuple and collects the union of Pauli supports.
struct GraphColumns {
  std::vector<std::int64_t> support;
  RMat a;  // support x |C|^r
};

GraphColumns assemble_columns(const ParameterGraph& graph,
                              const CSpaceBasis& basis) {
  const int r = graph.r();
  const int dim = basis.dim();
  const TupleIndexer idx{dim, r};

  // Slot prefilter: an element can sit in a slot only if it owns at least one
  // of the graph's parameter blocks.
  std::vector<char> eligible(dim, 0);
  for (int e = 0; e < dim; ++e) {
    for (const auto& id : graph.edges) {
      if (basis.elements[e].block(id)) {
        eligible[e] = 1;
        break;
      }
    }
  }

  std::map<std::int64_t, std::map<std::int64_t, double>> cols;  // tuple -> code -> coeff
  std::set<std::int64_t> support;
  std::vector<int> tuple(r);
  for (std::int64_t a = 0; a < idx.size(); ++a) {
    std::int64_t rest = a;
    bool ok = true;
    for (int k = r - 1; k >= 0; --k) {
      tuple[k] = static_cast<int>(rest % dim);
      rest /= dim;
      ok = ok && eligible[tuple[k]];
    }
    if (!ok) continue;
    const Mat df = graph_derivative_f(tuple, graph.edges, basis);
    if (max_abs(df) < 1e-13) continue;
    auto terms = pauli_terms(df, 1e-12);
    if (terms.empty()) continue;
    auto& col = cols[a];
    for (const auto& term : terms) {
      col[term.code] = term.coeff.real();
      support.insert(term.code);
    }
  }

  GraphColumns out;
  out.support.assign(support.begin(), support.end());
  std::map<std::int64_t, int> row_of;
  for (std::size_t k = 0; k < out.support.size(); ++k) {
    row_of[out.support[k]] = static_cast<int>(k);
  }
  out.a = RMat::Zero(static_cast<Eigen::Index>(out.support.size()), idx.size());
  for (const auto& [tuple_idx, col] : cols) {
    for (const auto& [code, coeff] : col) out.a(row_of[code], tuple_idx) = coeff;
  }
  return out;
}

}  // namespace

ConstraintSystem constraint_system(const ParameterGraph& graph,
                                   const CSpaceBasis& basis,
                                   const PauliTargetMap& target, double t_prime) {
  GraphColumns cols = assemble_columns(graph, basis);
  ConstraintSystem sys;
  sys.graph = graph;
  sys.order = graph.r();
  sys.c_dim = basis.dim();
  sys.support = std::move(cols.support);
  sys.a = std::move(cols.a);
  sys.t_prime = t_prime;
  sys.d = RVec::Zero(static_cast<Eigen::Index>(sys.support.size()));

  if (!target.empty()) {
    const int n = basis.layout.n_qubits;
    double outside = 0.0;
    for (const auto& [letters, coeff] : target) {
      if (static_cast<int>(letters.size()) > n) {
        throw ConfigError("target Pauli string \"" + letters +
                          "\" longer than the network (" + std::to_string(n) +
                          " qubits)");
      }
      std::string padded = letters + std::string(n - letters.size(), 'I');
      const std::int64_t code = pauli_string_to_code(padded);
      auto it = std::lower_bound(sys.support.begin(), sys.support.end(), code);
      if (it == sys.support.end() || *it != code) {
        outside += coeff * coeff;
        continue;
      }
      sys.d[it - sys.support.begin()] = coeff * t_prime;
    }
    if (outside > 0.0) {
      throw InfeasibleError("target for graph " + graph.str() +
                            " has weight outside the achievable support "
                            "(residual " +
                            std::to_string(std::sqrt(outside)) + ")");
    }
    // The target must lie in the column space of A.
    Eigen::BDCSVD<RMat> svd(sys.a, Eigen::ComputeThinU);
    const RVec projected =
        svd.matrixU() * (svd.matrixU().transpose() * sys.d);
    const double residual = (sys.d - projected).norm();
    if (residual > kRankTol * std::max(1.0, sys.d.norm())) {
      throw InfeasibleError("target for graph " + graph.str() +
                            " lies outside S(G); projection residual " +
                            std::to_string(residual));
    }
  }
  return sys;
}

SubspaceBasis achievable_subspace(const ParameterGraph& graph,
                                  const CSpaceBasis& basis,
                                  const RMat* restriction) {
  GraphColumns cols = assemble_columns(graph, basis);
  SubspaceBasis sub;
  sub.support = std::move(cols.support);
  const RMat m = restriction ? RMat(cols.a * (*restriction)) : cols.a;
  sub.coords = column_space(m);
  return sub;
}

std::vector<Mat> SubspaceBasis::operators(int n_qubits) const {
  std::vector<Mat> ops;
  const std::int64_t full = std::int64_t(1) << (2 * n_qubits);
  for (int c = 0; c < dim(); ++c) {
    Vec coeffs = Vec::Zero(full);
    for (std::size_t k = 0; k < support.size(); ++k) {
      coeffs[support[k]] = coords(static_cast<Eigen::Index>(k), c);
    }
    ops.push_back(from_pauli_coefficients(coeffs, n_qubits));
  }
  return ops;
}

bool graphs_equivalent(const ParameterGraph& g1, const ParameterGraph& g2,
                       const CSpaceBasis& basis) {
  if (g1.r() != g2.r()) return false;
  const GraphColumns c1 = assemble_columns(g1, basis);
  const GraphColumns c2 = assemble_columns(g2, basis);
  if (c1.a.size() == 0 || c2.a.size() == 0) {
    return c1.a.size() == 0 && c2.a.size() == 0;
  }
  Eigen::BDCSVD<RMat> s1(c1.a);
  Eigen::BDCSVD<RMat> s2(c2.a);
  RMat stacked(c1.a.rows() + c2.a.rows(), c1.a.cols());
  stacked << c1.a, c2.a;
  Eigen::BDCSVD<RMat> s12(stacked);
  const double ref = std::max(s1.singularValues()[0], s2.singularValues()[0]);
  const int r1 = svd_rank(s1, ref);
  const int r2 = svd_rank(s2, ref);
  const int r12 = svd_rank(s12, ref);
  return r1 == r2 && r2 == r12;
}

FeasibleResult feasible_targets(const std::vector<ConstraintSystem>& systems) {
  if (systems.empty()) {
    throw std::invalid_argument("feasible_targets: no systems");
  }
  const Eigen::Index t_dim = systems.front().a.cols();
  FeasibleResult result;
  result.solution = RVec::Zero(t_dim);
  result.nullspace = RMat::Identity(t_dim, t_dim);

  for (const auto& sys : systems) {
    if (sys.a.cols() != t_dim) {
      throw std::invalid_argument(
          "feasible_targets: systems do not share one C-integral index space");
    }
    FeasibleStep step;
    step.graph = sys.graph.str();
    if (result.nullspace.cols() == 0) {
      const double residual = (sys.a * result.solution - sys.d).norm();
      step.residual = residual;
      step.feasible = residual <= 1e-8 * std::max(1.0, sys.d.norm());
      step.null_dim_after = 0;
    } else {
      const RMat b = sys.a * result.nullspace;
      const RVec rhs = sys.d - sys.a * result.solution;
      RVec y = RVec::Zero(b.cols());
      if (b.norm() > 0.0) {
        Eigen::BDCSVD<RMat> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
        y = svd.solve(rhs);
      }
      const double residual = (b * y - rhs).norm();
      step.residual = residual;
      step.feasible = residual <= 1e-8 * std::max(1.0, sys.d.norm());
      if (step.feasible) {
        result.solution += result.nullspace * y;
        result.nullspace = RMat(result.nullspace * null_space(b));
      }
      step.null_dim_after = static_cast<int>(result.nullspace.cols());
    }
    result.feasible = result.feasible && step.feasible;
    result.steps.push_back(step);
    if (!step.feasible) break;
  }
  return result;
}

AffineImage image_through(const ConstraintSystem& next, const FeasibleResult& state) {
  AffineImage image;
  image.support = next.support;
  image.offset = next.a * state.solution;
  image.directions = column_space(RMat(next.a * state.nullspace));
  return image;
}

double image_distance(const AffineImage& image, const RVec& d) {
  RVec rel = d - image.offset;
  rel -= image.directions * (image.directions.transpose() * rel);
  return rel.norm();
}

std::string graphs_report_json(const std::vector<ParameterGraph>& graphs,
                               const CSpaceBasis& basis, int n_qubits) {
  nlohmann::json report = nlohmann::json::array();
  for (const auto& g : graphs) {
    nlohmann::json entry;
    std::vector<std::string> names;
    for (const auto& e : g.edges) names.push_back(e.str());
    entry["edges"] = names;
    const SubspaceBasis sub = achievable_subspace(g, basis);
    entry["dim_s"] = sub.dim();
    nlohmann::json ops = nlohmann::json::array();
    for (int c = 0; c < sub.dim(); ++c) {
      nlohmann::json op;
      for (std::size_t k = 0; k < sub.support.size(); ++k) {
        const double coeff = sub.coords(static_cast<Eigen::Index>(k), c);
        if (std::abs(coeff) > 1e-10) {
          op[pauli_code_to_string(sub.support[k], n_qubits)] = coeff;
        }
      }
      ops.push_back(std::move(op));
    }
    entry["basis"] = std::move(ops);
    report.push_back(std::move(entry));
  }
  return report.dump(2);
}

}  // namespace heff
