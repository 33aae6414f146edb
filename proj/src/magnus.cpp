#include "heff/magnus.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "heff/operator_algebra.hpp"

namespace heff {

std::vector<PermutationWeight> permutation_weights(int r) {
  if (r < 1 || r > kMaxMagnusOrder) {
    throw std::invalid_argument("permutation_weights: order " + std::to_string(r) +
                                " outside [1, " + std::to_string(kMaxMagnusOrder) +
                                "]");
  }
  double factorial_r = 1.0;
  for (int k = 2; k <= r; ++k) factorial_r *= k;
  std::vector<int> word(r);
  std::iota(word.begin(), word.end(), 0);
  std::vector<PermutationWeight> weights;
  do {
    PermutationWeight pw;
    pw.word = word;
    for (int k = 0; k + 1 < r; ++k) {
      if (word[k] > word[k + 1])
        ++pw.descents;
      else
        ++pw.ascents;
    }
    double da_fac = 1.0, db_fac = 1.0;
    for (int k = 2; k <= pw.ascents; ++k) da_fac *= k;
    for (int k = 2; k <= pw.descents; ++k) db_fac *= k;
    pw.weight = std::pow(-kImag, r - 1) * ((pw.descents % 2) ? -1.0 : 1.0) *
                da_fac * db_fac / factorial_r;
    weights.push_back(std::move(pw));
  } while (std::next_permutation(word.begin(), word.end()));
  return weights;
}

Mat f_coefficient(const std::vector<Mat>& ops) {
  const int r = static_cast<int>(ops.size());
  const auto weights = permutation_weights(r);
  Mat sum = Mat::Zero(ops[0].rows(), ops[0].cols());
  for (const auto& pw : weights) {
    Mat prod = ops[pw.word[0]];
    for (int k = 1; k < r; ++k) prod *= ops[pw.word[k]];
    sum += pw.weight * prod;
  }
  return sum;
}

std::vector<Mat> reconstruct_magnus(const CIntegralTensor& cint,
                                    const CSpaceBasis& basis,
                                    const ParameterRealization& real, int order) {
  if (order < 1 || order > cint.order) {
    throw std::invalid_argument("reconstruct_magnus: order out of range");
  }
  std::vector<Mat> instantiated;
  instantiated.reserve(basis.dim());
  for (const auto& el : basis.elements) {
    instantiated.push_back(el.instantiate(real.values));
  }
  const Eigen::Index dim = instantiated.empty() ? 1 : instantiated[0].rows();
  std::vector<Mat> terms;
  for (int r = 1; r <= order; ++r) {
    const RVec& cbar = cint.at_order(r);
    const TupleIndexer idx = cint.indexer(r);
    const auto weights = permutation_weights(r);
    Mat acc = Mat::Zero(dim, dim);
    std::vector<Mat> slot_ops(r);
    for (std::int64_t a = 0; a < idx.size(); ++a) {
      if (cbar[a] == 0.0) continue;
      const auto tuple = idx.unpack(a);
      for (int k = 0; k < r; ++k) slot_ops[k] = instantiated[tuple[k]];
      for (const auto& pw : weights) {
        Mat prod = slot_ops[pw.word[0]];
        for (int k = 1; k < r; ++k) prod *= slot_ops[pw.word[k]];
        acc += (pw.weight * cbar[a]) * prod;
      }
    }
    acc /= cint.t_total_us;
    terms.push_back(0.5 * (acc + acc.adjoint()));
  }
  return terms;
}

std::vector<Mat> magnus_oracle(const ControlSequence& seq, const NetworkSpec& net,
                               const ParameterRealization& real, int order,
                               int slices_per_segment) {
  if (order < 1 || order > 3) {
    throw std::invalid_argument("magnus_oracle supports orders 1..3");
  }
  if (slices_per_segment < 500) {
    throw std::invalid_argument("magnus_oracle needs >= 500 slices per segment");
  }
  seq.validate();
  const Eigen::Index dim = Eigen::Index(1) << net.n;
  const Mat h_static = internal_hamiltonian(net, real);
  double eps = 0.0;
  for (int k : net.error_ids) eps = real.value(ParamId::error(k));

  // Midpoint samples of H_tog across all slices; U accumulates exactly from
  // per-segment eigendecompositions.
  std::vector<Mat> h_tog;
  std::vector<double> widths;
  Mat u = Mat::Identity(dim, dim);
  for (const auto& seg : seq.segments) {
    Eigen::SelfAdjointEigenSolver<Mat> es(control_hamiltonian(seg, net.n, 0.0));
    const double dt = seg.duration_us / slices_per_segment;
    const Vec half = (-kImag * (0.5 * dt) * es.eigenvalues().cast<cxd>()).array().exp();
    const Vec full = (-kImag * dt * es.eigenvalues().cast<cxd>()).array().exp();
    const Mat e_half =
        es.eigenvectors() * half.asDiagonal() * es.eigenvectors().adjoint();
    const Mat e_full =
        es.eigenvectors() * full.asDiagonal() * es.eigenvectors().adjoint();
    const Mat h_pert = h_static + eps * control_hamiltonian(seg, net.n, 0.0);
    for (int s = 0; s < slices_per_segment; ++s) {
      const Mat u_mid = e_half * u;
      h_tog.push_back(u_mid.adjoint() * h_pert * u_mid);
      widths.push_back(dt);
      u = e_full * u;
    }
  }

  const double t_total = seq.total_duration_us();
  std::vector<Mat> result;

  Mat h0 = Mat::Zero(dim, dim);
  for (std::size_t a = 0; a < h_tog.size(); ++a) h0 += widths[a] * h_tog[a];
  result.push_back(h0 / t_total);
  if (order == 1) return result;

  // First order: running prefix sum keeps the double integral linear in the
  // slice count.
  Mat prefix = Mat::Zero(dim, dim);
  Mat h1 = Mat::Zero(dim, dim);
  for (std::size_t a = 0; a < h_tog.size(); ++a) {
    h1 += widths[a] * commutator(h_tog[a], prefix);
    prefix += widths[a] * h_tog[a];
  }
  result.push_back(-kImag / (2.0 * t_total) * h1);
  if (order == 2) return result;

  // Second order, term [H1,[H2,H3]] with t1 > t2 > t3 via nested prefixes.
  Mat k_sum = Mat::Zero(dim, dim);
  Mat l_sum = Mat::Zero(dim, dim);
  Mat term_a = Mat::Zero(dim, dim);
  for (std::size_t a = 0; a < h_tog.size(); ++a) {
    term_a += widths[a] * commutator(h_tog[a], l_sum);
    l_sum += widths[a] * commutator(h_tog[a], k_sum);
    k_sum += widths[a] * h_tog[a];
  }
  // Term [H3,[H2,H1]] via suffix sums, iterating backwards.
  Mat s_sum = Mat::Zero(dim, dim);
  Mat m_sum = Mat::Zero(dim, dim);
  Mat term_b = Mat::Zero(dim, dim);
  for (std::size_t a = h_tog.size(); a-- > 0;) {
    term_b += widths[a] * commutator(h_tog[a], m_sum);
    m_sum += widths[a] * commutator(h_tog[a], s_sum);
    s_sum += widths[a] * h_tog[a];
  }
  result.push_back(-1.0 / (6.0 * t_total) * (term_a + term_b));
  return result;
}

Mat graph_derivative_f(const std::vector<int>& tuple,
                       const std::vector<ParamId>& edges,
                       const CSpaceBasis& basis) {
  const int r = static_cast<int>(tuple.size());
  const Eigen::Index dim = Eigen::Index(1) << basis.layout.n_qubits;
  Mat sum = Mat::Zero(dim, dim);
  if (static_cast<int>(edges.size()) != r) return sum;

  std::vector<ParamId> assignment = edges;
  std::sort(assignment.begin(), assignment.end());
  std::vector<Mat> slot_ops(r);
  do {
    bool complete = true;
    for (int k = 0; k < r && complete; ++k) {
      const Mat* block = basis.elements[tuple[k]].block(assignment[k]);
      if (!block)
        complete = false;
      else
        slot_ops[k] = *block;
    }
    if (complete) sum += f_coefficient(slot_ops);
  } while (std::next_permutation(assignment.begin(), assignment.end()));
  return sum;
}

}  // namespace heff
