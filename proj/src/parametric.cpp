#include "heff/parametric.hpp"

#include <stdexcept>

#include "heff/operator_algebra.hpp"

namespace heff {

ParamId ParamId::coupling(int i, int j) {
  if (i == j) throw std::invalid_argument("coupling requires two distinct qubits");
  if (i > j) std::swap(i, j);
  return {Kind::coupling, i, j};
}

std::string ParamId::str() const {
  switch (kind) {
    case Kind::coupling:
    case Kind::detuning:
      return std::to_string(i) + std::to_string(j);
    case Kind::error:
      return i == 0 ? "e" : "e" + std::to_string(i);
  }
  return "?";
}

ParamId ParamId::parse(const std::string& text) {
  if (text.empty()) throw ConfigError("empty parameter id");
  if (text[0] == 'e') {
    const int k = text.size() == 1 ? 0 : std::stoi(text.substr(1));
    return error(k);
  }
  if (text.size() != 2 || !isdigit(text[0]) || !isdigit(text[1])) {
    throw ConfigError("bad parameter id \"" + text +
                      "\" (expected e.g. \"11\", \"12\" or \"e\")");
  }
  const int i = text[0] - '0';
  const int j = text[1] - '0';
  if (i == j) return detuning(i);
  return coupling(i, j);
}

Eigen::Index ParametricOperator::dim() const {
  return blocks.empty() ? 0 : blocks.begin()->second.rows();
}

const Mat* ParametricOperator::block(const ParamId& id) const {
  auto it = blocks.find(id);
  return it == blocks.end() ? nullptr : &it->second;
}

ParametricOperator& ParametricOperator::operator+=(const ParametricOperator& other) {
  for (const auto& [id, mat] : other.blocks) {
    auto it = blocks.find(id);
    if (it == blocks.end())
      blocks.emplace(id, mat);
    else
      it->second += mat;
  }
  return *this;
}

ParametricOperator& ParametricOperator::operator*=(double scale) {
  for (auto& [id, mat] : blocks) mat *= scale;
  return *this;
}

ParametricOperator ParametricOperator::adjoint_map(const Mat& g) const {
  ParametricOperator out;
  out.component = component;
  for (const auto& [id, mat] : blocks) {
    out.blocks.emplace(id, kImag * commutator(g, mat));
  }
  return out;
}

Mat ParametricOperator::instantiate(const std::map<ParamId, double>& values) const {
  Mat result = Mat::Zero(dim(), dim());
  for (const auto& [id, mat] : blocks) {
    auto it = values.find(id);
    if (it != values.end() && it->second != 0.0) result += it->second * mat;
  }
  return result;
}

double param_inner(const ParametricOperator& a, const ParametricOperator& b) {
  double sum = 0.0;
  for (const auto& [id, mat] : a.blocks) {
    const Mat* other = b.block(id);
    if (other) sum += hs_inner(mat, *other).real();
  }
  return sum;
}

double param_norm(const ParametricOperator& a) {
  return std::sqrt(std::max(0.0, param_inner(a, a)));
}

std::int64_t CoordinateLayout::offset_of(const ParamId& id) const {
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (params[k] == id) return std::int64_t(k) * block_len();
  }
  return -1;
}

RVec coordinates(const ParametricOperator& op, const CoordinateLayout& layout) {
  RVec x = RVec::Zero(layout.dim());
  for (const auto& [id, mat] : op.blocks) {
    const std::int64_t offset = layout.offset_of(id);
    if (offset < 0) {
      throw std::invalid_argument("coordinates: parameter " + id.str() +
                                  " is not part of the layout");
    }
    const Vec coeffs = pauli_coefficients(mat);
    x.segment(offset, layout.block_len()) = coeffs.real();
  }
  return x;
}

ParametricOperator from_coordinates(const RVec& x, const CoordinateLayout& layout,
                                    int component, double threshold) {
  if (x.size() != layout.dim()) {
    throw std::invalid_argument("from_coordinates: wrong coordinate length");
  }
  ParametricOperator op;
  op.component = component;
  for (std::size_t k = 0; k < layout.params.size(); ++k) {
    const RVec seg = x.segment(std::int64_t(k) * layout.block_len(), layout.block_len());
    if (seg.cwiseAbs().maxCoeff() <= threshold) continue;
    op.blocks.emplace(layout.params[k],
                      from_pauli_coefficients(seg.cast<cxd>(), layout.n_qubits));
  }
  return op;
}

}  // namespace heff
