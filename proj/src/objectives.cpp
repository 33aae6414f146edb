#include "heff/objectives.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "heff/operator_algebra.hpp"

namespace heff {

double DesignSpec::weight_primary() const {
  auto it = weights.find(0);
  return it == weights.end() ? 1.0 : it->second;
}

double DesignSpec::weight_order(int r) const {
  auto it = weights.find(r);
  return it == weights.end() ? 0.0 : it->second;
}

std::vector<const ConstraintSystem*> DesignSpec::systems_for(int r) const {
  std::vector<const ConstraintSystem*> out;
  for (const auto& sys : order_constraints) {
    if (sys.order == r) out.push_back(&sys);
  }
  return out;
}

void DesignSpec::validate() const {
  for (const auto& [key, w] : weights) {
    if (w < 0.0) throw ConfigError("cost weights must be positive");
  }
  for (const auto& sys : order_constraints) {
    if (sys.order != sys.graph.r()) {
      throw ConfigError("constraint system for " + sys.graph.str() +
                        " has order " + std::to_string(sys.order) +
                        " but the graph has " + std::to_string(sys.graph.r()) +
                        " edges");
    }
  }
}

double cost_primary(const Mat& u_pri, const Mat& u_target) {
  const double denom = std::abs((u_target.adjoint() * u_target).trace());
  const double overlap = std::abs((u_pri.adjoint() * u_target).trace());
  return 1.0 - overlap / denom;
}

double cost_primary(const ControlSequence& seq, int n_qubits, const Mat& u_target) {
  return cost_primary(primary_propagator(seq, n_qubits), u_target);
}

double cost_zeroth(const CIntegralTensor& cint, const RVec& zeroth_target) {
  const RVec& first = cint.at_order(1);
  if (zeroth_target.size() != 0 && zeroth_target.size() != first.size()) {
    throw std::invalid_argument(
        "cost_zeroth: target coefficient length " +
        std::to_string(zeroth_target.size()) + " does not match |C| = " +
        std::to_string(first.size()));
  }
  if (zeroth_target.size() == 0) return first.norm();
  return (first - cint.t_total_us * zeroth_target).norm();
}

double cost_order(const CIntegralTensor& cint,
                  const std::vector<const ConstraintSystem*>& systems, int r) {
  if (systems.empty()) return 0.0;
  if (r > cint.order) {
    throw std::invalid_argument("cost_order: C integrals only go to order " +
                                std::to_string(cint.order));
  }
  const RVec& c = cint.at_order(r);
  double sum = 0.0;
  for (const ConstraintSystem* sys : systems) {
    sum += (sys->a * c - sys->d).squaredNorm();
  }
  return std::sqrt(sum);
}

std::string CostBreakdown::json_line(long long evaluation, int q_segments) const {
  std::string line = "{\"eval\":" + std::to_string(evaluation) +
                     ",\"q\":" + std::to_string(q_segments);
  char buf[64];
  std::snprintf(buf, sizeof buf, ",\"total\":%.9g", total);
  line += buf;
  std::snprintf(buf, sizeof buf, ",\"f_pri\":%.9g", f_primary);
  line += buf;
  for (const auto& [r, value] : f_order) {
    std::snprintf(buf, sizeof buf, ",\"f%d\":%.9g", r - 1, value);
    line += buf;
  }
  return line + "}";
}

namespace {

CostBreakdown combine(const CIntegralTensor& cint, const Mat& u_pri,
                      const DesignSpec& spec) {
  CostBreakdown result;
  result.f_primary = cost_primary(u_pri, spec.u_target);
  result.total = spec.weight_primary() * result.f_primary;
  result.f_order[1] = cost_zeroth(cint, spec.zeroth_target);
  result.total += spec.weight_order(1) * result.f_order[1];
  for (int r = 2; r <= spec.max_order; ++r) {
    const auto systems = spec.systems_for(r);
    const double value = cost_order(cint, systems, r);
    result.f_order[r] = value;
    result.total += spec.weight_order(r) * value;
  }
  return result;
}

}  // namespace

CostBreakdown cost_total(const ControlSequence& seq, const NetworkSpec& net,
                         const CSpaceBasis& basis, const DesignSpec& spec,
                         int nodes_per_segment) {
  const ToggleTrace trace = toggling_trace(seq, net, basis, nodes_per_segment);
  const CIntegralTensor cint = c_integrals(trace, spec.max_order);
  return combine(cint, primary_propagator(seq, net.n), spec);
}

CostBreakdown cost_total(const ControlSequence& seq, const TogglingEngine& engine,
                         int n_qubits, const DesignSpec& spec,
                         int nodes_per_segment) {
  const ToggleTrace trace = toggling_trace_fast(engine, seq, nodes_per_segment);
  const CIntegralTensor cint = c_integrals(trace, spec.max_order);
  return combine(cint, primary_propagator(seq, n_qubits), spec);
}

}  // namespace heff
