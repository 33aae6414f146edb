#pragma once

#include <map>
#include <string>
#include <vector>

#include "heff/graphs.hpp"
#include "heff/toggling.hpp"

namespace heff {

// Everything a cost evaluation needs: the primary target, zeroth-order target
// coefficients in the composite basis, higher-order constraint systems and
// the weights combining them.
struct DesignSpec {
  Mat u_target;              // unitary on the design network
  RVec zeroth_target;        // length |C|: direct sum of s_w * target coefficients
  std::vector<ConstraintSystem> order_constraints;  // grouped by .order
  std::map<int, double> weights;  // key 0 = w_pri, key r = w_{r-1} for order r
  int max_order = 1;              // R: highest C-integral order used

  double weight_primary() const;
  double weight_order(int r) const;  // r = 1 is the zeroth-order term
  std::vector<const ConstraintSystem*> systems_for(int r) const;
  void validate() const;
};

// 1 - |Tr(U_pri^dag U_target)| / Tr(U_target^dag U_target).
double cost_primary(const Mat& u_pri, const Mat& u_target);
double cost_primary(const ControlSequence& seq, int n_qubits, const Mat& u_target);

// | cbar^(0) - T_seq (+)_w s_w target_w |.
double cost_zeroth(const CIntegralTensor& cint, const RVec& zeroth_target);

// [ sum_G |A(G) c^(r-1) - d(G)|^2 ]^(1/2) over the systems of order r.
double cost_order(const CIntegralTensor& cint,
                  const std::vector<const ConstraintSystem*>& systems, int r);

struct CostBreakdown {
  double total = 0.0;
  double f_primary = 0.0;
  std::map<int, double> f_order;  // key r: f^(r-1)

  std::string json_line(long long evaluation, int q_segments) const;
};

CostBreakdown cost_total(const ControlSequence& seq, const NetworkSpec& net,
                         const CSpaceBasis& basis, const DesignSpec& spec,
                         int nodes_per_segment = 16);

// Hot-path variant reusing a toggling engine; identical arithmetic.
CostBreakdown cost_total(const ControlSequence& seq, const TogglingEngine& engine,
                         int n_qubits, const DesignSpec& spec,
                         int nodes_per_segment = 16);

}  // namespace heff
