#pragma once

// Exact solver for small balanced transportation problems.

#include <cstddef>
#include <span>
#include <vector>

namespace redsense::transport {

struct TransportPlan {
  double cost = 0;
  std::vector<double> flow;  // supply.size() x demand.size(), row-major
};

// Minimizes sum_ij flow_ij * cost_ij subject to row sums = supply and column
// sums = demand (both non-negative with equal totals, within 1e-9 relative).
// Successive shortest augmenting paths on the residual network; the result
// is optimal up to floating-point rounding. Throws PreconditionError for
// negative or unbalanced marginals or a cost matrix of the wrong size.
TransportPlan solve_transport(std::span<const double> supply, std::span<const double> demand,
                              std::span<const double> cost);

}  // namespace redsense::transport
