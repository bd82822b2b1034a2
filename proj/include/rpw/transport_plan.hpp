#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "rpw/cost.hpp"
#include "rpw/distribution.hpp"

namespace rpw {

struct PlanEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  double mass = 0.0;
};

/// Sparse sub-coupling between two distributions. p_cost holds the total
/// p-th-power cost (p < inf) or the largest used ground distance (p = inf).
struct TransportPlan {
  std::vector<PlanEdge> edges;
  double transported_mass = 0.0;
  double p_cost = 0.0;
  double p = 1.0;

  double wp() const {
    if (std::isinf(p)) return p_cost;
    if (p == 1.0) return p_cost;
    if (p == 2.0) return std::sqrt(p_cost);
    return std::pow(p_cost, 1.0 / p);
  }
};

/// Checks the sub-coupling marginal constraints: per-source outflow and
/// per-target inflow never exceed the corresponding atom mass.
inline bool feasible(const TransportPlan& plan, const DiscreteDistribution& mu,
                     const DiscreteDistribution& nu, double tol = kMassTolerance) {
  std::vector<double> out(mu.size(), 0.0), in(nu.size(), 0.0);
  double total = 0.0;
  for (const auto& e : plan.edges) {
    if (e.from >= mu.size() || e.to >= nu.size() || e.mass <= 0.0) return false;
    out[e.from] += e.mass;
    in[e.to] += e.mass;
    total += e.mass;
  }
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (out[i] > mu.mass(i) + tol) return false;
  for (std::size_t j = 0; j < nu.size(); ++j)
    if (in[j] > nu.mass(j) + tol) return false;
  return std::abs(total - plan.transported_mass) <= tol &&
         plan.transported_mass <= 1.0 + tol;
}

}  // namespace rpw
