#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rpw/flow.hpp"
#include "rpw/maxflow.hpp"

namespace rpw {

/// Convex piecewise-linear curve of minimal p-th-power transport cost versus
/// transported mass. Breakpoint k stores the cheapest total cost of moving
/// mass[k] units; value_at takes the p-th root, which is the partial
/// p-Wasserstein distance at that mass.
struct OTProfile {
  std::vector<double> mass;  // mass[0] = 0, strictly increasing
  std::vector<double> cost;  // cost[0] = 0, convex in mass
  double p = 1.0;

  double max_mass() const { return mass.back(); }

  double power_cost_at(double alpha) const {
    if (alpha <= mass.front()) return 0.0;
    if (alpha >= mass.back()) return cost.back();
    // Breakpoint counts are small; linear scan keeps this exact and simple.
    std::size_t k = 1;
    while (mass[k] < alpha) ++k;
    const double t = (alpha - mass[k - 1]) / (mass[k] - mass[k - 1]);
    return cost[k - 1] + t * (cost[k] - cost[k - 1]);
  }

  /// W_{p, alpha}: the p-th root of the interpolated power cost.
  double value_at(double alpha) const {
    const double c = power_cost_at(alpha);
    if (p == 1.0) return c;
    if (p == 2.0) return std::sqrt(c);
    return std::pow(c, 1.0 / p);
  }

  std::size_t segments() const { return mass.size() - 1; }
};

namespace detail {

/// Appends one solver step to a breakpoint list, merging segments whose
/// slopes agree to rounding.
inline void append_step(std::vector<double>& mass, std::vector<double>& cost,
                        const FlowStep& step) {
  const double new_mass = mass.back() + step.mass;
  const double new_cost = cost.back() + step.mass * step.slope;
  if (mass.size() >= 2) {
    const double prev_slope =
        (cost.back() - cost[cost.size() - 2]) / (mass.back() - mass[mass.size() - 2]);
    if (std::abs(step.slope - prev_slope) <= 1e-12 * std::max(1.0, std::abs(prev_slope))) {
      mass.back() = new_mass;
      cost.back() = new_cost;
      return;
    }
  }
  mass.push_back(new_mass);
  cost.push_back(new_cost);
}

}  // namespace detail

/// Exact OT-profile via successive shortest paths: every augmenting path is
/// one linear segment of the curve.
inline OTProfile ot_profile(const DiscreteDistribution& mu, const DiscreteDistribution& nu,
                            const CostMatrix& cm) {
  if (std::isinf(cm.p()))
    throw std::invalid_argument("ot_profile: p = inf; use bottleneck_profile");
  TransportSolver solver(mu, nu, cm);
  OTProfile prof;
  prof.p = cm.p();
  prof.mass = {0.0};
  prof.cost = {0.0};
  while (auto step = solver.advance(std::numeric_limits<double>::max()))
    detail::append_step(prof.mass, prof.cost, *step);
  return prof;
}

/// Optimal partial transport plan moving alpha mass. For p < inf this runs
/// the min-cost solver until alpha mass is routed (equivalently, a dummy
/// sink absorbs the remaining 1-alpha mass at zero cost); for p = inf it is
/// a threshold max-flow.
inline TransportPlan partial_ot(const DiscreteDistribution& mu, const DiscreteDistribution& nu,
                                const CostMatrix& cm, double alpha) {
  if (alpha < 0.0 || alpha > 1.0 + kMassTolerance)
    throw std::invalid_argument("partial_ot: alpha outside [0,1]");
  if (std::isinf(cm.p())) return bottleneck_partial_plan(mu, nu, cm, alpha);
  TransportSolver solver(mu, nu, cm);
  const double target = std::min(alpha, solver.routable_mass());
  while (solver.total_mass() < target - 1e-15) {
    if (!solver.advance(target - solver.total_mass())) break;
  }
  return solver.plan(cm.p());
}

}  // namespace rpw
