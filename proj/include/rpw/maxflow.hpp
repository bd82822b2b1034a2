#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rpw/cost.hpp"
#include "rpw/distribution.hpp"
#include "rpw/transport_plan.hpp"

namespace rpw {

/// Guard for the p = inf machinery: the disc-graph sweep is quadratic in the
/// support sizes, so refuse instances whose bipartite graph would not fit a
/// desk-scale budget.
inline constexpr std::size_t kMaxDiscGraphEdges = 4'000'000;

namespace detail {

/// Dinic max-flow with double capacities.
class MaxFlowGraph {
 public:
  explicit MaxFlowGraph(int nodes) : head_(nodes, -1), level_(nodes), it_(nodes) {}

  void add_edge(int u, int v, double cap) {
    arcs_.push_back({v, head_[u], cap});
    head_[u] = static_cast<int>(arcs_.size()) - 1;
    arcs_.push_back({u, head_[v], 0.0});
    head_[v] = static_cast<int>(arcs_.size()) - 1;
  }

  double max_flow(int s, int t) {
    double total = 0.0;
    while (bfs(s, t)) {
      it_ = head_;
      while (true) {
        const double pushed = dfs(s, t, kInf);
        if (pushed <= kEps) break;
        total += pushed;
      }
    }
    return total;
  }

  /// Flow currently on the i-th added edge (in insertion order).
  double edge_flow(std::size_t i) const { return arcs_[2 * i + 1].cap; }

 private:
  static constexpr double kEps = 1e-12;
  static constexpr double kInf = std::numeric_limits<double>::max();

  struct Arc {
    int to;
    int next;
    double cap;
  };

  bool bfs(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    level_[s] = 0;
    std::vector<int> queue{s};
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const int u = queue[q];
      for (int a = head_[u]; a >= 0; a = arcs_[a].next)
        if (arcs_[a].cap > kEps && level_[arcs_[a].to] < 0) {
          level_[arcs_[a].to] = level_[u] + 1;
          queue.push_back(arcs_[a].to);
        }
    }
    return level_[t] >= 0;
  }

  double dfs(int u, int t, double limit) {
    if (u == t || limit <= kEps) return limit;
    for (int& a = it_[u]; a >= 0; a = arcs_[a].next) {
      Arc& arc = arcs_[a];
      if (arc.cap > kEps && level_[arc.to] == level_[u] + 1) {
        const double pushed = dfs(arc.to, t, std::min(limit, arc.cap));
        if (pushed > kEps) {
          arc.cap -= pushed;
          arcs_[a ^ 1].cap += pushed;
          return pushed;
        }
      }
    }
    level_[u] = -1;
    return 0.0;
  }

  std::vector<Arc> arcs_;
  std::vector<int> head_;
  std::vector<int> level_;
  std::vector<int> it_;
};

}  // namespace detail

/// Maximum total mass routable from mu to nu using only pairs at ground
/// distance <= delta (max-flow on the delta-disc graph).
inline double max_flow_disc(const DiscreteDistribution& mu, const DiscreteDistribution& nu,
                            const CostMatrix& cm, double delta) {
  if (delta < 0.0) throw std::invalid_argument("max_flow_disc: negative threshold");
  const std::size_t n = cm.rows(), m = cm.cols();
  if (n * m > kMaxDiscGraphEdges)
    throw std::invalid_argument("max_flow_disc: disc graph too large");
  detail::MaxFlowGraph g(static_cast<int>(n + m) + 2);
  const int src = static_cast<int>(n + m), snk = src + 1;
  for (std::size_t i = 0; i < n; ++i) g.add_edge(src, static_cast<int>(i), mu.mass(i));
  for (std::size_t j = 0; j < m; ++j) g.add_edge(static_cast<int>(n + j), snk, nu.mass(j));
  const double inf = std::numeric_limits<double>::max();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (cm(i, j) <= delta) g.add_edge(static_cast<int>(i), static_cast<int>(n + j), inf);
  return g.max_flow(src, snk);
}

/// Step function of the bottleneck (p = inf) transport problem: for each
/// candidate threshold delta among the distinct cost values, the maximum
/// transportable mass F(delta) on the delta-disc graph. W_{inf,alpha} is the
/// smallest threshold whose F reaches alpha.
struct BottleneckProfile {
  std::vector<double> thresholds;  // ascending, starts at 0
  std::vector<double> max_mass;    // F(thresholds[i]), nondecreasing

  double value_at_mass(double alpha, double tol = kMassTolerance) const {
    if (alpha <= tol) return 0.0;
    for (std::size_t i = 0; i < thresholds.size(); ++i)
      if (max_mass[i] >= alpha - tol) return thresholds[i];
    return thresholds.back();
  }

  /// W_{inf, 1-eps}.
  double value_at_eps(double eps) const { return value_at_mass(1.0 - eps); }
};

inline BottleneckProfile bottleneck_profile(const DiscreteDistribution& mu,
                                            const DiscreteDistribution& nu,
                                            const CostMatrix& cm) {
  BottleneckProfile out;
  for (double t : cm.distinct_costs()) {
    out.thresholds.push_back(t);
    out.max_mass.push_back(max_flow_disc(mu, nu, cm, t));
  }
  return out;
}

/// Partial transport plan with bottleneck semantics: routes alpha mass while
/// minimizing the largest used ground distance.
inline TransportPlan bottleneck_partial_plan(const DiscreteDistribution& mu,
                                             const DiscreteDistribution& nu,
                                             const CostMatrix& cm, double alpha) {
  const std::size_t n = cm.rows(), m = cm.cols();
  const auto costs = cm.distinct_costs();
  double threshold = costs.back();
  for (double t : costs)
    if (max_flow_disc(mu, nu, cm, t) >= alpha - kMassTolerance) {
      threshold = t;
      break;
    }
  // Budget node in front of the source caps the total flow at alpha.
  detail::MaxFlowGraph g(static_cast<int>(n + m) + 3);
  const int src = static_cast<int>(n + m), snk = src + 1, budget = src + 2;
  g.add_edge(budget, src, alpha);
  for (std::size_t i = 0; i < n; ++i) g.add_edge(src, static_cast<int>(i), mu.mass(i));
  for (std::size_t j = 0; j < m; ++j) g.add_edge(static_cast<int>(n + j), snk, nu.mass(j));
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  const double inf = std::numeric_limits<double>::max();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (cm(i, j) <= threshold) {
        pairs.emplace_back(i, j);
        g.add_edge(static_cast<int>(i), static_cast<int>(n + j), inf);
      }
  g.max_flow(budget, snk);

  TransportPlan plan;
  plan.p = kInfiniteP;
  double max_used = 0.0, total = 0.0;
  for (std::size_t e = 0; e < pairs.size(); ++e) {
    const double f = g.edge_flow(n + m + 1 + e);
    if (f > 1e-12) {
      plan.edges.push_back({pairs[e].first, pairs[e].second, f});
      max_used = std::max(max_used, cm(pairs[e].first, pairs[e].second));
      total += f;
    }
  }
  plan.transported_mass = total;
  plan.p_cost = max_used;
  return plan;
}

}  // namespace rpw
