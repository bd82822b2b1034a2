#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <stdexcept>
#include <vector>

#include "rpw/cost.hpp"
#include "rpw/transport_plan.hpp"

namespace rpw {

/// One augmentation of the successive-shortest-path solver: `mass` units
/// pushed along a path of per-unit p-th-power cost `slope`. Slopes are
/// nondecreasing across augmentations, which makes the cumulative
/// (mass, cost) curve convex piecewise linear.
struct FlowStep {
  double mass = 0.0;
  double slope = 0.0;
};

/// Incremental min-cost-flow solver for the transportation problem between
/// two discrete distributions under p-th-power Euclidean costs (p < inf).
/// Shortest augmenting paths are found with Dijkstra on reduced costs and
/// node potentials; ties are broken by node index so runs are deterministic.
///
/// Driving advance() until exhaustion yields the full parametric cost curve;
/// stopping at a mass target yields an optimal partial plan for that mass.
class TransportSolver {
 public:
  TransportSolver(const DiscreteDistribution& mu, const DiscreteDistribution& nu,
                  const CostMatrix& cm)
      : n_(mu.size()), m_(nu.size()) {
    if (std::isinf(cm.p()))
      throw std::invalid_argument("TransportSolver: p = inf needs the bottleneck solver");
    if (cm.rows() != n_ || cm.cols() != m_)
      throw std::invalid_argument("TransportSolver: cost matrix shape mismatch");
    d_.resize(n_ * m_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < m_; ++j) d_[i * m_ + j] = cm.power(i, j);
    supply_.assign(mu.masses().begin(), mu.masses().end());
    demand_.assign(nu.masses().begin(), nu.masses().end());
    residual_supply_ = supply_;
    residual_demand_ = demand_;
    flow_.assign(n_ * m_, 0.0);
    pot_.assign(n_ + m_ + 2, 0.0);
    dist_.assign(n_ + m_ + 2, 0.0);
    parent_.assign(n_ + m_ + 2, -1);
    routable_ = 0.0;
    double sa = 0.0, sb = 0.0;
    for (double v : supply_) sa += v;
    for (double v : demand_) sb += v;
    routable_ = std::min(sa, sb);
    max_power_cost_ = 0.0;
    for (double v : d_) max_power_cost_ = std::max(max_power_cost_, v);
  }

  /// Pushes up to mass_cap along the next shortest augmenting path.
  /// Returns nullopt when no augmenting path remains or mass_cap <= 0.
  std::optional<FlowStep> advance(double mass_cap) {
    if (mass_cap <= 0.0) return std::nullopt;
    if (!dijkstra()) return std::nullopt;

    // Bottleneck along the path, clipped by the caller's mass budget.
    double push = mass_cap;
    for (int v = snk(); parent_[v] >= 0; v = parent_[v]) {
      const int u = parent_[v];
      push = std::min(push, residual_cap(u, v));
    }
    if (push <= kCapEps) return std::nullopt;
    for (int v = snk(); parent_[v] >= 0; v = parent_[v]) apply(parent_[v], v, push);

    total_mass_ += push;
    last_slope_ = pot_[snk()];
    total_cost_ += push * last_slope_;
    return FlowStep{push, last_slope_};
  }

  double total_mass() const { return total_mass_; }
  double total_cost() const { return total_cost_; }
  double last_slope() const { return last_slope_; }
  /// Total mass routable from mu to nu (min of the two total masses).
  double routable_mass() const { return routable_; }
  /// Largest per-unit p-th-power cost; any remaining mass can be routed at
  /// most at this rate, which upper-bounds the unexplored part of the curve.
  double max_power_cost() const { return max_power_cost_; }

  TransportPlan plan(double p) const {
    TransportPlan out;
    out.p = p;
    out.transported_mass = total_mass_;
    double cost = 0.0;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < m_; ++j) {
        const double f = flow_[i * m_ + j];
        if (f > kCapEps) {
          out.edges.push_back({i, j, f});
          cost += f * d_[i * m_ + j];
        }
      }
    out.p_cost = cost;
    return out;
  }

 private:
  static constexpr double kCapEps = 1e-14;
  static constexpr double kInf = std::numeric_limits<double>::max();

  int src() const { return static_cast<int>(n_ + m_); }
  int snk() const { return static_cast<int>(n_ + m_ + 1); }

  double residual_cap(int u, int v) const {
    if (u == src()) return residual_supply_[v];
    if (v == snk()) return residual_demand_[u - n_];
    if (u < static_cast<int>(n_)) return kInf;  // forward bipartite arc
    return flow_[static_cast<std::size_t>(v) * m_ + (u - n_)];
  }

  void apply(int u, int v, double amount) {
    if (u == src()) {
      residual_supply_[v] -= amount;
      if (residual_supply_[v] < kCapEps) residual_supply_[v] = 0.0;
    } else if (v == snk()) {
      residual_demand_[u - n_] -= amount;
      if (residual_demand_[u - n_] < kCapEps) residual_demand_[u - n_] = 0.0;
    } else if (u < static_cast<int>(n_)) {
      flow_[static_cast<std::size_t>(u) * m_ + (v - n_)] += amount;
    } else {
      double& f = flow_[static_cast<std::size_t>(v) * m_ + (u - n_)];
      f -= amount;
      if (f < kCapEps) f = 0.0;
    }
  }

  // Dijkstra over the residual graph with reduced costs. Returns false when
  // the sink is unreachable. On success updates potentials so that all
  // residual reduced costs stay non-negative and parent_ encodes the path.
  bool dijkstra() {
    const int N = static_cast<int>(n_ + m_) + 2;
    std::fill(dist_.begin(), dist_.end(), kInf);
    std::fill(parent_.begin(), parent_.end(), -1);
    std::vector<char> done(N, 0);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    dist_[src()] = 0.0;
    heap.push({0.0, src()});
    double dist_snk = kInf;
    while (!heap.empty()) {
      auto [du, u] = heap.top();
      heap.pop();
      if (done[u] || du > dist_[u]) continue;
      done[u] = 1;
      if (u == snk()) {
        dist_snk = du;
        break;
      }
      auto relax = [&](int v, double rc) {
        if (rc < 0.0) rc = 0.0;  // clamp fp roundoff
        const double nd = du + rc;
        if (nd < dist_[v]) {
          dist_[v] = nd;
          parent_[v] = u;
          heap.push({nd, v});
        }
      };
      if (u == src()) {
        for (std::size_t i = 0; i < n_; ++i)
          if (residual_supply_[i] > kCapEps) relax(static_cast<int>(i), pot_[src()] - pot_[i]);
      } else if (u < static_cast<int>(n_)) {
        const double pu = pot_[u];
        const double* row = d_.data() + static_cast<std::size_t>(u) * m_;
        for (std::size_t j = 0; j < m_; ++j)
          relax(static_cast<int>(n_ + j), row[j] + pu - pot_[n_ + j]);
      } else {
        // Right-side node. Arcs out of the sink are never needed: a shortest
        // source-sink path cannot revisit the sink, and the search stops the
        // moment the sink is popped.
        const std::size_t j = u - n_;
        if (residual_demand_[j] > kCapEps) relax(snk(), pot_[u] - pot_[snk()]);
        for (std::size_t i = 0; i < n_; ++i)
          if (flow_[i * m_ + j] > kCapEps)
            relax(static_cast<int>(i), -d_[i * m_ + j] + pot_[u] - pot_[i]);
      }
    }
    if (dist_snk == kInf) return false;
    for (int v = 0; v < N; ++v) pot_[v] += std::min(dist_[v], dist_snk);
    return true;
  }

  std::size_t n_, m_;
  std::vector<double> d_;  // p-th-power costs, row-major n x m
  std::vector<double> supply_, demand_;
  std::vector<double> residual_supply_, residual_demand_;
  std::vector<double> flow_;
  std::vector<double> pot_, dist_;
  std::vector<int> parent_;
  double total_mass_ = 0.0;
  double total_cost_ = 0.0;
  double last_slope_ = 0.0;
  double routable_ = 0.0;
  double max_power_cost_ = 0.0;
};

}  // namespace rpw
