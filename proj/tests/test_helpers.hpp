#pragma once

#include <random>
#include <vector>

#include "rpw/cost.hpp"
#include "rpw/distribution.hpp"

namespace testutil {

using rpw::DiscreteDistribution;

/// Random distribution: n atoms uniform in [0,1]^d, masses ~ U(0.05, 1)
/// normalized.
inline DiscreteDistribution random_distribution(std::mt19937_64& rng, std::size_t n,
                                                std::size_t d) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> w(0.05, 1.0);
  std::vector<double> coords(n * d), masses(n);
  for (double& c : coords) c = u(rng);
  for (double& m : masses) m = w(rng);
  return DiscreteDistribution::from_flat(std::move(coords), std::move(masses), d);
}

/// Random distribution with small-integer (rational) masses.
inline DiscreteDistribution random_rational_distribution(std::mt19937_64& rng, std::size_t n,
                                                         std::size_t d) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> w(1, 9);
  std::vector<double> coords(n * d), masses(n);
  for (double& c : coords) c = u(rng);
  for (double& m : masses) m = w(rng);
  return DiscreteDistribution::from_flat(std::move(coords), std::move(masses), d);
}

/// Pair of distributions sharing `shared` exact support locations, so TV and
/// zero-cost transport are non-trivial.
inline std::pair<DiscreteDistribution, DiscreteDistribution> random_overlapping_pair(
    std::mt19937_64& rng, std::size_t n, std::size_t m, std::size_t d, std::size_t shared) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> w(0.05, 1.0);
  std::vector<double> common(shared * d);
  for (double& c : common) c = u(rng);
  auto build = [&](std::size_t total) {
    std::vector<double> coords, masses;
    for (std::size_t i = 0; i < total; ++i) {
      if (i < shared) {
        coords.insert(coords.end(), common.begin() + i * d, common.begin() + (i + 1) * d);
      } else {
        for (std::size_t c = 0; c < d; ++c) coords.push_back(u(rng));
      }
      masses.push_back(w(rng));
    }
    return DiscreteDistribution::from_flat(std::move(coords), std::move(masses), d);
  };
  return {build(n), build(m)};
}

/// The running 2x2 fixture: mu = {a: 0.5, b: 0.5}, nu = {a: 0.4, b: 0.6}
/// with c(a, b) = 1.
inline std::pair<DiscreteDistribution, DiscreteDistribution> overlap_fixture() {
  auto mu = DiscreteDistribution::from_points({{0.0}, {1.0}}, {0.5, 0.5});
  auto nu = DiscreteDistribution::from_points({{0.0}, {1.0}}, {0.4, 0.6});
  return {mu, nu};
}

/// The outlier fixture: mu = delta_x, nu = 0.99 delta_x + 0.01 delta_y with
/// c(x, y) = 1.
inline std::pair<DiscreteDistribution, DiscreteDistribution> outlier_fixture() {
  auto mu = DiscreteDistribution::from_points({{0.0}}, {1.0});
  auto nu = DiscreteDistribution::from_points({{0.0}, {1.0}}, {0.99, 0.01});
  return {mu, nu};
}

}  // namespace testutil
