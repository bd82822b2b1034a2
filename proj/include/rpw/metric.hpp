#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "rpw/exact_ot.hpp"

namespace rpw {

enum class RPWMethod { profile_intersection, binary_search, approx_profile };

inline const char* to_string(RPWMethod m) {
  switch (m) {
    case RPWMethod::profile_intersection: return "profile_intersection";
    case RPWMethod::binary_search: return "binary_search";
    case RPWMethod::approx_profile: return "approx_profile";
  }
  return "?";
}

/// The robust partial Wasserstein distance: the smallest eps >= 0 with
/// W_{p,1-eps} <= k*eps, together with the crossing point of the OT-profile
/// and the line y = k(1-x).
struct RPWResult {
  double epsilon = 0.0;
  double x_star = 1.0;
  double y_star = 0.0;
  double p = 1.0;
  double k = 0.0;
  RPWMethod method = RPWMethod::profile_intersection;
};

/// Total variation distance: mass left over after all co-located mass
/// cancels. Atoms match only on exactly equal coordinates.
inline double total_variation(const DiscreteDistribution& mu, const DiscreteDistribution& nu) {
  if (mu.dimension() != nu.dimension())
    throw std::invalid_argument("total_variation: dimension mismatch");
  std::map<std::vector<double>, double> nu_at;
  for (std::size_t j = 0; j < nu.size(); ++j) {
    auto pt = nu.point(j);
    nu_at[std::vector<double>(pt.begin(), pt.end())] += nu.mass(j);
  }
  std::map<std::vector<double>, double> mu_at;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    auto pt = mu.point(i);
    mu_at[std::vector<double>(pt.begin(), pt.end())] += mu.mass(i);
  }
  double tv = 0.0;
  for (const auto& [pt, m] : mu_at) {
    const auto it = nu_at.find(pt);
    const double other = it == nu_at.end() ? 0.0 : it->second;
    tv += std::max(0.0, m - other);
  }
  return tv;
}

namespace detail {

/// Solves (A - s*eps)^{1/p} = k*eps on [lo, hi]. The left side is
/// nonincreasing and the right side strictly increasing (k > 0), so the root
/// is unique; closed forms cover p in {1,2}, bisection the rest.
inline double solve_segment(double A, double s, double k, double p, double lo, double hi) {
  double eps;
  if (p == 1.0) {
    eps = A / (s + k);
  } else if (p == 2.0) {
    eps = (-s + std::sqrt(s * s + 4.0 * k * k * A)) / (2.0 * k * k);
  } else {
    double a = lo, b = hi;
    for (int it = 0; it < 200 && b - a > 1e-12; ++it) {
      const double mid = 0.5 * (a + b);
      const double lhs = std::pow(std::max(0.0, A - s * mid), 1.0 / p);
      (lhs <= k * mid ? b : a) = mid;
    }
    eps = b;
  }
  return std::min(std::max(eps, lo), hi);
}

inline RPWResult make_result(double eps, double p, double k, RPWMethod method) {
  RPWResult r;
  r.epsilon = eps;
  r.x_star = 1.0 - eps;
  r.y_star = k * eps;
  r.p = p;
  r.k = k;
  r.method = method;
  return r;
}

inline void check_rpw_inputs(const CostMatrix& cm, double k) {
  if (k < 0.0) throw std::invalid_argument("rpw: k must be >= 0");
  if (!cm.unit_diameter() && !cm.degenerate())
    throw std::invalid_argument("rpw: cost matrix not normalized to unit diameter");
}

/// Crossing of a bottleneck step function with the line y = k*eps, solved by
/// bisection on the feasibility predicate W_{inf,1-eps} <= k*eps.
inline double bottleneck_crossing(const BottleneckProfile& B, double k) {
  double lo = 0.0, hi = 1.0;
  if (B.value_at_mass(1.0) <= 0.0) return 0.0;
  for (int it = 0; it < 80 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    (B.value_at_eps(mid) <= k * mid ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace detail

/// Exact (p,k)-RPW via the OT-profile: runs the incremental solver until the
/// profile crosses the line y = k(1-x) and solves the crossing segment.
/// k = 0 and degenerate (diameter-0) inputs reduce to total variation.
inline RPWResult rpw_distance(const DiscreteDistribution& mu, const DiscreteDistribution& nu,
                              const CostMatrix& cm, double k) {
  detail::check_rpw_inputs(cm, k);
  const double p = cm.p();
  if (k == 0.0 || cm.degenerate())
    return detail::make_result(total_variation(mu, nu), p, k, RPWMethod::profile_intersection);

  if (std::isinf(p)) {
    const auto B = bottleneck_profile(mu, nu, cm);
    return detail::make_result(detail::bottleneck_crossing(B, k), p, k,
                               RPWMethod::profile_intersection);
  }

  TransportSolver solver(mu, nu, cm);
  double alpha_prev = 0.0, cost_prev = 0.0;
  while (auto step = solver.advance(std::numeric_limits<double>::max())) {
    const double alpha = solver.total_mass();
    const double cost = solver.total_cost();
    const double w = cm.p() == 1.0 ? cost : (cm.p() == 2.0 ? std::sqrt(cost) : std::pow(cost, 1.0 / p));
    if (w > k * (1.0 - alpha)) {
      // Crossing lies in this segment: eps in [1-alpha, 1-alpha_prev].
      const double s = step->slope;
      const double A = cost_prev + s * (1.0 - alpha_prev);
      const double eps =
          detail::solve_segment(A, s, k, p, std::max(0.0, 1.0 - alpha), 1.0 - alpha_prev);
      return detail::make_result(eps, p, k, RPWMethod::profile_intersection);
    }
    alpha_prev = alpha;
    cost_prev = cost;
  }
  // Profile exhausted while still feasible: the crossing sits at its end.
  return detail::make_result(std::max(0.0, 1.0 - alpha_prev), p, k,
                             RPWMethod::profile_intersection);
}

/// Exact crossing of an already-computed profile with y = k(1-x).
inline RPWResult rpw_from_profile(const OTProfile& prof, double k) {
  if (k < 0.0) throw std::invalid_argument("rpw: k must be >= 0");
  const double p = prof.p;
  if (k == 0.0) {
    // Smallest eps with zero partial cost: one minus the zero-cost mass.
    double zero_mass = 0.0;
    for (std::size_t i = 0; i < prof.mass.size(); ++i)
      if (prof.cost[i] <= 0.0) zero_mass = prof.mass[i];
    return detail::make_result(std::max(0.0, 1.0 - zero_mass), p, k,
                               RPWMethod::profile_intersection);
  }
  for (std::size_t t = 1; t < prof.mass.size(); ++t) {
    const double alpha = prof.mass[t];
    const double w = prof.value_at(alpha);
    if (w > k * (1.0 - alpha)) {
      const double s = (prof.cost[t] - prof.cost[t - 1]) / (prof.mass[t] - prof.mass[t - 1]);
      const double A = prof.cost[t - 1] + s * (1.0 - prof.mass[t - 1]);
      const double eps = detail::solve_segment(A, s, k, p, std::max(0.0, 1.0 - alpha),
                                               1.0 - prof.mass[t - 1]);
      return detail::make_result(eps, p, k, RPWMethod::profile_intersection);
    }
  }
  return detail::make_result(std::max(0.0, 1.0 - prof.max_mass()), p, k,
                             RPWMethod::profile_intersection);
}

/// The guessing loop: halve the step each round, moving toward the crossing
/// as witnessed by one partial transport solve per step, until the step size
/// drops to delta. The answer is within delta of the exact distance.
inline RPWResult rpw_binary_search(const DiscreteDistribution& mu,
                                   const DiscreteDistribution& nu, const CostMatrix& cm,
                                   double k, double delta) {
  detail::check_rpw_inputs(cm, k);
  if (delta <= 0.0 || delta > 0.5) throw std::invalid_argument("rpw_binary_search: delta outside (0, 0.5]");
  if (k == 0.0 || cm.degenerate())
    return detail::make_result(total_variation(mu, nu), cm.p(), k, RPWMethod::binary_search);
  double guess = 0.5;
  double step = 0.25;  // 2^{-(i+1)} at i = 1
  for (int i = 1; std::ldexp(1.0, -i) > delta; ++i) {
    const double w = partial_ot(mu, nu, cm, 1.0 - guess).wp();
    guess += (w <= k * guess) ? -step : step;
    step *= 0.5;
  }
  return detail::make_result(guess, cm.p(), k, RPWMethod::binary_search);
}

/// delta-close (p,k)-RPW from a truncated profile: the solver stops as soon
/// as the optimistic (last-slope) and pessimistic (diameter-rate) extensions
/// of the computed prefix pin the crossing within delta. Always returns a
/// value in [exact, exact + delta].
inline RPWResult rpw_approx(const DiscreteDistribution& mu, const DiscreteDistribution& nu,
                            const CostMatrix& cm, double k, double delta) {
  detail::check_rpw_inputs(cm, k);
  if (k == 0.0) throw std::invalid_argument("rpw_approx: k must be > 0");
  if (delta <= 0.0) throw std::invalid_argument("rpw_approx: delta must be > 0");
  const double p = cm.p();
  if (std::isinf(p)) throw std::invalid_argument("rpw_approx: p = inf unsupported");
  if (cm.degenerate())
    return detail::make_result(total_variation(mu, nu), p, k, RPWMethod::approx_profile);

  TransportSolver solver(mu, nu, cm);
  const double rate_up = solver.max_power_cost();
  double alpha_prev = 0.0, cost_prev = 0.0;
  while (auto step = solver.advance(std::numeric_limits<double>::max())) {
    const double alpha = solver.total_mass();
    const double cost = solver.total_cost();
    const double w = p == 2.0 ? std::sqrt(cost) : (p == 1.0 ? cost : std::pow(cost, 1.0 / p));
    if (w > k * (1.0 - alpha)) {
      // Crossing inside the computed prefix: exact.
      const double s = step->slope;
      const double A = cost_prev + s * (1.0 - alpha_prev);
      const double eps =
          detail::solve_segment(A, s, k, p, std::max(0.0, 1.0 - alpha), 1.0 - alpha_prev);
      return detail::make_result(eps, p, k, RPWMethod::approx_profile);
    }
    // Bracket the crossing between the two extensions of the prefix.
    const double hi = 1.0 - alpha;
    const double A_up = cost + rate_up * (1.0 - alpha);
    const double eps_up = detail::solve_segment(A_up, rate_up, k, p, 0.0, hi);
    const double A_lo = cost + step->slope * (1.0 - alpha);
    const double eps_lo = detail::solve_segment(A_lo, step->slope, k, p, 0.0, hi);
    if (eps_up - eps_lo <= delta)
      return detail::make_result(eps_up, p, k, RPWMethod::approx_profile);
    alpha_prev = alpha;
    cost_prev = cost;
  }
  return detail::make_result(std::max(0.0, 1.0 - alpha_prev), p, k, RPWMethod::approx_profile);
}

/// p-Wasserstein distance: full-mass transport cost.
inline double wasserstein(const DiscreteDistribution& mu, const DiscreteDistribution& nu,
                          const CostMatrix& cm) {
  if (std::isinf(cm.p())) {
    const auto B = bottleneck_profile(mu, nu, cm);
    return B.value_at_mass(1.0);
  }
  TransportSolver solver(mu, nu, cm);
  while (solver.advance(std::numeric_limits<double>::max())) {
  }
  const double c = solver.total_cost();
  if (cm.p() == 1.0) return c;
  if (cm.p() == 2.0) return std::sqrt(c);
  return std::pow(c, 1.0 / cm.p());
}

/// Levy-Prokhorov distance, computed twice: as the bottleneck-profile
/// crossing at (p = inf, k = 1) and as a direct scan over the thresholds.
/// The two routes must agree to 1e-7.
inline double levy_prokhorov(const DiscreteDistribution& mu, const DiscreteDistribution& nu,
                             const CostMatrix& cm) {
  if (!cm.unit_diameter() && !cm.degenerate())
    throw std::invalid_argument("levy_prokhorov: cost matrix not normalized");
  const auto B = bottleneck_profile(mu, nu, cm);
  const double via_crossing = detail::bottleneck_crossing(B, 1.0);
  double via_scan = 1.0;
  for (std::size_t j = 0; j < B.thresholds.size(); ++j)
    via_scan = std::min(via_scan, std::max(B.thresholds[j], 1.0 - B.max_mass[j]));
  if (std::abs(via_crossing - via_scan) > 1e-7)
    throw std::runtime_error("levy_prokhorov: computation paths disagree");
  return via_scan;
}

/// Parameter bundle naming one distance function, as used by the experiment
/// and retrieval harnesses and the CLI.
struct MetricSpec {
  enum class Kind { wasserstein, total_variation, levy_prokhorov, rpw };
  enum class Mode { profile, binary_search, approx };

  Kind kind = Kind::rpw;
  Mode mode = Mode::profile;
  double p = 2.0;
  double k = 1.0;
  double delta = 1e-3;

  std::string name() const {
    char buf[64];
    switch (kind) {
      case Kind::total_variation: return "tv";
      case Kind::levy_prokhorov: return "lp";
      case Kind::wasserstein:
        if (std::isinf(p)) return "winf";
        std::snprintf(buf, sizeof buf, "w%g", p);
        return buf;
      case Kind::rpw:
        if (std::isinf(p))
          std::snprintf(buf, sizeof buf, "rpw(inf,%g)", k);
        else
          std::snprintf(buf, sizeof buf, "rpw(%g,%g)", p, k);
        return buf;
    }
    return "?";
  }

  /// Accepts "tv", "lp", "w<p>", "winf", and "rpw(<p>,<k>)".
  static MetricSpec parse(const std::string& text) {
    MetricSpec s;
    if (text == "tv") {
      s.kind = Kind::total_variation;
      return s;
    }
    if (text == "lp") {
      s.kind = Kind::levy_prokhorov;
      s.p = kInfiniteP;
      return s;
    }
    auto parse_p = [](const std::string& t) -> double {
      if (t == "inf") return kInfiniteP;
      std::size_t used = 0;
      const double v = std::stod(t, &used);
      if (used != t.size() || !(v >= 1.0)) throw std::invalid_argument("bad exponent: " + t);
      return v;
    };
    if (text.rfind("w", 0) == 0 && text.find('(') == std::string::npos) {
      s.kind = Kind::wasserstein;
      s.p = parse_p(text.substr(1));
      return s;
    }
    if (text.rfind("rpw(", 0) == 0 && text.back() == ')') {
      const std::string inner = text.substr(4, text.size() - 5);
      const auto comma = inner.find(',');
      if (comma == std::string::npos) throw std::invalid_argument("bad metric: " + text);
      s.kind = Kind::rpw;
      s.p = parse_p(inner.substr(0, comma));
      s.k = std::stod(inner.substr(comma + 1));
      if (s.k < 0.0) throw std::invalid_argument("bad metric: " + text);
      return s;
    }
    throw std::invalid_argument("unknown metric: " + text);
  }
};

/// Evaluates one metric on a pair of distributions. ambient_diameter > 0
/// normalizes ground distances by that known diameter; 0 normalizes by the
/// observed matrix maximum.
inline double evaluate_metric(const MetricSpec& spec, const DiscreteDistribution& mu,
                              const DiscreteDistribution& nu, double ambient_diameter = 0.0) {
  if (spec.kind == MetricSpec::Kind::total_variation) return total_variation(mu, nu);
  CostMatrix cm = cost_matrix(mu, nu, spec.kind == MetricSpec::Kind::levy_prokhorov
                                          ? kInfiniteP
                                          : spec.p);
  cm = ambient_diameter > 0.0 ? cm.normalized_by(ambient_diameter) : cm.normalized();
  switch (spec.kind) {
    case MetricSpec::Kind::wasserstein: return wasserstein(mu, nu, cm);
    case MetricSpec::Kind::levy_prokhorov: return levy_prokhorov(mu, nu, cm);
    case MetricSpec::Kind::rpw:
      switch (spec.mode) {
        case MetricSpec::Mode::profile: return rpw_distance(mu, nu, cm, spec.k).epsilon;
        case MetricSpec::Mode::binary_search:
          return rpw_binary_search(mu, nu, cm, spec.k, spec.delta).epsilon;
        case MetricSpec::Mode::approx: return rpw_approx(mu, nu, cm, spec.k, spec.delta).epsilon;
      }
      break;
    case MetricSpec::Kind::total_variation: break;  // handled above
  }
  throw std::logic_error("evaluate_metric: unhandled spec");
}

}  // namespace rpw
