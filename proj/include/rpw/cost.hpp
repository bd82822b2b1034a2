#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rpw/distribution.hpp"

namespace rpw {

inline constexpr double kInfiniteP = std::numeric_limits<double>::infinity();

/// Pairwise ground distances between the supports of two distributions,
/// together with the exponent p. The p-th-power view c(a,b)^p is what the
/// transport solvers minimize for p < inf; for p = inf the raw distances are
/// used with bottleneck semantics.
class CostMatrix {
 public:
  CostMatrix() = default;

  CostMatrix(std::size_t rows, std::size_t cols, std::vector<double> distances, double p)
      : rows_(rows), cols_(cols), c_(std::move(distances)), p_(p) {
    if (c_.size() != rows_ * cols_) throw std::invalid_argument("CostMatrix: size mismatch");
    if (!(p >= 1.0)) throw std::invalid_argument("CostMatrix: p must be >= 1");
    for (double v : c_)
      if (v < 0.0) throw std::invalid_argument("CostMatrix: negative distance");
    diameter_ = c_.empty() ? 0.0 : *std::max_element(c_.begin(), c_.end());
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t i, std::size_t j) const { return c_[i * cols_ + j]; }

  /// c(i,j)^p; only meaningful for p < inf.
  double power(std::size_t i, std::size_t j) const { return power_of((*this)(i, j)); }

  double power_of(double c) const {
    if (p_ == 1.0) return c;
    if (p_ == 2.0) return c * c;
    return std::pow(c, p_);
  }

  double p() const { return p_; }
  double diameter() const { return diameter_; }
  bool degenerate() const { return diameter_ == 0.0; }

  /// Product of all scale factors divided out so far; multiplying entries by
  /// scale() recovers the original ground distances.
  double scale() const { return scale_; }

  /// True when every entry fits a unit-diameter metric space.
  bool unit_diameter(double tol = kMassTolerance) const { return diameter_ <= 1.0 + tol; }

  /// Divides all entries by the matrix maximum so the diameter becomes 1.
  /// A diameter-0 matrix is returned unchanged with the degenerate flag set
  /// (it already is: degenerate() keys off the zero diameter).
  CostMatrix normalized() const { return normalized_by(diameter_); }

  /// Divides all entries by a known ambient diameter (the diameter of the
  /// metric space the supports live in, which may exceed the observed
  /// matrix maximum).
  CostMatrix normalized_by(double ambient_diameter) const {
    if (ambient_diameter < 0.0)
      throw std::invalid_argument("CostMatrix: negative ambient diameter");
    CostMatrix out = *this;
    if (ambient_diameter == 0.0) return out;
    if (diameter_ > ambient_diameter * (1.0 + kMassTolerance))
      throw std::invalid_argument("CostMatrix: entry exceeds ambient diameter");
    for (double& v : out.c_) v /= ambient_diameter;
    out.diameter_ = diameter_ / ambient_diameter;
    out.scale_ = scale_ * ambient_diameter;
    return out;
  }

  CostMatrix with_exponent(double p) const {
    CostMatrix out = *this;
    if (!(p >= 1.0)) throw std::invalid_argument("CostMatrix: p must be >= 1");
    out.p_ = p;
    return out;
  }

  /// Sorted distinct ground-distance values, always including 0.
  std::vector<double> distinct_costs() const {
    std::vector<double> v(c_);
    v.push_back(0.0);
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> c_;
  double p_ = 1.0;
  double diameter_ = 0.0;
  double scale_ = 1.0;
};

/// Euclidean ground distances between the supports of mu and nu.
inline CostMatrix cost_matrix(const DiscreteDistribution& mu, const DiscreteDistribution& nu,
                              double p) {
  if (mu.dimension() != nu.dimension())
    throw std::invalid_argument("cost_matrix: dimension mismatch");
  std::vector<double> c(mu.size() * nu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const auto a = mu.point(i);
    for (std::size_t j = 0; j < nu.size(); ++j) c[i * nu.size() + j] = euclidean(a, nu.point(j));
  }
  return CostMatrix(mu.size(), nu.size(), std::move(c), p);
}

}  // namespace rpw
