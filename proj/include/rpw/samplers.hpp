#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "rpw/distribution.hpp"

namespace rpw {

/// Deterministic seed mixing (splitmix64) so derived seeds never collide in
/// practice and runs are reproducible.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t z = a * 0x9e3779b97f4a7c15ULL + b * 0xbf58476d1ce4e5b9ULL +
                    c * 0x94d049bb133111ebULL + 0x2545f4914f6cdd1dULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

enum class SamplerKind { two_point, grid4x4, uniform_square, custom };

inline SamplerKind sampler_kind_from_string(const std::string& s) {
  if (s == "two_point") return SamplerKind::two_point;
  if (s == "grid4x4") return SamplerKind::grid4x4;
  if (s == "uniform_square") return SamplerKind::uniform_square;
  throw std::invalid_argument("unknown distribution kind: " + s);
}

/// Source of i.i.d. samples for the convergence experiments. two_point is
/// two atoms at distance 1 with mass 1/2 each; grid4x4 is 16 atoms of mass
/// 1/16 on a 4x4 lattice scaled to unit diameter; uniform_square is the
/// continuous uniform distribution on [0,1]^2.
class SyntheticSampler {
 public:
  explicit SyntheticSampler(SamplerKind kind) : kind_(kind) {
    switch (kind_) {
      case SamplerKind::two_point:
        atoms_ = DiscreteDistribution::from_points({{0.0, 0.0}, {1.0, 0.0}}, {1.0, 1.0});
        break;
      case SamplerKind::grid4x4: {
        std::vector<std::vector<double>> pts;
        const double s = 1.0 / (3.0 * std::sqrt(2.0));  // lattice diameter 1
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j) pts.push_back({i * s, j * s});
        atoms_ = DiscreteDistribution::from_points(pts, std::vector<double>(16, 1.0));
        break;
      }
      case SamplerKind::uniform_square:
        break;
      case SamplerKind::custom:
        throw std::invalid_argument("custom sampler needs an explicit distribution");
    }
  }

  explicit SyntheticSampler(DiscreteDistribution atoms)
      : kind_(SamplerKind::custom), atoms_(std::move(atoms)) {}

  SamplerKind kind() const { return kind_; }
  std::size_t dimension() const { return kind_ == SamplerKind::uniform_square ? 2 : atoms_.dimension(); }

  /// Diameter of the metric space the samples live in.
  double ambient_diameter() const {
    if (kind_ == SamplerKind::uniform_square) return std::sqrt(2.0);
    return union_diameter(atoms_, atoms_);
  }

  /// The generating distribution (discrete kinds only).
  const DiscreteDistribution& truth() const {
    if (kind_ == SamplerKind::uniform_square)
      throw std::invalid_argument("uniform_square has no discrete truth");
    return atoms_;
  }

  /// Empirical distribution of n i.i.d. samples, mass 1/n each; duplicate
  /// sample locations are kept as separate atoms.
  DiscreteDistribution sample(std::size_t n, std::uint64_t seed) const {
    if (n == 0) throw std::invalid_argument("sample: n must be positive");
    std::mt19937_64 rng(seed);
    std::vector<double> coords;
    if (kind_ == SamplerKind::uniform_square) {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      coords.reserve(2 * n);
      for (std::size_t i = 0; i < n; ++i) {
        coords.push_back(u(rng));
        coords.push_back(u(rng));
      }
      return DiscreteDistribution::from_flat(std::move(coords),
                                             std::vector<double>(n, 1.0), 2);
    }
    // Inverse-CDF draw from the discrete atom list.
    std::vector<double> cdf(atoms_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      acc += atoms_.mass(i);
      cdf[i] = acc;
    }
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t dim = atoms_.dimension();
    coords.reserve(dim * n);
    for (std::size_t i = 0; i < n; ++i) {
      const double r = u(rng) * acc;
      std::size_t k = 0;
      while (k + 1 < cdf.size() && cdf[k] < r) ++k;
      const auto pt = atoms_.point(k);
      coords.insert(coords.end(), pt.begin(), pt.end());
    }
    return DiscreteDistribution::from_flat(std::move(coords), std::vector<double>(n, 1.0),
                                           dim);
  }

 private:
  SamplerKind kind_;
  DiscreteDistribution atoms_;
};

}  // namespace rpw
