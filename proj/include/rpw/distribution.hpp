#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

namespace rpw {

inline constexpr double kMassTolerance = 1e-9;

/// Grayscale intensity grid, row-major, intensities >= 0.
struct Image {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> pixels;

  double& at(std::size_t r, std::size_t c) { return pixels[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return pixels[r * cols + c]; }
};

/// A weighted point set in R^d with unit total mass. Immutable after
/// construction; duplicate support points are legal and kept as distinct
/// atoms.
class DiscreteDistribution {
 public:
  DiscreteDistribution() = default;

  /// Builds a distribution from explicit points and non-negative masses.
  /// Masses are rescaled to sum to 1.
  static DiscreteDistribution from_points(const std::vector<std::vector<double>>& points,
                                          const std::vector<double>& masses) {
    if (points.size() != masses.size())
      throw std::invalid_argument("from_points: points/masses length mismatch");
    if (points.empty()) throw std::invalid_argument("from_points: empty support");
    const std::size_t dim = points.front().size();
    if (dim == 0) throw std::invalid_argument("from_points: zero-dimensional points");
    std::vector<double> coords;
    coords.reserve(points.size() * dim);
    for (const auto& pt : points) {
      if (pt.size() != dim) throw std::invalid_argument("from_points: dimension mismatch");
      coords.insert(coords.end(), pt.begin(), pt.end());
    }
    return from_flat(std::move(coords), masses, dim);
  }

  /// Same as from_points but with flat row-major coordinates.
  static DiscreteDistribution from_flat(std::vector<double> coords, std::vector<double> masses,
                                        std::size_t dim) {
    if (dim == 0 || coords.size() != masses.size() * dim || masses.empty())
      throw std::invalid_argument("from_flat: inconsistent sizes");
    double sum = 0.0;
    for (double m : masses) {
      if (m < 0.0) throw std::invalid_argument("distribution: negative mass");
      sum += m;
    }
    if (sum <= 0.0) throw std::invalid_argument("distribution: total mass must be positive");
    for (double& m : masses) m /= sum;
    DiscreteDistribution d;
    d.coords_ = std::move(coords);
    d.masses_ = std::move(masses);
    d.dim_ = dim;
    return d;
  }

  /// Builds a distribution from a grayscale image: support points are pixel
  /// centers (row/s, col/s) with s = max(rows, cols), so the support fits in
  /// the unit square; mass at each pixel is proportional to its intensity.
  /// Zero-intensity pixels are omitted.
  static DiscreteDistribution from_image(const Image& img) {
    if (img.rows == 0 || img.cols == 0 || img.pixels.size() != img.rows * img.cols)
      throw std::invalid_argument("from_image: malformed image");
    const double s = static_cast<double>(std::max(img.rows, img.cols));
    std::vector<double> coords;
    std::vector<double> masses;
    for (std::size_t r = 0; r < img.rows; ++r)
      for (std::size_t c = 0; c < img.cols; ++c) {
        const double v = img.at(r, c);
        if (v < 0.0) throw std::invalid_argument("from_image: negative intensity");
        if (v == 0.0) continue;
        coords.push_back(static_cast<double>(r) / s);
        coords.push_back(static_cast<double>(c) / s);
        masses.push_back(v);
      }
    if (masses.empty()) throw std::invalid_argument("from_image: all-zero image");
    return from_flat(std::move(coords), std::move(masses), 2);
  }

  std::size_t size() const { return masses_.size(); }
  std::size_t dimension() const { return dim_; }
  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  double mass(std::size_t i) const { return masses_[i]; }
  const std::vector<double>& masses() const { return masses_; }
  const std::vector<double>& coords() const { return coords_; }

  double total_mass() const {
    double s = 0.0;
    for (double m : masses_) s += m;
    return s;
  }

  /// Merges atoms with exactly equal coordinates. The result represents the
  /// same distribution; every transport-based distance is unchanged.
  DiscreteDistribution coalesced() const {
    std::map<std::vector<double>, double> acc;
    for (std::size_t i = 0; i < size(); ++i) {
      auto pt = point(i);
      acc[std::vector<double>(pt.begin(), pt.end())] += masses_[i];
    }
    std::vector<double> coords, masses;
    coords.reserve(acc.size() * dim_);
    masses.reserve(acc.size());
    for (const auto& [pt, m] : acc) {
      coords.insert(coords.end(), pt.begin(), pt.end());
      masses.push_back(m);
    }
    return from_flat(std::move(coords), std::move(masses), dim_);
  }

 private:
  std::vector<double> coords_;
  std::vector<double> masses_;
  std::size_t dim_ = 0;
};

inline double euclidean(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

/// Contaminated mixture (1-delta)*base + delta*noise on the union support.
inline DiscreteDistribution mix(const DiscreteDistribution& base,
                                const DiscreteDistribution& noise, double delta) {
  if (base.dimension() != noise.dimension())
    throw std::invalid_argument("mix: dimension mismatch");
  if (delta < 0.0 || delta > 1.0) throw std::invalid_argument("mix: delta outside [0,1]");
  if (delta == 0.0) return base;
  if (delta == 1.0) return noise;
  std::vector<double> coords(base.coords());
  coords.insert(coords.end(), noise.coords().begin(), noise.coords().end());
  std::vector<double> masses;
  masses.reserve(base.size() + noise.size());
  for (double m : base.masses()) masses.push_back((1.0 - delta) * m);
  for (double m : noise.masses()) masses.push_back(delta * m);
  return DiscreteDistribution::from_flat(std::move(coords), std::move(masses),
                                         base.dimension());
}

/// Largest pairwise ground distance over the union of the given supports.
inline double union_diameter(std::span<const DiscreteDistribution* const> dists) {
  std::vector<std::span<const double>> pts;
  for (const auto* d : dists)
    for (std::size_t i = 0; i < d->size(); ++i) pts.push_back(d->point(i));
  double diam = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      diam = std::max(diam, euclidean(pts[i], pts[j]));
  return diam;
}

inline double union_diameter(const DiscreteDistribution& a, const DiscreteDistribution& b) {
  const DiscreteDistribution* arr[] = {&a, &b};
  return union_diameter(std::span<const DiscreteDistribution* const>(arr, 2));
}

}  // namespace rpw
