#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace mmot {

/// A location in R^d, or the point omega at infinity of the compactified
/// space X = R^d u {omega}.
class Point {
 public:
  explicit Point(std::vector<double> coords);

  static Point omega() { return Point(); }

  bool is_omega() const noexcept { return omega_; }
  std::size_t dim() const noexcept { return coords_.size(); }
  std::span<const double> coords() const noexcept { return coords_; }
  double operator[](std::size_t i) const { return coords_[i]; }

  friend bool operator==(const Point& a, const Point& b) {
    return a.omega_ == b.omega_ && a.coords_ == b.coords_;
  }

 private:
  Point() : omega_(true) {}

  std::vector<double> coords_;
  bool omega_ = false;
};

/// Euclidean distance between two finite points of the same dimension.
double distance(const Point& a, const Point& b);

inline constexpr double kSeparationTol = 1e-9;
inline constexpr double kMassSlack = 1e-12;

/// Finitely supported sub-probability measure on R^d.
///
/// Atoms closer than kSeparationTol are merged (weights added) and a warning
/// is recorded. Weights must be nonnegative and sum to at most 1 + kMassSlack.
/// Zero and tiny weights are kept as-is.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;
  explicit DiscreteMeasure(std::size_t dim) : dim_(dim) {}
  DiscreteMeasure(std::size_t dim, std::vector<Point> atoms,
                  std::vector<double> weights);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  bool empty() const noexcept { return atoms_.empty(); }

  const std::vector<Point>& atoms() const noexcept { return atoms_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const Point& atom(std::size_t i) const { return atoms_.at(i); }
  double weight(std::size_t i) const { return weights_.at(i); }

  double total_mass() const noexcept { return total_mass_; }

  /// Same atoms with every weight multiplied by `factor`; throws if the
  /// result leaves the sub-probability range.
  DiscreteMeasure scaled(double factor) const;

  /// Same atoms with replaced weights.
  DiscreteMeasure with_weights(std::vector<double> weights) const;

  const std::vector<std::string>& warnings() const noexcept {
    return warnings_;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<Point> atoms_;
  std::vector<double> weights_;
  double total_mass_ = 0.0;
  std::vector<std::string> warnings_;
};

/// rho~ = rho + (1 - ||rho||) delta_omega, a probability on X.
struct CompactifiedMeasure {
  DiscreteMeasure base;
  double omega_mass = 1.0;

  double total_mass() const { return base.total_mass() + omega_mass; }
  const DiscreteMeasure& drop_omega() const noexcept { return base; }
};

CompactifiedMeasure compactify(const DiscreteMeasure& rho);

/// K(rho): largest single-atom weight, 0 for the zero measure.
double concentration(const DiscreteMeasure& rho);

/// Trace of the covariance of rho / ||rho||. Throws DomainError on zero mass.
double variance(const DiscreteMeasure& rho);

inline constexpr std::size_t npos = static_cast<std::size_t>(-1);

/// Index of the atom within kSeparationTol of `p`, or npos.
std::size_t find_atom(const DiscreteMeasure& rho, const Point& p);

}  // namespace mmot
