#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "mmot/measures.hpp"

namespace mmot {

/// Value in [0, +inf] (or any real) with an exact, distinguished +inf.
/// Addition saturates at +inf.
class ExtReal {
 public:
  constexpr ExtReal() = default;
  constexpr ExtReal(double v) : value_(v) {}  // NOLINT(google-explicit-constructor)

  static constexpr ExtReal infinity() {
    ExtReal r;
    r.infinite_ = true;
    return r;
  }

  constexpr bool is_infinite() const noexcept { return infinite_; }
  constexpr bool is_finite() const noexcept { return !infinite_; }

  /// The finite value; +inf as IEEE infinity.
  constexpr double value() const noexcept {
    return infinite_ ? std::numeric_limits<double>::infinity() : value_;
  }

  friend constexpr ExtReal operator+(ExtReal a, ExtReal b) {
    if (a.infinite_ || b.infinite_) return infinity();
    return ExtReal(a.value_ + b.value_);
  }
  ExtReal& operator+=(ExtReal b) { return *this = *this + b; }

  friend constexpr bool operator==(ExtReal a, ExtReal b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }
  friend constexpr std::partial_ordering operator<=>(ExtReal a, ExtReal b) {
    return a.value() <=> b.value();
  }

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

inline constexpr double kCollisionTol = 1e-12;

/// Radial interaction l : (0, inf) -> (0, +inf], vanishing at infinity.
struct Kernel {
  std::string tag = "coulomb";
  std::function<double(double)> eval;
  /// Only the Coulomb kernel is checked against the theory; everything else
  /// is user-supplied.
  bool validated = false;

  /// l(r) with the collision convention: r < kCollisionTol gives +inf.
  ExtReal operator()(double r) const;

  static Kernel coulomb();
  /// r -> r^{-s}, s > 0 (unvalidated).
  static Kernel power(double s);
  /// Parses "coulomb" or "power:<s>". Throws InputError otherwise.
  static Kernel from_tag(const std::string& tag);
};

/// Sampled sanity check of the kernel invariants (positivity, decay).
/// Throws DomainError on violation.
void check_kernel(const Kernel& kernel);

/// l(|x - y|); 0 when either point is omega; +inf for coincident points.
ExtReal pair_cost(const Point& x, const Point& y, const Kernel& kernel);

/// c_k(x_1..x_k) = sum_{i<j} pair_cost(x_i, x_j). Zero for k = 1.
ExtReal c_k(std::span<const Point> points, const Kernel& kernel);

/// Compactified cost c~ on X^N; omega points contribute nothing.
ExtReal c_tilde(std::span<const Point> points, const Kernel& kernel);

/// All subsets of {0..n-1} of size <= max_size, ordered by size then
/// lexicographically. A subset S stands for the multiset S + omega^(N-|S|):
/// multisets repeating a finite atom have infinite cost and never appear.
std::vector<std::vector<int>> finite_subsets(int n, int max_size);

/// Number of subsets finite_subsets(n, max_size) would return (saturating).
std::size_t count_finite_subsets(int n, int max_size);

/// Dense symmetric matrix of pairwise kernel values over a point list.
/// Diagonal entries are +inf.
class PairTable {
 public:
  PairTable() = default;
  PairTable(std::span<const Point> points, const Kernel& kernel);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const {
    return table_[i * n_ + j];
  }
  /// c_|S|(S) for a set of distinct indices.
  double subset_cost(std::span<const int> subset) const;

 private:
  std::size_t n_ = 0;
  std::vector<double> table_;
};

}  // namespace mmot
