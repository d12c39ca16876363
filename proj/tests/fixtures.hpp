#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "mmot/measures.hpp"

namespace fixtures {

using mmot::DiscreteMeasure;
using mmot::Point;

// Three points in R^3 at mutual distance 1.
inline std::vector<Point> unit_triangle() {
  const double s = 1.0 / std::sqrt(2.0);
  return {Point({s, 0, 0}), Point({0, s, 0}), Point({0, 0, s})};
}

inline DiscreteMeasure triangle_measure(double a1, double a2, double a3) {
  return DiscreteMeasure(3, unit_triangle(), {a1, a2, a3});
}

inline DiscreteMeasure line_measure(const std::vector<double>& xs,
                                    const std::vector<double>& ws) {
  std::vector<Point> pts;
  for (double x : xs) pts.emplace_back(std::vector<double>{x});
  return DiscreteMeasure(1, pts, ws);
}

inline std::vector<Point> line_points(const std::vector<double>& xs) {
  std::vector<Point> pts;
  for (double x : xs) pts.emplace_back(std::vector<double>{x});
  return pts;
}

inline std::vector<Point> random_points(std::mt19937_64& rng, int count, int dim,
                                        double spread = 2.0) {
  std::uniform_real_distribution<double> u(-spread, spread);
  std::vector<Point> pts;
  while (static_cast<int>(pts.size()) < count) {
    std::vector<double> c(static_cast<std::size_t>(dim));
    for (double& x : c) x = u(rng);
    Point p(c);
    bool far = true;
    for (const auto& q : pts) far = far && mmot::distance(p, q) > 0.05;
    if (far) pts.push_back(p);
  }
  return pts;
}

// Random weights with a prescribed total; Dirichlet(1,...,1) split.
inline std::vector<double> random_weights(std::mt19937_64& rng, int count,
                                          double total) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(static_cast<std::size_t>(count));
  double s = 0.0;
  for (double& x : w) s += (x = e(rng));
  for (double& x : w) x *= total / s;
  return w;
}

struct Instance {
  DiscreteMeasure rho;
  int N = 2;
};

// <= 5 atoms, d <= 3, N in {2,3,4}, total mass uniform in (0, 1).
inline Instance random_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> atoms(1, 5), dim(1, 3), n(2, 4);
  std::uniform_real_distribution<double> mass(0.05, 1.0);
  const int K = atoms(rng), d = dim(rng), N = n(rng);
  auto pts = random_points(rng, K, d);
  auto w = random_weights(rng, K, mass(rng));
  return {DiscreteMeasure(static_cast<std::size_t>(d), pts, w), N};
}

// As above but every atom at most 1/N, so the cost is finite.
inline Instance random_finite_instance(std::mt19937_64& rng, int max_atoms = 5) {
  std::uniform_int_distribution<int> dim(1, 3), n(2, 4);
  const int N = n(rng);
  std::uniform_int_distribution<int> atoms(1, max_atoms);
  const int K = atoms(rng), d = dim(rng);
  std::uniform_real_distribution<double> mass(0.0, std::min(1.0, static_cast<double>(K) / N));
  auto pts = random_points(rng, K, d);
  std::vector<double> w;
  do {
    w = random_weights(rng, K, mass(rng));
  } while (*std::max_element(w.begin(), w.end()) > 1.0 / N);
  return {DiscreteMeasure(static_cast<std::size_t>(d), pts, w), N};
}

}  // namespace fixtures
