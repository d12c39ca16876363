#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mmot/cost.hpp"
#include "mmot/dual.hpp"
#include "mmot/lp.hpp"
#include "mmot/measures.hpp"

namespace mmot {

struct Box {
  std::vector<double> lo, hi;
};

/// Values on a uniform box grid (row-major, last axis fastest) plus u(omega).
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(Box box, std::vector<int> shape, std::vector<double> values,
               double value_at_infinity = 0.0);

  static GridFunction sample(const Box& box, const std::vector<int>& shape,
                             const std::function<double(const Point&)>& f,
                             double value_at_infinity = 0.0);

  std::size_t dim() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept { return values_.size(); }
  const Box& box() const noexcept { return box_; }
  const std::vector<int>& shape() const noexcept { return shape_; }
  const std::vector<double>& values() const noexcept { return values_; }
  double value_at_infinity() const noexcept { return value_at_infinity_; }
  double operator[](std::size_t i) const { return values_[i]; }

  double spacing(std::size_t axis) const;
  Point node(std::size_t flat) const;
  std::vector<Point> nodes() const;
  /// Flat index of the node within kSeparationTol of p, or npos.
  std::size_t find_node(const Point& p) const;

  /// max |u(a) - u(b)| / |a - b| over axis-neighbour node pairs.
  double lipschitz() const;

  GridFunction with_values(std::vector<double> values, double value_at_infinity) const;
  DualPotential as_potential() const;

 private:
  Box box_;
  std::vector<int> shape_;
  std::vector<double> values_;
  double value_at_infinity_ = 0.0;
};

/// Grid nodes with cached pair costs.
Domain grid_domain(const GridFunction& g, const Kernel& kernel);

/// [M_N phi](x): x_1 = x fixed, the others range over grid u {omega}.
/// value_at_infinity = M_{N-1}((N-1) phi / N). phi(omega) must be 0.
GridFunction M_N_profile(const GridFunction& phi, const Domain& dom, int N,
                         unsigned workers = 0);
GridFunction M_N_profile(const GridFunction& phi, int N, const Kernel& kernel);

/// phi + N (M_{N-1}((N-1) phi / N) - [M_N phi]).
GridFunction hat(const GridFunction& phi, const Domain& dom, int N, unsigned workers = 0);
GridFunction hat(const GridFunction& phi, int N, const Kernel& kernel);

/// The infimum form: inf over partners of N c - sum phi, plus
/// N M_{N-1}((N-1) phi / N). Exhaustive over partners; for cross-checks.
GridFunction hat_by_infimum(const GridFunction& phi, const Domain& dom, int N);

/// 16 (N-1) (1 + (N-1) R)^2 / (9 N).
double gamma_N(double R, int N);

struct IterateOptions {
  double tol = 1e-6;          // on Delta_N
  double residual_tol = 1e-6; // on max |u_hat - u|
  int max_iters = 500;
  double check_tol = 1e-9;    // per-step identities
  double R = 0.0;             // bound on phi0; 0 means sup phi0
  unsigned workers = 0;
};

struct TraceRow {
  int iteration = 0;
  double I_N = 0.0;
  double delta_N = 0.0;
  double sup_u = 0.0;
  double M_N = 0.0;
  double residual = 0.0;      // max |u_hat - u|
  double eps = 0.0;           // sum of delta_N from this step on (filled after the run)
};

struct IterateResult {
  GridFunction psi;           // u_+, vanishing at omega
  GridFunction admissible;    // psi - M_N(psi), the dual potential form
  std::vector<TraceRow> trace;
  bool converged = false;
  double R = 0.0;
  double lipschitz = 0.0;     // discrete constant of psi
  double lipschitz_bound = 0.0;  // gamma_N(N R)
  // Largest violations of the per-step guarantees (<= 0 means satisfied).
  double energy_violation = 0.0;
  double identity_violation = 0.0;
  double bounds_violation = 0.0;   // also the v_n monotonicity defect
  double uniform_violation = 0.0;
  double summability_violation = 0.0;
  bool checks_ok(double tol) const;
};

/// Node weights of rho on g's grid. Throws DomainError for off-grid atoms.
std::vector<double> grid_weights(const DiscreteMeasure& rho, const GridFunction& g);

/// The regularizing fixed-point iteration u_{n+1} = u_hat_n / N + (N-1) u_n / N.
/// Stops when Delta_N(u_n) < tol and max |u_hat_n - u_n| < residual_tol.
IterateResult iterate_potential(const DiscreteMeasure& rho, const GridFunction& phi0,
                                int N, const Kernel& kernel,
                                const IterateOptions& opts = {});

struct InitialPotential {
  GridFunction phi0;
  double R = 0.0;
  std::string R_source;   // "step1" or "fallback"
  double cbar = 0.0;      // dual LP value on supp(rho)
};

/// Dual-LP potential (y - y_omega)_+ on rho's nodes, clamped to [0, R], zero
/// elsewhere. R = N (C((1+d) rho) - (1+d) C(rho)) / d with d = delta when
/// (1+d) rho is admissible with finite cost, else N sup phi.
InitialPotential initial_potential(const DiscreteMeasure& rho, const Box& box,
                                   const std::vector<int>& shape, int N,
                                   const Kernel& kernel, double delta = 0.1,
                                   const lp::Options& lp_opts = {});

struct AdmissibilityReport {
  double max_violation = 0.0;  // max (1/N) sum psi - c~, over checked tuples
  std::vector<int> worst;      // finite node indices of the worst tuple
  std::size_t tuples_checked = 0;
  bool exhaustive = false;
  bool admissible(double tol) const { return max_violation <= tol; }
};

/// Enumerates every multiset of grid u {omega} when the count fits
/// sample_budget, else takes the exact maximum by branch and bound.
AdmissibilityReport check_admissible(const GridFunction& psi, int N,
                                     const Kernel& kernel,
                                     std::size_t sample_budget = 5'000'000);

/// max(psi, lambda); requires lambda <= psi(omega).
GridFunction truncate_at_infinity(const GridFunction& psi, double lambda);

}  // namespace mmot
