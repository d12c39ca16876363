#pragma once

#include <span>
#include <string>
#include <vector>

#include "mmot/cost.hpp"
#include "mmot/lp.hpp"
#include "mmot/measures.hpp"
#include "mmot/primal.hpp"

namespace mmot {

/// Finite candidate set for the M_k suprema, with cached pair costs.
/// Omega is always an extra candidate (value 0, no interaction).
class Domain {
 public:
  Domain(std::vector<Point> points, const Kernel& kernel);

  std::size_t size() const noexcept { return points_.size(); }
  const std::vector<Point>& points() const noexcept { return points_; }
  const Kernel& kernel() const noexcept { return kernel_; }
  double cost(std::size_t i, std::size_t j) const { return table_(i, j); }
  const PairTable& table() const noexcept { return table_; }

 private:
  std::vector<Point> points_;
  Kernel kernel_;
  PairTable table_;
};

/// Potential on a finite point set plus its value at omega.
struct DualPotential {
  std::vector<Point> points;
  std::vector<double> values;
  double value_at_infinity = 0.0;
  bool certified = false;
};

/// Maximizer of an M_k problem: finite indices into the domain, omega fills
/// the remaining slots.
struct MkResult {
  double value = 0.0;
  std::vector<int> tuple;
};

/// M_k(phi) = max over size-k multisets of domain u {omega} of
/// (1/k) sum phi - c, with phi(omega) = 0. Exact branch and bound.
MkResult M_k(const Domain& dom, std::span<const double> phi, int k);

/// Same maximum with x_1 = anchor fixed; the other k-1 points range over
/// domain u {omega}.
MkResult anchored_max(const Domain& dom, std::span<const double> phi, int k,
                      int anchor);

/// anchored_max(dom, phi, k, a).value for every anchor a.
std::vector<double> anchored_profile(const Domain& dom, std::span<const double> phi,
                                     int k, unsigned workers = 1);

/// M_k(t * phi) for a scalar t, without materializing the scaled vector.
double M_k_scaled(const Domain& dom, std::span<const double> phi, int k, double t);

/// M_k(phi) for a potential with arbitrary value u(omega) = v:
/// v + M_k(phi - v).
double M_k(const DualPotential& phi, int k, const Kernel& kernel);

/// M_N(phi) - M_{N-1}((N-1) phi / N).
double delta_N(const Domain& dom, std::span<const double> phi, int N);

struct DualResult {
  ExtReal value;
  DualPotential potential;  // on rho's atoms, y_omega as value at infinity
  std::string reason;
  lp::Solution lp;
};

/// Finite dual LP on supp(rho) u {omega}:
/// max sum a_i y_i + (1 - |rho|) y_w  s.t.  (1/N)(sum_S y + (N-|S|) y_w) <= c(S).
lp::LinearProgram build_dual_lp(const DiscreteMeasure& rho, int N,
                                const PairTable& costs);

DualResult dual_lp(const DiscreteMeasure& rho, int N, const Kernel& kernel,
                   const lp::Options& opts = {});

/// I_N(phi) = int phi d rho - M_N(phi) for phi = u - u(omega).
double dual_objective(const DualPotential& u, const DiscreteMeasure& rho, int N,
                      const Kernel& kernel);

/// Indices of rho's atoms inside u's point list. Throws DomainError if an
/// atom is missing.
std::vector<std::size_t> locate_atoms(const DualPotential& u,
                                      const DiscreteMeasure& rho);

struct OptimalityReport {
  double mass_deficit = 0.0;             // 1 - sum |rho_k|
  double term_i = 0.0;                   // mass_deficit * M_N(phi)
  std::vector<double> term_ii;           // per-layer duality gap, k = 1..N
  std::vector<double> term_iii;          // |rho_k| (M_N - M_k(k phi/N)), k = 1..N
  std::vector<double> level_gap;         // M_N - M_k(k phi/N), k = 1..N
  double primal = 0.0;                   // sum_k C_k(rho_k)
  double dual = 0.0;                     // I_N(phi)
  bool mass_above_threshold = false;     // |rho| > 1/N
  bool pass_i = false;
  bool pass_ii = false;
  bool pass_iii = false;
  bool ok() const { return pass_i && pass_ii && pass_iii; }
};

/// The three nonnegative terms whose sum is C-bar(rho) - I_N(phi).
OptimalityReport check_optimality(const DiscreteMeasure& rho,
                                  const Decomposition& dec,
                                  const DualPotential& u, int N,
                                  const Kernel& kernel, double tol = 1e-6);

/// Pointwise max(u, 0), including the value at omega.
DualPotential positive_part(const DualPotential& u);

}  // namespace mmot
