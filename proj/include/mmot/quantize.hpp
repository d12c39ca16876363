#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmot/cost.hpp"
#include "mmot/dual.hpp"
#include "mmot/measures.hpp"
#include "mmot/potential.hpp"

namespace mmot {

/// Exact k/N, kept reduced.
struct Rational {
  long num = 0;
  long den = 1;
  static Rational of(long num, long den);
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;
  friend bool operator==(const Rational&, const Rational&) = default;
};

struct QuantizeOptions {
  double gap_tol = 1e-8;
  bool cross_check = true;   // relaxed_cost on the witness
};

struct MinimizeResult {
  double value = 0.0;             // -M_N(V)
  DiscreteMeasure witness;        // (1/N) sum of deltas over the maximizing tuple
  std::vector<int> tuple;
  double check_value = 0.0;       // C-bar(witness) - int V d witness, when cross-checked
  bool checked = false;
};

/// min over sub-probabilities of C-bar(rho) - int V d rho on the domain.
/// V vanishes at omega.
MinimizeResult minimize(const Domain& dom, std::span<const double> V, int N,
                        const QuantizeOptions& opts = {});

struct QuantizationReport {
  int N = 0;
  int k_N = 0;
  Rational minimal_mass;
  std::vector<double> ladder;     // M_k(k V / N), k = 0..N
  double min_value = 0.0;         // -M_N(V)
  DiscreteMeasure witness;        // mass k_N / N
  std::vector<int> witness_tuple;
  double witness_value = 0.0;     // C-bar(witness) - int V d witness
  bool witness_checked = false;
  bool strict_gap = false;
  double top_gap = 0.0;           // ladder[N] - ladder[N-1]
  bool ladder_monotone = true;
  std::optional<double> beta;     // finite-radius surrogate
  bool beta_fast = false;         // beta > N (N-1)
  std::optional<double> t_star;   // N^2 / (4 R sup V)
};

QuantizationReport k_N(const Domain& dom, std::span<const double> V, int N,
                       const QuantizeOptions& opts = {});
/// Grid version; also fills beta (outer shells) and t_star.
QuantizationReport k_N(const GridFunction& V, int N, const Kernel& kernel,
                       const QuantizeOptions& opts = {});

struct StrictGap {
  bool strict = false;
  double gap = 0.0;
  std::vector<int> tuple;         // an M_N maximizer, N finite points when strict
};

StrictGap strict_gap(const Domain& dom, std::span<const double> V, int N,
                     double gap_tol = 1e-8);

struct SweepRow {
  double Z = 0.0;
  int k_N = 0;
  Rational mass;
  double min_value = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  bool monotone = true;
  std::vector<std::size_t> drops;     // rows where the mass went down
  std::optional<double> t_estimate;   // first Z after which every row has mass 1
};

/// k_N(Z V) for every Z; Z_grid must be ascending and positive.
SweepResult charge_sweep(const Domain& dom, std::span<const double> V, int N,
                         const std::vector<double>& Z_grid,
                         const QuantizeOptions& opts = {}, unsigned workers = 0);

/// N^2 / (4 R sup V).
double nonexistence_bound(double sup_V, double R_support, int N);
/// Radius of the origin-centred ball holding every node where V > 0.
double support_radius(const GridFunction& V);

struct BetaEstimate {
  double beta = 0.0;
  double radius = 0.0;     // shell where the max was seen
  bool fast = false;       // beta > N (N-1)
};

/// max over shells ||x| - r| <= h/2 of |x| V(x).
BetaEstimate beta_estimate(const GridFunction& V, const std::vector<double>& radii, int N);
/// Radii 3/4, 7/8, 1 of the largest origin-centred ball inside the box.
std::vector<double> outer_shells(const Box& box);

}  // namespace mmot
