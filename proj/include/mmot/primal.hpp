#pragma once

#include <string>
#include <vector>

#include "mmot/cost.hpp"
#include "mmot/lp.hpp"
#include "mmot/measures.hpp"

namespace mmot {

inline constexpr int kOmegaIndex = -1;

/// Mass on one size-N multiset of the compactified support. Finite atom
/// indices come first in ascending order, then kOmegaIndex for each omega.
struct PlanEntry {
  std::vector<int> multiset;
  double mass = 0.0;

  int finite_count() const;
};

/// Symmetric multi-marginal plan stored on multisets.
struct TransportPlan {
  int N = 0;
  std::vector<Point> support;  // finite atoms; omega is index -1
  bool compactified = false;   // true when every marginal is rho~
  bool certified = false;      // produced by a certified optimal LP solve
  std::vector<PlanEntry> entries;

  double total_mass() const;
  /// Marginal of the finite part: entry mass times multiplicity / N.
  std::vector<double> marginal() const;
};

/// rho = sum_k (k/N) rho_k, one layer per number of finite points.
struct Decomposition {
  int N = 0;
  std::vector<DiscreteMeasure> layers;  // layers[k-1] = rho_k
  std::vector<ExtReal> layer_costs;     // C_k(rho_k) from independent solves
  std::vector<double> stratum_costs;    // cost the plan itself pays per layer
  double omega_mass = 0.0;              // plan mass on the all-omega multiset
  bool certified = false;

  double total_layer_mass() const;
  ExtReal total_cost() const;
};

struct CostResult {
  ExtReal value;
  TransportPlan plan;
  std::string reason;  // why the value is +inf, empty otherwise
  lp::Solution lp;
};

/// LP over size-k subsets of mu's atoms with marginals mu (columns in
/// finite_subsets order restricted to size k).
lp::LinearProgram build_partial_lp(const DiscreteMeasure& mu, int k,
                                   const PairTable& costs);

/// Compactified LP: one column per subset S with |S| <= N standing for
/// S + omega^(N-|S|), one row per atom and one row for omega.
lp::LinearProgram build_relaxed_lp(const DiscreteMeasure& rho, int N,
                                   const PairTable& costs);

/// C_k(mu) and an optimal plan with all k marginals equal to mu.
CostResult partial_cost(const DiscreteMeasure& mu, int k, const Kernel& kernel,
                        const lp::Options& opts = {});

/// C-bar(rho) via the compactified N-marginal problem.
CostResult relaxed_cost(const DiscreteMeasure& rho, int N, const Kernel& kernel,
                        const lp::Options& opts = {});

/// Layers rho_k read off an N-marginal compactified plan.
Decomposition stratify(const DiscreteMeasure& rho, const TransportPlan& plan,
                       const Kernel& kernel, const lp::Options& opts = {});

/// Same value as relaxed_cost from exhaustive vertex enumeration of the
/// compactified LP. Throws TooLargeError when (K+1)^N > 1e6 or the basis
/// count is too large.
ExtReal brute_force_cost(const DiscreteMeasure& rho, int N, const Kernel& kernel);

}  // namespace mmot
