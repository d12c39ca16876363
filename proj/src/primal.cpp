#include "mmot/primal.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "mmot/errors.hpp"

namespace mmot {

namespace {

// Entries below this are treated as structural zeros of the simplex output.
constexpr double kPlanZero = 1e-15;

std::vector<int> to_multiset(const std::vector<int>& subset, int N) {
  std::vector<int> m(subset);
  m.resize(static_cast<std::size_t>(N), kOmegaIndex);
  return m;
}

TransportPlan plan_from_columns(const DiscreteMeasure& mu, int N,
                                const std::vector<std::vector<int>>& cols,
                                const lp::Solution& sol, bool compactified) {
  TransportPlan plan;
  plan.N = N;
  plan.support = mu.atoms();
  plan.compactified = compactified;
  plan.certified = sol.status == lp::Status::optimal && sol.certificate.ok;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const double m = sol.x[j];
    if (m > kPlanZero) plan.entries.push_back({to_multiset(cols[j], N), m});
  }
  return plan;
}

void require_ok(const lp::Solution& sol, const char* what) {
  if (sol.status == lp::Status::iteration_limit ||
      sol.status == lp::Status::numerical_failure) {
    throw NumericalError(std::string(what) + ": LP " + lp::to_string(sol.status));
  }
  if (sol.status == lp::Status::unbounded) {
    throw NumericalError(std::string(what) + ": LP reported unbounded");
  }
}

std::vector<std::vector<int>> subsets_of_size(int n, int k) {
  std::vector<std::vector<int>> out;
  for (auto& s : finite_subsets(n, k)) {
    if (static_cast<int>(s.size()) == k) out.push_back(std::move(s));
  }
  return out;
}

constexpr std::size_t kMaxColumns = 1'000'000;

}  // namespace

int PlanEntry::finite_count() const {
  return static_cast<int>(std::count_if(multiset.begin(), multiset.end(),
                                        [](int i) { return i != kOmegaIndex; }));
}

double TransportPlan::total_mass() const {
  double s = 0.0;
  for (const auto& e : entries) s += e.mass;
  return s;
}

std::vector<double> TransportPlan::marginal() const {
  std::vector<double> m(support.size(), 0.0);
  for (const auto& e : entries) {
    for (int i : e.multiset) {
      if (i != kOmegaIndex) m[static_cast<std::size_t>(i)] += e.mass / N;
    }
  }
  return m;
}

double Decomposition::total_layer_mass() const {
  double s = 0.0;
  for (const auto& l : layers) s += l.total_mass();
  return s;
}

ExtReal Decomposition::total_cost() const {
  ExtReal s(0.0);
  for (const auto& c : layer_costs) s += c;
  return s;
}

lp::LinearProgram build_partial_lp(const DiscreteMeasure& mu, int k,
                                   const PairTable& costs) {
  const int K = static_cast<int>(mu.size());
  const auto cols = subsets_of_size(K, k);
  lp::LinearProgram prog(cols.size(), lp::Sense::minimize);
  for (std::size_t j = 0; j < cols.size(); ++j) {
    prog.objective()[j] = costs.subset_cost(cols[j]);
  }
  std::vector<double> row(cols.size());
  for (int i = 0; i < K; ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      row[j] = std::binary_search(cols[j].begin(), cols[j].end(), i) ? 1.0 / k : 0.0;
    }
    prog.add_row(row, lp::RowSense::eq, mu.weight(static_cast<std::size_t>(i)));
  }
  return prog;
}

lp::LinearProgram build_relaxed_lp(const DiscreteMeasure& rho, int N,
                                   const PairTable& costs) {
  const int K = static_cast<int>(rho.size());
  const auto cols = finite_subsets(K, N);
  lp::LinearProgram prog(cols.size(), lp::Sense::minimize);
  for (std::size_t j = 0; j < cols.size(); ++j) {
    prog.objective()[j] = costs.subset_cost(cols[j]);
  }
  std::vector<double> row(cols.size());
  for (int i = 0; i < K; ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      row[j] = std::binary_search(cols[j].begin(), cols[j].end(), i) ? 1.0 / N : 0.0;
    }
    prog.add_row(row, lp::RowSense::eq, rho.weight(static_cast<std::size_t>(i)));
  }
  for (std::size_t j = 0; j < cols.size(); ++j) {
    row[j] = static_cast<double>(N - static_cast<int>(cols[j].size())) / N;
  }
  prog.add_row(row, lp::RowSense::eq, compactify(rho).omega_mass);
  return prog;
}

CostResult partial_cost(const DiscreteMeasure& mu, int k, const Kernel& kernel,
                        const lp::Options& opts) {
  if (k < 1) throw DomainError("partial_cost needs k >= 1");
  CostResult res;
  res.plan.N = k;
  res.plan.support = mu.atoms();
  if (k == 1) {
    // No interaction for a single electron: the plan is mu itself.
    res.value = ExtReal(0.0);
    res.plan.certified = true;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      if (mu.weight(i) > 0.0) res.plan.entries.push_back({{static_cast<int>(i)}, mu.weight(i)});
    }
    return res;
  }
  const int K = static_cast<int>(mu.size());
  if (count_finite_subsets(K, k) > kMaxColumns) {
    throw TooLargeError("partial_cost: too many multisets");
  }
  const PairTable costs(mu.atoms(), kernel);
  const auto prog = build_partial_lp(mu, k, costs);
  if (prog.num_vars() == 0) {
    if (mu.total_mass() == 0.0) {
      res.value = ExtReal(0.0);
      res.plan.certified = true;
    } else {
      res.value = ExtReal::infinity();
      res.reason = "fewer than k distinct atoms carry the mass";
    }
    return res;
  }
  res.lp = lp::solve(prog, opts);
  if (res.lp.status == lp::Status::infeasible) {
    res.value = ExtReal::infinity();
    res.reason = "marginals force a repeated atom (some weight exceeds mass/k)";
    return res;
  }
  require_ok(res.lp, "partial_cost");
  res.value = ExtReal(res.lp.objective);
  res.plan = plan_from_columns(mu, k, subsets_of_size(K, k), res.lp, false);
  return res;
}

CostResult relaxed_cost(const DiscreteMeasure& rho, int N, const Kernel& kernel,
                        const lp::Options& opts) {
  if (N < 2) throw DomainError("relaxed_cost needs N >= 2");
  const int K = static_cast<int>(rho.size());
  if (count_finite_subsets(K, N) > kMaxColumns) {
    throw TooLargeError("relaxed_cost: too many multisets");
  }
  const PairTable costs(rho.atoms(), kernel);
  const auto prog = build_relaxed_lp(rho, N, costs);
  CostResult res;
  res.lp = lp::solve(prog, opts);
  if (res.lp.status == lp::Status::infeasible) {
    res.value = ExtReal::infinity();
    res.plan.N = N;
    res.plan.support = rho.atoms();
    res.plan.compactified = true;
    res.reason = "an atom heavier than 1/N forces self-interaction";
    return res;
  }
  require_ok(res.lp, "relaxed_cost");
  res.value = ExtReal(res.lp.objective);
  res.plan = plan_from_columns(rho, N, finite_subsets(K, N), res.lp, true);
  return res;
}

Decomposition stratify(const DiscreteMeasure& rho, const TransportPlan& plan,
                       const Kernel& kernel, const lp::Options& opts) {
  if (plan.N < 1 || !plan.compactified) {
    throw DomainError("stratify needs a compactified N-marginal plan");
  }
  if (plan.support != rho.atoms()) throw DomainError("plan support differs from rho");
  const auto marg = plan.marginal();
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (std::abs(marg[i] - rho.weight(i)) > 1e-7) {
      throw DomainError("plan marginal does not match rho at atom " + std::to_string(i));
    }
  }
  const int N = plan.N;
  const PairTable costs(rho.atoms(), kernel);
  std::vector<std::vector<double>> w(static_cast<std::size_t>(N),
                                     std::vector<double>(rho.size(), 0.0));
  Decomposition d;
  d.N = N;
  d.stratum_costs.assign(static_cast<std::size_t>(N), 0.0);
  for (const auto& e : plan.entries) {
    if (static_cast<int>(e.multiset.size()) != N) {
      throw DomainError("plan entry is not a size-N multiset");
    }
    const int k = e.finite_count();
    if (k == 0) {
      d.omega_mass += e.mass;
      continue;
    }
    const std::vector<int> finite(e.multiset.begin(), e.multiset.begin() + k);
    for (int i : finite) w[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(i)] += e.mass / k;
    d.stratum_costs[static_cast<std::size_t>(k - 1)] += e.mass * costs.subset_cost(finite);
  }
  for (int k = 1; k <= N; ++k) {
    DiscreteMeasure layer = rho.with_weights(w[static_cast<std::size_t>(k - 1)]);
    d.layer_costs.push_back(partial_cost(layer, k, kernel, opts).value);
    d.layers.push_back(std::move(layer));
  }
  d.certified = plan.certified;
  return d;
}

ExtReal brute_force_cost(const DiscreteMeasure& rho, int N, const Kernel& kernel) {
  if (N < 2) throw DomainError("brute_force_cost needs N >= 2");
  const int K = static_cast<int>(rho.size());
  if (std::pow(static_cast<double>(K + 1), N) > 1e6) {
    throw TooLargeError("brute_force_cost: (K+1)^N exceeds 1e6");
  }
  for (double a : rho.weights()) {
    if (a > 1.0 / N + 1e-12) return ExtReal::infinity();
  }
  const auto cols = finite_subsets(K, N);
  const PairTable costs(rho.atoms(), kernel);
  const int m = K + 1;
  const int n = static_cast<int>(cols.size());

  // C(n, m), refused past a few million bases.
  double bases = 1.0;
  for (int i = 0; i < m; ++i) bases = bases * (n - i) / (i + 1);
  if (bases > 5e6) throw TooLargeError("brute_force_cost: too many bases");

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, n);
  Eigen::VectorXd c(n), b(m);
  for (int j = 0; j < n; ++j) {
    for (int i : cols[static_cast<std::size_t>(j)]) A(i, j) = 1.0 / N;
    A(K, j) = static_cast<double>(N - static_cast<int>(cols[static_cast<std::size_t>(j)].size())) / N;
    c(j) = costs.subset_cost(cols[static_cast<std::size_t>(j)]);
  }
  for (int i = 0; i < K; ++i) b(i) = rho.weight(static_cast<std::size_t>(i));
  b(K) = compactify(rho).omega_mass;

  double best = std::numeric_limits<double>::infinity();
  std::vector<int> pick(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) pick[static_cast<std::size_t>(i)] = i;
  Eigen::MatrixXd B(m, m);
  while (true) {
    for (int i = 0; i < m; ++i) B.col(i) = A.col(pick[static_cast<std::size_t>(i)]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
    lu.setThreshold(1e-12);
    if (lu.isInvertible()) {
      const Eigen::VectorXd x = lu.solve(b);
      if (x.minCoeff() >= -1e-11 && (B * x - b).cwiseAbs().maxCoeff() <= 1e-10) {
        double v = 0.0;
        for (int i = 0; i < m; ++i) v += c(pick[static_cast<std::size_t>(i)]) * std::max(0.0, x(i));
        best = std::min(best, v);
      }
    }
    // Next combination in lexicographic order.
    int i = m - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == n - m + i) --i;
    if (i < 0) break;
    ++pick[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < m; ++j) pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
  }
  if (std::isinf(best)) return ExtReal::infinity();
  return ExtReal(best);
}

}  // namespace mmot
