#include "mmot/dual.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mmot/errors.hpp"
#include "mmot/parallel.hpp"

namespace mmot {

Domain::Domain(std::vector<Point> points, const Kernel& kernel)
    : points_(std::move(points)), kernel_(kernel), table_(points_, kernel) {}

namespace {

// Branch and bound over subsets of the candidates with positive value; the
// candidates are visited in decreasing order of phi so that the bound
// "current + best remaining values" only shrinks along a level.
class Search {
 public:
  Search(const Domain& dom, std::span<const double> phi, int k, double t)
      : dom_(dom), k_(k) {
    if (phi.size() != dom.size()) throw DomainError("potential/domain size mismatch");
    for (std::size_t i = 0; i < phi.size(); ++i) {
      if (!std::isfinite(phi[i])) throw DomainError("potential must be finite");
      if (t * phi[i] > 0.0) cand_.push_back(static_cast<int>(i));
    }
    std::stable_sort(cand_.begin(), cand_.end(),
                     [&](int a, int b) { return phi[static_cast<std::size_t>(a)] > phi[static_cast<std::size_t>(b)]; });
    val_.resize(cand_.size());
    prefix_.assign(cand_.size() + 1, 0.0);
    for (std::size_t p = 0; p < cand_.size(); ++p) {
      val_[p] = t * phi[static_cast<std::size_t>(cand_[p])] / k;
      prefix_[p + 1] = prefix_[p] + val_[p];
    }
    own_.resize(phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) own_[i] = t * phi[i] / k;
  }

  MkResult run(int anchor) {
    chosen_.clear();
    anchor_ = anchor;
    double cur = 0.0;
    int slots = k_;
    if (anchor >= 0) {
      chosen_.push_back(anchor);
      cur = own_[static_cast<std::size_t>(anchor)];
      --slots;
    }
    best_value_ = cur;
    best_ = chosen_;
    if (slots > 0) dfs(0, slots, cur);
    return {best_value_, best_};
  }

 private:
  void dfs(std::size_t pos, int slots, double cur) {
    for (std::size_t p = pos; p < cand_.size(); ++p) {
      const std::size_t end = std::min(cand_.size(), p + static_cast<std::size_t>(slots));
      if (cur + (prefix_[end] - prefix_[p]) <= best_value_) return;
      const int j = cand_[p];
      if (j == anchor_) continue;
      double gain = val_[p];
      for (int i : chosen_) gain -= dom_.cost(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      const double nv = cur + gain;
      chosen_.push_back(j);
      if (nv > best_value_) {
        best_value_ = nv;
        best_ = chosen_;
      }
      if (slots > 1) dfs(p + 1, slots - 1, nv);
      chosen_.pop_back();
    }
  }

  const Domain& dom_;
  int k_;
  int anchor_ = -1;
  std::vector<int> cand_;
  std::vector<double> val_, prefix_, own_;
  std::vector<int> chosen_, best_;
  double best_value_ = 0.0;
};

}  // namespace

MkResult M_k(const Domain& dom, std::span<const double> phi, int k) {
  if (k < 1) throw DomainError("M_k needs k >= 1");
  return Search(dom, phi, k, 1.0).run(-1);
}

MkResult anchored_max(const Domain& dom, std::span<const double> phi, int k,
                      int anchor) {
  if (k < 1) throw DomainError("M_k needs k >= 1");
  if (anchor < 0 || static_cast<std::size_t>(anchor) >= dom.size()) {
    throw DomainError("anchor outside the domain");
  }
  return Search(dom, phi, k, 1.0).run(anchor);
}

std::vector<double> anchored_profile(const Domain& dom, std::span<const double> phi,
                                     int k, unsigned workers) {
  if (k < 1) throw DomainError("M_k needs k >= 1");
  const std::size_t n = dom.size();
  std::vector<double> out(n);
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  parallel_for(workers, workers, [&](std::size_t w) {
    Search s(dom, phi, k, 1.0);
    for (std::size_t a = w; a < n; a += workers) out[a] = s.run(static_cast<int>(a)).value;
  });
  return out;
}

double M_k_scaled(const Domain& dom, std::span<const double> phi, int k, double t) {
  if (k < 1) throw DomainError("M_k needs k >= 1");
  return Search(dom, phi, k, t).run(-1).value;
}

double M_k(const DualPotential& phi, int k, const Kernel& kernel) {
  const Domain dom(phi.points, kernel);
  std::vector<double> shifted(phi.values);
  for (double& v : shifted) v -= phi.value_at_infinity;
  return phi.value_at_infinity + M_k(dom, shifted, k).value;
}

double delta_N(const Domain& dom, std::span<const double> phi, int N) {
  if (N < 2) throw DomainError("delta_N needs N >= 2");
  return M_k(dom, phi, N).value -
         M_k_scaled(dom, phi, N - 1, static_cast<double>(N - 1) / N);
}

lp::LinearProgram build_dual_lp(const DiscreteMeasure& rho, int N,
                                const PairTable& costs) {
  const int K = static_cast<int>(rho.size());
  lp::LinearProgram prog(static_cast<std::size_t>(K) + 1, lp::Sense::maximize);
  for (int i = 0; i < K; ++i) {
    prog.objective()[static_cast<std::size_t>(i)] = rho.weight(static_cast<std::size_t>(i));
    prog.set_free(static_cast<std::size_t>(i));
  }
  prog.objective()[static_cast<std::size_t>(K)] = compactify(rho).omega_mass;
  prog.set_free(static_cast<std::size_t>(K));
  std::vector<double> row(static_cast<std::size_t>(K) + 1);
  for (const auto& s : finite_subsets(K, N)) {
    std::fill(row.begin(), row.end(), 0.0);
    for (int i : s) row[static_cast<std::size_t>(i)] = 1.0 / N;
    row[static_cast<std::size_t>(K)] = static_cast<double>(N - static_cast<int>(s.size())) / N;
    prog.add_row(row, lp::RowSense::le, costs.subset_cost(s));
  }
  return prog;
}

DualResult dual_lp(const DiscreteMeasure& rho, int N, const Kernel& kernel,
                   const lp::Options& opts) {
  if (N < 2) throw DomainError("dual_lp needs N >= 2");
  const int K = static_cast<int>(rho.size());
  if (count_finite_subsets(K, N) > 1'000'000) {
    throw TooLargeError("dual_lp: too many multiset constraints");
  }
  const PairTable costs(rho.atoms(), kernel);
  DualResult res;
  res.potential.points = rho.atoms();
  res.lp = lp::solve(build_dual_lp(rho, N, costs), opts);
  switch (res.lp.status) {
    case lp::Status::optimal:
      break;
    case lp::Status::unbounded:
    case lp::Status::infeasible:
      res.value = ExtReal::infinity();
      res.reason = "dual unbounded: an atom heavier than 1/N forces self-interaction";
      return res;
    default:
      throw NumericalError("dual_lp: LP " + lp::to_string(res.lp.status));
  }
  res.value = ExtReal(res.lp.objective);
  res.potential.values.assign(res.lp.x.begin(), res.lp.x.begin() + K);
  res.potential.value_at_infinity = res.lp.x[static_cast<std::size_t>(K)];
  res.potential.certified = res.lp.certificate.ok;
  return res;
}

std::vector<std::size_t> locate_atoms(const DualPotential& u,
                                      const DiscreteMeasure& rho) {
  std::vector<std::size_t> idx(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) {
    std::size_t found = npos;
    for (std::size_t j = 0; j < u.points.size(); ++j) {
      if (u.points[j].dim() == rho.atom(i).dim() &&
          distance(u.points[j], rho.atom(i)) <= kSeparationTol) {
        found = j;
        break;
      }
    }
    if (found == npos) {
      throw DomainError("atom " + std::to_string(i) + " is not in the potential's domain");
    }
    idx[i] = found;
  }
  return idx;
}

double dual_objective(const DualPotential& u, const DiscreteMeasure& rho, int N,
                      const Kernel& kernel) {
  if (N < 2) throw DomainError("dual_objective needs N >= 2");
  const auto idx = locate_atoms(u, rho);
  std::vector<double> phi(u.values);
  for (double& v : phi) v -= u.value_at_infinity;
  double integral = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) integral += rho.weight(i) * phi[idx[i]];
  const Domain dom(u.points, kernel);
  return integral - M_k(dom, phi, N).value;
}

OptimalityReport check_optimality(const DiscreteMeasure& rho,
                                  const Decomposition& dec,
                                  const DualPotential& u, int N,
                                  const Kernel& kernel, double tol) {
  if (dec.N != N || static_cast<int>(dec.layers.size()) != N) {
    throw DomainError("decomposition does not have N layers");
  }
  OptimalityReport r;
  r.mass_above_threshold = rho.total_mass() > 1.0 / N;
  const auto idx = locate_atoms(u, rho);
  std::vector<double> phi(u.values);
  for (double& v : phi) v -= u.value_at_infinity;
  const Domain dom(u.points, kernel);
  const double MN = M_k(dom, phi, N).value;

  r.mass_deficit = 1.0 - dec.total_layer_mass();
  r.term_i = r.mass_deficit * MN;
  r.primal = 0.0;
  r.pass_ii = true;
  r.pass_iii = true;
  for (int k = 1; k <= N; ++k) {
    const DiscreteMeasure& layer = dec.layers[static_cast<std::size_t>(k - 1)];
    const double t = static_cast<double>(k) / N;
    const double Mk = M_k_scaled(dom, phi, k, t);
    if (layer.atoms() != rho.atoms()) throw DomainError("layer atoms differ from rho");
    double integral = 0.0;
    for (std::size_t i = 0; i < layer.size(); ++i) {
      integral += t * phi[idx[i]] * layer.weight(i);
    }
    const double ck = dec.layer_costs[static_cast<std::size_t>(k - 1)].value();
    const double gap = ck - integral + Mk * layer.total_mass();
    r.primal += ck;
    r.term_ii.push_back(gap);
    r.level_gap.push_back(MN - Mk);
    r.term_iii.push_back(layer.total_mass() * (MN - Mk));
    if (!(std::abs(gap) <= tol)) r.pass_ii = false;
    if (layer.total_mass() > 1e-9 && !(MN - Mk <= tol)) r.pass_iii = false;
  }
  double integral = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) integral += rho.weight(i) * phi[idx[i]];
  r.dual = integral - MN;
  r.pass_i = r.mass_above_threshold ? std::abs(r.mass_deficit) <= tol
                                    : std::abs(r.term_i) <= tol;
  return r;
}

DualPotential positive_part(const DualPotential& u) {
  DualPotential p = u;
  for (double& v : p.values) v = std::max(v, 0.0);
  p.value_at_infinity = std::max(u.value_at_infinity, 0.0);
  return p;
}

}  // namespace mmot
