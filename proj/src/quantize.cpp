#include "mmot/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mmot/errors.hpp"
#include "mmot/parallel.hpp"
#include "mmot/primal.hpp"

namespace mmot {

Rational Rational::of(long num, long den) {
  if (den <= 0) throw DomainError("rational needs a positive denominator");
  const long g = std::gcd(num, den);
  return g == 0 ? Rational{0, 1} : Rational{num / g, den / g};
}

std::string Rational::str() const {
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

namespace {

void check_inputs(const Domain& dom, std::span<const double> V, int N) {
  if (N < 1) throw DomainError("N must be at least 1");
  if (V.size() != dom.size()) throw DomainError("V/domain size mismatch");
  for (double v : V) {
    if (!std::isfinite(v)) throw DomainError("V must be finite");
  }
}

std::size_t domain_dim(const Domain& dom) {
  return dom.size() == 0 ? 1 : dom.points().front().dim();
}

DiscreteMeasure tuple_measure(const Domain& dom, const std::vector<int>& tuple, int N) {
  std::vector<Point> atoms;
  for (int i : tuple) atoms.push_back(dom.points()[static_cast<std::size_t>(i)]);
  return DiscreteMeasure(domain_dim(dom), std::move(atoms),
                         std::vector<double>(tuple.size(), 1.0 / N));
}

// C-bar(w) - int V dw for a witness supported on tuple.
double witness_value(const Domain& dom, std::span<const double> V,
                     const std::vector<int>& tuple, const DiscreteMeasure& w, int N) {
  const auto c = relaxed_cost(w, N, dom.kernel()).value;
  if (!c.is_finite()) throw NumericalError("witness has infinite relaxed cost");
  double integral = 0.0;
  for (int i : tuple) integral += V[static_cast<std::size_t>(i)] / N;
  return c.value() - integral;
}

std::vector<double> grid_values(const GridFunction& V) {
  if (V.value_at_infinity() != 0.0) throw DomainError("V must vanish at omega");
  return V.values();
}

}  // namespace

MinimizeResult minimize(const Domain& dom, std::span<const double> V, int N,
                        const QuantizeOptions& opts) {
  check_inputs(dom, V, N);
  const auto best = M_k(dom, V, N);
  MinimizeResult r;
  r.value = -best.value;
  r.tuple = best.tuple;
  std::sort(r.tuple.begin(), r.tuple.end());
  r.witness = tuple_measure(dom, r.tuple, N);
  if (opts.cross_check) {
    r.check_value = witness_value(dom, V, r.tuple, r.witness, N);
    r.checked = true;
  }
  return r;
}

QuantizationReport k_N(const Domain& dom, std::span<const double> V, int N,
                       const QuantizeOptions& opts) {
  check_inputs(dom, V, N);
  QuantizationReport rep;
  rep.N = N;
  rep.ladder.assign(static_cast<std::size_t>(N) + 1, 0.0);
  for (int k = 1; k <= N; ++k) {
    rep.ladder[static_cast<std::size_t>(k)] = M_k_scaled(dom, V, k, static_cast<double>(k) / N);
  }
  for (int k = 1; k <= N; ++k) {
    const double a = rep.ladder[static_cast<std::size_t>(k - 1)];
    const double b = rep.ladder[static_cast<std::size_t>(k)];
    if (b < a - 1e-10) rep.ladder_monotone = false;
    if (b > a + opts.gap_tol) rep.k_N = k;
  }
  rep.minimal_mass = Rational::of(rep.k_N, N);
  rep.min_value = -rep.ladder.back();
  rep.top_gap = rep.ladder[static_cast<std::size_t>(N)] - rep.ladder[static_cast<std::size_t>(N - 1)];
  rep.strict_gap = rep.top_gap > opts.gap_tol;

  if (rep.k_N > 0) {
    // The maximizing tuple of M_{k_N}(k_N V / N) uses k_N finite points; a
    // shorter tuple would be bounded by an earlier rung of the ladder.
    std::vector<double> scaled(V.begin(), V.end());
    const double t = static_cast<double>(rep.k_N) / N;
    for (double& v : scaled) v *= t;
    rep.witness_tuple = M_k(dom, scaled, rep.k_N).tuple;
    std::sort(rep.witness_tuple.begin(), rep.witness_tuple.end());
    if (static_cast<int>(rep.witness_tuple.size()) != rep.k_N) {
      throw NumericalError("k_N witness tuple has the wrong size");
    }
  }
  rep.witness = tuple_measure(dom, rep.witness_tuple, N);
  if (opts.cross_check) {
    rep.witness_value = witness_value(dom, V, rep.witness_tuple, rep.witness, N);
    rep.witness_checked = true;
  }
  return rep;
}

QuantizationReport k_N(const GridFunction& V, int N, const Kernel& kernel,
                       const QuantizeOptions& opts) {
  const auto vals = grid_values(V);
  const Domain dom = grid_domain(V, kernel);
  auto rep = k_N(dom, vals, N, opts);
  const auto b = beta_estimate(V, outer_shells(V.box()), N);
  rep.beta = b.beta;
  rep.beta_fast = b.fast;
  const double sup = *std::max_element(vals.begin(), vals.end());
  if (sup > 0.0) {
    const double R = support_radius(V);
    if (R > 0.0) rep.t_star = nonexistence_bound(sup, R, N);
  }
  return rep;
}

StrictGap strict_gap(const Domain& dom, std::span<const double> V, int N, double gap_tol) {
  check_inputs(dom, V, N);
  if (N < 2) throw DomainError("strict_gap needs N >= 2");
  StrictGap g;
  const auto top = M_k(dom, V, N);
  g.gap = top.value - M_k_scaled(dom, V, N - 1, static_cast<double>(N - 1) / N);
  g.strict = g.gap > gap_tol;
  g.tuple = top.tuple;
  std::sort(g.tuple.begin(), g.tuple.end());
  return g;
}

SweepResult charge_sweep(const Domain& dom, std::span<const double> V, int N,
                         const std::vector<double>& Z_grid, const QuantizeOptions& opts,
                         unsigned workers) {
  check_inputs(dom, V, N);
  for (std::size_t i = 0; i < Z_grid.size(); ++i) {
    if (!(Z_grid[i] > 0.0) || !std::isfinite(Z_grid[i])) throw DomainError("Z values must be positive");
    if (i > 0 && !(Z_grid[i] > Z_grid[i - 1])) throw DomainError("Z grid must be ascending");
  }
  QuantizeOptions o = opts;
  o.cross_check = false;
  SweepResult res;
  res.rows.resize(Z_grid.size());
  parallel_for(Z_grid.size(), workers == 0 ? default_workers() : workers, [&](std::size_t i) {
    std::vector<double> zv(V.begin(), V.end());
    for (double& v : zv) v *= Z_grid[i];
    const auto rep = k_N(dom, zv, N, o);
    res.rows[i] = {Z_grid[i], rep.k_N, rep.minimal_mass, rep.min_value};
  });
  for (std::size_t i = 1; i < res.rows.size(); ++i) {
    if (res.rows[i].k_N < res.rows[i - 1].k_N) {
      res.monotone = false;
      res.drops.push_back(i);
    }
  }
  for (std::size_t i = res.rows.size(); i-- > 0;) {
    if (res.rows[i].k_N != N) break;
    res.t_estimate = res.rows[i].Z;
  }
  return res;
}

double nonexistence_bound(double sup_V, double R_support, int N) {
  if (!(sup_V > 0.0)) throw DomainError("nonexistence bound needs sup V > 0");
  if (!(R_support > 0.0)) throw DomainError("support radius must be positive");
  if (N < 2) throw DomainError("nonexistence bound needs N >= 2");
  return static_cast<double>(N) * N / (4.0 * R_support * sup_V);
}

double support_radius(const GridFunction& V) {
  double r = 0.0;
  for (std::size_t i = 0; i < V.size(); ++i) {
    if (V[i] > 0.0) r = std::max(r, distance(V.node(i), Point(std::vector<double>(V.dim(), 0.0))));
  }
  return r;
}

BetaEstimate beta_estimate(const GridFunction& V, const std::vector<double>& radii, int N) {
  if (radii.empty()) throw DomainError("beta estimate needs at least one radius");
  double h = 0.0;
  for (std::size_t a = 0; a < V.dim(); ++a) h = std::max(h, V.spacing(a));
  const Point origin(std::vector<double>(V.dim(), 0.0));
  BetaEstimate b;
  bool any = false;
  for (std::size_t i = 0; i < V.size(); ++i) {
    const double r = distance(V.node(i), origin);
    for (double s : radii) {
      if (std::abs(r - s) > h / 2) continue;
      const double v = r * V[i];
      if (!any || v > b.beta) {
        b.beta = v;
        b.radius = r;
        any = true;
      }
    }
  }
  if (!any) throw DomainError("no grid node lies on the requested shells");
  b.fast = b.beta > static_cast<double>(N) * (N - 1);
  return b;
}

std::vector<double> outer_shells(const Box& box) {
  double r = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < box.lo.size(); ++a) {
    const double inner = (box.lo[a] <= 0.0 && box.hi[a] >= 0.0)
                             ? std::min(-box.lo[a], box.hi[a])
                             : (box.hi[a] - box.lo[a]) / 2;
    r = std::min(r, inner);
  }
  return {0.75 * r, 0.875 * r, r};
}

}  // namespace mmot
