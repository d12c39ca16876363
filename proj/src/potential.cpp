#include "mmot/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mmot/errors.hpp"
#include "mmot/parallel.hpp"
#include "mmot/primal.hpp"

namespace mmot {

namespace {

unsigned resolve_workers(unsigned w) { return w == 0 ? default_workers() : w; }

void require_vanishing(const GridFunction& phi) {
  if (phi.value_at_infinity() != 0.0) {
    throw DomainError("expects a potential with value 0 at omega");
  }
}

double sup_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

}  // namespace

GridFunction::GridFunction(Box box, std::vector<int> shape, std::vector<double> values,
                           double value_at_infinity)
    : box_(std::move(box)), shape_(std::move(shape)), values_(std::move(values)),
      value_at_infinity_(value_at_infinity) {
  if (shape_.empty()) throw DomainError("grid needs at least one axis");
  if (box_.lo.size() != shape_.size() || box_.hi.size() != shape_.size()) {
    throw DomainError("box and shape dimensions differ");
  }
  std::size_t n = 1;
  for (std::size_t a = 0; a < shape_.size(); ++a) {
    if (shape_[a] < 2) throw DomainError("grid needs at least 2 points per axis");
    if (!(box_.hi[a] > box_.lo[a]) || !std::isfinite(box_.lo[a]) || !std::isfinite(box_.hi[a])) {
      throw DomainError("grid box must have finite hi > lo");
    }
    n *= static_cast<std::size_t>(shape_[a]);
  }
  if (values_.size() != n) throw DomainError("grid value count does not match shape");
  for (double v : values_) {
    if (!std::isfinite(v)) throw DomainError("grid values must be finite");
  }
  if (!std::isfinite(value_at_infinity_)) throw DomainError("value at omega must be finite");
}

GridFunction GridFunction::sample(const Box& box, const std::vector<int>& shape,
                                  const std::function<double(const Point&)>& f,
                                  double value_at_infinity) {
  std::size_t n = 1;
  for (int s : shape) n *= static_cast<std::size_t>(std::max(s, 0));
  GridFunction g(box, shape, std::vector<double>(n, 0.0), value_at_infinity);
  for (std::size_t i = 0; i < n; ++i) g.values_[i] = f(g.node(i));
  return g;
}

double GridFunction::spacing(std::size_t axis) const {
  return (box_.hi[axis] - box_.lo[axis]) / (shape_[axis] - 1);
}

Point GridFunction::node(std::size_t flat) const {
  std::vector<double> c(dim());
  for (std::size_t a = dim(); a-- > 0;) {
    const auto s = static_cast<std::size_t>(shape_[a]);
    c[a] = box_.lo[a] + static_cast<double>(flat % s) * spacing(a);
    flat /= s;
  }
  return Point(std::move(c));
}

std::vector<Point> GridFunction::nodes() const {
  std::vector<Point> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.push_back(node(i));
  return out;
}

std::size_t GridFunction::find_node(const Point& p) const {
  if (p.is_omega() || p.dim() != dim()) return npos;
  std::size_t flat = 0;
  for (std::size_t a = 0; a < dim(); ++a) {
    const double t = std::round((p[a] - box_.lo[a]) / spacing(a));
    if (t < 0 || t > shape_[a] - 1) return npos;
    flat = flat * static_cast<std::size_t>(shape_[a]) + static_cast<std::size_t>(t);
  }
  return distance(node(flat), p) <= kSeparationTol ? flat : npos;
}

double GridFunction::lipschitz() const {
  double best = 0.0;
  std::size_t stride = 1;
  for (std::size_t a = dim(); a-- > 0;) {
    const auto s = static_cast<std::size_t>(shape_[a]);
    const double h = spacing(a);
    for (std::size_t i = 0; i < size(); ++i) {
      if ((i / stride) % s == s - 1) continue;
      best = std::max(best, std::abs(values_[i + stride] - values_[i]) / h);
    }
    stride *= s;
  }
  return best;
}

GridFunction GridFunction::with_values(std::vector<double> values,
                                       double value_at_infinity) const {
  return GridFunction(box_, shape_, std::move(values), value_at_infinity);
}

DualPotential GridFunction::as_potential() const {
  return DualPotential{nodes(), values_, value_at_infinity_, false};
}

Domain grid_domain(const GridFunction& g, const Kernel& kernel) {
  if (g.size() > 6000) throw TooLargeError("grid too large for a dense pair table");
  return Domain(g.nodes(), kernel);
}

GridFunction M_N_profile(const GridFunction& phi, const Domain& dom, int N,
                         unsigned workers) {
  if (N < 2) throw DomainError("M_N_profile needs N >= 2");
  require_vanishing(phi);
  auto prof = anchored_profile(dom, phi.values(), N, resolve_workers(workers));
  const double at_inf = M_k_scaled(dom, phi.values(), N - 1, static_cast<double>(N - 1) / N);
  return phi.with_values(std::move(prof), at_inf);
}

GridFunction M_N_profile(const GridFunction& phi, int N, const Kernel& kernel) {
  return M_N_profile(phi, grid_domain(phi, kernel), N);
}

GridFunction hat(const GridFunction& phi, const Domain& dom, int N, unsigned workers) {
  const GridFunction prof = M_N_profile(phi, dom, N, workers);
  const double m = prof.value_at_infinity();
  std::vector<double> out(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) out[i] = phi[i] + N * (m - prof[i]);
  return phi.with_values(std::move(out), 0.0);
}

GridFunction hat(const GridFunction& phi, int N, const Kernel& kernel) {
  return hat(phi, grid_domain(phi, kernel), N);
}

GridFunction hat_by_infimum(const GridFunction& phi, const Domain& dom, int N) {
  if (N < 2) throw DomainError("hat needs N >= 2");
  require_vanishing(phi);
  const int n = static_cast<int>(phi.size());
  const double m = M_k_scaled(dom, phi.values(), N - 1, static_cast<double>(N - 1) / N);
  std::vector<double> out(phi.size());
  std::vector<int> partners;
  for (int x = 0; x < n; ++x) {
    // Partners all at omega give N c - sum phi = 0.
    double best = 0.0;
    std::function<void(int, double, double)> rec = [&](int start, double cost, double sum) {
      if (static_cast<int>(partners.size()) == N - 1) return;
      for (int j = start; j < n; ++j) {
        if (j == x) continue;
        double c = cost + dom.cost(static_cast<std::size_t>(x), static_cast<std::size_t>(j));
        for (int i : partners) c += dom.cost(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        const double s = sum + phi[static_cast<std::size_t>(j)];
        best = std::min(best, N * c - s);
        partners.push_back(j);
        rec(j + 1, c, s);
        partners.pop_back();
      }
    };
    rec(0, 0.0, 0.0);
    out[static_cast<std::size_t>(x)] = best + N * m;
  }
  return phi.with_values(std::move(out), 0.0);
}

double gamma_N(double R, int N) {
  if (N < 2) throw DomainError("gamma_N needs N >= 2");
  if (!(R >= 0.0)) throw DomainError("gamma_N needs R >= 0");
  const double t = 1.0 + (N - 1) * R;
  return 16.0 * (N - 1) * t * t / (9.0 * N);
}

bool IterateResult::checks_ok(double tol) const {
  return energy_violation <= tol && identity_violation <= tol &&
         bounds_violation <= tol && uniform_violation <= tol &&
         summability_violation <= tol;
}

std::vector<double> grid_weights(const DiscreteMeasure& rho, const GridFunction& g) {
  if (rho.dim() != g.dim() && !rho.empty()) throw DomainError("measure/grid dimension mismatch");
  std::vector<double> w(g.size(), 0.0);
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const std::size_t j = g.find_node(rho.atom(i));
    if (j == npos) throw DomainError("atom " + std::to_string(i) + " is not a grid node");
    w[j] += rho.weight(i);
  }
  return w;
}

IterateResult iterate_potential(const DiscreteMeasure& rho, const GridFunction& phi0,
                                int N, const Kernel& kernel, const IterateOptions& opts) {
  if (N < 2) throw DomainError("iterate_potential needs N >= 2");
  if (rho.total_mass() >= 1.0) {
    throw DomainError("iterate_potential needs |rho| < 1; use the dual LP for full mass");
  }
  require_vanishing(phi0);
  for (double v : phi0.values()) {
    if (v < -1e-12) throw DomainError("phi0 must be nonnegative");
  }
  const auto w = grid_weights(rho, phi0);
  const Domain dom = grid_domain(phi0, kernel);
  const unsigned workers = resolve_workers(opts.workers);
  const double mass = rho.total_mass();
  const double t = static_cast<double>(N - 1) / N;

  IterateResult res;
  res.R = opts.R > 0.0 ? opts.R : sup_of(phi0.values());

  auto integral = [&](const std::vector<double>& u) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += w[i] * u[i];
    return s;
  };

  std::vector<double> u = phi0.values();
  double MN = M_k(dom, u, N).value;
  const double MN0 = MN;
  double prev_I = 0.0, prev_delta = 0.0, prev_lower = 0.0;
  std::vector<double> prev_u;
  for (int n = 0;; ++n) {
    const double Mn1 = M_k_scaled(dom, u, N - 1, t);
    const double delta = MN - Mn1;
    TraceRow row;
    row.iteration = n;
    row.M_N = MN;
    row.delta_N = delta;
    row.I_N = integral(u) - MN;
    row.sup_u = sup_of(u);

    if (n > 0) {
      // Guarantees for u_n = u_{n-1} averaged with its hat.
      res.identity_violation = std::max(res.identity_violation, std::abs(MN - prev_lower));
      res.energy_violation = std::max(res.energy_violation,
                                      prev_I + (1.0 - mass) * prev_delta - row.I_N);
      for (std::size_t i = 0; i < u.size(); ++i) {
        res.bounds_violation = std::max(res.bounds_violation, prev_u[i] - prev_delta - u[i]);
      }
    }
    res.uniform_violation = std::max(res.uniform_violation, row.sup_u - N * MN0);

    const auto prof = anchored_profile(dom, u, N, workers);
    std::vector<double> uhat(u.size());
    double residual = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      uhat[i] = u[i] + N * (Mn1 - prof[i]);
      residual = std::max(residual, std::abs(uhat[i] - u[i]));
    }
    row.residual = residual;
    res.trace.push_back(row);

    if (delta < opts.tol && residual < opts.residual_tol) {
      res.converged = true;
      break;
    }
    if (n >= opts.max_iters) break;

    prev_I = row.I_N;
    prev_delta = delta;
    prev_lower = Mn1;
    prev_u = u;
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = uhat[i] / N + t * u[i];
    MN = M_k(dom, u, N).value;
  }

  // Remainders eps_n and the summability budget.
  double tail = 0.0;
  for (auto it = res.trace.rbegin(); it != res.trace.rend(); ++it) {
    tail += it->delta_N;
    it->eps = tail;
  }
  res.summability_violation =
      tail - (res.trace.back().I_N - res.trace.front().I_N) / (1.0 - mass) - opts.tol;
  res.summability_violation = std::max(0.0, res.summability_violation);

  std::vector<double> pos(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) pos[i] = std::max(u[i], 0.0);
  res.psi = phi0.with_values(pos, 0.0);
  const double m = M_k(dom, pos, N).value;
  std::vector<double> adm(pos);
  for (double& v : adm) v -= m;
  res.admissible = phi0.with_values(std::move(adm), -m);
  res.lipschitz = res.psi.lipschitz();
  res.lipschitz_bound = gamma_N(N * res.R, N);
  return res;
}

InitialPotential initial_potential(const DiscreteMeasure& rho, const Box& box,
                                   const std::vector<int>& shape, int N,
                                   const Kernel& kernel, double delta,
                                   const lp::Options& lp_opts) {
  if (!(delta > 0.0)) throw DomainError("delta must be positive");
  const auto d = dual_lp(rho, N, kernel, lp_opts);
  if (d.value.is_infinite()) throw DomainError("rho has infinite relaxed cost");
  InitialPotential out;
  out.cbar = d.value.value();
  std::vector<double> phi(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) {
    phi[i] = std::max(0.0, d.potential.values[i] - d.potential.value_at_infinity);
  }

  out.R_source = "fallback";
  out.R = N * sup_of(phi);
  const double grown = (1.0 + delta) * rho.total_mass();
  if (grown <= 1.0 && concentration(rho) * (1.0 + delta) <= 1.0 / N) {
    const auto big = relaxed_cost(rho.scaled(1.0 + delta), N, kernel, lp_opts).value;
    if (big.is_finite()) {
      out.R = N * (big.value() - (1.0 + delta) * out.cbar) / delta;
      out.R = std::max(out.R, 0.0);
      out.R_source = "step1";
    }
  }

  GridFunction g = GridFunction::sample(box, shape, [](const Point&) { return 0.0; });
  std::vector<double> vals = g.values();
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const std::size_t j = g.find_node(rho.atom(i));
    if (j == npos) throw DomainError("atom " + std::to_string(i) + " is not a grid node");
    vals[j] = std::min(phi[i], out.R);
  }
  out.phi0 = g.with_values(std::move(vals), 0.0);
  return out;
}

AdmissibilityReport check_admissible(const GridFunction& psi, int N,
                                     const Kernel& kernel, std::size_t sample_budget) {
  if (N < 1) throw DomainError("check_admissible needs N >= 1");
  const Domain dom = grid_domain(psi, kernel);
  const double v = psi.value_at_infinity();
  std::vector<double> shifted(psi.values());
  for (double& x : shifted) x -= v;

  AdmissibilityReport rep;
  const std::size_t count = count_finite_subsets(static_cast<int>(psi.size()), N);
  if (count <= sample_budget) {
    rep.exhaustive = true;
    rep.max_violation = -std::numeric_limits<double>::infinity();
    std::vector<int> cur;
    const int n = static_cast<int>(psi.size());
    std::function<void(int, double, double)> rec = [&](int start, double sum, double cost) {
      ++rep.tuples_checked;
      const double val = (sum + (N - static_cast<double>(cur.size())) * v) / N - cost;
      if (val > rep.max_violation) {
        rep.max_violation = val;
        rep.worst = cur;
      }
      if (static_cast<int>(cur.size()) == N) return;
      for (int j = start; j < n; ++j) {
        double c = cost;
        for (int i : cur) c += dom.cost(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        cur.push_back(j);
        rec(j + 1, sum + psi[static_cast<std::size_t>(j)], c);
        cur.pop_back();
      }
    };
    rec(0, 0.0, 0.0);
  } else {
    const auto r = M_k(dom, shifted, N);
    rep.max_violation = v + r.value;
    rep.worst = r.tuple;
    rep.tuples_checked = count;
  }
  return rep;
}

GridFunction truncate_at_infinity(const GridFunction& psi, double lambda) {
  if (lambda > psi.value_at_infinity()) {
    throw DomainError("truncation level exceeds the value at omega");
  }
  std::vector<double> out(psi.values());
  for (double& x : out) x = std::max(x, lambda);
  return psi.with_values(std::move(out), psi.value_at_infinity());
}

}  // namespace mmot
