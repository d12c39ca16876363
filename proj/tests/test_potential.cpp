#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "mmot/dual.hpp"
#include "mmot/errors.hpp"
#include "mmot/potential.hpp"
#include "mmot/primal.hpp"

using namespace mmot;
using fixtures::line_measure;

namespace {

const Kernel coulomb = Kernel::coulomb();

Box line_box(double lo, double hi) { return Box{{lo}, {hi}}; }

GridFunction line_grid(double lo, double hi, int n,
                       const std::function<double(double)>& f) {
  return GridFunction::sample(line_box(lo, hi), {n}, [&](const Point& p) { return f(p[0]); });
}

double max_of(const GridFunction& g) {
  return *std::max_element(g.values().begin(), g.values().end());
}

}  // namespace

TEST_CASE("grid function basics") {
  const auto g = GridFunction::sample(Box{{0.0, 0.0}, {1.0, 2.0}}, {3, 5},
                                      [](const Point& p) { return p[0] + 10 * p[1]; });
  CHECK(g.size() == 15);
  CHECK(g.spacing(0) == 0.5);
  CHECK(g.spacing(1) == 0.5);
  CHECK(g.node(7)[0] == 0.5);
  CHECK(g.node(7)[1] == 1.0);
  CHECK(g.find_node(Point({0.5, 1.0})) == 7);
  CHECK(g.find_node(Point({0.5, 1.1})) == npos);
  CHECK(g.find_node(Point({3.0, 1.0})) == npos);
  CHECK(g.lipschitz() == doctest::Approx(10.0));

  CHECK_THROWS_AS(GridFunction(line_box(0, 1), {1}, {0.0}), DomainError);
  CHECK_THROWS_AS(GridFunction(line_box(1, 0), {2}, {0.0, 0.0}), DomainError);
  CHECK_THROWS_AS(GridFunction(line_box(0, 1), {3}, {0.0, 0.0}), DomainError);
  CHECK_THROWS_AS(GridFunction(line_box(0, 1), {2}, {0.0, NAN}), DomainError);
}

TEST_CASE("profile examples") {
  const auto zero = line_grid(-2, 2, 21, [](double) { return 0.0; });
  const auto p0 = M_N_profile(zero, 3, coulomb);
  for (double v : p0.values()) CHECK(v == 0.0);
  CHECK(p0.value_at_infinity() == 0.0);

  const auto phi = line_grid(-2, 2, 21, [](double x) { return 3.0 * std::exp(-x * x); });
  const Domain dom = grid_domain(phi, coulomb);
  for (int N : {2, 3}) {
    const auto prof = M_N_profile(phi, dom, N);
    CHECK(max_of(prof) == doctest::Approx(M_k(dom, phi.values(), N).value).epsilon(1e-12));
    CHECK(prof.value_at_infinity() ==
          doctest::Approx(M_k_scaled(dom, phi.values(), N - 1, (N - 1.0) / N)));
  }

  // Spike at node 5: the best partner is omega.
  std::vector<double> spike(11, 0.0);
  spike[5] = 1.7;
  const GridFunction s(line_box(0, 1), {11}, spike);
  CHECK(M_N_profile(s, 2, coulomb)[5] == doctest::Approx(0.85));

  CHECK_THROWS_AS(M_N_profile(phi, 1, coulomb), DomainError);
  CHECK_THROWS_AS(M_N_profile(phi.with_values(phi.values(), 1.0), 2, coulomb), DomainError);
}

TEST_CASE("hat examples") {
  const auto zero = line_grid(-2, 2, 21, [](double) { return 0.0; });
  const auto h0 = hat(zero, 2, coulomb);
  for (double v : h0.values()) CHECK(v == 0.0);

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 12; ++t) {
    const int N = 2 + t % 2;
    const double R = 1.0 + 4.0 * u(rng);
    // Random nonnegative values in [0, R].
    std::vector<double> vals(33);
    for (double& v : vals) v = u(rng) < 0.5 ? 0.0 : R * u(rng);
    const GridFunction phi(line_box(-3, 3), {33}, vals);
    const Domain dom = grid_domain(phi, coulomb);
    const auto h = hat(phi, dom, N);
    const double delta = delta_N(dom, phi.values(), N);
    CHECK(delta >= -1e-12);
    // Only the average with phi loses at most delta; the hat itself loses up to N delta.
    for (std::size_t i = 0; i < phi.size(); ++i) {
      CHECK(h[i] >= phi[i] - N * delta - 1e-12);
      CHECK((h[i] + (N - 1) * phi[i]) / N >= phi[i] - delta - 1e-12);
    }
    CHECK(h.lipschitz() <= gamma_N(R, N));
    CHECK(h.value_at_infinity() == 0.0);

    const auto h2 = hat_by_infimum(phi, dom, N);
    for (std::size_t i = 0; i < phi.size(); ++i) CHECK(std::abs(h[i] - h2[i]) <= 1e-10);
  }
}

TEST_CASE("hat formulas agree in two dimensions") {
  const auto phi = GridFunction::sample(Box{{-1, -1}, {1, 1}}, {6, 6}, [](const Point& p) {
    return std::max(0.0, 4.0 - 3.0 * (p[0] * p[0] + p[1] * p[1]));
  });
  const Domain dom = grid_domain(phi, coulomb);
  for (int N : {2, 3}) {
    const auto a = hat(phi, dom, N);
    const auto b = hat_by_infimum(phi, dom, N);
    for (std::size_t i = 0; i < phi.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-10);
  }
}

TEST_CASE("gamma_N values") {
  CHECK(gamma_N(1.0, 2) == doctest::Approx(32.0 / 9.0));
  CHECK(gamma_N(1.0, 3) == doctest::Approx(32.0 / 3.0));
  CHECK(gamma_N(1e-12, 2) == doctest::Approx(8.0 / 9.0));
  CHECK_THROWS_AS(gamma_N(-1.0, 2), DomainError);
  CHECK_THROWS_AS(gamma_N(1.0, 1), DomainError);
}

TEST_CASE("iterate from zero is a fixed point") {
  const auto rho = line_measure({0.0, 1.0}, {0.3, 0.3});
  const auto zero = line_grid(-2, 2, 41, [](double) { return 0.0; });
  const auto res = iterate_potential(rho, zero, 2, coulomb);
  CHECK(res.converged);
  REQUIRE(res.trace.size() == 1);
  CHECK(res.trace[0].I_N == 0.0);
  CHECK(res.trace[0].delta_N == 0.0);
}

TEST_CASE("iterate from the dual LP potential keeps the optimal value") {
  struct Case {
    std::vector<double> xs, ws;
    int N;
  };
  const std::vector<Case> cases = {
      {{0.0}, {0.4}, 2},
      {{-1.0, 0.0, 1.0}, {0.3, 0.3, 0.3}, 2},
      {{-0.5, 0.5}, {0.3, 0.3}, 3},
      {{-1.0, 0.0, 0.5, 1.5}, {0.2, 0.2, 0.2, 0.3}, 3},
  };
  for (const auto& c : cases) {
    const auto rho = line_measure(c.xs, c.ws);
    const auto init = initial_potential(rho, line_box(-4, 4), {129}, c.N, coulomb);
    CHECK(init.R >= 0.0);
    const auto res = iterate_potential(rho, init.phi0, c.N, coulomb, {.R = init.R});
    CHECK(res.converged);
    CHECK(res.checks_ok(1e-9));
    CHECK(res.trace.back().delta_N < 1e-6);
    CHECK(std::abs(res.trace.back().I_N - init.cbar) <= 2e-6);
    CHECK(res.lipschitz <= res.lipschitz_bound);
    CHECK(check_admissible(res.admissible, c.N, coulomb).admissible(1e-6));
    // The admissible form carries the same dual value.
    CHECK(dual_objective(res.admissible.as_potential(), rho, c.N, coulomb) ==
          doctest::Approx(res.trace.back().I_N).epsilon(1e-9));
  }
}

TEST_CASE("iterate from a tall start climbs and settles") {
  const auto rho = line_measure({-0.5, 0.5}, {0.35, 0.35});
  const auto phi0 = line_grid(-4, 4, 97, [](double x) { return 8.0 * std::max(0.0, 1.0 - std::abs(x) / 4.0); });
  const double cbar = relaxed_cost(rho, 2, coulomb).value.value();
  const auto res = iterate_potential(rho, phi0, 2, coulomb);
  CHECK(res.converged);
  CHECK(res.trace.front().delta_N > 1.0);
  CHECK(res.checks_ok(1e-9));
  for (std::size_t n = 1; n < res.trace.size(); ++n) {
    CHECK(res.trace[n].I_N >= res.trace[n - 1].I_N - 1e-9);
    CHECK(res.trace[n].M_N <= res.trace[n - 1].M_N + 1e-9);
  }
  CHECK(res.trace.back().I_N <= cbar + 1e-9);
  CHECK(res.trace.front().eps >= res.trace.back().eps);
  CHECK(res.lipschitz <= res.lipschitz_bound);
  CHECK(check_admissible(res.admissible, 2, coulomb).admissible(1e-6));
}

TEST_CASE("iterate input errors") {
  const auto g = line_grid(-1, 1, 11, [](double) { return 0.0; });
  CHECK_THROWS_AS(iterate_potential(line_measure({0.0}, {0.5}).scaled(2.0), g, 2, coulomb), DomainError);
  CHECK_THROWS_AS(iterate_potential(line_measure({0.05}, {0.3}), g, 2, coulomb), DomainError);
  CHECK_THROWS_AS(iterate_potential(line_measure({0.0}, {0.3}), g.with_values(std::vector<double>(11, -1.0), 0.0), 2, coulomb),
                  DomainError);
}

TEST_CASE("admissibility checks") {
  // Ball potential: (N-1)/(4R) inside B_R, -1/(4R) outside and at omega.
  const double R = 1.0;
  for (int N : {2, 3}) {
    const auto psi = GridFunction::sample(line_box(-2, 2), {41}, [&](const Point& p) {
      return std::abs(p[0]) <= R + 1e-12 ? (N - 1) / (4 * R) : -1 / (4 * R);
    }, -1 / (4 * R));
    const auto rep = check_admissible(psi, N, coulomb);
    CHECK(rep.exhaustive);
    CHECK(rep.max_violation <= 1e-9);
    const auto coarse = check_admissible(psi, N, coulomb, 10);
    CHECK_FALSE(coarse.exhaustive);
    CHECK(coarse.max_violation == doctest::Approx(rep.max_violation).epsilon(1e-12));
  }

  const auto one = line_grid(-5, 5, 11, [](double) { return 1.0; });
  const auto bad = check_admissible(one, 2, coulomb);
  CHECK(bad.max_violation > 0.5);
  CHECK(bad.worst.size() == 2);

  // Dual LP potential, extended by y_omega off the support.
  const auto rho = line_measure({-1.0, 0.0, 1.0}, {0.3, 0.3, 0.3});
  const auto d = dual_lp(rho, 3, coulomb);
  auto g = line_grid(-2, 2, 9, [&](double) { return d.potential.value_at_infinity; });
  std::vector<double> vals = g.values();
  for (std::size_t i = 0; i < rho.size(); ++i) vals[g.find_node(rho.atom(i))] = d.potential.values[i];
  g = g.with_values(vals, d.potential.value_at_infinity);
  CHECK(check_admissible(g, 3, coulomb).max_violation <= 1e-9);
}

TEST_CASE("truncation at infinity") {
  const auto rho = line_measure({-1.0, 0.0, 1.0}, {0.3, 0.3, 0.3});
  const auto d = dual_lp(rho, 3, coulomb);
  const double w = d.potential.value_at_infinity;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 0.0);
  auto g = line_grid(-2, 2, 9, [&](double) { return w + u(rng); });
  std::vector<double> vals = g.values();
  for (std::size_t i = 0; i < rho.size(); ++i) vals[g.find_node(rho.atom(i))] = d.potential.values[i];
  const GridFunction psi = g.with_values(vals, w);
  REQUIRE(check_admissible(psi, 3, coulomb).admissible(1e-9));

  const double lo = *std::min_element(vals.begin(), vals.end());
  CHECK(truncate_at_infinity(psi, lo).values() == psi.values());
  const auto t = truncate_at_infinity(psi, w);
  CHECK(check_admissible(t, 3, coulomb).admissible(1e-9));
  CHECK(dual_objective(t.as_potential(), rho, 3, coulomb) >=
        dual_objective(psi.as_potential(), rho, 3, coulomb) - 1e-12);
  CHECK_THROWS_AS(truncate_at_infinity(psi, w + 0.1), DomainError);
}
