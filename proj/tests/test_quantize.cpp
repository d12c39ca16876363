#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "mmot/errors.hpp"
#include "mmot/primal.hpp"
#include "mmot/quantize.hpp"
#include "oracles.hpp"

using namespace mmot;
using fixtures::line_points;

namespace {

const Kernel coulomb = Kernel::coulomb();

// Bumps of height h at 0 and L.
Domain two_bumps(double L) { return Domain(line_points({0.0, L}), coulomb); }

}  // namespace

TEST_CASE("rational masses") {
  CHECK(Rational::of(2, 4) == Rational{1, 2});
  CHECK(Rational::of(0, 3) == Rational{0, 1});
  CHECK(Rational::of(3, 3).str() == "1");
  CHECK(Rational::of(2, 3).str() == "2/3");
  CHECK_THROWS_AS(Rational::of(1, 0), DomainError);
}

TEST_CASE("minimize examples") {
  const Domain dom(line_points({0.0, 1.0, 2.0, 3.0}), coulomb);
  const auto zero = minimize(dom, std::vector<double>(4, 0.0), 3);
  CHECK(zero.value == 0.0);
  CHECK(zero.witness.empty());
  CHECK(zero.check_value == doctest::Approx(0.0));

  const auto spike = minimize(dom, std::vector<double>{0.0, 3.0, 0.0, 0.0}, 2);
  CHECK(spike.value == doctest::Approx(-1.5));
  REQUIRE(spike.witness.size() == 1);
  CHECK(spike.witness.atom(0)[0] == 1.0);
  CHECK(spike.witness.weight(0) == 0.5);
  CHECK(spike.check_value == doctest::Approx(spike.value).epsilon(1e-9));

  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-2.0, 5.0);
  for (int t = 0; t < 30; ++t) {
    const auto pts = fixtures::random_points(rng, 6, 1 + t % 3, 1.5);
    const Domain d(pts, coulomb);
    std::vector<double> V(pts.size());
    for (double& v : V) v = u(rng);
    const int N = 2 + t % 3;
    const auto r = minimize(d, V, N);
    const double sup = std::max(0.0, *std::max_element(V.begin(), V.end()));
    CHECK(r.value <= -sup / N + 1e-12);
    CHECK(r.value == doctest::Approx(-oracle::mk_brute(pts, V, N, coulomb).value).epsilon(1e-10));
    CHECK(std::abs(r.check_value - r.value) <= 1e-7);
  }
}

TEST_CASE("k_N two-bump examples") {
  const auto tall = k_N(two_bumps(1.0), std::vector<double>{4.0, 4.0}, 2);
  CHECK(tall.ladder[1] == doctest::Approx(2.0));
  CHECK(tall.ladder[2] == doctest::Approx(3.0));
  CHECK(tall.k_N == 2);
  CHECK(tall.minimal_mass == Rational{1, 1});
  CHECK(tall.strict_gap);
  CHECK(tall.witness.total_mass() == doctest::Approx(1.0));
  CHECK(tall.witness_value == doctest::Approx(-3.0));

  const auto low = k_N(two_bumps(1.0), std::vector<double>{1.0, 1.0}, 2);
  CHECK(low.ladder[1] == doctest::Approx(0.5));
  CHECK(low.ladder[2] == doctest::Approx(0.5));
  CHECK(low.k_N == 1);
  CHECK(low.minimal_mass == Rational{1, 2});
  CHECK_FALSE(low.strict_gap);
  CHECK(low.witness.size() == 1);
  CHECK(low.witness_value == doctest::Approx(low.min_value).epsilon(1e-9));

  const auto none = k_N(two_bumps(1.0), std::vector<double>{-1.0, 0.0}, 3);
  CHECK(none.k_N == 0);
  CHECK(none.minimal_mass == Rational{0, 1});
  CHECK(none.witness.empty());
  CHECK(none.min_value == 0.0);
}

TEST_CASE("strict gap") {
  const auto a = strict_gap(two_bumps(1.0), std::vector<double>{4.0, 4.0}, 2);
  CHECK(a.strict);
  CHECK(a.gap == doctest::Approx(1.0));
  CHECK(a.tuple == std::vector<int>{0, 1});
  CHECK_FALSE(strict_gap(two_bumps(1.0), std::vector<double>{0.0, 0.0}, 2).strict);
  CHECK_FALSE(strict_gap(two_bumps(1.0), std::vector<double>{1.0, 1.0}, 2).strict);
}

TEST_CASE("k_N against brute force") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 6.0);
  for (int t = 0; t < 40; ++t) {
    const int n = 2 + t % 3;
    const auto pts = fixtures::random_points(rng, n, 1 + t % 2, 1.0);
    const Domain dom(pts, coulomb);
    std::vector<double> V(pts.size());
    for (double& v : V) v = u(rng);
    const int N = 2 + t % 2;
    const auto rep = k_N(dom, V, N);
    CHECK(rep.ladder_monotone);
    CHECK(rep.min_value == doctest::Approx(-oracle::mk_brute(pts, V, N, coulomb).value).epsilon(1e-10));
    // Smallest mass among optimal multiset mixtures.
    CHECK(rep.k_N == oracle::mk_brute(pts, V, N, coulomb, 1e-8).min_finite);
    CHECK(rep.minimal_mass == Rational::of(rep.k_N, N));
    CHECK(rep.witness.total_mass() == doctest::Approx(rep.k_N / double(N)).epsilon(1e-15));
    CHECK(std::abs(rep.witness_value - rep.min_value) <= 1e-6);
    if (rep.strict_gap) CHECK(rep.k_N == N);
  }
}

TEST_CASE("charge sweep on two bumps") {
  const double h = 2.0, L = 0.5;
  std::vector<double> Z;
  for (int i = 0; i < 100; ++i) Z.push_back(0.1 + 0.1 * i);
  const auto s = charge_sweep(two_bumps(L), std::vector<double>{h, h}, 2, Z, {}, 4);
  CHECK(s.monotone);
  const double step = 2.0 / (h * L);
  for (const auto& row : s.rows) {
    CHECK(row.mass == (row.Z > step + 0.05 ? Rational{1, 1} : Rational{1, 2}));
  }
  REQUIRE(s.t_estimate);
  CHECK(std::abs(*s.t_estimate - step) <= 0.1 + 1e-9);

  const auto flat = charge_sweep(two_bumps(L), std::vector<double>{0.0, -1.0}, 2, Z, {}, 2);
  for (const auto& row : flat.rows) CHECK(row.k_N == 0);
  CHECK_FALSE(flat.t_estimate);

  CHECK_THROWS_AS(charge_sweep(two_bumps(L), std::vector<double>{h, h}, 2, {1.0, 0.5}), DomainError);
  CHECK_THROWS_AS(charge_sweep(two_bumps(L), std::vector<double>{h, h}, 2, {0.0, 0.5}), DomainError);
}

TEST_CASE("sweep results do not depend on the worker count") {
  const Domain dom(line_points({0.0, 0.7, 1.1, 2.0, 3.5}), coulomb);
  const std::vector<double> V{1.0, 2.0, 0.5, 1.5, 1.0};
  std::vector<double> Z;
  for (int i = 1; i <= 40; ++i) Z.push_back(0.25 * i);
  const auto a = charge_sweep(dom, V, 3, Z, {}, 1);
  const auto b = charge_sweep(dom, V, 3, Z, {}, 7);
  for (std::size_t i = 0; i < Z.size(); ++i) {
    CHECK(a.rows[i].k_N == b.rows[i].k_N);
    CHECK(a.rows[i].min_value == b.rows[i].min_value);
  }
}

TEST_CASE("nonexistence bound") {
  CHECK(nonexistence_bound(1.0, 1.0, 2) == doctest::Approx(1.0));
  CHECK(nonexistence_bound(3.0, 2.0, 3) == doctest::Approx(0.375));
  CHECK_THROWS_AS(nonexistence_bound(0.0, 1.0, 2), DomainError);

  // Below t_* no minimizer is a probability.
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    const int N = 2 + t % 3;
    const auto V = GridFunction::sample(Box{{-2.0}, {2.0}}, {17}, [&](const Point& p) {
      return std::abs(p[0]) <= 1.0 ? 0.2 + u(rng) : 0.0;
    });
    const double sup = *std::max_element(V.values().begin(), V.values().end());
    const double ts = nonexistence_bound(sup, support_radius(V), N);
    std::vector<double> tv(V.values());
    for (double& v : tv) v *= 0.5 * ts;
    const auto r = minimize(grid_domain(V, coulomb), tv, N);
    CHECK(r.witness.total_mass() < 1.0);
  }
}

TEST_CASE("beta estimate") {
  const Box box{{-10.0}, {10.0}};
  const auto bump = GridFunction::sample(box, {81}, [](const Point& p) {
    return std::max(0.0, 1.0 - p[0] * p[0]);
  });
  CHECK(beta_estimate(bump, outer_shells(box), 2).beta == 0.0);

  for (double c : {1.5, 7.0}) {
    const auto tail = GridFunction::sample(box, {81}, [&](const Point& p) {
      return c / std::max(std::abs(p[0]), 0.5);
    });
    const auto b = beta_estimate(tail, outer_shells(box), 3);
    CHECK(b.beta == doctest::Approx(c));
    CHECK(b.fast == (c > 6.0));
  }

  const auto planar = GridFunction::sample(Box{{-4, -4}, {4, 4}}, {33, 33}, [](const Point& p) {
    return 2.0 / std::max(std::hypot(p[0], p[1]), 0.5);
  });
  CHECK(beta_estimate(planar, outer_shells(planar.box()), 2).beta == doctest::Approx(2.0));
  CHECK(outer_shells(box) == std::vector<double>{7.5, 8.75, 10.0});
}

TEST_CASE("grid report fills the diagnostics") {
  const auto V = GridFunction::sample(Box{{-3.0}, {3.0}}, {25}, [](const Point& p) {
    return std::abs(p[0]) <= 1.0 ? 4.0 : 0.0;
  });
  const auto rep = k_N(V, 2, coulomb);
  REQUIRE(rep.beta);
  CHECK(*rep.beta == 0.0);
  REQUIRE(rep.t_star);
  CHECK(*rep.t_star == doctest::Approx(4.0 / (4.0 * 1.0 * 4.0)));
  CHECK(rep.k_N == 2);
  CHECK_THROWS_AS(k_N(V.with_values(V.values(), 1.0), 2, coulomb), DomainError);
}
