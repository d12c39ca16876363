#include "mmot/cost.hpp"

#include <cmath>

#include "mmot/errors.hpp"

namespace mmot {

ExtReal Kernel::operator()(double r) const {
  if (r < kCollisionTol) return ExtReal::infinity();
  const double v = eval(r);
  if (std::isinf(v)) return ExtReal::infinity();
  return ExtReal(v);
}

Kernel Kernel::coulomb() {
  return Kernel{"coulomb", [](double r) { return 1.0 / r; }, true};
}

Kernel Kernel::power(double s) {
  if (!(s > 0.0)) throw DomainError("power kernel exponent must be positive");
  return Kernel{"power:" + std::to_string(s),
                [s](double r) { return std::pow(r, -s); }, false};
}

Kernel Kernel::from_tag(const std::string& tag) {
  if (tag == "coulomb") return coulomb();
  const std::string prefix = "power:";
  if (tag.rfind(prefix, 0) == 0) {
    try {
      std::size_t used = 0;
      const std::string rest = tag.substr(prefix.size());
      const double s = std::stod(rest, &used);
      if (used == rest.size()) {
        Kernel k = power(s);
        k.tag = tag;
        return k;
      }
    } catch (const std::logic_error&) {
    }
  }
  throw InputError("kernel", "unknown kernel tag '" + tag + "'");
}

void check_kernel(const Kernel& kernel) {
  if (!kernel.eval) throw DomainError("kernel has no evaluator");
  const double radii[] = {1e-6, 1e-3, 0.1, 0.5, 1.0, 2.0, 10.0, 1e3, 1e6};
  double prev = std::numeric_limits<double>::infinity();
  for (double r : radii) {
    const double v = kernel(r).value();
    if (!(v > 0.0)) throw DomainError("kernel must be positive on (0, inf)");
    if (kernel.validated && v > prev) {
      throw DomainError("kernel must be nonincreasing");
    }
    prev = v;
  }
  if (!(kernel(1e3).value() < 1e-2 && kernel(1e6).value() < 1e-5) &&
      kernel.validated) {
    throw DomainError("kernel does not vanish at infinity");
  }
  if (!(kernel(1e6).value() < kernel(1.0).value())) {
    throw DomainError("kernel does not decay");
  }
}

ExtReal pair_cost(const Point& x, const Point& y, const Kernel& kernel) {
  if (x.is_omega() || y.is_omega()) return ExtReal(0.0);
  return kernel(distance(x, y));
}

ExtReal c_k(std::span<const Point> points, const Kernel& kernel) {
  if (points.empty()) throw DomainError("c_k needs k >= 1 points");
  std::size_t dim = 0;
  for (const Point& p : points) {
    if (p.is_omega()) continue;
    if (dim == 0) dim = p.dim();
    if (p.dim() != dim) throw DomainError("dimension mismatch");
  }
  ExtReal total(0.0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      total += pair_cost(points[i], points[j], kernel);
      if (total.is_infinite()) return total;
    }
  }
  return total;
}

ExtReal c_tilde(std::span<const Point> points, const Kernel& kernel) {
  return c_k(points, kernel);
}

namespace {

void subsets_of_size(int n, int size, int start, std::vector<int>& cur,
                     std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == size) {
    out.push_back(cur);
    return;
  }
  for (int i = start; i < n; ++i) {
    cur.push_back(i);
    subsets_of_size(n, size, i + 1, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<std::vector<int>> finite_subsets(int n, int max_size) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  for (int s = 0; s <= std::min(n, max_size); ++s) {
    subsets_of_size(n, s, 0, cur, out);
  }
  return out;
}

std::size_t count_finite_subsets(int n, int max_size) {
  constexpr std::size_t cap = std::numeric_limits<std::size_t>::max() / 4;
  std::size_t total = 0;
  std::size_t binom = 1;  // C(n, s)
  for (int s = 0; s <= std::min(n, max_size); ++s) {
    if (s > 0) {
      const long double next =
          static_cast<long double>(binom) * (n - s + 1) / s;
      if (next > static_cast<long double>(cap)) return cap;
      binom = static_cast<std::size_t>(next + 0.5L);
    }
    total += binom;
    if (total > cap) return cap;
  }
  return total;
}

PairTable::PairTable(std::span<const Point> points, const Kernel& kernel)
    : n_(points.size()), table_(points.size() * points.size()) {
  for (std::size_t i = 0; i < n_; ++i) {
    table_[i * n_ + i] = std::numeric_limits<double>::infinity();
    for (std::size_t j = i + 1; j < n_; ++j) {
      const double v = pair_cost(points[i], points[j], kernel).value();
      table_[i * n_ + j] = v;
      table_[j * n_ + i] = v;
    }
  }
}

double PairTable::subset_cost(std::span<const int> subset) const {
  double c = 0.0;
  for (std::size_t a = 0; a < subset.size(); ++a) {
    for (std::size_t b = a + 1; b < subset.size(); ++b) {
      c += (*this)(static_cast<std::size_t>(subset[a]),
                   static_cast<std::size_t>(subset[b]));
    }
  }
  return c;
}

}  // namespace mmot
