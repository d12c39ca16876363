#include "mmot/measures.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mmot/errors.hpp"

namespace mmot {

Point::Point(std::vector<double> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) throw DomainError("point must have at least one coordinate");
  for (double c : coords_) {
    if (!std::isfinite(c)) throw DomainError("point coordinate is not finite");
  }
}

double distance(const Point& a, const Point& b) {
  if (a.is_omega() || b.is_omega()) {
    throw DomainError("distance is undefined at omega");
  }
  if (a.dim() != b.dim()) throw DomainError("dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

DiscreteMeasure::DiscreteMeasure(std::size_t dim, std::vector<Point> atoms,
                                 std::vector<double> weights)
    : dim_(dim) {
  if (dim == 0) throw DomainError("measure dimension must be positive");
  if (atoms.size() != weights.size()) {
    throw DomainError("atoms and weights differ in length");
  }
  atoms_.reserve(atoms.size());
  weights_.reserve(weights.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const Point& p = atoms[i];
    if (p.is_omega()) throw DomainError("omega cannot be an atom");
    if (p.dim() != dim) {
      std::ostringstream msg;
      msg << "atom " << i << " has dimension " << p.dim() << ", expected " << dim;
      throw DomainError(msg.str());
    }
    const double w = weights[i];
    if (!std::isfinite(w) || w < 0.0) {
      std::ostringstream msg;
      msg << "weight " << i << " is negative or not finite";
      throw DomainError(msg.str());
    }
    std::size_t dup = npos;
    for (std::size_t j = 0; j < atoms_.size(); ++j) {
      if (distance(atoms_[j], p) <= kSeparationTol) {
        dup = j;
        break;
      }
    }
    if (dup != npos) {
      std::ostringstream msg;
      msg << "atom " << i << " lies within " << kSeparationTol
          << " of an earlier atom; weights merged";
      warnings_.push_back(msg.str());
      weights_[dup] += w;
      continue;
    }
    atoms_.push_back(p);
    weights_.push_back(w);
  }
  for (double w : weights_) total_mass_ += w;
  if (total_mass_ > 1.0 + kMassSlack) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "total mass " << total_mass_ << " exceeds 1";
    throw DomainError(msg.str());
  }
}

DiscreteMeasure DiscreteMeasure::scaled(double factor) const {
  std::vector<double> w = weights_;
  for (double& x : w) x *= factor;
  return with_weights(std::move(w));
}

DiscreteMeasure DiscreteMeasure::with_weights(std::vector<double> weights) const {
  if (weights.size() != atoms_.size()) {
    throw DomainError("weight vector length does not match atom count");
  }
  if (atoms_.empty()) return DiscreteMeasure(dim_);
  return DiscreteMeasure(dim_, atoms_, std::move(weights));
}

CompactifiedMeasure compactify(const DiscreteMeasure& rho) {
  return CompactifiedMeasure{rho, std::max(0.0, 1.0 - rho.total_mass())};
}

double concentration(const DiscreteMeasure& rho) {
  double k = 0.0;
  for (double w : rho.weights()) k = std::max(k, w);
  return k;
}

double variance(const DiscreteMeasure& rho) {
  const double m = rho.total_mass();
  if (!(m > 0.0)) throw DomainError("variance of the zero measure");
  std::vector<double> mean(rho.dim(), 0.0);
  for (std::size_t i = 0; i < rho.size(); ++i) {
    for (std::size_t a = 0; a < rho.dim(); ++a) {
      mean[a] += rho.weight(i) * rho.atom(i)[a];
    }
  }
  for (double& x : mean) x /= m;
  double var = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    double s = 0.0;
    for (std::size_t a = 0; a < rho.dim(); ++a) {
      const double d = rho.atom(i)[a] - mean[a];
      s += d * d;
    }
    var += rho.weight(i) * s;
  }
  return var / m;
}

std::size_t find_atom(const DiscreteMeasure& rho, const Point& p) {
  if (p.is_omega()) return npos;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (distance(rho.atom(i), p) <= kSeparationTol) return i;
  }
  return npos;
}

}  // namespace mmot
