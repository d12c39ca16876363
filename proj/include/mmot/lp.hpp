#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace mmot::lp {

enum class Sense { minimize, maximize };
enum class RowSense { le, eq, ge };
enum class Status { optimal, infeasible, unbounded, iteration_limit, numerical_failure };

std::string to_string(Status s);

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Dense LP:  opt c^T x  s.t.  A x (<=,=,>=) b,  lower <= x <= upper.
class LinearProgram {
 public:
  LinearProgram(std::size_t num_vars, Sense sense);

  std::size_t num_vars() const noexcept { return objective_.size(); }
  std::size_t num_rows() const noexcept { return rhs_.size(); }
  Sense sense() const noexcept { return sense_; }

  std::vector<double>& objective() noexcept { return objective_; }
  const std::vector<double>& objective() const noexcept { return objective_; }

  /// Appends a constraint row; returns its index.
  std::size_t add_row(std::span<const double> coeffs, RowSense sense, double rhs);

  double a(std::size_t row, std::size_t col) const {
    return matrix_[row * num_vars() + col];
  }
  std::span<const double> row(std::size_t i) const {
    return {matrix_.data() + i * num_vars(), num_vars()};
  }
  RowSense row_sense(std::size_t i) const { return row_sense_[i]; }
  double rhs(std::size_t i) const { return rhs_[i]; }

  double lower(std::size_t j) const { return lower_[j]; }
  double upper(std::size_t j) const { return upper_[j]; }
  void set_bounds(std::size_t j, double lower, double upper);
  /// Marks x_j as free (-inf, +inf).
  void set_free(std::size_t j) { set_bounds(j, -kInf, kInf); }

  /// Throws DomainError on inconsistent dimensions or non-finite entries.
  void validate() const;

 private:
  Sense sense_;
  std::vector<double> objective_;
  std::vector<double> matrix_;
  std::vector<RowSense> row_sense_;
  std::vector<double> rhs_;
  std::vector<double> lower_;
  std::vector<double> upper_;
};

struct Options {
  double pivot_tol = 1e-10;
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-11;
  std::size_t max_iterations = 1'000'000;
  // Certificate thresholds.
  double dual_feasibility_tol = 1e-9;
  double complementarity_tol = 1e-8;
  double gap_tol = 1e-8;
};

struct Certificate {
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double complementarity = 0.0;
  double gap = 0.0;  // relative |primal - dual| / max(1, |primal|)
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  bool ok = false;
};

/// `y` holds one shadow price per row, y_i = d(optimal value)/d(b_i).
/// `reduced_costs` is c - A^T y.
struct Solution {
  Status status = Status::numerical_failure;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> reduced_costs;
  double objective = 0.0;
  double dual_objective = 0.0;
  Certificate certificate;
  std::size_t iterations = 0;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string name() const = 0;
  /// Fills status, x and y; certification is done by the caller.
  virtual Solution solve(const LinearProgram& lp, const Options& opts) const = 0;
};

/// Two-phase dense tableau simplex with Bland's rule.
class SimplexBackend final : public Backend {
 public:
  std::string name() const override { return "simplex"; }
  Solution solve(const LinearProgram& lp, const Options& opts) const override;
};

/// Checks primal/dual feasibility, complementary slackness and the duality
/// gap of a candidate optimal solution against the original statement.
Certificate certify(const LinearProgram& lp, const Solution& sol, const Options& opts);

/// Solves and certifies. An optimal status whose certificate fails is
/// downgraded to numerical_failure.
Solution solve(const LinearProgram& lp, const Options& opts = {},
               const Backend* backend = nullptr);

/// Plain-text dump: header, objective, one line per row, bounds.
void write_text(std::ostream& os, const LinearProgram& lp);

}  // namespace mmot::lp
