#include "mmot/lp.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "mmot/errors.hpp"

namespace mmot::lp {

std::string to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    case Status::iteration_limit: return "iteration_limit";
    case Status::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

LinearProgram::LinearProgram(std::size_t num_vars, Sense sense)
    : sense_(sense),
      objective_(num_vars, 0.0),
      lower_(num_vars, 0.0),
      upper_(num_vars, kInf) {}

std::size_t LinearProgram::add_row(std::span<const double> coeffs, RowSense sense,
                                   double rhs) {
  if (coeffs.size() != num_vars()) {
    throw DomainError("constraint row length does not match variable count");
  }
  matrix_.insert(matrix_.end(), coeffs.begin(), coeffs.end());
  row_sense_.push_back(sense);
  rhs_.push_back(rhs);
  return rhs_.size() - 1;
}

void LinearProgram::set_bounds(std::size_t j, double lower, double upper) {
  if (j >= num_vars()) throw DomainError("variable index out of range");
  if (std::isnan(lower) || std::isnan(upper) || lower > upper ||
      lower == kInf || upper == -kInf) {
    throw DomainError("invalid variable bounds");
  }
  lower_[j] = lower;
  upper_[j] = upper;
}

void LinearProgram::validate() const {
  if (matrix_.size() != num_rows() * num_vars() || row_sense_.size() != num_rows()) {
    throw DomainError("inconsistent LP dimensions");
  }
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(objective_.begin(), objective_.end(), finite) ||
      !std::all_of(matrix_.begin(), matrix_.end(), finite) ||
      !std::all_of(rhs_.begin(), rhs_.end(), finite)) {
    throw DomainError("LP data must be finite");
  }
}

namespace {

// Standard form  min c^T z,  T z = b >= 0,  z >= 0, with an artificial column
// per row appended after the structural and slack columns.
struct Tableau {
  std::size_t rows = 0;
  std::size_t cols = 0;  // including artificials
  std::size_t art_start = 0;
  std::vector<double> t;  // rows x cols
  std::vector<double> b;
  std::vector<double> r;  // reduced costs
  double r0 = 0.0;        // minus the current objective
  std::vector<std::size_t> basis;

  double& at(std::size_t i, std::size_t j) { return t[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return t[i * cols + j]; }

  void pivot(std::size_t pr, std::size_t pc) {
    const double piv = at(pr, pc);
    double* prow = &t[pr * cols];
    for (std::size_t j = 0; j < cols; ++j) prow[j] /= piv;
    b[pr] /= piv;
    prow[pc] = 1.0;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == pr) continue;
      double* row = &t[i * cols];
      const double f = row[pc];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < cols; ++j) row[j] -= f * prow[j];
      row[pc] = 0.0;
      b[i] -= f * b[pr];
    }
    const double f = r[pc];
    if (f != 0.0) {
      for (std::size_t j = 0; j < cols; ++j) r[j] -= f * prow[j];
      r[pc] = 0.0;
      r0 -= f * b[pr];
    }
    basis[pr] = pc;
  }

  void price(const std::vector<double>& c) {
    r = c;
    r0 = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
      const double cb = c[basis[i]];
      if (cb == 0.0) continue;
      const double* row = &t[i * cols];
      for (std::size_t j = 0; j < cols; ++j) r[j] -= cb * row[j];
      r0 -= cb * b[i];
    }
    for (std::size_t i = 0; i < rows; ++i) r[basis[i]] = 0.0;
  }
};

enum class LoopResult { optimal, unbounded, iteration_limit };

LoopResult run_simplex(Tableau& tab, const Options& opts, std::size_t& iters) {
  while (true) {
    if (iters >= opts.max_iterations) return LoopResult::iteration_limit;
    // Bland: lowest-index improving column; artificials never re-enter.
    std::size_t enter = tab.cols;
    for (std::size_t j = 0; j < tab.art_start; ++j) {
      if (tab.r[j] < -opts.optimality_tol) {
        enter = j;
        break;
      }
    }
    if (enter == tab.cols) return LoopResult::optimal;

    std::size_t leave = tab.rows;
    double best = kInf;
    for (std::size_t i = 0; i < tab.rows; ++i) {
      const double a = tab.at(i, enter);
      if (a <= opts.pivot_tol) continue;
      const double ratio = std::max(0.0, tab.b[i]) / a;
      if (leave == tab.rows || ratio < best - 1e-12 * std::max(1.0, best)) {
        best = ratio;
        leave = i;
      } else if (ratio <= best + 1e-12 * std::max(1.0, best) &&
                 tab.basis[i] < tab.basis[leave]) {
        leave = i;
      }
    }
    if (leave == tab.rows) return LoopResult::unbounded;
    tab.pivot(leave, enter);
    ++iters;
  }
}

struct ColumnMap {
  std::size_t var;
  double sign;
};

}  // namespace

Solution SimplexBackend::solve(const LinearProgram& lp, const Options& opts) const {
  lp.validate();
  const std::size_t n = lp.num_vars();
  const std::size_t m = lp.num_rows();
  const double sigma = lp.sense() == Sense::minimize ? 1.0 : -1.0;

  // Structural columns: x_j = offset_j + sum sign * z.
  std::vector<ColumnMap> zcols;
  std::vector<double> offset(n, 0.0);
  std::vector<std::size_t> boxed;  // vars needing an upper-bound row
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = lp.lower(j), hi = lp.upper(j);
    if (std::isfinite(lo)) {
      offset[j] = lo;
      zcols.push_back({j, 1.0});
      if (std::isfinite(hi)) boxed.push_back(zcols.size() - 1);
    } else if (std::isfinite(hi)) {
      offset[j] = hi;
      zcols.push_back({j, -1.0});
    } else {
      zcols.push_back({j, 1.0});
      zcols.push_back({j, -1.0});
    }
  }
  const std::size_t nz = zcols.size();
  const std::size_t rows = m + boxed.size();

  std::vector<RowSense> senses(rows);
  std::vector<double> rhs(rows);
  std::vector<double> dense(rows * nz, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    senses[i] = lp.row_sense(i);
    double bi = lp.rhs(i);
    for (std::size_t j = 0; j < n; ++j) bi -= lp.a(i, j) * offset[j];
    rhs[i] = bi;
    for (std::size_t k = 0; k < nz; ++k) {
      dense[i * nz + k] = lp.a(i, zcols[k].var) * zcols[k].sign;
    }
  }
  for (std::size_t q = 0; q < boxed.size(); ++q) {
    const std::size_t k = boxed[q];
    const std::size_t j = zcols[k].var;
    senses[m + q] = RowSense::le;
    rhs[m + q] = lp.upper(j) - lp.lower(j);
    dense[(m + q) * nz + k] = 1.0;
  }

  std::size_t ns = 0;
  for (RowSense s : senses) ns += (s != RowSense::eq) ? 1 : 0;

  Tableau tab;
  tab.rows = rows;
  tab.art_start = nz + ns;
  tab.cols = tab.art_start + rows;
  tab.t.assign(rows * tab.cols, 0.0);
  tab.b.assign(rows, 0.0);
  tab.basis.resize(rows);
  std::vector<double> flip(rows, 1.0);
  std::size_t slack = nz;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = 0; k < nz; ++k) tab.at(i, k) = dense[i * nz + k];
    if (senses[i] == RowSense::le) tab.at(i, slack++) = 1.0;
    if (senses[i] == RowSense::ge) tab.at(i, slack++) = -1.0;
    tab.b[i] = rhs[i];
    if (rhs[i] < 0.0) {
      flip[i] = -1.0;
      for (std::size_t j = 0; j < tab.art_start; ++j) tab.at(i, j) = -tab.at(i, j);
      tab.b[i] = -rhs[i];
    }
    tab.at(i, tab.art_start + i) = 1.0;
    tab.basis[i] = tab.art_start + i;
  }

  Solution sol;
  std::size_t iters = 0;

  // Phase 1.
  std::vector<double> c1(tab.cols, 0.0);
  for (std::size_t i = 0; i < rows; ++i) c1[tab.art_start + i] = 1.0;
  tab.price(c1);
  LoopResult res = run_simplex(tab, opts, iters);
  sol.iterations = iters;
  if (res == LoopResult::iteration_limit) {
    sol.status = Status::iteration_limit;
    return sol;
  }
  double bmax = 1.0;
  for (double v : rhs) bmax = std::max(bmax, std::abs(v));
  if (-tab.r0 > opts.feasibility_tol * bmax) {
    sol.status = Status::infeasible;
    return sol;
  }
  // Drive remaining artificials out of the basis; rows where that is
  // impossible are redundant and stay inert.
  for (std::size_t i = 0; i < rows; ++i) {
    if (tab.basis[i] < tab.art_start) continue;
    std::size_t best = tab.art_start;
    double best_abs = opts.pivot_tol;
    for (std::size_t j = 0; j < tab.art_start; ++j) {
      if (std::abs(tab.at(i, j)) > best_abs) {
        best_abs = std::abs(tab.at(i, j));
        best = j;
      }
    }
    if (best < tab.art_start) tab.pivot(i, best);
  }

  // Phase 2.
  std::vector<double> c2(tab.cols, 0.0);
  for (std::size_t k = 0; k < nz; ++k) {
    c2[k] = sigma * lp.objective()[zcols[k].var] * zcols[k].sign;
  }
  tab.price(c2);
  res = run_simplex(tab, opts, iters);
  sol.iterations = iters;
  if (res == LoopResult::iteration_limit) {
    sol.status = Status::iteration_limit;
    return sol;
  }
  if (res == LoopResult::unbounded) {
    sol.status = Status::unbounded;
    return sol;
  }

  std::vector<double> z(tab.cols, 0.0);
  for (std::size_t i = 0; i < rows; ++i) z[tab.basis[i]] = tab.b[i];
  sol.x = offset;
  for (std::size_t k = 0; k < nz; ++k) sol.x[zcols[k].var] += zcols[k].sign * z[k];
  sol.y.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    sol.y[i] = -sigma * flip[i] * tab.r[tab.art_start + i];
  }
  sol.status = Status::optimal;
  return sol;
}

Certificate certify(const LinearProgram& lp, const Solution& sol, const Options& opts) {
  Certificate cert;
  const std::size_t n = lp.num_vars();
  const std::size_t m = lp.num_rows();
  if (sol.x.size() != n || sol.y.size() != m) return cert;
  const double sigma = lp.sense() == Sense::minimize ? 1.0 : -1.0;

  std::vector<double> d(n);
  for (std::size_t j = 0; j < n; ++j) d[j] = sigma * lp.objective()[j];
  double primal_obj = 0.0;
  for (std::size_t j = 0; j < n; ++j) primal_obj += lp.objective()[j] * sol.x[j];

  double dual_obj = 0.0;  // in minimization form
  for (std::size_t i = 0; i < m; ++i) {
    const double yi = sigma * sol.y[i];
    double ax = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      ax += lp.a(i, j) * sol.x[j];
      d[j] -= lp.a(i, j) * yi;
    }
    const double slack = ax - lp.rhs(i);
    switch (lp.row_sense(i)) {
      case RowSense::le:
        cert.primal_residual = std::max(cert.primal_residual, slack);
        cert.dual_residual = std::max(cert.dual_residual, yi);
        break;
      case RowSense::ge:
        cert.primal_residual = std::max(cert.primal_residual, -slack);
        cert.dual_residual = std::max(cert.dual_residual, -yi);
        break;
      case RowSense::eq:
        cert.primal_residual = std::max(cert.primal_residual, std::abs(slack));
        break;
    }
    if (lp.row_sense(i) != RowSense::eq) {
      cert.complementarity = std::max(cert.complementarity, std::abs(yi * slack));
    }
    dual_obj += lp.rhs(i) * yi;
  }
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = lp.lower(j), hi = lp.upper(j), xj = sol.x[j];
    cert.primal_residual = std::max({cert.primal_residual, lo - xj, xj - hi});
    if (d[j] > 0.0) {
      if (std::isfinite(lo)) {
        dual_obj += d[j] * lo;
        cert.complementarity = std::max(cert.complementarity, d[j] * (xj - lo));
      } else {
        cert.dual_residual = std::max(cert.dual_residual, d[j]);
      }
    } else if (d[j] < 0.0) {
      if (std::isfinite(hi)) {
        dual_obj += d[j] * hi;
        cert.complementarity = std::max(cert.complementarity, -d[j] * (hi - xj));
      } else {
        cert.dual_residual = std::max(cert.dual_residual, -d[j]);
      }
    }
  }
  dual_obj *= sigma;
  cert.primal_objective = primal_obj;
  cert.dual_objective = dual_obj;
  cert.gap = std::abs(primal_obj - dual_obj) / std::max(1.0, std::abs(primal_obj));
  cert.ok = cert.primal_residual <= opts.feasibility_tol &&
            cert.dual_residual <= opts.dual_feasibility_tol &&
            cert.complementarity <= opts.complementarity_tol &&
            cert.gap <= opts.gap_tol;
  return cert;
}

Solution solve(const LinearProgram& lp, const Options& opts, const Backend* backend) {
  static const SimplexBackend default_backend;
  const Backend& be = backend ? *backend : default_backend;
  Solution sol = be.solve(lp, opts);
  if (sol.status != Status::optimal) return sol;

  const std::size_t n = lp.num_vars();
  sol.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) sol.objective += lp.objective()[j] * sol.x[j];
  sol.reduced_costs = lp.objective();
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    for (std::size_t j = 0; j < n; ++j) sol.reduced_costs[j] -= lp.a(i, j) * sol.y[i];
  }
  sol.certificate = certify(lp, sol, opts);
  sol.dual_objective = sol.certificate.dual_objective;
  if (!sol.certificate.ok) sol.status = Status::numerical_failure;
  return sol;
}

void write_text(std::ostream& os, const LinearProgram& lp) {
  const auto old_prec = os.precision(17);
  os << (lp.sense() == Sense::minimize ? "minimize" : "maximize") << ' '
     << lp.num_rows() << " rows " << lp.num_vars() << " cols\n";
  os << "c";
  for (double v : lp.objective()) os << ' ' << v;
  os << '\n';
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    os << "row " << i;
    for (double v : lp.row(i)) os << ' ' << v;
    switch (lp.row_sense(i)) {
      case RowSense::le: os << " <= "; break;
      case RowSense::eq: os << " = "; break;
      case RowSense::ge: os << " >= "; break;
    }
    os << lp.rhs(i) << '\n';
  }
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    os << "bound " << j << ' ' << lp.lower(j) << ' ' << lp.upper(j) << '\n';
  }
  os.precision(old_prec);
}

}  // namespace mmot::lp
