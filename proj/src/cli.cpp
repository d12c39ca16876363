#include "mmot/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mmot/errors.hpp"
#include "mmot/io.hpp"
#include "mmot/quantize.hpp"

namespace mmot::cli {

using io::Json;

namespace {

constexpr double kDualityGapTol = 1e-6;
constexpr double kLayerTol = 1e-9;
constexpr double kMassTol = 1e-8;
constexpr double kIdentityTol = 1e-6;
constexpr double kStepTol = 1e-9;
constexpr double kAdmissibleTol = 1e-6;
constexpr double kWitnessTol = 1e-6;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw InputError(where, "'" + s + "' is not a number");
  }
  if (used != s.size() || !std::isfinite(v)) throw InputError(where, "'" + s + "' is not a number");
  return v;
}

int parse_int(const std::string& s, const std::string& where) {
  const double v = parse_double(s, where);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw InputError(where, "'" + s + "' is not an integer");
  return static_cast<int>(v);
}

lp::Options lp_options(const RunConfig& cfg) {
  lp::Options o;
  o.feasibility_tol = cfg.lp_tol;
  o.dual_feasibility_tol = cfg.lp_tol;
  return o;
}

void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.out.empty()) {
    out << text;
  } else {
    io::write_file(cfg.out, text);
  }
}

Json header(const RunConfig& cfg) {
  return Json{{"command", cfg.command}, {"N", cfg.N}, {"kernel", cfg.kernel}};
}

void require_json(const RunConfig& cfg) {
  if (cfg.format != "json") {
    throw InputError("--format", "csv output exists only for potential traces and quantize sweeps");
  }
}

std::string trace_path(const RunConfig& cfg) {
  if (!cfg.trace_path.empty()) return cfg.trace_path;
  if (cfg.out.empty()) return "trace.csv";
  std::string base = cfg.out;
  const auto dot = base.rfind('.');
  const auto slash = base.rfind('/');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) base.resize(dot);
  return base + ".trace.csv";
}

int fail_if(bool failed, std::ostream& log, const std::string& what) {
  if (!failed) return kOk;
  log << "certificate failure: " << what << "\n";
  return kCertificateFailure;
}

}  // namespace

GridSpec parse_grid(const std::string& spec) {
  const auto parts = split(spec, ';');
  if (parts.size() != 2) throw InputError("--grid", "expected \"lo1,hi1,...;res\"");
  const auto bounds = split(parts[0], ',');
  if (bounds.empty() || bounds.size() % 2 != 0) {
    throw InputError("--grid", "bounds must come in lo,hi pairs");
  }
  GridSpec g;
  for (std::size_t i = 0; i < bounds.size(); i += 2) {
    g.box.lo.push_back(parse_double(bounds[i], "--grid"));
    g.box.hi.push_back(parse_double(bounds[i + 1], "--grid"));
    if (!(g.box.hi.back() > g.box.lo.back())) throw InputError("--grid", "each axis needs hi > lo");
  }
  const std::size_t d = g.box.lo.size();
  const auto res = split(parts[1], ',');
  if (res.size() != 1 && res.size() != d) {
    throw InputError("--grid", "resolution needs one count or one per axis");
  }
  for (std::size_t a = 0; a < d; ++a) {
    const int n = parse_int(res[res.size() == 1 ? 0 : a], "--grid");
    if (n < 2) throw InputError("--grid", "resolution must be at least 2 per axis");
    g.shape.push_back(n);
  }
  return g;
}

std::vector<double> parse_z_grid(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() != 3) throw InputError("--z-grid", "expected \"start:stop:steps\"");
  const double a = parse_double(parts[0], "--z-grid");
  const double b = parse_double(parts[1], "--z-grid");
  const int n = parse_int(parts[2], "--z-grid");
  if (!(a > 0.0) || !(b > a)) throw InputError("--z-grid", "needs 0 < start < stop");
  if (n < 2) throw InputError("--z-grid", "needs at least 2 steps");
  std::vector<double> z(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
  return z;
}

void validate(const RunConfig& cfg) {
  if (cfg.command != "quantize" && cfg.N < 2) throw InputError("--N", "must be at least 2");
  if (cfg.N < 1) throw InputError("--N", "must be at least 1");
  if (!(cfg.lp_tol > 0.0)) throw InputError("--lp-tol", "must be positive");
  if (!(cfg.gap_tol > 0.0)) throw InputError("--gap-tol", "must be positive");
  if (!(cfg.iter_tol > 0.0)) throw InputError("--iter-tol", "must be positive");
  if (cfg.max_iters < 0) throw InputError("--max-iters", "must be nonnegative");
  if (cfg.format != "json" && cfg.format != "csv") throw InputError("--format", "must be json or csv");
  if (!cfg.grid.empty()) parse_grid(cfg.grid);
  if (!cfg.z_grid.empty()) parse_z_grid(cfg.z_grid);
  Kernel::from_tag(cfg.kernel);
}

int cmd_cost(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  require_json(cfg);
  if (cfg.measure_path.empty()) throw InputError("--measure", "required");
  const auto rho = io::load_measure(cfg.measure_path);
  const auto kernel = Kernel::from_tag(cfg.kernel);
  const auto opts = lp_options(cfg);
  for (const auto& w : rho.warnings()) log << "warning: " << w << "\n";

  if (!cfg.lp_dump.empty()) {
    std::ofstream f(cfg.lp_dump);
    if (!f) throw InputError(cfg.lp_dump, "cannot write file");
    lp::write_text(f, build_relaxed_lp(rho, cfg.N, PairTable(rho.atoms(), kernel)));
  }

  const auto primal = relaxed_cost(rho, cfg.N, kernel, opts);
  const auto dual = dual_lp(rho, cfg.N, kernel, opts);

  Json doc = header(cfg);
  doc["mass"] = rho.total_mass();
  doc["primal"] = io::to_json(primal.value);
  doc["dual"] = io::to_json(dual.value);
  int code = kOk;
  if (primal.value.is_finite() && dual.value.is_finite()) {
    const double gap = std::abs(primal.value.value() - dual.value.value());
    doc["gap"] = gap;
    doc["certificates"] = {{"primal", io::to_json(primal.lp.certificate)},
                           {"dual", io::to_json(dual.lp.certificate)}};
    doc["plan"] = io::to_json(primal.plan);
    doc["potential"] = io::to_json(dual.potential);
    code = fail_if(gap > kDualityGapTol, log, "duality gap " + std::to_string(gap));
    if (code == kOk) {
      code = fail_if(!primal.lp.certificate.ok || !dual.lp.certificate.ok, log, "LP certificate");
    }
  } else {
    doc["gap"] = nullptr;
    doc["reason"] = primal.reason.empty() ? dual.reason : primal.reason;
    code = fail_if(primal.value.is_finite() != dual.value.is_finite(), log,
                   "primal and dual disagree on finiteness");
  }
  emit(cfg, io::dump(doc), out);
  return code;
}

int cmd_stratify(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  require_json(cfg);
  if (cfg.measure_path.empty()) throw InputError("--measure", "required");
  const auto rho = io::load_measure(cfg.measure_path);
  const auto kernel = Kernel::from_tag(cfg.kernel);
  const auto opts = lp_options(cfg);
  const int N = cfg.N;

  const auto primal = relaxed_cost(rho, N, kernel, opts);
  Json doc = header(cfg);
  doc["mass"] = rho.total_mass();
  doc["cost"] = io::to_json(primal.value);
  if (primal.value.is_infinite()) {
    doc["reason"] = primal.reason;
    emit(cfg, io::dump(doc), out);
    return kOk;
  }
  const auto dec = stratify(rho, primal.plan, kernel, opts);

  double layer_residual = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    double s = 0.0;
    for (int k = 1; k <= N; ++k) {
      s += static_cast<double>(k) / N * dec.layers[static_cast<std::size_t>(k - 1)].weight(i);
    }
    layer_residual = std::max(layer_residual, std::abs(s - rho.weight(i)));
  }
  const bool above = rho.total_mass() > 1.0 / N;
  // Below the 1/N threshold the all-omega multiset carries the rest.
  const double mass_sum = dec.total_layer_mass() + (above ? 0.0 : dec.omega_mass);
  const auto total = dec.total_cost();
  const double identity =
      total.is_finite() ? std::abs(total.value() - primal.value.value()) : INFINITY;

  const auto dual = dual_lp(rho, N, kernel, opts);
  Json checks{{"layer_residual", layer_residual},
              {"layer_mass_sum", mass_sum},
              {"cost_identity_error", identity}};
  int code = kOk;
  if (dual.value.is_finite()) {
    const auto report = check_optimality(rho, dec, dual.potential, N, kernel);
    doc["optimality"] = io::to_json(report);
    code = fail_if(!report.ok(), log, "optimality terms");
  }
  doc["decomposition"] = io::to_json(dec);
  doc["checks"] = checks;
  if (code == kOk) code = fail_if(layer_residual > kLayerTol, log, "layers do not rebuild rho");
  if (code == kOk) code = fail_if(std::abs(mass_sum - 1.0) > kMassTol, log, "layer masses do not sum to 1");
  if (code == kOk) code = fail_if(!(identity <= kIdentityTol), log, "layer costs do not sum to the cost");
  emit(cfg, io::dump(doc), out);
  return code;
}

int cmd_potential(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  if (cfg.measure_path.empty()) throw InputError("--measure", "required");
  const auto rho = io::load_measure(cfg.measure_path);
  const auto kernel = Kernel::from_tag(cfg.kernel);
  const int N = cfg.N;
  if (rho.total_mass() >= 1.0) {
    throw InputError("$.weights",
                     "the potential iteration needs total mass < 1; use the cost command "
                     "(dual LP) for a probability measure");
  }

  Json doc = header(cfg);
  GridFunction phi0;
  double R = 0.0;
  std::optional<double> cbar;
  if (!cfg.potential_path.empty()) {
    const auto p = io::load_potential(cfg.potential_path);
    if (!p.grid) throw InputError(cfg.potential_path, "the potential command needs a grid potential");
    phi0 = *p.grid;
    doc["initial"] = "file";
  } else {
    if (cfg.grid.empty()) throw InputError("--grid", "required without --potential");
    const auto g = parse_grid(cfg.grid);
    const auto init = initial_potential(rho, g.box, g.shape, N, kernel, 0.1, lp_options(cfg));
    phi0 = init.phi0;
    R = init.R;
    cbar = init.cbar;
    doc["initial"] = "dual_lp";
    doc["R_source"] = init.R_source;
  }

  IterateOptions it;
  it.tol = cfg.iter_tol;
  it.max_iters = cfg.max_iters;
  it.R = R;
  it.workers = cfg.workers;
  const auto res = iterate_potential(rho, phi0, N, kernel, it);

  const std::string tpath = trace_path(cfg);
  {
    std::ostringstream csv;
    io::write_trace_csv(csv, res.trace);
    io::write_file(tpath, csv.str());
  }
  const auto adm = check_admissible(res.admissible, N, kernel);

  doc["result"] = io::to_json(res);
  doc["admissibility"] = {{"max_violation", adm.max_violation},
                          {"exhaustive", adm.exhaustive},
                          {"tuples_checked", adm.tuples_checked}};
  if (cbar) {
    doc["cbar"] = *cbar;
    doc["cbar_error"] = std::abs(res.trace.back().I_N - *cbar);
  }
  doc["trace"] = tpath;

  if (cfg.format == "csv") {
    std::ostringstream csv;
    io::write_trace_csv(csv, res.trace);
    emit(cfg, csv.str(), out);
  } else {
    emit(cfg, io::dump(doc), out);
  }
  if (!res.converged) {
    log << "no convergence after " << cfg.max_iters << " iterations\n";
    return kNumericalFailure;
  }
  int code = fail_if(!res.checks_ok(kStepTol), log, "per-step iteration guarantees");
  if (code == kOk) code = fail_if(!adm.admissible(kAdmissibleTol), log, "admissibility");
  return code;
}

int cmd_quantize(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  if (cfg.potential_path.empty()) throw InputError("--potential", "required");
  const auto V = io::load_potential(cfg.potential_path);
  const auto kernel = Kernel::from_tag(cfg.kernel);
  const int N = cfg.N;
  QuantizeOptions qo;
  qo.gap_tol = cfg.gap_tol;
  const Domain dom = V.grid ? grid_domain(*V.grid, kernel) : Domain(V.points, kernel);

  Json doc = header(cfg);
  if (!cfg.z_grid.empty()) {
    const auto sweep = charge_sweep(dom, V.values, N, parse_z_grid(cfg.z_grid), qo, cfg.workers);
    if (cfg.format == "csv") {
      std::ostringstream csv;
      io::write_sweep_csv(csv, sweep);
      emit(cfg, csv.str(), out);
    } else {
      doc["sweep"] = io::to_json(sweep);
      emit(cfg, io::dump(doc), out);
    }
    if (!sweep.monotone) {
      if (N == 2) return fail_if(true, log, "mass sequence decreases for N = 2");
      log << "note: mass sequence decreases at " << sweep.drops.size() << " point(s)\n";
    }
    return kOk;
  }

  require_json(cfg);
  const auto rep = V.grid ? k_N(*V.grid, N, kernel, qo) : k_N(dom, V.values, N, qo);
  const auto mn = minimize(dom, V.values, N, qo);
  doc["report"] = io::to_json(rep);
  doc["minimize"] = {{"value", mn.value},
                     {"witness", io::to_json(mn.witness)},
                     {"check_value", mn.check_value}};
  if (N >= 2) {
    const auto sg = strict_gap(dom, V.values, N, cfg.gap_tol);
    doc["strict_gap"] = {{"strict", sg.strict}, {"gap", sg.gap}, {"tuple", sg.tuple}};
  }
  emit(cfg, io::dump(doc), out);
  int code = fail_if(!rep.ladder_monotone, log, "ladder not monotone");
  if (code == kOk) {
    code = fail_if(std::abs(rep.witness_value - rep.min_value) > kWitnessTol, log, "witness value");
  }
  if (code == kOk) code = fail_if(std::abs(mn.check_value - mn.value) > kWitnessTol, log, "minimizer value");
  return code;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  try {
    validate(cfg);
    if (cfg.command == "cost") return cmd_cost(cfg, out, log);
    if (cfg.command == "stratify") return cmd_stratify(cfg, out, log);
    if (cfg.command == "potential") return cmd_potential(cfg, out, log);
    if (cfg.command == "quantize") return cmd_quantize(cfg, out, log);
    throw InputError("command", "unknown command '" + cfg.command + "'");
  } catch (const InputError& e) {
    log << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const DomainError& e) {
    log << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const TooLargeError& e) {
    log << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    log << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  }
}

}  // namespace mmot::cli
