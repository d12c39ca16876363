#include "mmot/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "mmot/errors.hpp"

namespace mmot::io {

namespace {

std::string at(const std::string& path, const std::string& key) { return path + "." + key; }
std::string at(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

const Json& field(const Json& j, const std::string& path, const std::string& key) {
  if (!j.is_object()) throw InputError(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw InputError(at(path, key), "missing");
  return *it;
}

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw InputError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw InputError(path, "not finite");
  return v;
}

const Json& array(const Json& j, const std::string& path) {
  if (!j.is_array()) throw InputError(path, "expected an array");
  return j;
}

std::vector<double> numbers(const Json& j, const std::string& path) {
  std::vector<double> out;
  for (std::size_t i = 0; i < array(j, path).size(); ++i) out.push_back(number(j[i], at(path, i)));
  return out;
}

int positive_int(const Json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 1 || j.get<long long>() > 1'000'000) {
    throw InputError(path, "expected a positive integer");
  }
  return j.get<int>();
}

std::vector<Point> atoms_from(const Json& j, std::size_t dim, const std::string& path) {
  std::vector<Point> pts;
  for (std::size_t i = 0; i < array(j, path).size(); ++i) {
    const auto c = numbers(j[i], at(path, i));
    if (c.size() != dim) {
      throw InputError(at(path, i), "has " + std::to_string(c.size()) +
                                        " coordinates, expected " + std::to_string(dim));
    }
    pts.emplace_back(c);
  }
  return pts;
}

Json point_json(const Point& p) {
  Json a = Json::array();
  for (double c : p.coords()) a.push_back(c);
  return a;
}

std::string csv_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path, "cannot open file");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError("$", std::string("malformed JSON: ") + e.what());
  }
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(path, "cannot write file");
  out << text;
  if (!out) throw InputError(path, "write failed");
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

DiscreteMeasure measure_from_json(const Json& j) {
  const int dim = positive_int(field(j, "$", "dim"), "$.dim");
  auto atoms = atoms_from(field(j, "$", "atoms"), static_cast<std::size_t>(dim), "$.atoms");
  auto weights = numbers(field(j, "$", "weights"), "$.weights");
  if (weights.size() != atoms.size()) {
    throw InputError("$.weights", "has " + std::to_string(weights.size()) + " entries for " +
                                      std::to_string(atoms.size()) + " atoms");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] < 0.0) throw InputError(at("$.weights", i), "negative weight");
    total += weights[i];
    if (total > 1.0 + 1e-12) throw InputError(at("$.weights", i), "total mass exceeds 1");
  }
  try {
    return DiscreteMeasure(static_cast<std::size_t>(dim), std::move(atoms), std::move(weights));
  } catch (const DomainError& e) {
    throw InputError("$", e.what());
  }
}

DiscreteMeasure load_measure(const std::string& path) {
  return measure_from_json(read_json_file(path));
}

Json to_json(const DiscreteMeasure& rho) {
  Json atoms = Json::array();
  for (const auto& p : rho.atoms()) atoms.push_back(point_json(p));
  return Json{{"dim", rho.dim()}, {"atoms", atoms}, {"weights", rho.weights()}};
}

GridFunction grid_from_json(const Json& j) {
  const auto& box = field(j, "$", "box");
  auto lo = numbers(field(box, "$.box", "lo"), "$.box.lo");
  auto hi = numbers(field(box, "$.box", "hi"), "$.box.hi");
  std::vector<int> shape;
  const auto& s = array(field(j, "$", "shape"), "$.shape");
  for (std::size_t i = 0; i < s.size(); ++i) shape.push_back(positive_int(s[i], at("$.shape", i)));
  auto values = numbers(field(j, "$", "values"), "$.values");
  double v_inf = 0.0;
  if (j.contains("value_at_infinity")) v_inf = number(j["value_at_infinity"], "$.value_at_infinity");
  if (lo.size() != shape.size() || hi.size() != shape.size()) {
    throw InputError("$.box", "bounds and shape differ in dimension");
  }
  try {
    return GridFunction(Box{std::move(lo), std::move(hi)}, std::move(shape), std::move(values), v_inf);
  } catch (const DomainError& e) {
    throw InputError("$", e.what());
  }
}

Json to_json(const GridFunction& g) {
  return Json{{"box", {{"lo", g.box().lo}, {"hi", g.box().hi}}},
              {"shape", g.shape()},
              {"values", g.values()},
              {"value_at_infinity", g.value_at_infinity()}};
}

PotentialInput potential_from_json(const Json& j) {
  PotentialInput p;
  if (j.is_object() && j.contains("shape")) {
    p.grid = grid_from_json(j);
    if (p.grid->value_at_infinity() != 0.0) {
      throw InputError("$.value_at_infinity", "V must vanish at omega");
    }
    p.points = p.grid->nodes();
    p.values = p.grid->values();
    return p;
  }
  const int dim = positive_int(field(j, "$", "dim"), "$.dim");
  p.points = atoms_from(field(j, "$", "atoms"), static_cast<std::size_t>(dim), "$.atoms");
  p.values = numbers(field(j, "$", "values"), "$.values");
  if (p.values.size() != p.points.size()) {
    throw InputError("$.values", "has " + std::to_string(p.values.size()) + " entries for " +
                                     std::to_string(p.points.size()) + " atoms");
  }
  for (std::size_t i = 0; i < p.points.size(); ++i) {
    for (std::size_t k = 0; k < i; ++k) {
      if (distance(p.points[i], p.points[k]) <= kSeparationTol) {
        throw InputError(at("$.atoms", i), "duplicates atom " + std::to_string(k));
      }
    }
  }
  return p;
}

PotentialInput load_potential(const std::string& path) {
  return potential_from_json(read_json_file(path));
}

Json to_json(const ExtReal& v) {
  if (v.is_infinite()) return "inf";
  return v.value();
}

Json to_json(const TransportPlan& plan) {
  Json entries = Json::array();
  for (const auto& e : plan.entries) entries.push_back({{"multiset", e.multiset}, {"mass", e.mass}});
  Json support = Json::array();
  for (const auto& p : plan.support) support.push_back(point_json(p));
  return Json{{"N", plan.N},
              {"compactified", plan.compactified},
              {"certified", plan.certified},
              {"support", support},
              {"entries", entries}};
}

Json to_json(const Decomposition& dec) {
  Json layers = Json::array();
  for (std::size_t k = 0; k < dec.layers.size(); ++k) {
    layers.push_back({{"k", k + 1},
                      {"mass", dec.layers[k].total_mass()},
                      {"cost", to_json(dec.layer_costs[k])},
                      {"stratum_cost", dec.stratum_costs[k]},
                      {"measure", to_json(dec.layers[k])}});
  }
  return Json{{"N", dec.N},
              {"layers", layers},
              {"omega_mass", dec.omega_mass},
              {"total_layer_mass", dec.total_layer_mass()},
              {"total_cost", to_json(dec.total_cost())},
              {"certified", dec.certified}};
}

Json to_json(const DualPotential& u) {
  Json values = Json::object();
  for (std::size_t i = 0; i < u.values.size(); ++i) values[std::to_string(i)] = u.values[i];
  values["omega"] = u.value_at_infinity;
  return Json{{"values", values}, {"certified", u.certified}};
}

Json to_json(const OptimalityReport& r) {
  return Json{{"term_i", r.term_i},
              {"term_ii", r.term_ii},
              {"term_iii", r.term_iii},
              {"mass_deficit", r.mass_deficit},
              {"level_gap", r.level_gap},
              {"primal", r.primal},
              {"dual", r.dual},
              {"mass_above_threshold", r.mass_above_threshold},
              {"pass", {{"i", r.pass_i}, {"ii", r.pass_ii}, {"iii", r.pass_iii}}}};
}

Json to_json(const lp::Certificate& c) {
  return Json{{"primal_residual", c.primal_residual},
              {"dual_residual", c.dual_residual},
              {"complementarity", c.complementarity},
              {"gap", c.gap},
              {"ok", c.ok}};
}

Json to_json(const QuantizationReport& r) {
  Json j{{"N", r.N},
         {"k_N", r.k_N},
         {"minimal_mass", r.minimal_mass.str()},
         {"minimal_mass_value", r.minimal_mass.value()},
         {"ladder", r.ladder},
         {"min_value", r.min_value},
         {"witness", to_json(r.witness)},
         {"witness_tuple", r.witness_tuple}};
  if (r.witness_checked) j["witness_value"] = r.witness_value;
  Json diag{{"strict_gap", r.strict_gap},
            {"top_gap", r.top_gap},
            {"ladder_monotone", r.ladder_monotone}};
  if (r.beta) {
    diag["beta_surrogate"] = *r.beta;
    diag["beta_exceeds_N(N-1)"] = r.beta_fast;
  }
  if (r.t_star) diag["t_star"] = *r.t_star;
  j["diagnostics"] = diag;
  return j;
}

Json to_json(const SweepResult& s) {
  Json rows = Json::array();
  for (const auto& r : s.rows) {
    rows.push_back({{"Z", r.Z}, {"k_N", r.k_N}, {"mass", r.mass.str()}, {"min_value", r.min_value}});
  }
  Json j{{"rows", rows}, {"monotone", s.monotone}, {"drops", s.drops}};
  j["t_estimate"] = s.t_estimate ? Json(*s.t_estimate) : Json(nullptr);
  return j;
}

Json to_json(const IterateResult& r) {
  return Json{{"converged", r.converged},
              {"iterations", r.trace.empty() ? 0 : r.trace.back().iteration},
              {"I_N", r.trace.empty() ? 0.0 : r.trace.back().I_N},
              {"delta_N", r.trace.empty() ? 0.0 : r.trace.back().delta_N},
              {"R", r.R},
              {"lipschitz", r.lipschitz},
              {"lipschitz_bound", r.lipschitz_bound},
              {"violations",
               {{"energy", r.energy_violation},
                {"identity", r.identity_violation},
                {"bounds", r.bounds_violation},
                {"uniform", r.uniform_violation},
                {"summability", r.summability_violation}}},
              {"psi", to_json(r.psi)},
              {"admissible", to_json(r.admissible)}};
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
  out << "iteration,I_N,delta_N,sup_u,M_N,residual,eps\n";
  for (const auto& r : trace) {
    out << r.iteration << ',' << csv_number(r.I_N) << ',' << csv_number(r.delta_N) << ','
        << csv_number(r.sup_u) << ',' << csv_number(r.M_N) << ',' << csv_number(r.residual)
        << ',' << csv_number(r.eps) << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const SweepResult& s) {
  out << "Z,k_N,mass,min_value\n";
  for (const auto& r : s.rows) {
    out << csv_number(r.Z) << ',' << r.k_N << ',' << csv_number(r.mass.value()) << ','
        << csv_number(r.min_value) << '\n';
  }
}

}  // namespace mmot::io
