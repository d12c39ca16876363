#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmot/dual.hpp"
#include "mmot/measures.hpp"
#include "mmot/potential.hpp"
#include "mmot/primal.hpp"
#include "mmot/quantize.hpp"

namespace mmot::io {

using Json = nlohmann::ordered_json;

/// Parses a file; syntax errors become InputError("$", ...).
Json read_json_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);
/// Two-space indent and a trailing newline.
std::string dump(const Json& j);

/// {"dim": d, "atoms": [[...], ...], "weights": [...]}. The first violation
/// is reported with its path, e.g. "$.weights[2]".
DiscreteMeasure measure_from_json(const Json& j);
DiscreteMeasure load_measure(const std::string& path);
Json to_json(const DiscreteMeasure& rho);

/// {"box": {"lo": [...], "hi": [...]}, "shape": [...], "values": [...],
/// "value_at_infinity": v}, values row-major with the last axis fastest.
GridFunction grid_from_json(const Json& j);
Json to_json(const GridFunction& g);

/// V on a finite support: either a grid document or
/// {"dim": d, "atoms": [[...], ...], "values": [...]}.
struct PotentialInput {
  std::vector<Point> points;
  std::vector<double> values;
  std::optional<GridFunction> grid;
};
PotentialInput potential_from_json(const Json& j);
PotentialInput load_potential(const std::string& path);

/// Finite numbers as numbers, +inf as the string "inf".
Json to_json(const ExtReal& v);
Json to_json(const TransportPlan& plan);
Json to_json(const Decomposition& dec);
/// {"values": {"0": y0, ..., "omega": y_w}}.
Json to_json(const DualPotential& u);
Json to_json(const OptimalityReport& r);
Json to_json(const lp::Certificate& c);
Json to_json(const QuantizationReport& r);
Json to_json(const SweepResult& s);
Json to_json(const IterateResult& r);

/// iteration,I_N,delta_N,sup_u,M_N,residual,eps
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace);
/// Z,k_N,mass,min_value
void write_sweep_csv(std::ostream& out, const SweepResult& s);

}  // namespace mmot::io
