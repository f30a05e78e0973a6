#pragma once

// JSON forms of models, trajectories, statistics and reports.

#include <string>

#include <json.hpp>

#include "ctbn/model.hpp"
#include "ctbn/select.hpp"
#include "ctbn/simulate.hpp"
#include "ctbn/stats.hpp"
#include "ctbn/theory.hpp"

namespace ctbn {

/// {"d", "parents", "cims": {node: {bitstring: [q01, q10]}}, "beta"?, "seed"?}.
/// Bitstrings are big-endian over the ascending parent list ("" when the
/// node has no parents). beta is 2d rows [intercept, coef over -w...] in
/// (w, 0->1), (w, 1->0) order.
nlohmann::json model_to_json(const CtbnModel& model);
CtbnModel model_from_json(const nlohmann::json& j);

/// {"d", "T", "initial": [0|1...], "jumps": [{"t", "node"}]} with times
/// printed to 17 significant digits.
std::string trajectory_to_json(const Trajectory& traj);
Trajectory trajectory_from_json(const nlohmann::json& j);

/// {"d", "T", "n": {node: {"01": {mask: count}, "10": {...}}},
///  "t": {node: {"0": {mask: secs}, "1": {...}}}}
nlohmann::json stats_to_json(const SuffStats& stats);

/// Array of {"w", "s", "sp", "lambda", "delta", "beta", "bic", "gic"}.
nlohmann::json selection_report_json(const StructureFit& fit);

/// {"A_beta", "F_lower", "K", "T_min", "lambda_lo", "lambda_hi", "R", "zeta", "rho1", "vacuous", ...}.
nlohmann::json theory_report_json(const TheoremBounds& bounds);

/// Path CSV: lambda,objective,nnz,kkt_gap
std::string path_csv(const LambdaPath& path);

/// One "u w" pair per line.
std::string edge_list(const EdgeSet& edges);

/// "%.17g"
std::string format_double(double v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace ctbn
