#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "autoconj/a_iteration.hpp"
#include "autoconj/enlargements.hpp"
#include "autoconj/grid.hpp"
#include "autoconj/operator_graph.hpp"

namespace autoconj {

/// Grid CSV: one `# axis i: min,max,points` line per axis, then one row per
/// node in row-major order with the coordinates followed by the value. +inf
/// is written as `inf`. Numbers use 17 significant digits, so a write/read
/// round trip is exact.
void write_grid_csv(const GridFn& f, std::ostream& out);
void write_grid_csv(const GridFn& f, const std::string& path);
GridFn read_grid_csv(std::istream& in);
GridFn read_grid_csv(const std::string& path);

/// Graph CSV: one `x..., xstar...` row per pair; `#` lines are comments.
void write_graph_csv(const OperatorGraph& g, const std::string& path);
OperatorGraph read_graph_csv(const std::string& path);

/// One `{"n":..,"sup_gap":..,"dom_size":..}` object per line.
void write_convergence_log(const IterationTrace& trace, std::ostream& out);

nlohmann::ordered_json to_json(const EnlargementSet& s);
void write_json(const nlohmann::ordered_json& j, const std::string& path);

/// Plot data: finite rows only, with the count of omitted +inf rows in the
/// leading comment.
void write_plot_data(const GridFn& f, const std::string& path);
/// One `x..., xstar..., slack` row per member; an empty set yields the header alone.
void write_plot_data(const EnlargementSet& s, const std::string& path);

/// Shortest round-trip text form of a double (`inf` for +inf).
std::string format_number(double v);

} // namespace autoconj
