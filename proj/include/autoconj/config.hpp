#pragma once

#include <optional>
#include <string>

#include "autoconj/builtin.hpp"
#include "autoconj/grid.hpp"
#include "autoconj/transforms.hpp"

namespace autoconj {

struct Tolerances {
    double tol_disc = 1e-2;
    double tol_member = 1e-6;
    double flag_ceiling = 1e6;
};

struct IterationSettings {
    double epsilon = 1e-3;
    int max_n = 50;
};

struct Config {
    std::size_t dim = 1;
    Axes primal;
    Axes dual;  // defaults to the primal box doubled, same point counts
    std::optional<BuiltinFunction> function;
    std::optional<GridFn> tabulated;  // function.kind = "tabulated"
    std::optional<OperatorSpec> op;   // defaults to ∂f of the builtin function
    Tolerances tolerances;
    IterationSettings iteration;

    TruncationPolicy policy() const { return {tolerances.flag_ceiling, true}; }
    /// The configured operator, or ∂f when only a builtin function is given.
    OperatorSpec operator_spec() const;
    const BuiltinFunction& builtin() const;
};

/// Parses and validates a JSON config. Relative file paths are resolved
/// against the config's directory. Throws ConfigError on any problem.
Config parse_config(const std::string& path);
Config parse_config_text(const std::string& text, const std::string& base_dir = ".");

} // namespace autoconj
