#include "autoconj/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "autoconj/error.hpp"
#include "autoconj/io.hpp"

namespace autoconj {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : j.items())
        if (!ok.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

const json& need(const json& j, const std::string& where, const char* key) {
    if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
    return j.at(key);
}

double number(const json& j, const std::string& where) {
    if (!j.is_number()) throw ConfigError(where + ": expected a number");
    return j.get<double>();
}

GridAxis parse_axis(const json& j, const std::string& where) {
    allow_keys(j, where, {"min", "max", "points"});
    const json& p = need(j, where, "points");
    if (!p.is_number_integer() || p.get<long long>() < 0) throw ConfigError(where + ".points: expected a count");
    try {
        return GridAxis(number(need(j, where, "min"), where + ".min"), number(need(j, where, "max"), where + ".max"),
                        p.get<std::size_t>());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

// A single axis object is repeated for every dimension; an array gives one per axis.
Axes parse_grid(const json& j, std::size_t dim, const std::string& where) {
    Axes axes;
    if (j.is_array()) {
        if (j.size() != dim) throw ConfigError(where + ": expected " + std::to_string(dim) + " axes");
        for (std::size_t i = 0; i < dim; ++i) axes.push_back(parse_axis(j[i], where + "[" + std::to_string(i) + "]"));
    } else {
        axes.assign(dim, parse_axis(j, where));
    }
    return axes;
}

std::string existing(const json& j, const std::string& where, const fs::path& base) {
    if (!j.is_string()) throw ConfigError(where + ": expected a path");
    fs::path p = j.get<std::string>();
    if (p.is_relative()) p = base / p;
    if (!fs::exists(p)) throw ConfigError(where + ": file not found: " + p.string());
    return p.string();
}

BuiltinFunction parse_builtin(const json& j, const std::string& kind, std::size_t dim) {
    if (kind == "quadratic") {
        allow_keys(j, "function", {"kind", "a"});
        const double a = j.contains("a") ? number(j["a"], "function.a") : 1.0;
        if (!(a > 0)) throw ConfigError("function.a: must be positive");
        return BuiltinFunction::quadratic(a);
    }
    if (kind == "abs") {
        allow_keys(j, "function", {"kind"});
        return BuiltinFunction::abs();
    }
    if (kind == "linear") {
        allow_keys(j, "function", {"kind", "a"});
        const json& a = need(j, "function", "a");
        std::vector<double> slope;
        if (a.is_array())
            for (const auto& v : a) slope.push_back(number(v, "function.a"));
        else
            slope.push_back(number(a, "function.a"));
        if (slope.size() != 1 && slope.size() != dim) throw ConfigError("function.a: length must be 1 or dim");
        return BuiltinFunction::linear(slope);
    }
    if (kind == "indicator") {
        allow_keys(j, "function", {"kind", "lower", "upper"});
        const double lo = number(need(j, "function", "lower"), "function.lower");
        const double hi = number(need(j, "function", "upper"), "function.upper");
        if (!(lo <= hi)) throw ConfigError("function: lower must not exceed upper");
        return BuiltinFunction::indicator(lo, hi);
    }
    throw ConfigError("function.kind: unknown kind '" + kind + "'");
}

} // namespace

OperatorSpec Config::operator_spec() const {
    if (op) return *op;
    if (function) return OperatorSpec::subdifferential(*function);
    throw ConfigError("config: no operator and no builtin function to differentiate");
}

const BuiltinFunction& Config::builtin() const {
    if (!function) throw ConfigError("config: a builtin function is required for this command");
    return *function;
}

Config parse_config_text(const std::string& text, const std::string& base_dir) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    allow_keys(root, "config", {"space", "dual", "function", "operator", "tolerances", "iteration"});
    const fs::path base(base_dir);
    Config c;

    const json& space = need(root, "config", "space");
    allow_keys(space, "space", {"dim", "grid"});
    const json& dim = need(space, "space", "dim");
    if (!dim.is_number_integer() || (dim.get<int>() != 1 && dim.get<int>() != 2))
        throw ConfigError("space.dim: must be 1 or 2");
    c.dim = dim.get<std::size_t>();
    c.primal = parse_grid(need(space, "space", "grid"), c.dim, "space.grid");

    if (root.contains("dual")) {
        allow_keys(root["dual"], "dual", {"grid"});
        c.dual = parse_grid(need(root["dual"], "dual", "grid"), c.dim, "dual.grid");
    } else {
        c.dual = doubled_box(c.primal);
    }

    if (root.contains("function")) {
        const json& f = root["function"];
        if (!f.is_object()) throw ConfigError("function: expected an object");
        const json& kind = need(f, "function", "kind");
        if (!kind.is_string()) throw ConfigError("function.kind: expected a string");
        if (kind == "tabulated") {
            allow_keys(f, "function", {"kind", "path"});
            const std::string path = existing(need(f, "function", "path"), "function.path", base);
            try {
                c.tabulated = read_grid_csv(path);
            } catch (const Error& e) {
                throw ConfigError(std::string("function.path: ") + e.what());
            }
            if (c.tabulated->axes() != c.primal) throw ConfigError("function.path: grid differs from space.grid");
        } else {
            c.function = parse_builtin(f, kind.get<std::string>(), c.dim);
        }
    }

    if (root.contains("operator")) {
        const json& o = root["operator"];
        if (!o.is_object()) throw ConfigError("operator: expected an object");
        const json& kind = need(o, "operator", "kind");
        if (kind == "subdifferential") {
            allow_keys(o, "operator", {"kind"});
            if (!c.function) throw ConfigError("operator: subdifferential needs a builtin function");
            c.op = OperatorSpec::subdifferential(*c.function);
        } else if (kind == "linear") {
            allow_keys(o, "operator", {"kind", "matrix"});
            const json& m = need(o, "operator", "matrix");
            Matrix mat;
            mat.n = c.dim;
            if (!m.is_array() || m.size() != c.dim) throw ConfigError("operator.matrix: expected dim rows");
            for (const auto& row : m) {
                if (!row.is_array() || row.size() != c.dim) throw ConfigError("operator.matrix: expected dim columns");
                for (const auto& v : row) mat.data.push_back(number(v, "operator.matrix"));
            }
            try {
                c.op = OperatorSpec::linear(mat);
            } catch (const Error& e) {
                throw ConfigError(std::string("operator.matrix: ") + e.what());
            }
        } else if (kind == "graph") {
            allow_keys(o, "operator", {"kind", "path"});
            const std::string path = existing(need(o, "operator", "path"), "operator.path", base);
            try {
                OperatorGraph g = read_graph_csv(path);
                if (g.dim() != c.dim) throw ConfigError("operator.path: graph dimension differs from space.dim");
                c.op = OperatorSpec::graph(std::move(g));
            } catch (const ConfigError&) {
                throw;
            } catch (const Error& e) {
                throw ConfigError(std::string("operator.path: ") + e.what());
            }
        } else {
            throw ConfigError("operator.kind: unknown kind");
        }
    }
    if (!c.function && !c.tabulated && !c.op) throw ConfigError("config: need a function or an operator");

    if (root.contains("tolerances")) {
        const json& t = root["tolerances"];
        allow_keys(t, "tolerances", {"tol_disc", "tol_member", "flag_ceiling"});
        if (t.contains("tol_disc")) c.tolerances.tol_disc = number(t["tol_disc"], "tolerances.tol_disc");
        if (t.contains("tol_member")) c.tolerances.tol_member = number(t["tol_member"], "tolerances.tol_member");
        if (t.contains("flag_ceiling")) c.tolerances.flag_ceiling = number(t["flag_ceiling"], "tolerances.flag_ceiling");
        if (c.tolerances.tol_disc < 0 || c.tolerances.tol_member < 0 || !(c.tolerances.flag_ceiling > 0))
            throw ConfigError("tolerances: must be non-negative");
    }
    if (root.contains("iteration")) {
        const json& it = root["iteration"];
        allow_keys(it, "iteration", {"epsilon", "max_n"});
        if (it.contains("epsilon")) c.iteration.epsilon = number(it["epsilon"], "iteration.epsilon");
        if (it.contains("max_n")) {
            if (!it["max_n"].is_number_integer() || it["max_n"].get<int>() < 1)
                throw ConfigError("iteration.max_n: expected a positive integer");
            c.iteration.max_n = it["max_n"].get<int>();
        }
        if (!(c.iteration.epsilon > 0)) throw ConfigError("iteration.epsilon: must be positive");
    }
    return c;
}

Config parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config file not found: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), fs::path(path).parent_path().string());
}

} // namespace autoconj
