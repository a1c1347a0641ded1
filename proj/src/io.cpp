#include "autoconj/io.hpp"

#include <cstdio>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "autoconj/error.hpp"

namespace autoconj {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    return in;
}

std::vector<double> parse_row(const std::string& line, std::size_t line_no) {
    std::vector<double> out;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        const char* b = tok.c_str();
        char* e = nullptr;
        const double v = std::strtod(b, &e);
        while (*e == ' ' || *e == '\r') ++e;
        if (e == b || *e != '\0') throw Error("line " + std::to_string(line_no) + ": bad number '" + tok + "'");
        out.push_back(v);
    }
    return out;
}

void close_check(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw Error("write failed: " + path);
}

} // namespace

std::string format_number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_grid_csv(const GridFn& f, std::ostream& out) {
    const auto& axes = f.axes();
    for (std::size_t i = 0; i < axes.size(); ++i)
        out << "# axis " << i << ": " << format_number(axes[i].min()) << ',' << format_number(axes[i].max()) << ','
            << axes[i].points() << '\n';
    std::vector<double> c(f.dim());
    for (std::size_t n = 0; n < f.size(); ++n) {
        f.coords(n, c);
        for (double v : c) out << format_number(v) << ',';
        out << format_number(f[n].raw()) << '\n';
    }
}

void write_grid_csv(const GridFn& f, const std::string& path) {
    auto out = open_out(path);
    write_grid_csv(f, out);
    close_check(out, path);
}

GridFn read_grid_csv(std::istream& in) {
    Axes axes;
    std::vector<ExtReal> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        if (line[0] == '#') {
            std::size_t i = 0;
            double mn = 0, mx = 0;
            unsigned long pts = 0;
            char lo[64], hi[64];
            if (std::sscanf(line.c_str(), "# axis %zu: %63[^,],%63[^,],%lu", &i, lo, hi, &pts) == 4) {
                if (!values.empty() || i != axes.size()) throw Error("grid csv: misplaced axis header");
                mn = std::strtod(lo, nullptr);
                mx = std::strtod(hi, nullptr);
                axes.emplace_back(mn, mx, pts);
            }
            continue;
        }
        if (axes.empty()) throw Error("grid csv: missing axis header");
        const auto row = parse_row(line, line_no);
        if (row.size() != axes.size() + 1) throw Error("grid csv: line " + std::to_string(line_no) + " has wrong width");
        values.emplace_back(row.back());
    }
    if (axes.empty()) throw Error("grid csv: missing axis header");
    if (values.size() != grid_size(axes)) throw Error("grid csv: row count does not match the axes");
    return GridFn(std::move(axes), std::move(values));
}

GridFn read_grid_csv(const std::string& path) {
    auto in = open_in(path);
    return read_grid_csv(in);
}

void write_graph_csv(const OperatorGraph& g, const std::string& path) {
    auto out = open_out(path);
    for (const auto& p : g.pairs()) {
        std::string row;
        for (double v : p.x) row += format_number(v) + ',';
        for (double v : p.xstar) row += format_number(v) + ',';
        row.back() = '\n';
        out << row;
    }
    close_check(out, path);
}

OperatorGraph read_graph_csv(const std::string& path) {
    auto in = open_in(path);
    std::vector<GraphPoint> pairs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#' || line == "\r") continue;
        const auto row = parse_row(line, line_no);
        if (row.empty() || row.size() % 2 != 0) throw Error("graph csv: odd column count at line " + std::to_string(line_no));
        const std::size_t d = row.size() / 2;
        pairs.push_back({{row.begin(), row.begin() + d}, {row.begin() + d, row.end()}});
    }
    return OperatorGraph(std::move(pairs));
}

void write_convergence_log(const IterationTrace& trace, std::ostream& out) {
    for (const auto& r : trace.records) {
        nlohmann::ordered_json j;
        j["n"] = r.n;
        j["sup_gap"] = r.sup_gap;
        j["dom_size"] = r.dom_size;
        out << j.dump() << '\n';
    }
}

nlohmann::ordered_json to_json(const EnlargementSet& s) {
    nlohmann::ordered_json j;
    j["kind"] = s.kind;
    j["epsilon"] = s.epsilon;
    j["x"] = s.x;
    auto members = nlohmann::ordered_json::array();
    for (const auto& m : s.members) members.push_back({{"xstar", m.xstar}, {"slack", m.slack}});
    j["members"] = std::move(members);
    return j;
}

void write_json(const nlohmann::ordered_json& j, const std::string& path) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
    close_check(out, path);
}

void write_plot_data(const GridFn& f, const std::string& path) {
    const std::size_t omitted = f.size() - f.finite_count();
    auto out = open_out(path);
    out << "# finite rows: " << f.finite_count() << ", inf rows omitted: " << omitted << '\n';
    for (std::size_t i = 0; i < f.dim(); ++i) out << 'x' << i << ',';
    out << "value\n";
    std::vector<double> c(f.dim());
    for (std::size_t n = 0; n < f.size(); ++n) {
        if (f[n].is_infinite()) continue;
        f.coords(n, c);
        for (double v : c) out << format_number(v) << ',';
        out << format_number(f[n].raw()) << '\n';
    }
    close_check(out, path);
}

void write_plot_data(const EnlargementSet& s, const std::string& path) {
    auto out = open_out(path);
    out << "# " << s.kind << " epsilon=" << format_number(s.epsilon) << " members: " << s.members.size() << '\n';
    for (std::size_t i = 0; i < s.x.size(); ++i) out << 'x' << i << ',';
    for (std::size_t i = 0; i < s.x.size(); ++i) out << "xstar" << i << ',';
    out << "slack\n";
    for (const auto& m : s.members) {
        for (double v : s.x) out << format_number(v) << ',';
        for (double v : m.xstar) out << format_number(v) << ',';
        out << format_number(m.slack) << '\n';
    }
    close_check(out, path);
}

} // namespace autoconj
