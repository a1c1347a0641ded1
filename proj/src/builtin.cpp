#include "autoconj/builtin.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace autoconj {

bool DualSet::contains(std::span<const double> xstar, double tol) const {
    for (const auto& box : boxes) {
        if (box.size() != xstar.size()) throw DimensionMismatch("DualSet: rank mismatch");
        bool in = true;
        for (std::size_t i = 0; i < box.size() && in; ++i) in = box[i].contains(xstar[i], tol);
        if (in) return true;
    }
    return false;
}

double DualSet::distance(std::span<const double> xstar) const {
    double best = kInf;
    for (const auto& box : boxes) {
        if (box.size() != xstar.size()) throw DimensionMismatch("DualSet: rank mismatch");
        double d = 0.0;
        for (std::size_t i = 0; i < box.size(); ++i) {
            if (xstar[i] < box[i].lo) d = std::max(d, box[i].lo - xstar[i]);
            else if (xstar[i] > box[i].hi) d = std::max(d, xstar[i] - box[i].hi);
        }
        best = std::min(best, d);
    }
    return best;
}

BuiltinFunction BuiltinFunction::quadratic(double a) {
    if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("quadratic: require a > 0");
    BuiltinFunction f(Kind::quadratic);
    f.a_ = a;
    return f;
}

BuiltinFunction BuiltinFunction::abs() { return BuiltinFunction(Kind::abs); }

BuiltinFunction BuiltinFunction::linear(std::vector<double> a) {
    if (a.empty()) throw std::invalid_argument("linear: empty slope vector");
    BuiltinFunction f(Kind::linear);
    f.slope_ = std::move(a);
    return f;
}

BuiltinFunction BuiltinFunction::indicator(double lower, double upper) {
    if (!(lower <= upper)) throw std::invalid_argument("indicator: require lower <= upper");
    BuiltinFunction f(Kind::indicator);
    f.lower_ = lower;
    f.upper_ = upper;
    return f;
}

std::string BuiltinFunction::name() const {
    std::ostringstream os;
    switch (kind_) {
    case Kind::quadratic: os << "quadratic(a=" << a_ << ")"; break;
    case Kind::abs: os << "abs"; break;
    case Kind::linear:
        os << "linear(a=";
        for (std::size_t i = 0; i < slope_.size(); ++i) os << (i ? "," : "") << slope_[i];
        os << ")";
        break;
    case Kind::indicator: os << "indicator[" << lower_ << "," << upper_ << "]"; break;
    }
    return os.str();
}

namespace {
bool near(double a, double b) { return std::abs(a - b) <= BuiltinFunction::kNodeTol * (1.0 + std::abs(b)); }
} // namespace

ExtReal BuiltinFunction::value(std::span<const double> x) const {
    double s = 0.0;
    switch (kind_) {
    case Kind::quadratic:
        for (double v : x) s += v * v;
        return 0.5 * a_ * s;
    case Kind::abs:
        for (double v : x) s += std::abs(v);
        return s;
    case Kind::linear:
        if (slope_.size() != 1 && slope_.size() != x.size()) throw DimensionMismatch("linear: dimension mismatch");
        for (std::size_t i = 0; i < x.size(); ++i) s += slope_at(i) * x[i];
        return s;
    case Kind::indicator:
        for (double v : x)
            if ((v < lower_ && !near(v, lower_)) || (v > upper_ && !near(v, upper_))) return ExtReal::infinity();
        return 0.0;
    }
    return 0.0;
}

ExtReal BuiltinFunction::conjugate(std::span<const double> xstar) const {
    double s = 0.0;
    switch (kind_) {
    case Kind::quadratic:
        for (double v : xstar) s += v * v;
        return s / (2.0 * a_);
    case Kind::abs:
        for (double v : xstar)
            if (std::abs(v) > 1.0 && !near(std::abs(v), 1.0)) return ExtReal::infinity();
        return 0.0;
    case Kind::linear:
        if (slope_.size() != 1 && slope_.size() != xstar.size())
            throw DimensionMismatch("linear: dimension mismatch");
        for (std::size_t i = 0; i < xstar.size(); ++i)
            if (!near(xstar[i], slope_at(i))) return ExtReal::infinity();
        return 0.0;
    case Kind::indicator:
        for (double v : xstar) s += std::max(lower_ * v, upper_ * v);
        return s;
    }
    return 0.0;
}

DualBox BuiltinFunction::subdifferential(std::span<const double> x) const {
    if (value(x).is_infinite()) throw OutOfDomain("subdifferential: point outside dom f");
    DualBox box;
    box.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double v = x[i];
        switch (kind_) {
        case Kind::quadratic: box.push_back({a_ * v, a_ * v}); break;
        case Kind::abs:
            if (near(v, 0.0)) box.push_back({-1.0, 1.0});
            else box.push_back(v > 0 ? Interval{1.0, 1.0} : Interval{-1.0, -1.0});
            break;
        case Kind::linear: box.push_back({slope_at(i), slope_at(i)}); break;
        case Kind::indicator: {
            const bool at_lo = near(v, lower_), at_hi = near(v, upper_);
            if (at_lo && at_hi) box.push_back({-kInf, kInf});
            else if (at_lo) box.push_back({-kInf, 0.0});
            else if (at_hi) box.push_back({0.0, kInf});
            else box.push_back({0.0, 0.0});
            break;
        }
        }
    }
    return box;
}

std::vector<double> Matrix::apply(std::span<const double> v) const {
    if (v.size() != n) throw DimensionMismatch("Matrix: dimension mismatch");
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out[i] += data[i * n + j] * v[j];
    return out;
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m{n, std::vector<double>(n * n, 0.0)};
    for (std::size_t i = 0; i < n; ++i) m.data[i * n + i] = 1.0;
    return m;
}

OperatorSpec OperatorSpec::subdifferential(BuiltinFunction f) { return OperatorSpec(std::move(f)); }

OperatorSpec OperatorSpec::linear(Matrix m) {
    if (m.n == 0 || m.data.size() != m.n * m.n) throw DimensionMismatch("linear operator: malformed matrix");
    if (m.n > 2) throw std::invalid_argument("linear operator: only d <= 2 is supported");
    // ⟨Mv,v⟩ ≥ 0 for all v iff the symmetric part is positive semidefinite.
    constexpr double tol = 1e-12;
    const double s00 = m(0, 0);
    bool ok = s00 >= -tol;
    if (m.n == 2) {
        const double s11 = m(1, 1);
        const double s01 = 0.5 * (m(0, 1) + m(1, 0));
        ok = ok && s11 >= -tol && s00 * s11 - s01 * s01 >= -tol;
    }
    if (!ok) throw NotMonotone("linear operator: ⟨Mv,v⟩ < 0 for some v");
    return OperatorSpec(std::move(m));
}

OperatorSpec OperatorSpec::graph(OperatorGraph g) { return OperatorSpec(std::move(g)); }

OperatorSpec::Kind OperatorSpec::kind() const {
    switch (data_.index()) {
    case 0: return Kind::subdifferential;
    case 1: return Kind::linear;
    default: return Kind::graph;
    }
}

std::string OperatorSpec::name() const {
    switch (kind()) {
    case Kind::subdifferential: return "subdifferential of " + function().name();
    case Kind::linear: return "linear";
    case Kind::graph: return "graph";
    }
    return {};
}

DualSet operator_eval(const OperatorSpec& spec, std::span<const double> x, const Axes& primal_axes) {
    if (x.size() != primal_axes.size()) throw DimensionMismatch("operator_eval: point rank mismatch");
    for (std::size_t k = 0; k < x.size(); ++k)
        if (!primal_axes[k].covers(x[k])) throw OutOfDomain("operator_eval: point outside the primal box");

    DualSet out;
    switch (spec.kind()) {
    case OperatorSpec::Kind::subdifferential:
        if (spec.function().value(x).is_finite()) out.boxes.push_back(spec.function().subdifferential(x));
        break;
    case OperatorSpec::Kind::linear: {
        DualBox box;
        for (double v : spec.matrix().apply(x)) box.push_back({v, v});
        out.boxes.push_back(std::move(box));
        break;
    }
    case OperatorSpec::Kind::graph: {
        double tol = kInf;
        for (const auto& a : primal_axes) tol = std::min(tol, 1e-9 * a.spacing());
        for (const auto& p : spec.sampled_graph().pairs()) {
            bool match = true;
            for (std::size_t k = 0; k < x.size() && match; ++k) match = std::abs(p.x[k] - x[k]) <= tol;
            if (!match) continue;
            DualBox box;
            for (double v : p.xstar) box.push_back({v, v});
            out.boxes.push_back(std::move(box));
        }
        break;
    }
    }
    return out;
}

OperatorGraph sample_graph(const OperatorSpec& spec, const Axes& primal_axes, const Axes& dual_axes) {
    if (spec.kind() == OperatorSpec::Kind::graph) return spec.sampled_graph();
    if (primal_axes.size() != dual_axes.size()) throw DimensionMismatch("sample_graph: rank mismatch");
    const std::size_t d = primal_axes.size();
    const std::vector<double> xs = grid_points(primal_axes);
    const std::size_t n = grid_size(primal_axes);

    std::vector<GraphPoint> pairs;
    for (std::size_t p = 0; p < n; ++p) {
        std::span<const double> x(xs.data() + p * d, d);
        const DualSet tx = operator_eval(spec, x, primal_axes);
        for (const auto& box : tx.boxes) {
            // Per-coordinate candidate values, then their cartesian product.
            std::vector<std::vector<double>> choices(d);
            for (std::size_t k = 0; k < d; ++k) {
                if (box[k].degenerate()) {
                    choices[k].push_back(box[k].lo);
                    continue;
                }
                const GridAxis& a = dual_axes[k];
                for (std::size_t i = 0; i < a.points(); ++i)
                    if (box[k].contains(a.node(i), BuiltinFunction::kNodeTol)) choices[k].push_back(a.node(i));
            }
            std::vector<std::size_t> idx(d, 0);
            bool empty = false;
            for (const auto& c : choices) empty = empty || c.empty();
            if (empty) continue;
            while (true) {
                GraphPoint gp{std::vector<double>(x.begin(), x.end()), std::vector<double>(d)};
                for (std::size_t k = 0; k < d; ++k) gp.xstar[k] = choices[k][idx[k]];
                pairs.push_back(std::move(gp));
                std::size_t k = d;
                while (k-- > 0) {
                    if (++idx[k] < choices[k].size()) break;
                    idx[k] = 0;
                }
                if (k == static_cast<std::size_t>(-1)) break;
            }
        }
    }
    return OperatorGraph(std::move(pairs));
}

} // namespace autoconj
