#include "autoconj/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace autoconj {

GridAxis::GridAxis(double min, double max, std::size_t points)
    : min_(min), max_(max), points_(points), spacing_(0.0) {
    if (!std::isfinite(min) || !std::isfinite(max) || !(min < max))
        throw std::invalid_argument("GridAxis: require finite min < max");
    if (points < 2) throw std::invalid_argument("GridAxis: require at least 2 points");
    spacing_ = (max - min) / static_cast<double>(points - 1);
}

std::size_t GridAxis::nearest(double v) const {
    const double t = std::round((v - min_) / spacing_);
    if (!(t > 0.0)) return 0;
    if (t >= static_cast<double>(points_ - 1)) return points_ - 1;
    return static_cast<std::size_t>(t);
}

bool GridAxis::covers(double v) const {
    return v >= min_ - 0.5 * spacing_ && v <= max_ + 0.5 * spacing_;
}

std::size_t grid_size(const Axes& axes) {
    std::size_t n = 1;
    for (const auto& a : axes) n *= a.points();
    return n;
}

GridFn::GridFn(Axes axes, std::vector<ExtReal> values) : axes_(std::move(axes)), values_(std::move(values)) {
    if (axes_.empty()) throw std::invalid_argument("GridFn: at least one axis required");
    if (values_.size() != grid_size(axes_))
        throw DimensionMismatch("GridFn: value count does not match the product of axis sizes");
    strides_.assign(axes_.size(), 1);
    for (std::size_t k = axes_.size() - 1; k > 0; --k) strides_[k - 1] = strides_[k] * axes_[k].points();
}

GridFn::GridFn(Axes axes, ExtReal fill) : GridFn(axes, std::vector<ExtReal>(grid_size(axes), fill)) {}

GridFn GridFn::sample(Axes axes, const std::function<ExtReal(std::span<const double>)>& fn) {
    const std::size_t n = grid_size(axes);
    std::vector<ExtReal> values;
    values.reserve(n);
    const std::vector<double> pts = grid_points(axes);
    const std::size_t m = axes.size();
    for (std::size_t i = 0; i < n; ++i) values.push_back(fn(std::span<const double>(pts.data() + i * m, m)));
    return GridFn(std::move(axes), std::move(values));
}

std::size_t GridFn::flat(std::span<const std::size_t> index) const {
    if (index.size() != axes_.size()) throw DimensionMismatch("GridFn: index rank mismatch");
    std::size_t f = 0;
    for (std::size_t k = 0; k < index.size(); ++k) {
        if (index[k] >= axes_[k].points()) throw std::out_of_range("GridFn: index out of bounds");
        f += index[k] * strides_[k];
    }
    return f;
}

std::vector<std::size_t> GridFn::unflatten(std::size_t flat) const {
    if (flat >= values_.size()) throw std::out_of_range("GridFn: flat index out of bounds");
    std::vector<std::size_t> idx(axes_.size());
    for (std::size_t k = 0; k < axes_.size(); ++k) {
        idx[k] = flat / strides_[k];
        flat %= strides_[k];
    }
    return idx;
}

void GridFn::coords(std::size_t flat, std::span<double> out) const {
    if (out.size() != axes_.size()) throw DimensionMismatch("GridFn: coordinate buffer rank mismatch");
    if (flat >= values_.size()) throw std::out_of_range("GridFn: flat index out of bounds");
    for (std::size_t k = 0; k < axes_.size(); ++k) {
        out[k] = axes_[k].node(flat / strides_[k]);
        flat %= strides_[k];
    }
}

std::vector<double> GridFn::coords(std::size_t flat) const {
    std::vector<double> out(axes_.size());
    coords(flat, out);
    return out;
}

bool GridFn::on_edge(std::size_t flat) const {
    for (std::size_t k = 0; k < axes_.size(); ++k) {
        if (axes_[k].is_edge(flat / strides_[k])) return true;
        flat %= strides_[k];
    }
    return false;
}

ExtReal GridFn::at(std::size_t flat) const {
    if (flat >= values_.size()) throw std::out_of_range("GridFn: flat index out of bounds");
    return values_[flat];
}

std::size_t GridFn::nearest_node(std::span<const double> point) const {
    if (point.size() != axes_.size()) throw DimensionMismatch("GridFn: point rank mismatch");
    std::size_t f = 0;
    for (std::size_t k = 0; k < axes_.size(); ++k) {
        if (!axes_[k].covers(point[k])) throw OutOfDomain("GridFn: point outside the grid box");
        f += axes_[k].nearest(point[k]) * strides_[k];
    }
    return f;
}

std::size_t GridFn::finite_count() const {
    return static_cast<std::size_t>(
        std::count_if(values_.begin(), values_.end(), [](ExtReal v) { return v.is_finite(); }));
}

std::vector<bool> GridFn::domain() const {
    std::vector<bool> dom(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) dom[i] = values_[i].is_finite();
    return dom;
}

std::vector<double> grid_points(const Axes& axes) {
    const std::size_t n = grid_size(axes);
    const std::size_t m = axes.size();
    std::vector<double> pts(n * m);
    std::vector<std::size_t> idx(m, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < m; ++k) pts[i * m + k] = axes[k].node(idx[k]);
        for (std::size_t k = m; k-- > 0;) {
            if (++idx[k] < axes[k].points()) break;
            idx[k] = 0;
        }
    }
    return pts;
}

Axes doubled_box(const Axes& axes) {
    Axes out;
    out.reserve(axes.size());
    for (const auto& a : axes) out.emplace_back(2.0 * a.min(), 2.0 * a.max(), a.points());
    return out;
}

// ---------------------------------------------------------------------------

namespace {
Axes concat(const Axes& a, const Axes& b) {
    Axes out(a);
    out.insert(out.end(), b.begin(), b.end());
    return out;
}
} // namespace

BifunctionGrid::BifunctionGrid(GridFn base) : base_(std::move(base)) { init(); }

BifunctionGrid::BifunctionGrid(const Axes& primal, const Axes& dual, std::vector<ExtReal> values)
    : base_(concat(primal, dual), std::move(values)) {
    if (primal.size() != dual.size()) throw DimensionMismatch("BifunctionGrid: primal/dual rank mismatch");
    init();
}

void BifunctionGrid::init() {
    const std::size_t m = base_.dim();
    if (m % 2 != 0) throw DimensionMismatch("BifunctionGrid: needs an even number of axes");
    d_ = m / 2;
    const Axes primal(base_.axes().begin(), base_.axes().begin() + static_cast<std::ptrdiff_t>(d_));
    const Axes dual(base_.axes().begin() + static_cast<std::ptrdiff_t>(d_), base_.axes().end());
    primal_size_ = grid_size(primal);
    dual_size_ = grid_size(dual);
    primal_pts_ = grid_points(primal);
    dual_pts_ = grid_points(dual);
}

BifunctionGrid BifunctionGrid::sample(
    const Axes& primal, const Axes& dual,
    const std::function<ExtReal(std::span<const double>, std::span<const double>)>& fn) {
    if (primal.size() != dual.size()) throw DimensionMismatch("BifunctionGrid: primal/dual rank mismatch");
    const std::size_t d = primal.size();
    const std::vector<double> xs = grid_points(primal);
    const std::vector<double> ys = grid_points(dual);
    const std::size_t np = grid_size(primal), nd = grid_size(dual);
    std::vector<ExtReal> values;
    values.reserve(np * nd);
    for (std::size_t p = 0; p < np; ++p)
        for (std::size_t q = 0; q < nd; ++q)
            values.push_back(fn(std::span<const double>(xs.data() + p * d, d),
                                std::span<const double>(ys.data() + q * d, d)));
    return BifunctionGrid(primal, dual, std::move(values));
}

Axes BifunctionGrid::primal_axes() const {
    return Axes(base_.axes().begin(), base_.axes().begin() + static_cast<std::ptrdiff_t>(d_));
}

Axes BifunctionGrid::dual_axes() const {
    return Axes(base_.axes().begin() + static_cast<std::ptrdiff_t>(d_), base_.axes().end());
}

double BifunctionGrid::pairing_at(std::size_t flat) const {
    return pairing(primal_point(primal_of(flat)), dual_point(dual_of(flat)));
}

std::size_t BifunctionGrid::primal_node_of(std::span<const double> x) const {
    if (x.size() != d_) throw DimensionMismatch("BifunctionGrid: primal point rank mismatch");
    std::size_t p = 0;
    for (std::size_t k = 0; k < d_; ++k) {
        const GridAxis& a = base_.axes()[k];
        const std::size_t i = a.nearest(x[k]);
        if (std::abs(a.node(i) - x[k]) > 1e-9 * a.spacing()) {
            std::ostringstream os;
            os << "primal point coordinate " << x[k] << " is not a grid node";
            throw OutOfDomain(os.str());
        }
        p = p * a.points() + i;
    }
    return p;
}

double pairing(std::span<const double> x, std::span<const double> xstar) {
    if (x.size() != xstar.size()) throw DimensionMismatch("pairing: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * xstar[i];
    return s;
}

double bipairing(std::span<const double> x, std::span<const double> xstar, std::span<const double> ystar,
                 std::span<const double> y) {
    return pairing(x, ystar) + pairing(y, xstar);
}

} // namespace autoconj
