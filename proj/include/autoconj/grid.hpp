#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "autoconj/ext_real.hpp"

namespace autoconj {

/// Uniform axis with `points` nodes from `min` to `max`.
class GridAxis {
public:
    GridAxis(double min, double max, std::size_t points);

    double min() const { return min_; }
    double max() const { return max_; }
    std::size_t points() const { return points_; }
    double spacing() const { return spacing_; }

    double node(std::size_t i) const { return min_ + static_cast<double>(i) * spacing_; }

    /// Index of the node closest to v, clamped to the axis.
    std::size_t nearest(double v) const;

    /// True when v lies within half a cell of the axis range.
    bool covers(double v) const;

    bool is_edge(std::size_t i) const { return i == 0 || i + 1 == points_; }

    friend bool operator==(const GridAxis&, const GridAxis&) = default;

private:
    double min_;
    double max_;
    std::size_t points_;
    double spacing_;
};

using Axes = std::vector<GridAxis>;

/// Extended-real function sampled on a rectangular grid. Values are stored
/// row-major (last axis fastest). Immutable after construction.
class GridFn {
public:
    GridFn(Axes axes, std::vector<ExtReal> values);
    GridFn(Axes axes, ExtReal fill);

    /// Evaluates `fn` at every node.
    static GridFn sample(Axes axes, const std::function<ExtReal(std::span<const double>)>& fn);

    const Axes& axes() const { return axes_; }
    std::size_t dim() const { return axes_.size(); }
    std::size_t size() const { return values_.size(); }

    std::size_t flat(std::span<const std::size_t> index) const;
    std::vector<std::size_t> unflatten(std::size_t flat) const;
    void coords(std::size_t flat, std::span<double> out) const;
    std::vector<double> coords(std::size_t flat) const;

    /// True when the node sits on the boundary of the grid box.
    bool on_edge(std::size_t flat) const;

    ExtReal eval(std::span<const std::size_t> index) const { return values_[flat(index)]; }
    ExtReal at(std::size_t flat) const;
    ExtReal operator[](std::size_t flat) const { return values_[flat]; }
    std::span<const ExtReal> values() const { return values_; }

    /// Nearest-node lookup for an arbitrary point inside the box.
    std::size_t nearest_node(std::span<const double> point) const;

    std::size_t finite_count() const;
    bool is_proper() const { return finite_count() > 0; }
    std::vector<bool> domain() const;

private:
    Axes axes_;
    std::vector<std::size_t> strides_;
    std::vector<ExtReal> values_;
};

/// Function on X × X*: the first d axes discretize X, the last d discretize X*.
class BifunctionGrid {
public:
    explicit BifunctionGrid(GridFn base);
    BifunctionGrid(const Axes& primal, const Axes& dual, std::vector<ExtReal> values);

    static BifunctionGrid sample(const Axes& primal, const Axes& dual,
                                 const std::function<ExtReal(std::span<const double>, std::span<const double>)>& fn);

    const GridFn& base() const { return base_; }
    std::size_t d() const { return d_; }
    Axes primal_axes() const;
    Axes dual_axes() const;

    std::size_t size() const { return base_.size(); }
    std::size_t primal_size() const { return primal_size_; }
    std::size_t dual_size() const { return dual_size_; }

    std::size_t node(std::size_t primal_flat, std::size_t dual_flat) const {
        return primal_flat * dual_size_ + dual_flat;
    }
    std::size_t primal_of(std::size_t flat) const { return flat / dual_size_; }
    std::size_t dual_of(std::size_t flat) const { return flat % dual_size_; }

    /// Coordinates of primal node p (length d), contiguous per node.
    std::span<const double> primal_point(std::size_t p) const { return {primal_pts_.data() + p * d_, d_}; }
    std::span<const double> dual_point(std::size_t q) const { return {dual_pts_.data() + q * d_, d_}; }

    /// ⟨x, x*⟩ at a flat node.
    double pairing_at(std::size_t flat) const;

    ExtReal operator[](std::size_t flat) const { return base_[flat]; }
    std::span<const ExtReal> values() const { return base_.values(); }

    /// Primal node index for a point that must coincide with a grid node.
    std::size_t primal_node_of(std::span<const double> x) const;

private:
    void init();

    GridFn base_;
    std::size_t d_ = 0;
    std::size_t primal_size_ = 0;
    std::size_t dual_size_ = 0;
    std::vector<double> primal_pts_;
    std::vector<double> dual_pts_;
};

/// Σ xᵢ·x*ᵢ.
double pairing(std::span<const double> x, std::span<const double> xstar);

/// ⟨(x,x*),(y*,y)⟩ = ⟨x,y*⟩ + ⟨y,x*⟩.
double bipairing(std::span<const double> x, std::span<const double> xstar,
                 std::span<const double> ystar, std::span<const double> y);

/// Every node of a rectangular grid as a flattened list of points.
std::vector<double> grid_points(const Axes& axes);
std::size_t grid_size(const Axes& axes);

/// The default dual box: each axis doubled about its center, same point count.
Axes doubled_box(const Axes& axes);

} // namespace autoconj
