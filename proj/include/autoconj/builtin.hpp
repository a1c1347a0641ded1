#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "autoconj/ext_real.hpp"
#include "autoconj/grid.hpp"
#include "autoconj/operator_graph.hpp"

namespace autoconj {

/// Closed interval with possibly infinite ends.
struct Interval {
    double lo;
    double hi;

    bool contains(double v, double tol = 0.0) const { return v >= lo - tol && v <= hi + tol; }
    bool degenerate() const { return lo == hi; }
};

using DualBox = std::vector<Interval>;

/// Finite union of boxes in X*; points are degenerate boxes.
struct DualSet {
    std::vector<DualBox> boxes;

    bool empty() const { return boxes.empty(); }
    bool contains(std::span<const double> xstar, double tol = 0.0) const;
    /// Sup-norm distance from xstar to the set (+inf when empty).
    double distance(std::span<const double> xstar) const;
};

/// Closed-form convex functions used as test problems. All kinds are separable
/// over coordinates except `linear`, which is ⟨a,·⟩:
///   quadratic(a):  ½a‖x‖²              conj ‖s‖²/(2a)
///   abs:           Σ|xᵢ|                conj indicator of [−1,1]^d
///   linear(a):     ⟨a,x⟩                conj indicator of {a}
///   indicator(l,u): indicator of [l,u]^d conj Σ max(l·sᵢ, u·sᵢ)
class BuiltinFunction {
public:
    enum class Kind { quadratic, abs, linear, indicator };

    static BuiltinFunction quadratic(double a);
    static BuiltinFunction abs();
    static BuiltinFunction linear(std::vector<double> a);
    static BuiltinFunction indicator(double lower, double upper);

    Kind kind() const { return kind_; }
    std::string name() const;

    ExtReal value(std::span<const double> x) const;
    ExtReal conjugate(std::span<const double> xstar) const;

    /// ∂f(x) as a box; throws OutOfDomain when f(x) = +inf.
    DualBox subdifferential(std::span<const double> x) const;

    double a() const { return a_; }
    const std::vector<double>& slope() const { return slope_; }
    double lower() const { return lower_; }
    double upper() const { return upper_; }

    /// Tolerance for recognizing grid nodes that sit on kinks or constraint
    /// boundaries (grid coordinates carry rounding).
    static constexpr double kNodeTol = 1e-12;

private:
    BuiltinFunction(Kind kind) : kind_(kind) {}
    double slope_at(std::size_t i) const { return slope_.size() == 1 ? slope_[0] : slope_[i]; }

    Kind kind_;
    double a_ = 1.0;
    std::vector<double> slope_;
    double lower_ = 0.0;
    double upper_ = 0.0;
};

/// Dense d×d matrix, row-major.
struct Matrix {
    std::size_t n = 0;
    std::vector<double> data;

    double operator()(std::size_t i, std::size_t j) const { return data[i * n + j]; }
    std::vector<double> apply(std::span<const double> v) const;
    static Matrix identity(std::size_t n);
};

/// A monotone operator T: the subdifferential of a builtin, a monotone linear
/// map (symmetric PSD part, skew part allowed), or an explicit sampled graph.
class OperatorSpec {
public:
    enum class Kind { subdifferential, linear, graph };

    static OperatorSpec subdifferential(BuiltinFunction f);
    static OperatorSpec linear(Matrix m);
    static OperatorSpec graph(OperatorGraph g);

    Kind kind() const;
    std::string name() const;

    const BuiltinFunction& function() const { return std::get<BuiltinFunction>(data_); }
    const Matrix& matrix() const { return std::get<Matrix>(data_); }
    const OperatorGraph& sampled_graph() const { return std::get<OperatorGraph>(data_); }

private:
    explicit OperatorSpec(std::variant<BuiltinFunction, Matrix, OperatorGraph> data) : data_(std::move(data)) {}
    std::variant<BuiltinFunction, Matrix, OperatorGraph> data_;
};

/// T(x) in closed form. Graph operators return the exact matches among their
/// samples. Throws OutOfDomain when x lies outside the primal box.
DualSet operator_eval(const OperatorSpec& spec, std::span<const double> x, const Axes& primal_axes);

/// Samples gph(T) at primal grid resolution. Non-degenerate subdifferential
/// intervals (the kink of |·|) are filled with the dual grid nodes they contain.
OperatorGraph sample_graph(const OperatorSpec& spec, const Axes& primal_axes, const Axes& dual_axes);

} // namespace autoconj
