#pragma once

#include <vector>

#include "autoconj/grid.hpp"

namespace autoconj {

/// Discrete Legendre–Fenchel conjugate on a dual grid.
///
/// The value at a dual node s is max over finite primal nodes x of
/// ⟨x,s⟩ − f(x), where the inner product is accumulated from the last axis to
/// the first: v = x_{m-1}s_{m-1} − f(x), then v = x_k s_k + v. Fixing that
/// order makes the factored transform bit-identical to plain enumeration.
///
/// boundary_flags[i] is set when the sup restricted to interior primal nodes
/// falls short of the full sup, i.e. the maximum is attained only on the
/// boundary of the primal box and the true conjugate may be larger.
struct ConjugateResult {
    GridFn fn;
    std::vector<bool> boundary_flags;
};

/// How truncated conjugate values enter domain-sensitive computations.
struct TruncationPolicy {
    /// Values above the ceiling are treated as +inf.
    double flag_ceiling = 1e6;
    /// Boundary-flagged values at nodes strictly inside the output box are
    /// treated as +inf. Flagged nodes on the box edge keep their value.
    bool flagged_as_infinite = true;
};

enum class ConjugateMethod { fast, brute };

/// Relative gap used to decide that the interior sup falls short of the full sup.
inline constexpr double kBoundaryFlagTol = 1e-9;

ConjugateResult conjugate_brute(const GridFn& f, const Axes& dual_axes);

/// Axis-by-axis transform with a linear-time lower-hull scan per line.
ConjugateResult conjugate_fast(const GridFn& f, const Axes& dual_axes);

ConjugateResult conjugate(const GridFn& f, const Axes& dual_axes, ConjugateMethod method = ConjugateMethod::fast);

/// Applies the truncation policy: flagged or over-ceiling values become +inf.
GridFn effective(const ConjugateResult& r, const TruncationPolicy& policy = {});

struct SwapResult {
    BifunctionGrid raw;
    std::vector<bool> boundary_flags;

    BifunctionGrid effective(const TruncationPolicy& policy = {}) const;
};

/// (x,x*) ↦ sup over grid (y,y*) of ⟨y,x*⟩ + ⟨x,y*⟩ − h(y,y*), i.e. h*∘i
/// evaluated on the grid of h.
SwapResult conjugate_swap_detailed(const BifunctionGrid& h, ConjugateMethod method = ConjugateMethod::fast);

BifunctionGrid conjugate_swap(const BifunctionGrid& h, const TruncationPolicy& policy = {},
                              ConjugateMethod method = ConjugateMethod::fast);

/// Conjugate onto dual_axes, then back onto the axes of f. Raw (untruncated)
/// values are used in both passes, so the result never exceeds f beyond rounding.
GridFn biconjugate(const GridFn& f, const Axes& dual_axes);
GridFn biconjugate(const GridFn& f);

/// (f⊕g)(z) = min over node pairs with z₁+z₂ binned to the nearest node z of f(z₁)+g(z₂).
/// Sums falling outside the box are dropped.
GridFn inf_convolution(const GridFn& f, const GridFn& g);

/// Pointwise sum with +inf absorbing; axes must match.
GridFn add(const GridFn& f, const GridFn& g);

namespace detail {
// out[i] = max over finite c[j] of fl(xs[j]*s[i] − c[j]); −inf when every c[j] is +inf.
// The s values must be ascending for the hull variant.
void conjugate_line_brute(std::span<const double> xs, std::span<const double> c, std::span<const double> s,
                          std::span<double> out);
void conjugate_line_hull(std::span<const double> xs, std::span<const double> c, std::span<const double> s,
                         std::span<double> out);
} // namespace detail

} // namespace autoconj
