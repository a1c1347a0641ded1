#include "autoconj/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace autoconj {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_proper(const GridFn& f, const char* what) {
    if (!f.is_proper()) throw ImproperFunction(std::string(what) + ": function is identically +inf");
}

void require_rank(const GridFn& f, const Axes& dual_axes) {
    if (dual_axes.size() != f.dim()) throw DimensionMismatch("conjugate: dual grid rank differs from primal rank");
}

std::vector<double> raw_values(const GridFn& f) {
    std::vector<double> v(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) v[i] = f[i].raw();
    return v;
}

bool flagged(double full, double interior) {
    return !(interior >= full - kBoundaryFlagTol * (1.0 + std::abs(full)));
}

// Transforms one axis at a time, last axis first. The first pass subtracts f;
// later passes subtract the negated partial maxima, which equals adding them
// bit for bit.
std::vector<double> staged_transform(std::vector<double> cur, const Axes& in_axes, const Axes& dual_axes) {
    const std::size_t m = in_axes.size();
    std::vector<std::size_t> shape(m);
    for (std::size_t k = 0; k < m; ++k) shape[k] = in_axes[k].points();

    std::vector<double> next, xs, ss, c, out;
    for (std::size_t k = m; k-- > 0;) {
        const std::size_t nk = shape[k];
        const std::size_t mk = dual_axes[k].points();
        std::size_t outer = 1, inner = 1;
        for (std::size_t a = 0; a < k; ++a) outer *= shape[a];
        for (std::size_t a = k + 1; a < m; ++a) inner *= shape[a];

        xs.resize(nk);
        ss.resize(mk);
        for (std::size_t j = 0; j < nk; ++j) xs[j] = in_axes[k].node(j);
        for (std::size_t i = 0; i < mk; ++i) ss[i] = dual_axes[k].node(i);
        c.resize(nk);
        out.resize(mk);
        next.assign(outer * mk * inner, kNegInf);

        const bool first = (k == m - 1);
        for (std::size_t o = 0; o < outer; ++o) {
            for (std::size_t in = 0; in < inner; ++in) {
                const double* src = cur.data() + o * nk * inner + in;
                for (std::size_t j = 0; j < nk; ++j) c[j] = first ? src[j * inner] : -src[j * inner];
                detail::conjugate_line_hull(xs, c, ss, out);
                double* dst = next.data() + o * mk * inner + in;
                for (std::size_t i = 0; i < mk; ++i) dst[i * inner] = out[i];
            }
        }
        shape[k] = mk;
        cur.swap(next);
    }
    return cur;
}

ConjugateResult assemble(const Axes& dual_axes, const std::vector<double>& full, const std::vector<double>& interior) {
    std::vector<ExtReal> values;
    values.reserve(full.size());
    std::vector<bool> flags(full.size());
    for (std::size_t i = 0; i < full.size(); ++i) {
        values.emplace_back(full[i]);
        flags[i] = flagged(full[i], interior[i]);
    }
    return ConjugateResult{GridFn(dual_axes, std::move(values)), std::move(flags)};
}

} // namespace

namespace detail {

void conjugate_line_brute(std::span<const double> xs, std::span<const double> c, std::span<const double> s,
                          std::span<double> out) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        double best = kNegInf;
        for (std::size_t j = 0; j < xs.size(); ++j) {
            if (std::isinf(c[j])) continue;
            const double v = xs[j] * s[i] - c[j];
            if (v > best) best = v;
        }
        out[i] = best;
    }
}

void conjugate_line_hull(std::span<const double> xs, std::span<const double> c, std::span<const double> s,
                         std::span<double> out) {
    thread_local std::vector<std::size_t> hull;
    thread_local std::vector<double> slope;
    hull.clear();
    for (std::size_t j = 0; j < xs.size(); ++j) {
        if (std::isinf(c[j])) continue;
        while (hull.size() >= 2) {
            const std::size_t a = hull[hull.size() - 2], b = hull.back();
            const double cross = (xs[b] - xs[a]) * (c[j] - c[a]) - (c[b] - c[a]) * (xs[j] - xs[a]);
            if (cross > 0.0) break;
            hull.pop_back();
        }
        hull.push_back(j);
    }
    if (hull.empty()) {
        std::fill(out.begin(), out.end(), kNegInf);
        return;
    }
    const std::size_t h = hull.size();
    slope.resize(h - 1);
    for (std::size_t k = 0; k + 1 < h; ++k)
        slope[k] = (c[hull[k + 1]] - c[hull[k]]) / (xs[hull[k + 1]] - xs[hull[k]]);

    // Vertices before lo lose to lo by at least tau·spacing, vertices after hi
    // lose to hi likewise; the nodes in between are enumerated so near-ties
    // resolve exactly as plain enumeration would.
    std::size_t lo = 0, hi = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double sv = s[i];
        const double tau = 1e-9 * (1.0 + std::abs(sv));
        while (lo + 1 < h && slope[lo] < sv - tau) ++lo;
        if (hi < lo) hi = lo;
        while (hi + 1 < h && slope[hi] <= sv + tau) ++hi;
        double best = kNegInf;
        for (std::size_t j = hull[lo]; j <= hull[hi]; ++j) {
            if (std::isinf(c[j])) continue;
            const double v = xs[j] * sv - c[j];
            if (v > best) best = v;
        }
        out[i] = best;
    }
}

} // namespace detail

ConjugateResult conjugate_brute(const GridFn& f, const Axes& dual_axes) {
    require_proper(f, "conjugate_brute");
    require_rank(f, dual_axes);
    const std::size_t m = f.dim();
    const std::vector<double> xpts = grid_points(f.axes());
    const std::vector<double> spts = grid_points(dual_axes);
    const std::size_t np = f.size(), nd = grid_size(dual_axes);

    std::vector<bool> edge(np);
    for (std::size_t p = 0; p < np; ++p) edge[p] = f.on_edge(p);
    const std::vector<double> fv = raw_values(f);

    std::vector<double> full(nd, kNegInf), interior(nd, kNegInf);
    for (std::size_t q = 0; q < nd; ++q) {
        const double* s = spts.data() + q * m;
        double best = kNegInf, best_in = kNegInf;
        for (std::size_t p = 0; p < np; ++p) {
            if (std::isinf(fv[p])) continue;
            const double* x = xpts.data() + p * m;
            double v = x[m - 1] * s[m - 1] - fv[p];
            for (std::size_t k = m - 1; k-- > 0;) v = x[k] * s[k] + v;
            if (v > best) best = v;
            if (!edge[p] && v > best_in) best_in = v;
        }
        full[q] = best;
        interior[q] = best_in;
    }
    return assemble(dual_axes, full, interior);
}

ConjugateResult conjugate_fast(const GridFn& f, const Axes& dual_axes) {
    require_proper(f, "conjugate_fast");
    require_rank(f, dual_axes);
    std::vector<double> fv = raw_values(f);
    std::vector<double> fin(fv);
    for (std::size_t p = 0; p < f.size(); ++p)
        if (f.on_edge(p)) fin[p] = kInf;
    const std::vector<double> full = staged_transform(std::move(fv), f.axes(), dual_axes);
    const std::vector<double> interior = staged_transform(std::move(fin), f.axes(), dual_axes);
    return assemble(dual_axes, full, interior);
}

ConjugateResult conjugate(const GridFn& f, const Axes& dual_axes, ConjugateMethod method) {
    return method == ConjugateMethod::fast ? conjugate_fast(f, dual_axes) : conjugate_brute(f, dual_axes);
}

namespace {
bool treat_as_infinite(double v, bool flag, bool on_edge, const TruncationPolicy& policy) {
    if (v > policy.flag_ceiling) return true;
    return policy.flagged_as_infinite && flag && !on_edge;
}
} // namespace

GridFn effective(const ConjugateResult& r, const TruncationPolicy& policy) {
    std::vector<ExtReal> values(r.fn.values().begin(), r.fn.values().end());
    for (std::size_t i = 0; i < values.size(); ++i)
        if (treat_as_infinite(values[i].raw(), r.boundary_flags[i], r.fn.on_edge(i), policy))
            values[i] = ExtReal::infinity();
    return GridFn(r.fn.axes(), std::move(values));
}

BifunctionGrid SwapResult::effective(const TruncationPolicy& policy) const {
    std::vector<ExtReal> values(raw.values().begin(), raw.values().end());
    for (std::size_t i = 0; i < values.size(); ++i)
        if (treat_as_infinite(values[i].raw(), boundary_flags[i], raw.base().on_edge(i), policy))
            values[i] = ExtReal::infinity();
    return BifunctionGrid(GridFn(raw.base().axes(), std::move(values)));
}

SwapResult conjugate_swap_detailed(const BifunctionGrid& h, ConjugateMethod method) {
    if (!h.base().is_proper()) throw ImproperFunction("conjugate_swap: bifunction is identically +inf");
    const Axes primal = h.primal_axes();
    const Axes dual = h.dual_axes();
    // y pairs with x* and y* pairs with x, so the conjugate lands on X* × X.
    Axes swapped(dual);
    swapped.insert(swapped.end(), primal.begin(), primal.end());
    const ConjugateResult r = conjugate(h.base(), swapped, method);

    const std::size_t np = h.primal_size(), nd = h.dual_size();
    std::vector<ExtReal> values(np * nd);
    std::vector<bool> flags(np * nd);
    for (std::size_t q = 0; q < nd; ++q) {
        for (std::size_t p = 0; p < np; ++p) {
            values[p * nd + q] = r.fn[q * np + p];
            flags[p * nd + q] = r.boundary_flags[q * np + p];
        }
    }
    return SwapResult{BifunctionGrid(primal, dual, std::move(values)), std::move(flags)};
}

BifunctionGrid conjugate_swap(const BifunctionGrid& h, const TruncationPolicy& policy, ConjugateMethod method) {
    return conjugate_swap_detailed(h, method).effective(policy);
}

GridFn biconjugate(const GridFn& f, const Axes& dual_axes) {
    const ConjugateResult once = conjugate_fast(f, dual_axes);
    return conjugate_fast(once.fn, f.axes()).fn;
}

GridFn biconjugate(const GridFn& f) { return biconjugate(f, doubled_box(f.axes())); }

GridFn add(const GridFn& f, const GridFn& g) {
    if (f.axes() != g.axes()) throw DimensionMismatch("add: axes differ");
    std::vector<ExtReal> values(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) values[i] = f[i] + g[i];
    return GridFn(f.axes(), std::move(values));
}

GridFn inf_convolution(const GridFn& f, const GridFn& g) {
    if (f.axes() != g.axes()) throw DimensionMismatch("inf_convolution: axes differ");
    require_proper(f, "inf_convolution");
    require_proper(g, "inf_convolution");
    const Axes& axes = f.axes();
    const std::size_t m = axes.size();
    const std::size_t n = f.size();

    std::vector<std::size_t> fin_f, fin_g;
    for (std::size_t i = 0; i < n; ++i) {
        if (f[i].is_finite()) fin_f.push_back(i);
        if (g[i].is_finite()) fin_g.push_back(i);
    }
    const std::vector<double> pts = grid_points(axes);
    std::vector<double> best(n, kInf);
    std::vector<std::size_t> strides(m, 1);
    for (std::size_t k = m - 1; k > 0; --k) strides[k - 1] = strides[k] * axes[k].points();

    for (std::size_t a : fin_f) {
        for (std::size_t b : fin_g) {
            std::size_t z = 0;
            bool inside = true;
            for (std::size_t k = 0; k < m && inside; ++k) {
                const double sum = pts[a * m + k] + pts[b * m + k];
                const double t = std::round((sum - axes[k].min()) / axes[k].spacing());
                if (t < 0.0 || t > static_cast<double>(axes[k].points() - 1)) inside = false;
                else z += static_cast<std::size_t>(t) * strides[k];
            }
            if (!inside) continue;
            const double v = f[a].raw() + g[b].raw();
            if (v < best[z]) best[z] = v;
        }
    }
    std::vector<ExtReal> values(best.begin(), best.end());
    return GridFn(axes, std::move(values));
}

} // namespace autoconj
