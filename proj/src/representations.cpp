#include "autoconj/representations.hpp"

#include <algorithm>
#include <cmath>

namespace autoconj {

BifunctionGrid fenchel_young(const BuiltinFunction& f, const Axes& primal, const Axes& dual) {
    BifunctionGrid h = BifunctionGrid::sample(
        primal, dual, [&](std::span<const double> x, std::span<const double> xs) { return f.value(x) + f.conjugate(xs); });
    if (!h.base().is_proper()) throw ImproperFunction("fenchel_young: f^FY is identically +inf on the grid");
    return h;
}

BifunctionGrid fenchel_young(const GridFn& f, const Axes& dual, const TruncationPolicy& policy) {
    const GridFn fstar = effective(conjugate_fast(f, dual), policy);
    const std::size_t np = f.size(), nd = fstar.size();
    std::vector<ExtReal> values;
    values.reserve(np * nd);
    for (std::size_t p = 0; p < np; ++p)
        for (std::size_t q = 0; q < nd; ++q) values.push_back(f[p] + fstar[q]);
    return BifunctionGrid(f.axes(), dual, std::move(values));
}

BifunctionGrid fitzpatrick(const OperatorGraph& graph, const Axes& primal, const Axes& dual) {
    if (graph.dim() != primal.size() || primal.size() != dual.size())
        throw DimensionMismatch("fitzpatrick: graph and grid dimensions differ");
    const std::size_t d = graph.dim();
    const std::size_t ng = graph.size();
    std::vector<double> ys(ng * d), yss(ng * d), yy(ng);
    for (std::size_t g = 0; g < ng; ++g) {
        for (std::size_t k = 0; k < d; ++k) {
            ys[g * d + k] = graph[g].x[k];
            yss[g * d + k] = graph[g].xstar[k];
        }
        yy[g] = pairing(graph[g].x, graph[g].xstar);
    }
    const std::vector<double> xp = grid_points(primal);
    const std::vector<double> xd = grid_points(dual);
    const std::size_t np = grid_size(primal), nd = grid_size(dual);

    // ⟨x,y*⟩ depends only on the primal node; precompute it per sample.
    std::vector<double> x_dot_ys(ng);
    std::vector<ExtReal> values;
    values.reserve(np * nd);
    for (std::size_t p = 0; p < np; ++p) {
        for (std::size_t g = 0; g < ng; ++g) {
            double s = 0.0;
            for (std::size_t k = 0; k < d; ++k) s += xp[p * d + k] * yss[g * d + k];
            x_dot_ys[g] = s - yy[g];
        }
        for (std::size_t q = 0; q < nd; ++q) {
            double best = -kInf;
            for (std::size_t g = 0; g < ng; ++g) {
                double s = 0.0;
                for (std::size_t k = 0; k < d; ++k) s += ys[g * d + k] * xd[q * d + k];
                best = std::max(best, s + x_dot_ys[g]);
            }
            values.emplace_back(best);
        }
    }
    return BifunctionGrid(primal, dual, std::move(values));
}

BifunctionGrid sigma(const OperatorGraph& graph, const Axes& primal, const Axes& dual, const TruncationPolicy& policy) {
    return conjugate_swap(fitzpatrick(graph, primal, dual), policy);
}

BifunctionGrid combine(double lambda, const BifunctionGrid& a, const BifunctionGrid& b) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("combine: lambda must lie in [0,1]");
    if (a.base().axes() != b.base().axes()) throw DimensionMismatch("combine: grids differ");
    std::vector<ExtReal> values(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (lambda == 1.0) values[i] = a[i];
        else if (lambda == 0.0) values[i] = b[i];
        else values[i] = lambda * a[i] + (1.0 - lambda) * b[i];
    }
    return BifunctionGrid(GridFn(a.base().axes(), std::move(values)));
}

BifunctionGrid pairing_bifunction(const Axes& primal, const Axes& dual, double shift) {
    return BifunctionGrid::sample(primal, dual,
                                  [&](std::span<const double> x, std::span<const double> xs) { return pairing(x, xs) + shift; });
}

FamilyReport h_family_check(const BifunctionGrid& h, const OperatorGraph& graph, double tol) {
    if (graph.dim() != h.d()) throw DimensionMismatch("h_family_check: graph dimension differs from grid");
    FamilyReport r;
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (h[i].is_infinite()) continue;
        const double excess = h[i].raw() - h.pairing_at(i);
        if (excess < r.min_excess) {
            r.min_excess = excess;
            r.worst_node = i;
        }
    }
    const Axes primal = h.primal_axes(), dual = h.dual_axes();
    const std::size_t d = h.d();
    for (const auto& gp : graph.pairs()) {
        std::size_t p = 0, q = 0;
        for (std::size_t k = 0; k < d; ++k) {
            if (!primal[k].covers(gp.x[k]) || !dual[k].covers(gp.xstar[k]))
                throw OutOfDomain("h_family_check: graph point outside the grid box");
            p = p * primal[k].points() + primal[k].nearest(gp.x[k]);
            q = q * dual[k].points() + dual[k].nearest(gp.xstar[k]);
        }
        const std::size_t node = h.node(p, q);
        const double residual = h[node].is_infinite() ? kInf : std::abs(h[node].raw() - h.pairing_at(node));
        r.max_graph_residual = std::max(r.max_graph_residual, residual);
    }
    r.lower_bound_ok = r.min_excess >= -tol;
    r.graph_ok = r.max_graph_residual <= tol;
    return r;
}

} // namespace autoconj
