#include "autoconj/a_iteration.hpp"

#include <algorithm>
#include <cmath>

namespace autoconj {

BifunctionGrid a_apply(const BifunctionGrid& h, const BifunctionGrid& h_conj) {
    if (h.base().axes() != h_conj.base().axes()) throw DimensionMismatch("a_apply: grids differ");
    std::vector<ExtReal> values(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) values[i] = 0.5 * (h[i] + h_conj[i]);
    return BifunctionGrid(GridFn(h.base().axes(), std::move(values)));
}

BifunctionGrid a_apply(const BifunctionGrid& h, const TruncationPolicy& policy) {
    return a_apply(h, conjugate_swap(h, policy));
}

GapReport gap(const BifunctionGrid& h, const BifunctionGrid& h_conj) {
    if (h.base().axes() != h_conj.base().axes()) throw DimensionMismatch("gap: grids differ");
    std::vector<ExtReal> field(h.size(), ExtReal::infinity());
    double sup = -kInf;
    std::size_t count = 0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (h[i].is_infinite() || h_conj[i].is_infinite()) continue;
        const double g = h[i].raw() - h_conj[i].raw();
        field[i] = g;
        sup = std::max(sup, g);
        ++count;
    }
    if (count == 0) throw ImproperFunction("gap: dom h and dom h*∘i do not intersect");
    return GapReport{GridFn(h.base().axes(), std::move(field)), sup, count};
}

GapReport gap(const BifunctionGrid& h, const TruncationPolicy& policy) { return gap(h, conjugate_swap(h, policy)); }

int stopping_bound(double gap1, double epsilon) {
    if (!(gap1 > 0.0) || !(epsilon > 0.0)) throw std::invalid_argument("stopping_bound: inputs must be positive");
    const double bound = 1.0 + std::log2(gap1) - std::log2(epsilon);
    return static_cast<int>(std::floor(bound)) + 1;
}

IterationTrace a_iterate(const BifunctionGrid& h, const IterateOptions& options) {
    if (!(options.epsilon > 0.0)) throw std::invalid_argument("a_iterate: epsilon must be positive");
    if (options.max_n < 1) throw std::invalid_argument("a_iterate: max_n must be at least 1");

    BifunctionGrid current = a_apply(h, options.policy);
    IterationTrace trace{{}, current, false, 0, {}};
    for (int n = 1;; ++n) {
        BifunctionGrid conj = conjugate_swap(current, options.policy);
        const GapReport g = gap(current, conj);
        trace.records.push_back({n, g.sup, current.base().finite_count()});
        if (options.keep_history) trace.history.push_back({current, conj});

        const bool reached = g.sup <= 2.0 * options.epsilon;
        if ((reached && !options.fixed_count) || n >= options.max_n) {
            trace.converged = reached;
            trace.n_final = n;
            trace.final = current;
            return trace;
        }
        current = a_apply(current, conj);
    }
}

IterationTrace a_iterate(const BifunctionGrid& h, double epsilon, int max_n) {
    IterateOptions o;
    o.epsilon = epsilon;
    o.max_n = max_n;
    return a_iterate(h, o);
}

AutoconjugateReport autoconjugate_check(const BifunctionGrid& h, double tol, const TruncationPolicy& policy) {
    const BifunctionGrid conj = conjugate_swap(h, policy);
    AutoconjugateReport r;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const bool fh = h[i].is_finite(), fc = conj[i].is_finite();
        if (fh && fc) r.max_residual = std::max(r.max_residual, std::abs(h[i].raw() - conj[i].raw()));
        else if (fh != fc && !h.base().on_edge(i)) ++r.domain_mismatches;
    }
    r.pass = r.domain_mismatches == 0 && r.max_residual <= tol;
    return r;
}

QcReport qc_check(const BifunctionGrid& h, const TruncationPolicy& policy) {
    const BifunctionGrid conj = conjugate_swap(h, policy);
    QcReport r;
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (h.base().on_edge(i)) continue;
        const bool fh = h[i].is_finite(), fc = conj[i].is_finite();
        r.dom_h += fh;
        r.dom_conj += fc;
        r.mismatches += (fh != fc);
    }
    r.pass = r.mismatches == 0;
    return r;
}

} // namespace autoconj
