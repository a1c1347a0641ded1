#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "autoconj/builtin.hpp"
#include "autoconj/error.hpp"
#include "autoconj/representations.hpp"
#include "autoconj/transforms.hpp"

using namespace autoconj;

namespace {

constexpr double kTolDisc = 1e-2;

GridFn sample(const Axes& ax, const BuiltinFunction& b) {
    return GridFn::sample(ax, [&](std::span<const double> x) { return b.value(x); });
}

// Independent oracle: direct double loop in plain arithmetic.
double naive_conjugate(const GridFn& f, double s) {
    double best = -kInf;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (f[i].is_finite()) best = std::max(best, f.coords(i)[0] * s - f[i].raw());
    return best;
}

GridFn random_fn(std::mt19937& rng, const Axes& ax, double inf_rate) {
    std::uniform_real_distribution<double> v(-3, 3), coin(0, 1);
    std::vector<ExtReal> vals(grid_size(ax));
    for (auto& e : vals) e = coin(rng) < inf_rate ? kInf : ExtReal(v(rng));
    vals[rng() % vals.size()] = v(rng);
    return GridFn(ax, vals);
}

void expect_identical(const ConjugateResult& a, const ConjugateResult& b) {
    ASSERT_EQ(a.fn.size(), b.fn.size());
    EXPECT_EQ(a.boundary_flags, b.boundary_flags);
    for (std::size_t i = 0; i < a.fn.size(); ++i) ASSERT_EQ(a.fn[i].raw(), b.fn[i].raw()) << "node " << i;
}

} // namespace

TEST(Conjugate, QuadraticAtOne) {
    const Axes X{GridAxis(-4, 4, 201)};
    const GridFn f = sample(X, BuiltinFunction::quadratic(1));
    const Axes S{GridAxis(-4, 4, 201)};
    const ConjugateResult r = conjugate_brute(f, S);
    const double one[1] = {1.0};
    EXPECT_NEAR(r.fn[r.fn.nearest_node(one)].value(), 0.5, 1e-2);
    EXPECT_NEAR(r.fn[r.fn.nearest_node(one)].value(), naive_conjugate(f, 1.0), 0.0);
}

TEST(Conjugate, LinearIsFlaggedOffTheSlope) {
    const Axes X{GridAxis(-4, 4, 201)}, S{GridAxis(-2, 2, 101)};
    const ConjugateResult r = conjugate_brute(sample(X, BuiltinFunction::linear({1.0})), S);
    const double one[1] = {1.0};
    const std::size_t at1 = r.fn.nearest_node(one);
    EXPECT_NEAR(r.fn[at1].value(), 0.0, 1e-12);
    for (std::size_t q = 0; q < r.fn.size(); ++q) {
        if (q == at1) continue;
        EXPECT_TRUE(r.boundary_flags[q]);
        const double s = r.fn.coords(q)[0];
        EXPECT_NEAR(r.fn[q].value(), 4 * std::abs(s - 1), 1e-12);
    }
    // a wider box pushes the off-slope values up
    const ConjugateResult wide = conjugate_brute(sample({GridAxis(-8, 8, 401)}, BuiltinFunction::linear({1.0})), S);
    EXPECT_GT(wide.fn[0].value(), r.fn[0].value());
}

TEST(Conjugate, IndicatorOfOriginIsZero) {
    const Axes X{GridAxis(-4, 4, 201)};
    std::vector<ExtReal> v(201, kInf);
    v[100] = 0.0;
    const ConjugateResult r = conjugate_fast(GridFn(X, v), doubled_box(X));
    for (std::size_t q = 0; q < r.fn.size(); ++q) EXPECT_EQ(r.fn[q].value(), 0.0);
    EXPECT_EQ(biconjugate(GridFn(X, v))[100].value(), 0.0);
}

TEST(Conjugate, ZeroOnIntervalGivesAbs) {
    const Axes X{GridAxis(-1, 1, 51)}, S{GridAxis(-3, 3, 61)};
    const ConjugateResult r = conjugate_fast(GridFn(X, ExtReal(0.0)), S);
    for (std::size_t q = 0; q < r.fn.size(); ++q) EXPECT_NEAR(r.fn[q].value(), std::abs(r.fn.coords(q)[0]), 1e-15);
}

TEST(Conjugate, QuadraticAtOriginIsZero) {
    const Axes X{GridAxis(-4, 4, 201)};
    const ConjugateResult r = conjugate_fast(sample(X, BuiltinFunction::quadratic(1)), X);
    EXPECT_EQ(r.fn[100].value(), 0.0);
}

TEST(Conjugate, ImproperRejected) {
    const Axes X{GridAxis(-1, 1, 5)};
    EXPECT_THROW(conjugate_fast(GridFn(X, ExtReal::infinity()), X), ImproperFunction);
    EXPECT_THROW(conjugate_brute(GridFn(X, ExtReal::infinity()), X), ImproperFunction);
}

TEST(Conjugate, FastEqualsBruteOnRandom1D) {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> r(0.3, 5);
    for (int t = 0; t < 200; ++t) {
        const double a = r(rng);
        const Axes X{GridAxis(-a, a, 2 + rng() % 120)};
        const Axes S{GridAxis(-r(rng) * 2, r(rng) * 2, 2 + rng() % 120)};
        const GridFn f = random_fn(rng, X, (t % 4) * 0.25);
        expect_identical(conjugate_fast(f, S), conjugate_brute(f, S));
    }
}

TEST(Conjugate, FastEqualsBruteOnRandom2D) {
    std::mt19937 rng(12);
    for (int t = 0; t < 30; ++t) {
        const Axes X{GridAxis(-2, 1, 3 + rng() % 15), GridAxis(-1, 3, 3 + rng() % 15)};
        const Axes S{GridAxis(-4, 4, 3 + rng() % 15), GridAxis(-1, 2, 3 + rng() % 15)};
        const GridFn f = random_fn(rng, X, (t % 3) * 0.3);
        expect_identical(conjugate_fast(f, S), conjugate_brute(f, S));
    }
}

TEST(Conjugate, FastEqualsBruteWithTies) {
    // constants and affine functions make many maximizers tie exactly
    const Axes X{GridAxis(-2, 2, 41)}, S{GridAxis(-4, 4, 81)};
    expect_identical(conjugate_fast(GridFn(X, ExtReal(1.0)), S), conjugate_brute(GridFn(X, ExtReal(1.0)), S));
    for (double slope : {0.0, 0.5, 1.0, -2.0}) {
        const GridFn f = sample(X, BuiltinFunction::linear({slope}));
        expect_identical(conjugate_fast(f, S), conjugate_brute(f, S));
    }
    const GridFn a = sample(X, BuiltinFunction::abs());
    expect_identical(conjugate_fast(a, S), conjugate_brute(a, S));
}

TEST(Conjugate, LineKernelsAgree) {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int t = 0; t < 300; ++t) {
        const std::size_t n = 1 + rng() % 40, m = 1 + rng() % 40;
        std::vector<double> xs(n), c(n), s(m), o1(m), o2(m);
        double x0 = u(rng), s0 = u(rng);
        for (auto& x : xs) x = (x0 += 0.1 + std::abs(u(rng)) * 0.1);
        for (auto& v : c) v = rng() % 5 == 0 ? kInf : u(rng);
        for (auto& v : s) v = (s0 += std::abs(u(rng)) * 0.2);
        detail::conjugate_line_brute(xs, c, s, o1);
        detail::conjugate_line_hull(xs, c, s, o2);
        for (std::size_t i = 0; i < m; ++i) ASSERT_EQ(o1[i], o2[i]);
    }
}

TEST(Conjugate, QuadraticErrorIsSecondOrder) {
    // error of the grid conjugate of a/2 x² is a/2 (x_i − s/a)² ≤ a Δ²/8
    for (double a : {0.5, 1.0, 2.0})
        for (std::size_t pts : {51u, 101u, 201u, 401u}) {
            const Axes X{GridAxis(-4, 4, pts)};
            const BuiltinFunction q = BuiltinFunction::quadratic(a);
            const ConjugateResult r = conjugate_fast(sample(X, q), {GridAxis(-3, 3, 97)});
            const double h = X[0].spacing();
            double err = 0;
            for (std::size_t i = 0; i < r.fn.size(); ++i) {
                if (r.boundary_flags[i]) continue;
                const auto s = r.fn.coords(i);
                err = std::max(err, std::abs(r.fn[i].value() - q.conjugate(s).value()));
            }
            EXPECT_LE(err, a / 8 * h * h + 1e-12) << "a=" << a << " points=" << pts;
        }
}

TEST(Conjugate, OrderReversal) {
    std::mt19937 rng(14);
    std::uniform_real_distribution<double> bump(0, 2);
    const Axes X{GridAxis(-2, 2, 41)}, S{GridAxis(-5, 5, 51)};
    for (int t = 0; t < 50; ++t) {
        const GridFn f = random_fn(rng, X, 0.2);
        std::vector<ExtReal> gv(f.values().begin(), f.values().end());
        for (auto& v : gv)
            if (v.is_finite() && rng() % 3 == 0) v = rng() % 4 == 0 ? ExtReal::infinity() : v + bump(rng);
        if (GridFn(X, gv).finite_count() == 0) continue;
        const GridFn fs = conjugate_fast(f, S).fn, gs = conjugate_fast(GridFn(X, gv), S).fn;
        for (std::size_t q = 0; q < fs.size(); ++q) EXPECT_GE(fs[q].raw(), gs[q].raw());
    }
}

TEST(Conjugate, FenchelYoungInequality) {
    std::mt19937 rng(15);
    const Axes X{GridAxis(-2, 2, 31)}, S{GridAxis(-6, 6, 37)};
    for (int t = 0; t < 30; ++t) {
        const GridFn f = random_fn(rng, X, 0.3);
        const GridFn fs = conjugate_fast(f, S).fn;
        for (std::size_t p = 0; p < f.size(); ++p) {
            if (f[p].is_infinite()) continue;
            for (std::size_t q = 0; q < fs.size(); ++q)
                EXPECT_GE(f[p].raw() + fs[q].raw() - f.coords(p)[0] * fs.coords(q)[0], -1e-12);
        }
    }
}

TEST(Biconjugate, BelowF) {
    std::mt19937 rng(16);
    const Axes X{GridAxis(-2, 2, 41)};
    for (int t = 0; t < 30; ++t) {
        const GridFn f = random_fn(rng, X, 0.2);
        const GridFn g = biconjugate(f, {GridAxis(-50, 50, 1001)});
        for (std::size_t i = 0; i < f.size(); ++i)
            if (f[i].is_finite()) EXPECT_LE(g[i].raw(), f[i].raw() + 1e-12);
    }
}

TEST(Biconjugate, QuadraticRecovered) {
    const Axes X{GridAxis(-4, 4, 201)};
    const GridFn f = sample(X, BuiltinFunction::quadratic(1));
    const GridFn g = biconjugate(f);
    for (std::size_t i = 50; i <= 150; ++i) EXPECT_NEAR(g[i].value(), f[i].value(), kTolDisc);
}

TEST(Biconjugate, NonconvexGivesHull) {
    const Axes X{GridAxis(-2, 2, 81)};
    const GridFn f = GridFn::sample(X, [](std::span<const double> x) {
        return ExtReal(std::min(0.5 * (x[0] - 1) * (x[0] - 1), 0.5 * (x[0] + 1) * (x[0] + 1)));
    });
    // oracle: lower convex envelope by chords over every node pair
    std::vector<double> hull(81);
    for (std::size_t i = 0; i < 81; ++i) {
        hull[i] = f[i].value();
        for (std::size_t j = 0; j < i; ++j)
            for (std::size_t k = i + 1; k < 81; ++k) {
                const double xi = f.coords(i)[0], xj = f.coords(j)[0], xk = f.coords(k)[0];
                const double w = (xk - xi) / (xk - xj);
                hull[i] = std::min(hull[i], w * f[j].value() + (1 - w) * f[k].value());
            }
    }
    const GridFn g = biconjugate(f, {GridAxis(-4, 4, 801)});
    for (std::size_t i = 0; i < 81; ++i) EXPECT_NEAR(g[i].value(), hull[i], 1e-9);
    EXPECT_LT(g[40].value(), f[40].value() - 0.4);
}

TEST(ConjugateSwap, FenchelYoungIsAutoconjugate) {
    const Axes X{GridAxis(-4, 4, 81)};
    const BuiltinFunction f = BuiltinFunction::quadratic(1);
    const BifunctionGrid h = fenchel_young(f, X, X);
    const BifunctionGrid c = conjugate_swap(h);
    for (std::size_t n = 0; n < h.size(); ++n) {
        const double x = h.primal_point(h.primal_of(n))[0], xs = h.dual_point(h.dual_of(n))[0];
        if (std::abs(x) <= 2 && std::abs(xs) <= 2) EXPECT_NEAR(c[n].value(), h[n].value(), kTolDisc);
    }
}

TEST(ConjugateSwap, FitzpatrickOfIdentity) {
    const Axes X{GridAxis(-2, 2, 41)};
    const OperatorGraph g = sample_graph(OperatorSpec::linear(Matrix::identity(1)), X, X);
    const BifunctionGrid c = conjugate_swap(fitzpatrick(g, X, X));
    for (std::size_t n = 0; n < c.size(); ++n) {
        const std::size_t p = c.primal_of(n), q = c.dual_of(n);
        const double x = c.primal_point(p)[0];
        if (p == q) EXPECT_NEAR(c[n].value(), x * x, kTolDisc);
        else if (!c.base().on_edge(n)) EXPECT_TRUE(c[n].is_infinite());
    }
}

TEST(ConjugateSwap, OneFiniteNode) {
    const Axes X{GridAxis(-1, 1, 5)};
    std::vector<ExtReal> v(25, kInf);
    const std::size_t p = 3, q = 1;  // (0.5, −0.5)
    v[p * 5 + q] = -0.25;
    const SwapResult r = conjugate_swap_detailed(BifunctionGrid(X, X, v));
    EXPECT_EQ(r.raw[p * 5 + q].value(), -0.25);
}

TEST(ConjugateSwap, FastEqualsBrute) {
    std::mt19937 rng(17);
    const Axes X{GridAxis(-1, 1, 9)}, S{GridAxis(-2, 2, 7)};
    for (int t = 0; t < 10; ++t) {
        const GridFn base = random_fn(rng, {X[0], S[0]}, 0.3);
        const BifunctionGrid h(base);
        const SwapResult a = conjugate_swap_detailed(h, ConjugateMethod::fast);
        const SwapResult b = conjugate_swap_detailed(h, ConjugateMethod::brute);
        EXPECT_EQ(a.boundary_flags, b.boundary_flags);
        for (std::size_t n = 0; n < h.size(); ++n) ASSERT_EQ(a.raw[n].raw(), b.raw[n].raw());
    }
}

TEST(Truncation, PolicyKeepsEdgeAndCeiling) {
    const Axes X{GridAxis(-1, 1, 3)};
    ConjugateResult r{GridFn(X, std::vector<ExtReal>{5.0, 6.0, 7.0}), {true, true, false}};
    const GridFn e = effective(r);
    EXPECT_EQ(e[0].value(), 5.0);  // flagged but on the box edge
    EXPECT_TRUE(e[1].is_infinite());
    EXPECT_EQ(e[2].value(), 7.0);
    const GridFn c = effective(r, {6.5, false});
    EXPECT_EQ(c[1].value(), 6.0);
    EXPECT_TRUE(c[2].is_infinite());
}

TEST(InfConvolution, QuadraticHalves) {
    const Axes X{GridAxis(-4, 4, 201)};
    const GridFn q = sample(X, BuiltinFunction::quadratic(1));
    const GridFn r = inf_convolution(q, q);
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double x = r.coords(i)[0];
        EXPECT_NEAR(r[i].value(), 0.25 * x * x, kTolDisc);
    }
}

TEST(InfConvolution, IndicatorOfOriginIsIdentity) {
    std::mt19937 rng(18);
    const Axes X{GridAxis(-2, 2, 41)};
    std::vector<ExtReal> v(41, kInf);
    v[20] = 0.0;
    for (int t = 0; t < 10; ++t) {
        const GridFn f = random_fn(rng, X, 0.3);
        const GridFn r = inf_convolution(f, GridFn(X, v));
        for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(r[i].raw(), f[i].raw());
    }
}

TEST(InfConvolution, SumConjugateBelowConvolvedConjugates) {
    const Axes X{GridAxis(-4, 4, 101)}, S{GridAxis(-6, 6, 151)};
    std::mt19937 rng(19);
    std::vector<std::pair<GridFn, GridFn>> cases{
        {sample(X, BuiltinFunction::quadratic(1)), sample(X, BuiltinFunction::quadratic(1))},
        {sample(X, BuiltinFunction::abs()), sample(X, BuiltinFunction::quadratic(2))},
        {random_fn(rng, X, 0.1), random_fn(rng, X, 0.1)}};
    for (const auto& [f, g] : cases) {
        const GridFn lhs = conjugate_fast(add(f, g), S).fn;
        const GridFn rhs = inf_convolution(conjugate_fast(f, S).fn, conjugate_fast(g, S).fn);
        for (std::size_t q = 0; q < lhs.size(); ++q) EXPECT_LE(lhs[q].raw(), rhs[q].raw() + kTolDisc);
    }
    // for two quadratics the closure is superfluous
    const GridFn q = sample(X, BuiltinFunction::quadratic(1));
    const GridFn lhs = conjugate_fast(add(q, q), S).fn;
    const GridFn rhs = inf_convolution(conjugate_fast(q, S).fn, conjugate_fast(q, S).fn);
    for (std::size_t i = 0; i < lhs.size(); ++i) EXPECT_NEAR(lhs[i].value(), rhs[i].value(), kTolDisc);
}
