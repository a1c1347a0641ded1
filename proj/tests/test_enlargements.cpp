#include <gtest/gtest.h>

#include <cmath>
#include <iostream>
#include <random>
#include <set>

#include "autoconj/a_iteration.hpp"
#include "autoconj/builtin.hpp"
#include "autoconj/enlargements.hpp"
#include "autoconj/error.hpp"
#include "autoconj/representations.hpp"

using namespace autoconj;

namespace {

constexpr double kTolDisc = 1e-2;

struct Problem {
    Axes X{GridAxis(-4, 4, 201)};
    BuiltinFunction f = BuiltinFunction::quadratic(1);
    OperatorSpec T = OperatorSpec::subdifferential(BuiltinFunction::quadratic(1));
    OperatorGraph graph = sample_graph(T, X, X);
    BifunctionGrid fy = fenchel_young(f, X, X);
    BifunctionGrid fitz = fitzpatrick(graph, X, X);
    BifunctionGrid mix = combine(0.5, fy, fitz);
    std::vector<std::vector<double>> xs = sample_points(X, 16);
    std::vector<double> eps{0.0, 0.1, 0.5, 1.0, 2.0};
};

const Problem& problem() {
    static const Problem p;
    return p;
}

std::vector<std::size_t> nodes(const EnlargementSet& s) {
    std::vector<std::size_t> out;
    for (const auto& m : s.members) out.push_back(m.node);
    return out;
}

DualSet interval(double lo, double hi) { return DualSet{{DualBox{Interval{lo, hi}}}}; }

const std::vector<double> kZero{0.0};
const std::vector<double> kOne{1.0};

} // namespace

TEST(LevelEnlargement, FenchelYoungInterval) {
    const auto& P = problem();
    const EnlargementSet s = level_enlargement(P.fy, 0.5, kZero);
    EXPECT_TRUE(matches_box(s, interval(-1, 1)));
    for (std::size_t q = 0; q < P.X[0].points(); ++q) {
        const double v = P.X[0].node(q);
        const bool expected = v * v <= 1.0 + 1e-9;  // (x* − x)² ≤ 2ε
        EXPECT_EQ(s.contains_node(q), expected) << v;
    }
    for (const auto& m : s.members) EXPECT_GE(m.slack, -kMemberTol);
}

TEST(LevelEnlargement, ErrorsAndZeroEpsilon) {
    const auto& P = problem();
    const std::vector<double> off{0.01};
    EXPECT_THROW(level_enlargement(P.fy, 0.1, off), OutOfDomain);
    EXPECT_THROW(level_enlargement(P.fy, -0.1, kZero), std::invalid_argument);
    for (const auto& x : P.xs) EXPECT_TRUE(matches_box(level_enlargement(P.fy, 0.0, x), operator_eval(P.T, x, P.X)));
}

TEST(LevelEnlargement, SigmaOfIdentityIsDiagonalOnly) {
    const auto& P = problem();
    const BifunctionGrid s = sigma(P.graph, P.X, P.X);
    for (double e : {0.0, 0.5, 3.0}) {
        const EnlargementSet set = level_enlargement(s, e, kOne);
        ASSERT_EQ(set.members.size(), 1u);
        EXPECT_NEAR(set.members[0].xstar[0], 1.0, 1e-12);
    }
}

TEST(EpsSubdifferential, ClosedFormExamples) {
    const auto& P = problem();
    EXPECT_TRUE(matches_box(eps_subdifferential(P.f, 0.5, kZero, P.X, P.X), interval(-1, 1)));
    const std::vector<double> two{2.0};
    const EnlargementSet a = eps_subdifferential(BuiltinFunction::abs(), 0.0, two, P.X, P.X);
    ASSERT_EQ(a.members.size(), 1u);
    EXPECT_NEAR(a.members[0].xstar[0], 1.0, 1e-12);
    EXPECT_THROW(eps_subdifferential(BuiltinFunction::indicator(-1, 1), 0.1, two, P.X, P.X), OutOfDomain);
}

TEST(EpsSubdifferential, ScanRouteAgrees) {
    const auto& P = problem();
    // the scan sees f only inside the box: for ½a|x|² with a ≥ 1 that changes nothing on this dual box
    for (const auto& f : {P.f, BuiltinFunction::quadratic(2)}) {
        const EpsSubdifferential closed(f, P.X, P.X);
        for (double e : P.eps)
            for (const auto& x : P.xs) {
                const auto a = nodes(closed.query(e, x));
                const auto b = nodes(eps_subdifferential_scan(f, e, x, P.X, P.X));
                std::vector<std::size_t> diff;
                std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(diff));
                for (std::size_t q : diff) {
                    const std::vector<double> xs{P.X[0].node(q)};
                    EXPECT_LE(std::abs(closed.slack(e, x, xs)), kTolDisc) << f.name() << " " << e << " " << x[0];
                }
            }
    }
    // for |x| the box cuts dom f*, so compare with the closed form of |x| + indicator of [−4,4]
    for (double e : P.eps)
        for (const auto& x : P.xs) {
            const auto b = eps_subdifferential_scan(BuiltinFunction::abs(), e, x, P.X, P.X);
            for (std::size_t q = 0; q < P.X[0].points(); ++q) {
                const double s = P.X[0].node(q);
                const double slack = e - (std::abs(x[0]) + std::max(0.0, 4 * (std::abs(s) - 1)) - x[0] * s);
                if (std::abs(slack) > kTolDisc) EXPECT_EQ(b.contains_node(q), slack > 0) << e << " " << x[0] << " " << s;
            }
        }
}

TEST(BiggestEnlargement, IdentityBruteForceOracle) {
    const auto& P = problem();
    const OperatorGraph id = sample_graph(OperatorSpec::linear(Matrix::identity(1)), P.X, P.X);
    const EnlargementSet s = t_be(id, 0.25, kZero, P.X, P.X);
    EXPECT_TRUE(matches_box(s, interval(-1, 1)));
    for (std::size_t q = 0; q < P.X[0].points(); ++q) {
        const double xs = P.X[0].node(q);
        double worst = kInf;
        for (const auto& g : id.pairs()) worst = std::min(worst, g.x[0] * (g.xstar[0] - xs));
        EXPECT_EQ(s.contains_node(q), worst >= -0.25 - kMemberTol);
    }
}

TEST(BiggestEnlargement, EqualsFitzpatrickLevelSet) {
    const auto& P = problem();
    const BiggestEnlargement be(P.graph, P.X, P.X);
    const auto lf = make_level(P.fitz);
    for (double e : P.eps)
        for (const auto& x : P.xs) EXPECT_EQ(nodes(be.query(e, x)), nodes(lf->query(e, x))) << e << " " << x[0];
}

TEST(Inclusions, EpsSubdifferentialInsideBiggest) {
    const auto& P = problem();
    for (const auto& f : {P.f, BuiltinFunction::abs()}) {
        const OperatorGraph g = sample_graph(OperatorSpec::subdifferential(f), P.X, P.X);
        const BiggestEnlargement be(g, P.X, P.X);
        const EpsSubdifferential ed(f, P.X, P.X);
        for (double e : P.eps)
            for (const auto& x : P.xs) EXPECT_TRUE(inclusion_check(ed.query(e, x), be.query(e, x)).pass);
    }
}

TEST(Inclusions, StrictnessSearchForAbs) {
    // report-only: (ε,x) pairs where the biggest enlargement of ∂|·| has members outside ∂_ε|·|
    const auto& P = problem();
    const BuiltinFunction f = BuiltinFunction::abs();
    const OperatorGraph g = sample_graph(OperatorSpec::subdifferential(f), P.X, P.X);
    const BiggestEnlargement be(g, P.X, P.X);
    const EpsSubdifferential ed(f, P.X, P.X);
    int strict = 0;
    for (double e : P.eps)
        for (const auto& x : P.xs) strict += !inclusion_check(be.query(e, x), ed.query(e, x)).pass;
    RecordProperty("strict_pairs", strict);
    std::cout << "strict pairs: " << strict << " of " << P.eps.size() * P.xs.size() << "\n";
}

TEST(SmallestEnlargement, IdentityAndInsideBiggest) {
    const auto& P = problem();
    const auto se = make_t_se(P.graph, P.X, P.X);
    const BiggestEnlargement be(P.graph, P.X, P.X);
    for (double e : P.eps) {
        const EnlargementSet s = se->query(e, kOne);
        ASSERT_EQ(s.members.size(), 1u);
        EXPECT_NEAR(s.members[0].xstar[0], 1.0, 1e-12);
        for (const auto& x : P.xs) EXPECT_TRUE(inclusion_check(se->query(e, x), be.query(e, x)).pass);
    }
}

TEST(TBreve, FenchelYoungGivesEpsSubdifferential) {
    const auto& P = problem();
    const auto b = make_t_breve(P.fy);
    const EpsSubdifferential ed(P.f, P.X, P.X);
    for (double e : P.eps)
        for (const auto& x : P.xs) EXPECT_EQ(nodes(b->query(e, x)), nodes(ed.query(e, x)));
}

TEST(TBreve, FitzpatrickOfGradientCollapses) {
    const auto& P = problem();
    const EnlargementSet s = t_breve(P.fitz, 0.25, kOne);
    ASSERT_EQ(s.members.size(), 1u);
    EXPECT_NEAR(s.members[0].xstar[0], 1.0, 1e-12);
    EXPECT_TRUE(inclusion_check(s, eps_subdifferential(P.f, 0.5, kOne, P.X, P.X)).pass);
}

TEST(TBreve, DirectRouteMatchesAveragedRoute) {
    const Axes X{GridAxis(-2, 2, 41)};
    const BuiltinFunction f = BuiltinFunction::quadratic(1);
    const OperatorGraph g = sample_graph(OperatorSpec::subdifferential(f), X, X);
    const BifunctionGrid fy = fenchel_young(f, X, X), fz = fitzpatrick(g, X, X);
    for (const BifunctionGrid& h : {fy, fz, combine(0.5, fy, fz)}) {
        const auto via_a = make_t_breve(h);
        const TBreveDirect direct(h);
        for (double e : {0.0, 0.1, 0.5, 2.0})
            for (const auto& x : sample_points(X, 4)) EXPECT_EQ(nodes(direct.query(e, x)), nodes(via_a->query(e, x)));
    }
}

TEST(TBreve, MembersAreContiguous) {
    const auto& P = problem();
    for (const BifunctionGrid* h : {&P.fy, &P.fitz, &P.mix}) {
        const auto b = make_t_breve(*h);
        for (double e : P.eps)
            for (const auto& x : P.xs) {
                // edge nodes keep raw conjugate values while flagged nodes next to them read +inf
                std::vector<std::size_t> n;
                for (std::size_t q : nodes(b->query(e, x)))
                    if (!P.X[0].is_edge(q)) n.push_back(q);
                if (!n.empty()) EXPECT_EQ(n.back() - n.front() + 1, n.size()) << "eps=" << e << " x=" << x[0];
            }
    }
}

TEST(TBreve, ImproperRejected) {
    const Axes X{GridAxis(-1, 1, 5)};
    const BifunctionGrid h(X, X, std::vector<ExtReal>(25, ExtReal::infinity()));
    EXPECT_THROW(make_t_breve(h), ImproperFunction);
    EXPECT_THROW(TBreveDirect{h}, ImproperFunction);
}

TEST(EnlargementProperties, GraphInsideAndMonotoneInEpsilon) {
    const auto& P = problem();
    std::vector<std::unique_ptr<Enlargement>> kinds;
    kinds.push_back(std::make_unique<EpsSubdifferential>(P.f, P.X, P.X));
    kinds.push_back(std::make_unique<BiggestEnlargement>(P.graph, P.X, P.X));
    kinds.push_back(make_t_se(P.graph, P.X, P.X));
    kinds.push_back(make_t_breve(P.fy));
    kinds.push_back(make_t_breve(P.fitz));
    kinds.push_back(make_t_breve(P.mix));
    for (const auto& e : kinds)
        for (const auto& x : P.xs) {
            const EnlargementSet zero = e->query(0.0, x);
            EXPECT_TRUE(matches_box(zero, operator_eval(P.T, x, P.X))) << e->kind();
            EnlargementSet prev = zero;
            for (double eps : P.eps) {
                const EnlargementSet cur = e->query(eps, x);
                EXPECT_TRUE(inclusion_check(prev, cur).pass) << e->kind();
                EXPECT_TRUE(inclusion_check(zero, cur).pass) << e->kind();
                prev = cur;
            }
        }
}

TEST(EnlargementProperties, SlackIsAffineInEpsilonAndSetsAreClosed) {
    const auto& P = problem();
    const auto b = make_t_breve(P.mix);
    for (const auto& x : P.xs)
        for (std::size_t q = 0; q < P.X[0].points(); q += 5) {
            const std::vector<double> xs{P.X[0].node(q)};
            const double s0 = b->slack(0.0, x, xs);
            if (std::isinf(s0)) continue;
            for (double e : P.eps) EXPECT_NEAR(b->slack(e, x, xs), s0 + e, 1e-12);
        }
    // the set at ε is the intersection of the sets at ε + δ as δ ↓ 0
    for (const auto& x : P.xs) {
        const auto base = nodes(b->query(0.5, x));
        auto inter = nodes(b->query(0.5 + 1e-1, x));
        for (double d : {1e-3, 1e-6, 1e-9, 1e-13}) {
            const auto n = nodes(b->query(0.5 + d, x));
            std::vector<std::size_t> out;
            std::set_intersection(inter.begin(), inter.end(), n.begin(), n.end(), std::back_inserter(out));
            inter = out;
        }
        EXPECT_EQ(inter, base);
    }
}

TEST(Transport, WorkedExample) {
    const auto& P = problem();
    const EpsSubdifferential ed(P.f, P.X, P.X);
    const TransportResult r = transport(ed, {0.5, {0.0}, {1.0}}, {0.0, {1.0}, {1.0}}, 0.5);
    EXPECT_DOUBLE_EQ(r.xhat[0], 0.5);
    EXPECT_DOUBLE_EQ(r.xhatstar[0], 1.0);
    EXPECT_DOUBLE_EQ(r.epshat, 0.25);
    EXPECT_TRUE(r.member);
    EXPECT_LE(std::abs(1.0 - 0.5), std::sqrt(0.5));
}

TEST(Transport, EndpointsAndDegenerateCases) {
    const auto& P = problem();
    const EpsSubdifferential ed(P.f, P.X, P.X);
    const EnlargementPoint a{0.5, {0.0}, {0.5}}, b{1.0, {1.0}, {1.5}};
    const TransportResult r0 = transport(ed, a, b, 0.0);
    EXPECT_EQ(r0.xhat, b.x);
    EXPECT_EQ(r0.xhatstar, b.xstar);
    EXPECT_EQ(r0.epshat, b.epsilon);
    const EnlargementPoint c{1.0, {0.0}, {0.5}};
    EXPECT_DOUBLE_EQ(transport(ed, a, c, 0.3).epshat, 0.3 * 0.5 + 0.7 * 1.0);
    EXPECT_THROW(transport(ed, a, b, 1.5), std::invalid_argument);
    EXPECT_THROW(transport(ed, {0.0, {0.0}, {2.0}}, b, 0.5), std::invalid_argument);
}

TEST(Transport, LevelSetsOfConvexRepresentations) {
    const auto& P = problem();
    std::mt19937 rng(31);
    std::vector<std::unique_ptr<LevelSetEnlargement>> kinds;
    kinds.push_back(make_level(P.fy));
    kinds.push_back(make_level(P.fitz));
    kinds.push_back(make_t_breve(P.mix));
    std::uniform_int_distribution<std::size_t> idx(0, 100);
    for (const auto& e : kinds) {
        int tested = 0;
        for (int t = 0; t < 2000 && tested < 200; ++t) {
            // even index offsets keep the midpoint on the grid
            const std::size_t p1 = 2 * idx(rng), p2 = 2 * idx(rng), q1 = 2 * idx(rng), q2 = 2 * idx(rng);
            const double e1 = P.eps[rng() % P.eps.size()], e2 = P.eps[rng() % P.eps.size()];
            const EnlargementPoint a{e1, {P.X[0].node(p1)}, {P.X[0].node(q1)}};
            const EnlargementPoint b{e2, {P.X[0].node(p2)}, {P.X[0].node(q2)}};
            if (!e->is_member(a.epsilon, a.x, a.xstar) || !e->is_member(b.epsilon, b.x, b.xstar)) continue;
            ++tested;
            const TransportResult r = transport(*e, a, b, 0.5);
            EXPECT_GE(r.epshat, -e->tol());
            EXPECT_TRUE(r.member) << e->kind() << " slack " << r.member_slack;
        }
        EXPECT_GT(tested, 20) << e->kind();
    }
}

TEST(Additivity, AdditiveKindsPass) {
    const auto& P = problem();
    EXPECT_TRUE(additivity_check(EpsSubdifferential(P.f, P.X, P.X)).pass);
    for (const BifunctionGrid* h : {&P.fy, &P.fitz, &P.mix}) {
        const AdditivityReport r = additivity_check(*make_t_breve(*h));
        EXPECT_TRUE(r.pass) << r.min_slack;
        EXPECT_GT(r.set_pairs, 0u);
    }
}

TEST(Additivity, SelfMutualEqualsAdditive) {
    const auto& P = problem();
    const auto b = make_t_breve(P.mix);
    const AdditivityReport a = additivity_check(*b), m = mutual_additivity_check(*b, *b);
    EXPECT_EQ(a.min_slack, m.min_slack);
    EXPECT_EQ(a.pass, m.pass);
}

TEST(Additivity, MutualPairs) {
    const auto& P = problem();
    const BiggestEnlargement be(P.graph, P.X, P.X);
    EXPECT_TRUE(mutual_additivity_check(be, *make_t_se(P.graph, P.X, P.X)).pass);
    // L^h and L^{h*∘i} for h = ℱ_T
    const auto lh = make_level(P.fitz);
    const auto lc = make_level(conjugate_swap(P.fitz));
    EXPECT_TRUE(mutual_additivity_check(*lh, *lc).pass);
}

TEST(Additivity, BiggestOfAbsNeedsTheWeakBound) {
    const auto& P = problem();
    const OperatorGraph g = sample_graph(OperatorSpec::subdifferential(BuiltinFunction::abs()), P.X, P.X);
    const AdditivityReport r = additivity_check(BiggestEnlargement(g, P.X, P.X));
    EXPECT_FALSE(r.pass);
    EXPECT_TRUE(r.weak_pass);
    EXPECT_LT(r.min_slack, 0.0);
    EXPECT_FALSE(r.worst.x.empty());
}

TEST(Inclusion, GridMismatchAndWitnesses) {
    const auto& P = problem();
    const EpsSubdifferential ed(P.f, P.X, P.X);
    const EpsSubdifferential other(P.f, P.X, {GridAxis(-4, 4, 51)});
    EXPECT_THROW(inclusion_check(ed.query(0.5, kZero), other.query(0.5, kZero)), DimensionMismatch);
    const InclusionReport r = inclusion_check(ed.query(0.5, kZero), ed.query(0.1, kZero));
    EXPECT_FALSE(r.pass);
    EXPECT_FALSE(r.counterexamples.empty());
    for (const auto& m : r.counterexamples) EXPECT_GT(m.xstar[0] * m.xstar[0], 0.2 - 1e-9);
}

TEST(Inclusion, Chains) {
    const auto& P = problem();
    const auto half = make_t_breve(P.fitz);
    const auto se = make_t_se(P.graph, P.X, P.X);
    const EpsSubdifferential ed(P.f, P.X, P.X);
    const BiggestEnlargement be(P.graph, P.X, P.X);
    const auto bfy = make_t_breve(P.fy);
    for (double e : P.eps)
        for (const auto& x : P.xs) {
            const EnlargementSet h = half->query(e / 2, x);
            EXPECT_TRUE(inclusion_check(h, ed.query(e, x)).pass);
            EXPECT_TRUE(inclusion_check(h, se->query(e, x)).pass);
            EXPECT_TRUE(inclusion_check(half->query(e, x), be.query(e, x)).pass);
            EXPECT_TRUE(inclusion_check(bfy->query(e, x), be.query(e, x)).pass);
        }
}
