#include "autoconj/enlargements.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "autoconj/a_iteration.hpp"
#include "autoconj/representations.hpp"

namespace autoconj {

namespace {

constexpr double kNegInf = -kInf;

std::size_t node_on_axes(const Axes& axes, std::span<const double> point) {
    if (point.size() != axes.size()) throw DimensionMismatch("enlargement: point rank mismatch");
    std::size_t flat = 0;
    for (std::size_t k = 0; k < axes.size(); ++k) {
        if (!axes[k].covers(point[k])) throw OutOfDomain("enlargement: point outside the grid box");
        flat = flat * axes[k].points() + axes[k].nearest(point[k]);
    }
    return flat;
}

void require_grid_node(const Axes& axes, std::span<const double> x) {
    if (x.size() != axes.size()) throw DimensionMismatch("enlargement: point rank mismatch");
    for (std::size_t k = 0; k < axes.size(); ++k) {
        const std::size_t i = axes[k].nearest(x[k]);
        if (!axes[k].covers(x[k]) || std::abs(axes[k].node(i) - x[k]) > 1e-9 * axes[k].spacing())
            throw OutOfDomain("enlargement: x is not a primal grid node");
    }
}

EnlargementSet empty_set(const Enlargement& e, double epsilon, std::span<const double> x) {
    EnlargementSet s;
    s.kind = e.kind();
    s.epsilon = epsilon;
    s.x.assign(x.begin(), x.end());
    s.dual_axes = e.dual_axes();
    return s;
}

} // namespace

bool EnlargementSet::contains_node(std::size_t node) const { return find(node) != nullptr; }

const Member* EnlargementSet::find(std::size_t node) const {
    auto it = std::lower_bound(members.begin(), members.end(), node,
                               [](const Member& m, std::size_t n) { return m.node < n; });
    return (it != members.end() && it->node == node) ? &*it : nullptr;
}

void Enlargement::check_query(double epsilon, std::span<const double> x) const {
    if (!(epsilon >= 0.0)) throw std::invalid_argument("enlargement: epsilon must be >= 0");
    require_grid_node(primal_axes(), x);
}

EnlargementSet Enlargement::query(double epsilon, std::span<const double> x) const {
    check_query(epsilon, x);
    EnlargementSet s = empty_set(*this, epsilon, x);
    const Axes& dual = dual_axes();
    const std::vector<double> pts = grid_points(dual);
    const std::size_t d = dual.size();
    for (std::size_t q = 0; q < grid_size(dual); ++q) {
        std::span<const double> xs(pts.data() + q * d, d);
        const double sl = slack(epsilon, x, xs);
        if (sl >= -tol()) s.members.push_back({q, {xs.begin(), xs.end()}, sl});
    }
    return s;
}

// --- L^h ---------------------------------------------------------------------

LevelSetEnlargement::LevelSetEnlargement(BifunctionGrid h, std::string kind, double tol)
    : Enlargement(tol), h_(std::move(h)), kind_(std::move(kind)), primal_(h_.primal_axes()), dual_(h_.dual_axes()) {}

double LevelSetEnlargement::slack(double epsilon, std::span<const double> x, std::span<const double> xstar) const {
    const std::size_t node = h_.node(node_on_axes(primal_, x), node_on_axes(dual_, xstar));
    if (h_[node].is_infinite()) return kNegInf;
    return h_.pairing_at(node) + epsilon - h_[node].raw();
}

EnlargementSet LevelSetEnlargement::query(double epsilon, std::span<const double> x) const {
    check_query(epsilon, x);
    EnlargementSet s = empty_set(*this, epsilon, x);
    const std::size_t p = h_.primal_node_of(x);
    for (std::size_t q = 0; q < h_.dual_size(); ++q) {
        const std::size_t node = h_.node(p, q);
        if (h_[node].is_infinite()) continue;
        const double sl = h_.pairing_at(node) + epsilon - h_[node].raw();
        if (sl >= -tol()) {
            auto xs = h_.dual_point(q);
            s.members.push_back({q, {xs.begin(), xs.end()}, sl});
        }
    }
    return s;
}

// --- ∂̆f ----------------------------------------------------------------------

EpsSubdifferential::EpsSubdifferential(BuiltinFunction f, Axes primal, Axes dual, double tol)
    : Enlargement(tol), f_(std::move(f)), primal_(std::move(primal)), dual_(std::move(dual)) {
    if (primal_.size() != dual_.size()) throw DimensionMismatch("EpsSubdifferential: rank mismatch");
}

double EpsSubdifferential::slack(double epsilon, std::span<const double> x, std::span<const double> xstar) const {
    const ExtReal fy = f_.value(x) + f_.conjugate(xstar);
    if (fy.is_infinite()) return kNegInf;
    return pairing(x, xstar) + epsilon - fy.raw();
}

// --- T^BE --------------------------------------------------------------------

BiggestEnlargement::BiggestEnlargement(OperatorGraph graph, Axes primal, Axes dual, double tol)
    : Enlargement(tol), graph_(std::move(graph)), primal_(std::move(primal)), dual_(std::move(dual)) {
    if (graph_.dim() != primal_.size()) throw DimensionMismatch("BiggestEnlargement: rank mismatch");
}

double BiggestEnlargement::slack(double epsilon, std::span<const double> x, std::span<const double> xstar) const {
    double worst = kInf;
    for (const auto& g : graph_.pairs()) {
        double s = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) s += (g.x[k] - x[k]) * (g.xstar[k] - xstar[k]);
        worst = std::min(worst, s);
    }
    return epsilon + worst;
}

// --- T̆_h from the definition --------------------------------------------------

TBreveDirect::TBreveDirect(BifunctionGrid h, const TruncationPolicy& policy, double tol)
    : Enlargement(tol), h_(std::move(h)), policy_(policy), primal_(h_.primal_axes()), dual_(h_.dual_axes()) {
    if (!h_.base().is_proper()) throw ImproperFunction("TBreveDirect: h is identically +inf");
}

double TBreveDirect::swapped_conjugate_at(std::size_t p, std::size_t q) const {
    // h*(x*,x) = sup over (y,y*) of ⟨y,x*⟩ + ⟨x,y*⟩ − h(y,y*).
    const auto x = h_.primal_point(p);
    const auto xs = h_.dual_point(q);
    double full = kNegInf, interior = kNegInf;
    for (std::size_t pp = 0; pp < h_.primal_size(); ++pp) {
        const double yx = pairing(h_.primal_point(pp), xs);
        for (std::size_t qq = 0; qq < h_.dual_size(); ++qq) {
            const std::size_t node = h_.node(pp, qq);
            if (h_[node].is_infinite()) continue;
            const double v = yx + pairing(x, h_.dual_point(qq)) - h_[node].raw();
            full = std::max(full, v);
            if (!h_.base().on_edge(node)) interior = std::max(interior, v);
        }
    }
    const std::size_t node = h_.node(p, q);
    const bool flag = !(interior >= full - kBoundaryFlagTol * (1.0 + std::abs(full)));
    if (full > policy_.flag_ceiling) return kInf;
    if (policy_.flagged_as_infinite && flag && !h_.base().on_edge(node)) return kInf;
    return full;
}

double TBreveDirect::slack(double epsilon, std::span<const double> x, std::span<const double> xstar) const {
    const std::size_t p = node_on_axes(primal_, x), q = node_on_axes(dual_, xstar);
    const std::size_t node = h_.node(p, q);
    if (h_[node].is_infinite()) return kNegInf;
    const double conj = swapped_conjugate_at(p, q);
    if (std::isinf(conj)) return kNegInf;
    return h_.pairing_at(node) + epsilon - 0.5 * (h_[node].raw() + conj);
}

EnlargementSet TBreveDirect::query(double epsilon, std::span<const double> x) const {
    check_query(epsilon, x);
    EnlargementSet s = empty_set(*this, epsilon, x);
    const std::size_t p = h_.primal_node_of(x);
    for (std::size_t q = 0; q < h_.dual_size(); ++q) {
        auto xs = h_.dual_point(q);
        const double sl = slack(epsilon, x, xs);
        if (sl >= -tol()) s.members.push_back({q, {xs.begin(), xs.end()}, sl});
    }
    (void)p;
    return s;
}

// --- factories and single queries --------------------------------------------

std::unique_ptr<LevelSetEnlargement> make_level(const BifunctionGrid& h, std::string kind, double tol) {
    return std::make_unique<LevelSetEnlargement>(h, std::move(kind), tol);
}

std::unique_ptr<LevelSetEnlargement> make_t_se(const OperatorGraph& graph, const Axes& primal, const Axes& dual,
                                               const TruncationPolicy& policy, double tol) {
    return std::make_unique<LevelSetEnlargement>(sigma(graph, primal, dual, policy), "se", tol);
}

std::unique_ptr<LevelSetEnlargement> make_t_breve(const BifunctionGrid& h, const TruncationPolicy& policy,
                                                  double tol) {
    return std::make_unique<LevelSetEnlargement>(a_apply(h, policy), "breve", tol);
}

EnlargementSet level_enlargement(const BifunctionGrid& h, double epsilon, std::span<const double> x, double tol) {
    return LevelSetEnlargement(h, "level", tol).query(epsilon, x);
}

EnlargementSet eps_subdifferential(const BuiltinFunction& f, double epsilon, std::span<const double> x,
                                   const Axes& primal, const Axes& dual, double tol) {
    if (f.value(x).is_infinite()) throw OutOfDomain("eps_subdifferential: x outside dom f");
    return EpsSubdifferential(f, primal, dual, tol).query(epsilon, x);
}

EnlargementSet eps_subdifferential_scan(const BuiltinFunction& f, double epsilon, std::span<const double> x,
                                        const Axes& primal, const Axes& dual, double tol) {
    if (!(epsilon >= 0.0)) throw std::invalid_argument("eps_subdifferential_scan: epsilon must be >= 0");
    require_grid_node(primal, x);
    const ExtReal fx = f.value(x);
    if (fx.is_infinite()) throw OutOfDomain("eps_subdifferential_scan: x outside dom f");
    const std::size_t d = primal.size();
    const std::vector<double> ys = grid_points(primal);
    const std::vector<double> xss = grid_points(dual);
    std::vector<double> fy(grid_size(primal));
    for (std::size_t p = 0; p < fy.size(); ++p) fy[p] = f.value(std::span<const double>(ys.data() + p * d, d)).raw();

    EnlargementSet s;
    s.kind = "epsdiff-scan";
    s.epsilon = epsilon;
    s.x.assign(x.begin(), x.end());
    s.dual_axes = dual;
    for (std::size_t q = 0; q < grid_size(dual); ++q) {
        const double* xs = xss.data() + q * d;
        double worst = kInf;
        for (std::size_t p = 0; p < fy.size(); ++p) {
            if (std::isinf(fy[p])) continue;
            double inner = 0.0;
            for (std::size_t k = 0; k < d; ++k) inner += (ys[p * d + k] - x[k]) * xs[k];
            worst = std::min(worst, fy[p] - fx.raw() - inner);
        }
        const double sl = worst + epsilon;
        if (sl >= -tol) s.members.push_back({q, {xs, xs + d}, sl});
    }
    return s;
}

EnlargementSet t_be(const OperatorGraph& graph, double epsilon, std::span<const double> x, const Axes& primal,
                    const Axes& dual, double tol) {
    return BiggestEnlargement(graph, primal, dual, tol).query(epsilon, x);
}

EnlargementSet t_se(const OperatorGraph& graph, double epsilon, std::span<const double> x, const Axes& primal,
                    const Axes& dual, const TruncationPolicy& policy, double tol) {
    return make_t_se(graph, primal, dual, policy, tol)->query(epsilon, x);
}

EnlargementSet t_breve(const BifunctionGrid& h, double epsilon, std::span<const double> x,
                       const TruncationPolicy& policy, double tol) {
    return make_t_breve(h, policy, tol)->query(epsilon, x);
}

// --- transport, additivity, inclusion ----------------------------------------

TransportResult transport(const Enlargement& e, const EnlargementPoint& first, const EnlargementPoint& second,
                          double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("transport: alpha must lie in [0,1]");
    const std::size_t d = first.x.size();
    if (first.xstar.size() != d || second.x.size() != d || second.xstar.size() != d)
        throw DimensionMismatch("transport: inconsistent point dimensions");
    if (!e.is_member(first.epsilon, first.x, first.xstar) || !e.is_member(second.epsilon, second.x, second.xstar))
        throw std::invalid_argument("transport: inputs must be members of the enlargement");

    TransportResult r;
    r.xhat.resize(d);
    r.xhatstar.resize(d);
    double cross = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        r.xhat[k] = alpha * first.x[k] + (1.0 - alpha) * second.x[k];
        r.xhatstar[k] = alpha * first.xstar[k] + (1.0 - alpha) * second.xstar[k];
        cross += (first.x[k] - second.x[k]) * (first.xstar[k] - second.xstar[k]);
    }
    r.epshat = alpha * first.epsilon + (1.0 - alpha) * second.epsilon + alpha * (1.0 - alpha) * cross;
    r.member_slack = e.slack(std::max(r.epshat, 0.0), r.xhat, r.xhatstar);
    r.member = r.member_slack >= -e.tol();
    return r;
}

std::vector<std::vector<double>> sample_points(const Axes& primal, std::size_t stride) {
    if (stride == 0) throw std::invalid_argument("sample_points: stride must be positive");
    std::vector<std::vector<double>> per_axis;
    for (const auto& a : primal) {
        std::vector<double> v;
        for (std::size_t i = 0; i < a.points(); i += stride) v.push_back(a.node(i));
        per_axis.push_back(std::move(v));
    }
    std::vector<std::vector<double>> out{{}};
    for (const auto& vals : per_axis) {
        std::vector<std::vector<double>> next;
        for (const auto& prefix : out)
            for (double v : vals) {
                auto p = prefix;
                p.push_back(v);
                next.push_back(std::move(p));
            }
        out = std::move(next);
    }
    return out;
}

AdditivityReport mutual_additivity_check(const Enlargement& e, const Enlargement& other, const SampleSpec& sample,
                                         double tol) {
    const auto xs1 = sample_points(e.primal_axes(), sample.x_stride);
    const auto xs2 = sample_points(other.primal_axes(), sample.x_stride);
    std::vector<EnlargementSet> sets1, sets2;
    for (double eps : sample.epsilons) {
        for (const auto& x : xs1) sets1.push_back(e.query(eps, x));
        for (const auto& x : xs2) sets2.push_back(other.query(eps, x));
    }

    AdditivityReport r;
    r.tol = tol >= 0.0 ? tol : e.tol() + other.tol() + 1e-9;
    r.weak_pass = true;
    const std::size_t d = e.primal_axes().size();
    std::vector<double> diff(d);
    for (const auto& a : sets1) {
        if (a.members.empty()) continue;
        for (const auto& b : sets2) {
            if (b.members.empty()) continue;
            ++r.set_pairs;
            for (std::size_t k = 0; k < d; ++k) diff[k] = a.x[k] - b.x[k];
            // min over x*, y* of ⟨x−y, x*−y*⟩ separates into a min and a max.
            const Member* amin = nullptr;
            const Member* bmax = nullptr;
            double lo = kInf, hi = -kInf;
            for (const auto& m : a.members) {
                const double v = pairing(diff, m.xstar);
                if (v < lo) { lo = v; amin = &m; }
            }
            for (const auto& m : b.members) {
                const double v = pairing(diff, m.xstar);
                if (v > hi) { hi = v; bmax = &m; }
            }
            const double inner = lo - hi;
            const double strong = inner + a.epsilon + b.epsilon;
            const double root = std::sqrt(a.epsilon) + std::sqrt(b.epsilon);
            const double weak = inner + root * root;
            const double root_tol = std::sqrt(a.epsilon + e.tol() + sample.weak_eps_allowance) +
                                   std::sqrt(b.epsilon + other.tol() + sample.weak_eps_allowance);
            if (inner + root_tol * root_tol < -1e-9) r.weak_pass = false;
            r.min_weak_slack = std::min(r.min_weak_slack, weak);
            if (strong < r.min_slack) {
                r.min_slack = strong;
                r.worst = PairWitness{a.epsilon, b.epsilon, a.x, amin->xstar, b.x, bmax->xstar};
            }
        }
    }
    r.pass = r.min_slack >= -r.tol;
    return r;
}

AdditivityReport additivity_check(const Enlargement& e, const SampleSpec& sample, double tol) {
    return mutual_additivity_check(e, e, sample, tol);
}

InclusionReport inclusion_check(const EnlargementSet& inner, const EnlargementSet& outer) {
    if (inner.dual_axes != outer.dual_axes) throw DimensionMismatch("inclusion_check: dual grids differ");
    InclusionReport r;
    for (const auto& m : inner.members)
        if (!outer.contains_node(m.node)) r.counterexamples.push_back(m);
    r.pass = r.counterexamples.empty();
    return r;
}

bool matches_box(const EnlargementSet& s, const DualSet& target, double cells) {
    double cell = 0.0;
    for (const auto& a : s.dual_axes) cell = std::max(cell, a.spacing());
    cell *= cells;
    const double slop = 1e-9 * (1.0 + cell);
    for (const auto& m : s.members)
        if (target.distance(m.xstar) > cell + slop) return false;

    const std::vector<double> pts = grid_points(s.dual_axes);
    const std::size_t d = s.dual_axes.size();
    for (std::size_t q = 0; q < grid_size(s.dual_axes); ++q) {
        const double* xs = pts.data() + q * d;
        bool deep = false;
        for (const auto& box : target.boxes) {
            bool in = true;
            for (std::size_t k = 0; k < d && in; ++k) in = xs[k] >= box[k].lo + cell - slop && xs[k] <= box[k].hi - cell + slop;
            deep = deep || in;
        }
        if (deep && !s.contains_node(q)) return false;
    }
    return true;
}

} // namespace autoconj
