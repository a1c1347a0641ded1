#include "autoconj/verify.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "autoconj/a_iteration.hpp"
#include "autoconj/enlargements.hpp"
#include "autoconj/error.hpp"
#include "autoconj/io.hpp"
#include "autoconj/representations.hpp"

namespace autoconj {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

class Suite {
public:
    void add(std::string name, bool pass, double value, std::string detail = {}) {
        report.checks.push_back({std::move(name), pass, false, value, std::move(detail)});
    }
    void skip(std::string name, std::string why) { report.checks.push_back({std::move(name), true, true, 0.0, std::move(why)}); }

    // Runs fn, recording an exception as a failed check.
    template <class Fn>
    void guarded(const std::string& name, Fn&& fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            add(name, false, 0.0, std::string("exception: ") + e.what());
        }
    }

    VerifyReport report;
};

bool identical(const ConjugateResult& a, const ConjugateResult& b) {
    if (a.boundary_flags != b.boundary_flags) return false;
    for (std::size_t i = 0; i < a.fn.size(); ++i)
        if (a.fn[i].raw() != b.fn[i].raw()) return false;
    return true;
}

void conjugate_checks(Suite& s, const Config& c, const GridFn& f) {
    const std::size_t work = f.size() * grid_size(c.dual);
    if (work <= 50'000'000) {
        s.guarded("conjugate.fast_equals_brute", [&] {
            const bool same = identical(conjugate_fast(f, c.dual), conjugate_brute(f, c.dual));
            s.add("conjugate.fast_equals_brute", same, same ? 0.0 : 1.0, "bitwise comparison of values and flags");
        });
    } else {
        s.skip("conjugate.fast_equals_brute", "grid too large for enumeration");
    }

    s.guarded("conjugate.fenchel_young_inequality", [&] {
        const GridFn fs = conjugate_fast(f, c.dual).fn;
        double worst = kInf;
        std::vector<double> x(f.dim()), xs(f.dim());
        for (std::size_t p = 0; p < f.size(); ++p) {
            if (f[p].is_infinite()) continue;
            f.coords(p, x);
            for (std::size_t q = 0; q < fs.size(); ++q) {
                if (fs[q].is_infinite()) continue;
                fs.coords(q, xs);
                worst = std::min(worst, f[p].raw() + fs[q].raw() - pairing(x, xs));
            }
        }
        const double tol = 1e-9;
        s.add("conjugate.fenchel_young_inequality", worst >= -tol, worst, "min of f + f* - <x,x*>");
    });

    s.guarded("conjugate.biconjugate_below_f", [&] {
        const GridFn fss = biconjugate(f, c.dual);
        double worst = -kInf;
        for (std::size_t i = 0; i < f.size(); ++i)
            if (f[i].is_finite()) worst = std::max(worst, fss[i].is_finite() ? fss[i].raw() - f[i].raw() : -kInf);
        s.add("conjugate.biconjugate_below_f", worst <= 1e-9, worst, "max of f** - f over dom f");
    });

    if (c.function && c.function->kind() == BuiltinFunction::Kind::quadratic) {
        s.guarded("conjugate.quadratic_error", [&] {
            const ConjugateResult r = conjugate_fast(f, c.dual);
            const double a = c.function->a();
            double bound = 0.0, err = 0.0;
            for (const auto& ax : c.primal) bound += a * ax.spacing() * ax.spacing() / 8;
            std::vector<double> xs(f.dim());
            std::size_t used = 0;
            for (std::size_t q = 0; q < r.fn.size(); ++q) {
                if (r.boundary_flags[q]) continue;
                r.fn.coords(q, xs);
                err = std::max(err, std::abs(r.fn[q].raw() - c.function->conjugate(xs).raw()));
                ++used;
            }
            s.add("conjugate.quadratic_error", err <= bound + 1e-12, err,
                  "bound a*h^2/8 = " + num(bound) + " over " + std::to_string(used) + " unflagged nodes");
        });
    }
}

// Graph samples that fall inside the primal x primal box.
OperatorGraph graph_in_box(const OperatorSpec& spec, const Axes& box) {
    const OperatorGraph g = sample_graph(spec, box, box);
    std::vector<GraphPoint> kept;
    for (const auto& p : g.pairs()) {
        bool in = true;
        for (std::size_t k = 0; k < box.size(); ++k) in = in && box[k].covers(p.x[k]) && box[k].covers(p.xstar[k]);
        if (in) kept.push_back(p);
    }
    if (kept.empty()) throw OutOfDomain("no graph point lies inside the grid box");
    return OperatorGraph(std::move(kept));
}

void bifunction_checks(Suite& s, const Config& c) {
    const Axes& X = c.primal;
    const TruncationPolicy policy = c.policy();
    const double tol = c.tolerances.tol_disc;
    const OperatorSpec spec = c.operator_spec();
    const OperatorGraph graph = graph_in_box(spec, X);
    const bool subdiff = c.function && spec.kind() == OperatorSpec::Kind::subdifferential;

    const BifunctionGrid fitz = fitzpatrick(graph, X, X);
    const BifunctionGrid sig = sigma(graph, X, X, policy);
    std::vector<std::pair<std::string, const BifunctionGrid*>> reps{{"fitz", &fitz}, {"sigma", &sig}};
    std::optional<BifunctionGrid> fy, mix;
    if (subdiff) {
        fy = fenchel_young(*c.function, X, X);
        mix = combine(0.5, *fy, fitz);
        reps.emplace_back("fy", &*fy);
        reps.emplace_back("mix", &*mix);
    }

    for (const auto& [name, h] : reps) {
        s.guarded("representation." + name, [&] {
            const FamilyReport r = h_family_check(*h, graph, tol);
            s.add("representation." + name, r.pass(), r.min_excess,
                  "min h - <x,x*> " + num(r.min_excess) + ", graph residual " + num(r.max_graph_residual));
        });
    }

    s.guarded("representation.sigma_above_fitz", [&] {
        double worst = kInf;
        for (std::size_t n = 0; n < sig.size(); ++n)
            if (sig[n].is_finite()) worst = std::min(worst, sig[n].raw() - fitz[n].raw());
        s.add("representation.sigma_above_fitz", worst >= -tol, worst, "min of sigma - F over dom sigma");
    });

    if (fy) {
        s.guarded("aiteration.fy_autoconjugate", [&] {
            const AutoconjugateReport r = autoconjugate_check(*fy, tol, policy);
            s.add("aiteration.fy_autoconjugate", r.pass, r.max_residual,
                  "domain mismatches " + std::to_string(r.domain_mismatches));
        });
    }

    const BifunctionGrid& start = mix ? *mix : fitz;
    s.guarded("aiteration.contraction", [&] {
        IterateOptions opt;
        opt.epsilon = c.iteration.epsilon;
        opt.max_n = c.iteration.max_n;
        opt.policy = policy;
        opt.keep_history = true;
        const IterationTrace tr = a_iterate(start, opt);
        bool ok = tr.converged;
        double worst = 0.0;
        for (std::size_t i = 1; i < tr.records.size(); ++i) {
            const double g0 = tr.records[i - 1].sup_gap, g1 = tr.records[i].sup_gap;
            ok = ok && g1 <= g0;
            if (g0 > 1e-12) worst = std::max(worst, g1 / g0);
        }
        ok = ok && worst <= 0.5 + tol;
        std::size_t bad = 0;
        for (const auto& step : tr.history)
            for (std::size_t n = 0; n < tr.final.size(); ++n) {
                const ExtReal lo = step.conj[n], mid = tr.final[n], hi = step.iterate[n];
                if (mid.is_finite() && (lo.is_infinite() || lo.raw() > mid.raw() + tol)) ++bad;
                if (hi.is_finite() && (mid.is_infinite() || mid.raw() > hi.raw() + tol)) ++bad;
            }
        s.add("aiteration.contraction", ok && bad == 0, worst,
              std::to_string(tr.records.size()) + " steps, final gap " + num(tr.records.back().sup_gap) +
                  ", sandwich violations " + std::to_string(bad));
    });

    // Enlargements.
    const double mt = c.tolerances.tol_member;
    std::vector<std::pair<std::string, std::unique_ptr<Enlargement>>> kinds;
    kinds.emplace_back("be", std::make_unique<BiggestEnlargement>(graph, X, X, mt));
    kinds.emplace_back("se", make_t_se(graph, X, X, policy, mt));
    kinds.emplace_back("breve(fitz)", make_t_breve(fitz, policy, mt));
    if (subdiff) {
        kinds.emplace_back("epsdiff", std::make_unique<EpsSubdifferential>(*c.function, X, X, mt));
        kinds.emplace_back("breve(fy)", make_t_breve(*fy, policy, mt));
        kinds.emplace_back("breve(mix)", make_t_breve(*mix, policy, mt));
    }
    const SampleSpec sample;
    const auto xs = sample_points(X, sample.x_stride);

    for (const auto& [name, e] : kinds) {
        s.guarded("enlargement.collapse." + name, [&] {
            std::size_t good = 0, total = 0;
            for (const auto& x : xs) {
                const DualSet tx = operator_eval(spec, x, X);
                bool inside = true;
                for (const auto& box : tx.boxes)
                    for (std::size_t k = 0; k < X.size(); ++k)
                        inside = inside && box[k].lo >= X[k].min() && box[k].hi <= X[k].max();
                if (tx.empty() || !inside) continue;
                ++total;
                if (matches_box(e->query(0.0, x), tx)) ++good;
            }
            s.add("enlargement.collapse." + name, good == total, static_cast<double>(total - good),
                  std::to_string(good) + "/" + std::to_string(total) + " points match T(x) within one cell");
        });
        s.guarded("enlargement.monotone_in_eps." + name, [&] {
            std::size_t bad = 0;
            for (const auto& x : xs)
                for (std::size_t i = 1; i < sample.epsilons.size(); ++i)
                    bad += inclusion_check(e->query(sample.epsilons[i - 1], x), e->query(sample.epsilons[i], x))
                               .counterexamples.size();
            s.add("enlargement.monotone_in_eps." + name, bad == 0, static_cast<double>(bad), "counterexample nodes");
        });
    }

    for (std::size_t k = 0; k < kinds.size(); ++k) {
        const auto& [name, e] = kinds[k];
        if (name == "be" || name == "se") continue;
        s.guarded("enlargement.additive." + name, [&] {
            const AdditivityReport r = additivity_check(*e, sample);
            s.add("enlargement.additive." + name, r.pass, r.min_slack, "min slack over " + std::to_string(r.set_pairs) + " set pairs");
        });
    }
    s.guarded("enlargement.mutual.be_se", [&] {
        const AdditivityReport r = mutual_additivity_check(*kinds[0].second, *kinds[1].second, sample);
        s.add("enlargement.mutual.be_se", r.pass, r.min_slack, "min slack over " + std::to_string(r.set_pairs) + " set pairs");
    });

    s.guarded("enlargement.inclusions", [&] {
        std::size_t bad = 0;
        const Enlargement& be = *kinds[0].second;
        const Enlargement& se = *kinds[1].second;
        const Enlargement& breve_fitz = *kinds[2].second;
        for (double eps : sample.epsilons)
            for (const auto& x : xs) {
                const EnlargementSet outer = be.query(eps, x);
                bad += inclusion_check(se.query(eps, x), outer).counterexamples.size();
                bad += inclusion_check(breve_fitz.query(eps, x), outer).counterexamples.size();
                if (subdiff) {
                    const EnlargementSet half = breve_fitz.query(eps / 2, x);
                    bad += inclusion_check(half, kinds[3].second->query(eps, x)).counterexamples.size();
                    bad += inclusion_check(half, se.query(eps, x)).counterexamples.size();
                }
            }
        s.add("enlargement.inclusions", bad == 0, static_cast<double>(bad), "counterexample nodes");
    });
}

void io_checks(Suite& s, const GridFn& f) {
    s.guarded("io.grid_round_trip", [&] {
        std::stringstream ss;
        write_grid_csv(f, ss);
        const GridFn back = read_grid_csv(ss);
        bool same = back.axes() == f.axes();
        for (std::size_t i = 0; same && i < f.size(); ++i) same = back[i].raw() == f[i].raw() || (back[i].is_infinite() && f[i].is_infinite());
        s.add("io.grid_round_trip", same, same ? 0.0 : 1.0, "bitwise comparison after CSV write and read");
    });
}

} // namespace

bool VerifyReport::pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

nlohmann::ordered_json VerifyReport::to_json() const {
    nlohmann::ordered_json j;
    j["pass"] = pass();
    auto arr = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
        nlohmann::ordered_json e;
        e["name"] = c.name;
        e["pass"] = c.pass;
        if (c.skipped) e["skipped"] = true;
        e["value"] = std::isfinite(c.value) ? nlohmann::ordered_json(c.value) : nlohmann::ordered_json(format_number(c.value));
        e["detail"] = c.detail;
        arr.push_back(std::move(e));
    }
    j["checks"] = std::move(arr);
    return j;
}

VerifyReport run_verify(const Config& config, std::size_t max_bifunction_nodes) {
    Suite s;
    std::optional<GridFn> f;
    if (config.tabulated) f = *config.tabulated;
    else if (config.function) f = GridFn::sample(config.primal, [&](std::span<const double> x) { return config.function->value(x); });

    if (f && f->is_proper()) {
        conjugate_checks(s, config, *f);
        io_checks(s, *f);
    } else {
        s.skip("conjugate", "no proper function configured");
    }

    const std::size_t nodes = grid_size(config.primal) * grid_size(config.primal);
    if (nodes > max_bifunction_nodes) {
        s.skip("bifunction", "grid has " + std::to_string(nodes) + " bifunction nodes");
    } else if (!config.op && !config.function) {
        s.skip("bifunction", "no operator configured");
    } else {
        s.guarded("bifunction", [&] { bifunction_checks(s, config); });
    }
    return s.report;
}

} // namespace autoconj
