#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "autoconj/a_iteration.hpp"
#include "autoconj/config.hpp"
#include "autoconj/enlargements.hpp"
#include "autoconj/error.hpp"
#include "autoconj/io.hpp"
#include "autoconj/representations.hpp"
#include "autoconj/verify.hpp"

using namespace autoconj;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Flags {
    std::string config;
    std::string output;
    std::string log;
    std::optional<double> epsilon;
    std::string x;
    std::string kind = "be";
    std::string h = "fitz";
    std::optional<int> max_iter;
    std::optional<double> tol;
    bool brute = false;
    // transport
    double eps1 = 0, eps2 = 0, alpha = 0.5;
    std::string x1, xs1, x2, xs2;
};

std::vector<double> parse_vector(const std::string& text, std::size_t dim, const char* flag) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw UsageError(std::string(flag) + ": not a number: '" + tok + "'");
        }
    }
    if (v.size() != dim) throw UsageError(std::string(flag) + ": expected " + std::to_string(dim) + " value(s)");
    return v;
}

// Moves x onto the nearest primal node, noting the change on stderr.
std::vector<double> snap(std::vector<double> x, const Axes& axes) {
    for (std::size_t k = 0; k < axes.size(); ++k) {
        if (!axes[k].covers(x[k])) throw UsageError("--x: point lies outside the primal box");
        const double node = axes[k].node(axes[k].nearest(x[k]));
        if (node != x[k]) std::fprintf(stderr, "note: x[%zu] = %g snapped to grid node %.17g\n", k, x[k], node);
        x[k] = node;
    }
    return x;
}

double member_tol(const Flags& fl, const Config& c) { return fl.tol.value_or(c.tolerances.tol_member); }

GridFn primal_function(const Config& c) {
    if (c.tabulated) return *c.tabulated;
    const BuiltinFunction& f = c.builtin();
    return GridFn::sample(c.primal, [&](std::span<const double> x) { return f.value(x); });
}

OperatorGraph config_graph(const Config& c) { return sample_graph(c.operator_spec(), c.primal, c.dual); }

BifunctionGrid fy_grid(const Config& c) {
    if (c.function) return fenchel_young(*c.function, c.primal, c.dual);
    return fenchel_young(primal_function(c), c.dual, c.policy());
}

// --h {fy|fitz|sigma|mix:λ}; mix:λ is λ·f^FY + (1−λ)·F_T.
BifunctionGrid representation(const std::string& h, const Config& c) {
    if (h == "fy") return fy_grid(c);
    if (h == "fitz") return fitzpatrick(config_graph(c), c.primal, c.dual);
    if (h == "sigma") return sigma(config_graph(c), c.primal, c.dual, c.policy());
    if (h.rfind("mix:", 0) == 0) {
        double lambda = 0;
        try {
            lambda = std::stod(h.substr(4));
        } catch (const std::exception&) {
            throw UsageError("--h: bad mix weight");
        }
        if (!(lambda >= 0 && lambda <= 1)) throw UsageError("--h: mix weight must lie in [0,1]");
        return combine(lambda, fy_grid(c), fitzpatrick(config_graph(c), c.primal, c.dual));
    }
    throw UsageError("--h: expected fy, fitz, sigma or mix:<lambda>");
}

std::unique_ptr<Enlargement> enlargement(const Flags& fl, const Config& c) {
    const double tol = member_tol(fl, c);
    if (fl.kind == "epsdiff") return std::make_unique<EpsSubdifferential>(c.builtin(), c.primal, c.dual, tol);
    if (fl.kind == "be") return std::make_unique<BiggestEnlargement>(config_graph(c), c.primal, c.dual, tol);
    if (fl.kind == "se") return make_t_se(config_graph(c), c.primal, c.dual, c.policy(), tol);
    if (fl.kind == "breve") return make_t_breve(representation(fl.h, c), c.policy(), tol);
    throw UsageError("--kind: expected be, se, breve or epsdiff");
}

void need_output(const Flags& fl) {
    if (fl.output.empty()) throw UsageError("--output is required");
}

int cmd_conjugate(const Flags& fl, const Config& c) {
    need_output(fl);
    const ConjugateResult r = conjugate(primal_function(c), c.dual, fl.brute ? ConjugateMethod::brute : ConjugateMethod::fast);
    write_grid_csv(r.fn, fl.output);
    std::size_t flagged = 0;
    for (bool b : r.boundary_flags) flagged += b;
    std::printf("conjugate: %zu dual nodes, %zu boundary-flagged\n", r.fn.size(), flagged);
    return kOk;
}

int cmd_bifunction(const std::string& which, const Flags& fl, const Config& c) {
    need_output(fl);
    const BifunctionGrid h = representation(which, c);
    write_grid_csv(h.base(), fl.output);
    std::printf("%s: %zu nodes, %zu finite\n", which.c_str(), h.size(), h.base().finite_count());
    return kOk;
}

int cmd_aiterate(const Flags& fl, const Config& c) {
    need_output(fl);
    IterateOptions opt;
    opt.epsilon = fl.epsilon.value_or(c.iteration.epsilon);
    opt.max_n = fl.max_iter.value_or(c.iteration.max_n);
    opt.policy = c.policy();
    if (!(opt.epsilon > 0)) throw UsageError("--epsilon must be positive");
    if (opt.max_n < 1) throw UsageError("--max-iter must be positive");
    const IterationTrace tr = a_iterate(representation(fl.h, c), opt);
    write_grid_csv(tr.final.base(), fl.output);
    const std::string log = fl.log.empty() ? fl.output + ".jsonl" : fl.log;
    std::ofstream out(log);
    if (!out) throw Error("cannot write " + log);
    write_convergence_log(tr, out);
    const int bound = stopping_bound(tr.records.front().sup_gap, opt.epsilon);
    std::printf("aiterate: n_final %d, sup_gap %.6g, stopping bound %d, %s\n", tr.n_final, tr.records.back().sup_gap,
                bound, tr.converged ? "converged" : "not converged");
    return tr.converged ? kOk : kCheckFailed;
}

int cmd_enlarge(const Flags& fl, const Config& c) {
    need_output(fl);
    if (!fl.epsilon) throw UsageError("--epsilon is required");
    if (fl.x.empty()) throw UsageError("--x is required");
    const auto e = enlargement(fl, c);
    const EnlargementSet s = e->query(*fl.epsilon, snap(parse_vector(fl.x, c.dim, "--x"), c.primal));
    write_json(to_json(s), fl.output);
    std::printf("%s: %zu members\n", s.kind.c_str(), s.members.size());
    return kOk;
}

int cmd_transport(const Flags& fl, const Config& c) {
    need_output(fl);
    const auto e = enlargement(fl, c);
    const EnlargementPoint a{fl.eps1, parse_vector(fl.x1, c.dim, "--x1"), parse_vector(fl.xs1, c.dim, "--xs1")};
    const EnlargementPoint b{fl.eps2, parse_vector(fl.x2, c.dim, "--x2"), parse_vector(fl.xs2, c.dim, "--xs2")};
    if (!e->is_member(a.epsilon, a.x, a.xstar) || !e->is_member(b.epsilon, b.x, b.xstar)) {
        std::fprintf(stderr, "transport: an input point is not a member of the enlargement\n");
        return kCheckFailed;
    }
    const TransportResult r = transport(*e, a, b, fl.alpha);
    nlohmann::ordered_json j;
    j["kind"] = e->kind();
    j["alpha"] = fl.alpha;
    j["xhat"] = r.xhat;
    j["xhatstar"] = r.xhatstar;
    j["epshat"] = r.epshat;
    j["member_slack"] = std::isfinite(r.member_slack) ? nlohmann::ordered_json(r.member_slack) : nlohmann::ordered_json("-inf");
    j["member"] = r.member;
    write_json(j, fl.output);
    const bool ok = r.member && r.epshat >= -e->tol();
    std::printf("transport: epshat %.6g, member %s\n", r.epshat, r.member ? "yes" : "no");
    return ok ? kOk : kCheckFailed;
}

int cmd_verify(const Flags& fl, const Config& c) {
    const VerifyReport r = run_verify(c);
    for (const auto& ch : r.checks)
        std::printf("%-6s %-40s %-10.3g %s\n", ch.skipped ? "SKIP" : ch.pass ? "PASS" : "FAIL", ch.name.c_str(), ch.value,
                    ch.detail.c_str());
    if (!fl.output.empty()) write_json(r.to_json(), fl.output);
    std::printf("verify: %s\n", r.pass() ? "pass" : "FAIL");
    return r.pass() ? kOk : kCheckFailed;
}

int cmd_plot(const Flags& fl, const Config& c) {
    need_output(fl);
    if (fl.epsilon || !fl.x.empty()) {
        if (!fl.epsilon || fl.x.empty()) throw UsageError("plot-data: --epsilon and --x go together");
        const auto e = enlargement(fl, c);
        write_plot_data(e->query(*fl.epsilon, snap(parse_vector(fl.x, c.dim, "--x"), c.primal)), fl.output);
    } else {
        write_plot_data(representation(fl.h, c).base(), fl.output);
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Convex representations, autoconjugates and enlargements of monotone operators on grids"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);
    Flags fl;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", fl.config, "JSON config")->required()->check(CLI::ExistingFile);
        sub->add_option("--output", fl.output, "Output path");
        sub->add_option("--tol", fl.tol, "Membership tolerance");
    };
    auto with_h = [&](CLI::App* sub) { sub->add_option("--h", fl.h, "Representation: fy, fitz, sigma or mix:<lambda>"); };
    auto with_kind = [&](CLI::App* sub) {
        sub->add_option("--kind", fl.kind, "Enlargement")->check(CLI::IsMember({"be", "se", "breve", "epsdiff"}));
    };

    auto* conj = app.add_subcommand("conjugate", "Grid conjugate of the configured function");
    common(conj);
    conj->add_flag("--brute", fl.brute, "Use plain enumeration");
    auto* fy = app.add_subcommand("fenchel-young", "f(x) + f*(x*) on the bifunction grid");
    common(fy);
    auto* fz = app.add_subcommand("fitzpatrick", "Fitzpatrick function of the configured operator");
    common(fz);
    auto* sg = app.add_subcommand("sigma", "Conjugate of the Fitzpatrick function, arguments swapped");
    common(sg);
    auto* ai = app.add_subcommand("aiterate", "Iterate the averaging operator");
    common(ai);
    with_h(ai);
    ai->add_option("--epsilon", fl.epsilon, "Target: stop when sup gap <= 2 epsilon");
    ai->add_option("--max-iter", fl.max_iter, "Iteration cap");
    ai->add_option("--log", fl.log, "Convergence log path (default <output>.jsonl)");
    auto* en = app.add_subcommand("enlarge", "Query an enlargement E(epsilon, x)");
    common(en);
    with_h(en);
    with_kind(en);
    en->add_option("--epsilon", fl.epsilon, "epsilon >= 0");
    en->add_option("--x", fl.x, "Primal point, comma separated");
    auto* tr = app.add_subcommand("transport", "Transportation formula for two members");
    common(tr);
    with_h(tr);
    with_kind(tr);
    tr->add_option("--eps1", fl.eps1)->required();
    tr->add_option("--x1", fl.x1)->required();
    tr->add_option("--xs1", fl.xs1)->required();
    tr->add_option("--eps2", fl.eps2)->required();
    tr->add_option("--x2", fl.x2)->required();
    tr->add_option("--xs2", fl.xs2)->required();
    tr->add_option("--alpha", fl.alpha)->check(CLI::Range(0.0, 1.0));
    auto* vf = app.add_subcommand("verify", "Run the invariant suite");
    common(vf);
    auto* pd = app.add_subcommand("plot-data", "CSV for plotting a representation or an enlargement");
    common(pd);
    with_h(pd);
    with_kind(pd);
    pd->add_option("--epsilon", fl.epsilon, "epsilon >= 0 (enlargement mode)");
    pd->add_option("--x", fl.x, "Primal point (enlargement mode)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        const Config c = parse_config(fl.config);
        if (*conj) return cmd_conjugate(fl, c);
        if (*fy) return cmd_bifunction("fy", fl, c);
        if (*fz) return cmd_bifunction("fitz", fl, c);
        if (*sg) return cmd_bifunction("sigma", fl, c);
        if (*ai) return cmd_aiterate(fl, c);
        if (*en) return cmd_enlarge(fl, c);
        if (*tr) return cmd_transport(fl, c);
        if (*vf) return cmd_verify(fl, c);
        if (*pd) return cmd_plot(fl, c);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return kUsage;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kUsage;
    } catch (const OutOfDomain& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kCheckFailed;
    }
    return kUsage;
}
