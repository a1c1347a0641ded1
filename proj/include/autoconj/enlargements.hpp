#pragma once

#include <memory>
#include <string>
#include <vector>

#include "autoconj/builtin.hpp"
#include "autoconj/grid.hpp"
#include "autoconj/operator_graph.hpp"
#include "autoconj/transforms.hpp"

namespace autoconj {

/// Membership tolerance: a dual node belongs to E(ε,x) when slack ≥ −tol.
inline constexpr double kMemberTol = 1e-6;

struct Member {
    std::size_t node;            // flat index on the dual grid
    std::vector<double> xstar;
    double slack;
};

struct EnlargementSet {
    std::string kind;
    double epsilon = 0.0;
    std::vector<double> x;
    Axes dual_axes;
    std::vector<Member> members;

    bool contains_node(std::size_t node) const;
    const Member* find(std::size_t node) const;
};

/// A membership oracle E(ε,x) ∋ x*, expressed through a slack that is ≥ 0 for
/// members (−inf when the defining function is +inf).
class Enlargement {
public:
    explicit Enlargement(double tol) : tol_(tol) {}
    virtual ~Enlargement() = default;

    virtual std::string kind() const = 0;
    virtual const Axes& primal_axes() const = 0;
    virtual const Axes& dual_axes() const = 0;
    virtual double slack(double epsilon, std::span<const double> x, std::span<const double> xstar) const = 0;

    /// All dual nodes x* with slack ≥ −tol. x must be a primal grid node.
    virtual EnlargementSet query(double epsilon, std::span<const double> x) const;

    double tol() const { return tol_; }
    bool is_member(double epsilon, std::span<const double> x, std::span<const double> xstar) const {
        return slack(epsilon, x, xstar) >= -tol_;
    }

protected:
    void check_query(double epsilon, std::span<const double> x) const;

private:
    double tol_;
};

/// L^h(ε,x) = {x* : h(x,x*) ≤ ⟨x,x*⟩ + ε}. Off-grid points are looked up at
/// their nearest node.
class LevelSetEnlargement : public Enlargement {
public:
    LevelSetEnlargement(BifunctionGrid h, std::string kind, double tol = kMemberTol);

    std::string kind() const override { return kind_; }
    const Axes& primal_axes() const override { return primal_; }
    const Axes& dual_axes() const override { return dual_; }
    double slack(double epsilon, std::span<const double> x, std::span<const double> xstar) const override;
    EnlargementSet query(double epsilon, std::span<const double> x) const override;

    const BifunctionGrid& representation() const { return h_; }

private:
    BifunctionGrid h_;
    std::string kind_;
    Axes primal_;
    Axes dual_;
};

/// ∂̆f through the closed-form Fenchel–Young inequality f(x) + f*(x*) ≤ ⟨x,x*⟩ + ε.
class EpsSubdifferential : public Enlargement {
public:
    EpsSubdifferential(BuiltinFunction f, Axes primal, Axes dual, double tol = kMemberTol);

    std::string kind() const override { return "epsdiff"; }
    const Axes& primal_axes() const override { return primal_; }
    const Axes& dual_axes() const override { return dual_; }
    double slack(double epsilon, std::span<const double> x, std::span<const double> xstar) const override;

    const BuiltinFunction& function() const { return f_; }

private:
    BuiltinFunction f_;
    Axes primal_;
    Axes dual_;
};

/// T^BE(ε,x) = {x* : ⟨y−x, y*−x*⟩ ≥ −ε for every sample (y,y*)}.
class BiggestEnlargement : public Enlargement {
public:
    BiggestEnlargement(OperatorGraph graph, Axes primal, Axes dual, double tol = kMemberTol);

    std::string kind() const override { return "be"; }
    const Axes& primal_axes() const override { return primal_; }
    const Axes& dual_axes() const override { return dual_; }
    double slack(double epsilon, std::span<const double> x, std::span<const double> xstar) const override;

private:
    OperatorGraph graph_;
    Axes primal_;
    Axes dual_;
};

/// T̆_h evaluated straight from its definition: x* is a member when (x*,x)
/// is a 2ε-subgradient of h at (x,x*), i.e. h(x,x*) + h*(x*,x) ≤ 2(⟨x,x*⟩ + ε),
/// with h*(x*,x) obtained by enumerating the whole grid for each query.
class TBreveDirect : public Enlargement {
public:
    TBreveDirect(BifunctionGrid h, const TruncationPolicy& policy = {}, double tol = kMemberTol);

    std::string kind() const override { return "breve-direct"; }
    const Axes& primal_axes() const override { return primal_; }
    const Axes& dual_axes() const override { return dual_; }
    double slack(double epsilon, std::span<const double> x, std::span<const double> xstar) const override;
    EnlargementSet query(double epsilon, std::span<const double> x) const override;

private:
    double swapped_conjugate_at(std::size_t p, std::size_t q) const;

    BifunctionGrid h_;
    TruncationPolicy policy_;
    Axes primal_;
    Axes dual_;
};

// Factories for the named enlargements.
std::unique_ptr<LevelSetEnlargement> make_level(const BifunctionGrid& h, std::string kind = "level",
                                                double tol = kMemberTol);
/// T^SE = L^{σ_T}.
std::unique_ptr<LevelSetEnlargement> make_t_se(const OperatorGraph& graph, const Axes& primal, const Axes& dual,
                                               const TruncationPolicy& policy = {}, double tol = kMemberTol);
/// T̆_h = L^{𝒜h}.
std::unique_ptr<LevelSetEnlargement> make_t_breve(const BifunctionGrid& h, const TruncationPolicy& policy = {},
                                                  double tol = kMemberTol);

// Single-query operations.
EnlargementSet level_enlargement(const BifunctionGrid& h, double epsilon, std::span<const double> x,
                                 double tol = kMemberTol);
EnlargementSet eps_subdifferential(const BuiltinFunction& f, double epsilon, std::span<const double> x,
                                   const Axes& primal, const Axes& dual, double tol = kMemberTol);
/// ∂̆f from f(y) − f(x) ≥ ⟨y−x,x*⟩ − ε scanned over every primal node y.
EnlargementSet eps_subdifferential_scan(const BuiltinFunction& f, double epsilon, std::span<const double> x,
                                        const Axes& primal, const Axes& dual, double tol = kMemberTol);
EnlargementSet t_be(const OperatorGraph& graph, double epsilon, std::span<const double> x, const Axes& primal,
                    const Axes& dual, double tol = kMemberTol);
EnlargementSet t_se(const OperatorGraph& graph, double epsilon, std::span<const double> x, const Axes& primal,
                    const Axes& dual, const TruncationPolicy& policy = {}, double tol = kMemberTol);
EnlargementSet t_breve(const BifunctionGrid& h, double epsilon, std::span<const double> x,
                       const TruncationPolicy& policy = {}, double tol = kMemberTol);

// ---------------------------------------------------------------------------

struct EnlargementPoint {
    double epsilon;
    std::vector<double> x;
    std::vector<double> xstar;
};

struct TransportResult {
    std::vector<double> xhat;
    std::vector<double> xhatstar;
    double epshat;
    double member_slack;  // oracle slack of x̂* in E(ε̂, x̂)
    bool member;
};

/// Convex combination of two members: x̂ = αx₁+(1−α)x₂, x̂* likewise, and
/// ε̂ = αε₁ + (1−α)ε₂ + α(1−α)⟨x₁−x₂, x₁*−x₂*⟩.
TransportResult transport(const Enlargement& e, const EnlargementPoint& first, const EnlargementPoint& second,
                          double alpha);

struct SampleSpec {
    std::vector<double> epsilons{0.0, 0.1, 0.5, 1.0, 2.0};
    std::size_t x_stride = 8;
    /// Added to each ε in the weak (√ε+√η)² test. A graph sampled at grid
    /// resolution has a larger T^BE than the operator itself; for T = identity
    /// on a grid of spacing Δ, the sampled T^BE(ε,·) lies inside the exact
    /// T^BE(ε + Δ²/4, ·).
    double weak_eps_allowance = 0.0;
};

/// Every x_stride-th primal node along each axis.
std::vector<std::vector<double>> sample_points(const Axes& primal, std::size_t stride);

struct PairWitness {
    double eps1 = 0.0, eps2 = 0.0;
    std::vector<double> x, xstar, y, ystar;
};

struct AdditivityReport {
    double min_slack = kInf;       // min of ⟨x−y,x*−y*⟩ + ε + η
    double min_weak_slack = kInf;  // min of ⟨x−y,x*−y*⟩ + (√ε + √η)²
    PairWitness worst;
    std::size_t set_pairs = 0;
    double tol = 0.0;
    bool pass = false;
    bool weak_pass = false;
};

AdditivityReport additivity_check(const Enlargement& e, const SampleSpec& sample = {}, double tol = -1.0);
AdditivityReport mutual_additivity_check(const Enlargement& e, const Enlargement& other,
                                         const SampleSpec& sample = {}, double tol = -1.0);

struct InclusionReport {
    bool pass = false;
    std::vector<Member> counterexamples;  // inner members missing from outer
};

InclusionReport inclusion_check(const EnlargementSet& inner, const EnlargementSet& outer);

/// Sets agree with the closed interval box within `cells` dual grid cells: every member
/// is within cells·Δ of the box and every dual node deeper than cells·Δ inside it is a member.
bool matches_box(const EnlargementSet& s, const DualSet& target, double cells = 1.0);

} // namespace autoconj
