#pragma once

#include "autoconj/builtin.hpp"
#include "autoconj/grid.hpp"
#include "autoconj/operator_graph.hpp"
#include "autoconj/transforms.hpp"

namespace autoconj {

/// f^FY(x,x*) = f(x) + f*(x*) with the closed-form conjugate.
BifunctionGrid fenchel_young(const BuiltinFunction& f, const Axes& primal, const Axes& dual);

/// f^FY for a tabulated f; f* comes from the fast grid conjugate under `policy`.
BifunctionGrid fenchel_young(const GridFn& f, const Axes& dual, const TruncationPolicy& policy = {});

/// Fitzpatrick function ℱ_T(x,x*) = max over samples (y,y*) of ⟨y,x*⟩ + ⟨x−y,y*⟩.
BifunctionGrid fitzpatrick(const OperatorGraph& graph, const Axes& primal, const Axes& dual);

/// σ_T = ℱ_T*∘i.
BifunctionGrid sigma(const OperatorGraph& graph, const Axes& primal, const Axes& dual,
                     const TruncationPolicy& policy = {});

/// λ·a + (1−λ)·b, λ ∈ [0,1]; +inf absorbs (0·inf is taken as 0 at the endpoints).
BifunctionGrid combine(double lambda, const BifunctionGrid& a, const BifunctionGrid& b);

/// (x,x*) ↦ ⟨x,x*⟩ + shift.
BifunctionGrid pairing_bifunction(const Axes& primal, const Axes& dual, double shift = 0.0);

struct FamilyReport {
    double min_excess = kInf;         // min over finite nodes of h − ⟨x,x*⟩
    double max_graph_residual = 0.0;  // max over samples of |h − ⟨x,x*⟩| at the sample's node
    std::size_t worst_node = 0;
    bool lower_bound_ok = false;
    bool graph_ok = false;

    bool pass() const { return lower_bound_ok && graph_ok; }
};

/// Membership test for ℋ(T): h ≥ ⟨·,·⟩ everywhere and h = ⟨·,·⟩ on gph(T).
FamilyReport h_family_check(const BifunctionGrid& h, const OperatorGraph& graph, double tol);

} // namespace autoconj
