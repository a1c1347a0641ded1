#pragma once

#include <optional>
#include <vector>

#include "autoconj/grid.hpp"
#include "autoconj/transforms.hpp"

namespace autoconj {

/// 𝒜h = ½(h + h*∘i), node-wise with +inf absorbing.
BifunctionGrid a_apply(const BifunctionGrid& h, const TruncationPolicy& policy = {});

/// Same, reusing a precomputed h*∘i on the grid of h.
BifunctionGrid a_apply(const BifunctionGrid& h, const BifunctionGrid& h_conj);

struct GapReport {
    GridFn field;            // h − h*∘i on the common finite domain, +inf elsewhere
    double sup = 0.0;        // sup of field over the common domain
    std::size_t common_size = 0;
};

/// Throws ImproperFunction when dom h ∩ dom h*∘i is empty.
GapReport gap(const BifunctionGrid& h, const TruncationPolicy& policy = {});
GapReport gap(const BifunctionGrid& h, const BifunctionGrid& h_conj);

/// Smallest integer n with n > 1 + log₂(gap1) − log₂(epsilon).
int stopping_bound(double gap1, double epsilon);

struct IterationRecord {
    int n;
    double sup_gap;        // sup of 𝒜ⁿh − (𝒜ⁿh)*∘i over the common domain
    std::size_t dom_size;  // finite nodes of 𝒜ⁿh
};

struct IterationStep {
    BifunctionGrid iterate;  // 𝒜ⁿh
    BifunctionGrid conj;     // (𝒜ⁿh)*∘i
};

struct IterationTrace {
    std::vector<IterationRecord> records;
    BifunctionGrid final;
    bool converged = false;
    int n_final = 0;
    /// Filled when keep_history is requested; steps[k] holds n = k+1.
    std::vector<IterationStep> history;
};

struct IterateOptions {
    double epsilon = 1e-3;
    int max_n = 50;
    /// Run exactly max_n steps instead of stopping at the gap target.
    bool fixed_count = false;
    bool keep_history = false;
    TruncationPolicy policy{};
};

/// Iterates hₙ₊₁ = 𝒜hₙ from h₁ = 𝒜h until sup gap ≤ 2ε or n = max_n.
IterationTrace a_iterate(const BifunctionGrid& h, const IterateOptions& options);
IterationTrace a_iterate(const BifunctionGrid& h, double epsilon, int max_n);

struct AutoconjugateReport {
    bool pass = false;
    double max_residual = 0.0;       // max |h − h*∘i| over the common finite domain
    std::size_t domain_mismatches = 0;
};

/// h*∘i = h: common-domain residual within tol and equal domains off the box edge.
AutoconjugateReport autoconjugate_check(const BifunctionGrid& h, double tol, const TruncationPolicy& policy = {});

struct QcReport {
    bool pass = false;
    std::size_t dom_h = 0;
    std::size_t dom_conj = 0;
    std::size_t mismatches = 0;
};

/// dom h = dom h*∘i as node sets. Nodes on the box edge are skipped: a
/// truncated conjugate cannot tell a finite edge value from an escaping one.
QcReport qc_check(const BifunctionGrid& h, const TruncationPolicy& policy = {});

} // namespace autoconj
