#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace autoconj {

struct GraphPoint {
    std::vector<double> x;
    std::vector<double> xstar;
};

/// Finite sample {(xᵢ, xᵢ*)} of the graph of a monotone operator.
///
/// Construction rejects samples that violate ⟨y−x, y*−x*⟩ ≥ −monotone_tol for
/// some pair.
class OperatorGraph {
public:
    static constexpr double kMonotoneTol = 1e-12;

    explicit OperatorGraph(std::vector<GraphPoint> pairs, double monotone_tol = kMonotoneTol);

    std::size_t size() const { return pairs_.size(); }
    std::size_t dim() const { return dim_; }
    const std::vector<GraphPoint>& pairs() const { return pairs_; }
    const GraphPoint& operator[](std::size_t i) const { return pairs_[i]; }

private:
    std::vector<GraphPoint> pairs_;
    std::size_t dim_ = 0;
};

} // namespace autoconj
