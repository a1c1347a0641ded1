#include "autoconj/operator_graph.hpp"

#include <sstream>

#include "autoconj/error.hpp"
#include "autoconj/grid.hpp"

namespace autoconj {

OperatorGraph::OperatorGraph(std::vector<GraphPoint> pairs, double monotone_tol) : pairs_(std::move(pairs)) {
    if (pairs_.empty()) throw std::invalid_argument("OperatorGraph: empty graph");
    dim_ = pairs_.front().x.size();
    if (dim_ == 0) throw DimensionMismatch("OperatorGraph: zero-dimensional points");
    for (const auto& p : pairs_)
        if (p.x.size() != dim_ || p.xstar.size() != dim_)
            throw DimensionMismatch("OperatorGraph: inconsistent point dimensions");

    const std::size_t n = pairs_.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < dim_; ++k)
                s += (pairs_[j].x[k] - pairs_[i].x[k]) * (pairs_[j].xstar[k] - pairs_[i].xstar[k]);
            if (s < -monotone_tol) {
                std::ostringstream os;
                os << "OperatorGraph: samples " << i << " and " << j << " violate monotonicity ("
                   << s << ")";
                throw NotMonotone(os.str());
            }
        }
    }
}

} // namespace autoconj
