#pragma once

#include <vector>

#include "girg/model.hpp"

namespace girg::testing {

// Graph on n vertices with the given edges; positions spread on a line, unit weights.
inline Graph make_graph(std::size_t n, const std::vector<Edge>& edges, std::vector<double> weights = {}) {
    ModelParams p;
    p.n = static_cast<double>(std::max<std::size_t>(n, 1));
    p.fixed_count = static_cast<std::int64_t>(n);
    VertexSet vs;
    vs.positions.resize(1, static_cast<Eigen::Index>(n));
    vs.weights = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        vs.positions(0, static_cast<Eigen::Index>(i)) = static_cast<double>(i) / static_cast<double>(n);
        if (i < weights.size()) vs.weights(static_cast<Eigen::Index>(i)) = weights[i];
    }
    return Graph(p, std::move(vs), edges);
}

inline std::vector<Edge> path_edges(std::size_t len, VertexId first = 0) {
    std::vector<Edge> e;
    for (std::size_t i = 0; i < len; ++i) e.emplace_back(first + i, first + i + 1);
    return e;
}

} // namespace girg::testing
