#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "girg/geometry.hpp"

namespace girg {

using VertexId = std::uint32_t;
using Edge = std::pair<VertexId, VertexId>;

struct Vertex {
    VertexId id;
    Point position;
    double weight;
};

/// Positions (d x N, one column per vertex) and weights of a sampled point set.
struct VertexSet {
    Eigen::MatrixXd positions;
    Eigen::VectorXd weights;

    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(weights.size()); }
};

/// Immutable sampled graph. Adjacency is stored in compressed rows; every
/// row is sorted, symmetric, free of self-loops and duplicates.
class Graph {
public:
    Graph() = default;

    /// Builds the adjacency from an arbitrary edge list. Duplicate edges and
    /// both orientations collapse; self-loops and out-of-range ids throw.
    Graph(ModelParams params, VertexSet vertices, std::span<const Edge> edges);

    [[nodiscard]] const ModelParams& params() const noexcept { return params_; }
    [[nodiscard]] std::size_t size() const noexcept { return vertices_.size(); }
    [[nodiscard]] std::size_t edge_count() const noexcept { return neighbours_.size() / 2; }
    [[nodiscard]] int dim() const noexcept { return static_cast<int>(vertices_.positions.rows()); }

    [[nodiscard]] const Eigen::MatrixXd& positions() const noexcept { return vertices_.positions; }
    [[nodiscard]] const Eigen::VectorXd& weights() const noexcept { return vertices_.weights; }
    [[nodiscard]] const VertexSet& vertex_set() const noexcept { return vertices_; }

    [[nodiscard]] auto position(VertexId v) const { return vertices_.positions.col(v); }
    [[nodiscard]] double weight(VertexId v) const { return vertices_.weights(v); }
    [[nodiscard]] Vertex vertex(VertexId v) const { return {v, vertices_.positions.col(v), weight(v)}; }

    [[nodiscard]] std::span<const VertexId> neighbours(VertexId v) const noexcept {
        return {neighbours_.data() + offsets_[v], neighbours_.data() + offsets_[v + 1]};
    }
    [[nodiscard]] std::size_t degree(VertexId v) const noexcept { return offsets_[v + 1] - offsets_[v]; }
    [[nodiscard]] bool has_edge(VertexId u, VertexId v) const noexcept;

    // Geometric distance under the graph's geometry.
    [[nodiscard]] double distance(VertexId u, VertexId v) const {
        return dist(position(u), position(v), params_.geometry);
    }

    /// Edges with u < v, in lexicographic order.
    [[nodiscard]] std::vector<Edge> edges() const;

    friend bool operator==(const Graph& a, const Graph& b);

private:
    ModelParams params_;
    VertexSet vertices_;
    std::vector<std::size_t> offsets_{0};
    std::vector<VertexId> neighbours_;
};

enum class SamplerEngine { Naive, CellGrid };

/// Inverse CDF of the Pareto density (tau-1) w^-tau on [1, inf).
[[nodiscard]] inline double pareto_quantile(double u, double tau) noexcept {
    return std::pow(1.0 - u, -1.0 / (tau - 1.0));
}

/// Poisson(n) (or fixed_count) points, uniform positions, Pareto weights.
[[nodiscard]] VertexSet sample_vertices(const ModelParams& params);

/// Independent edge coins for every unordered pair, O(N^2).
[[nodiscard]] std::vector<Edge> sample_edges_naive(const ModelParams& params, const VertexSet& vertices,
                                                   std::uint64_t edge_seed, unsigned threads = 1);

/// Same edge distribution via a hierarchical cell grid: near cell pairs are
/// enumerated exactly and far cell pairs are thinned from a distance bound.
[[nodiscard]] std::vector<Edge> sample_edges_grid(const ModelParams& params, const VertexSet& vertices,
                                                  std::uint64_t edge_seed, unsigned threads = 1);

[[nodiscard]] Graph sample_graph(const ModelParams& params, SamplerEngine engine = SamplerEngine::CellGrid,
                                 unsigned threads = 1);

struct ComponentLabels {
    std::vector<std::uint32_t> label;  // compact, numbered by smallest member id
    std::vector<std::size_t> sizes;    // indexed by label
    std::uint32_t giant_id = 0;
    std::size_t giant_size = 0;

    [[nodiscard]] bool in_giant(VertexId v) const { return giant_size > 0 && label[v] == giant_id; }
};

[[nodiscard]] ComponentLabels giant_component(const Graph& graph);

struct DegreeBucket {
    int exponent;  // weights in [2^exponent, 2^(exponent+1))
    double mean_degree;
    double variance;
    std::size_t count;
};

[[nodiscard]] std::vector<DegreeBucket> degree_stats(const Graph& graph);

} // namespace girg
