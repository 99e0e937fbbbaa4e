#include "girg/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <new>
#include <numeric>
#include <random>

#include "girg/parallel.hpp"
#include "girg/rng.hpp"
#include "girg/union_find.hpp"

namespace girg {

Graph::Graph(ModelParams params, VertexSet vertices, std::span<const Edge> edges)
    : params_(std::move(params)), vertices_(std::move(vertices)) {
    const std::size_t n = vertices_.size();
    if (n > 0 && vertices_.positions.cols() != static_cast<Eigen::Index>(n)) {
        throw UsageError("Graph: positions and weights disagree on the vertex count");
    }
    std::vector<std::size_t> deg(n, 0);
    for (const auto& [u, v] : edges) {
        if (u >= n || v >= n) throw UsageError("Graph: edge endpoint out of range");
        if (u == v) throw UsageError("Graph: self-loop on vertex " + std::to_string(u));
        ++deg[u];
        ++deg[v];
    }
    offsets_.assign(n + 1, 0);
    for (std::size_t v = 0; v < n; ++v) offsets_[v + 1] = offsets_[v] + deg[v];
    neighbours_.resize(offsets_[n]);
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& [u, v] : edges) {
        neighbours_[fill[u]++] = v;
        neighbours_[fill[v]++] = u;
    }
    // sort rows and drop duplicates, compacting in place
    std::vector<std::size_t> new_offsets(n + 1, 0);
    std::size_t out = 0;
    for (std::size_t v = 0; v < n; ++v) {
        auto first = neighbours_.begin() + static_cast<std::ptrdiff_t>(offsets_[v]);
        auto last = neighbours_.begin() + static_cast<std::ptrdiff_t>(offsets_[v + 1]);
        std::sort(first, last);
        last = std::unique(first, last);
        new_offsets[v] = out;
        for (auto it = first; it != last; ++it) neighbours_[out++] = *it;
    }
    new_offsets[n] = out;
    neighbours_.resize(out);
    neighbours_.shrink_to_fit();
    offsets_ = std::move(new_offsets);
}

bool Graph::has_edge(VertexId u, VertexId v) const noexcept {
    if (u >= size() || v >= size()) return false;
    const auto row = neighbours(u);
    return std::binary_search(row.begin(), row.end(), v);
}

std::vector<Edge> Graph::edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count());
    for (VertexId u = 0; u < size(); ++u) {
        for (VertexId v : neighbours(u)) {
            if (u < v) out.emplace_back(u, v);
        }
    }
    return out;
}

bool operator==(const Graph& a, const Graph& b) {
    return a.params_ == b.params_ && a.vertices_.positions == b.vertices_.positions &&
           a.vertices_.weights == b.vertices_.weights && a.offsets_ == b.offsets_ &&
           a.neighbours_ == b.neighbours_;
}

VertexSet sample_vertices(const ModelParams& params) {
    params.validate();
    std::int64_t count = 0;
    if (params.fixed_count) {
        count = *params.fixed_count;
    } else {
        CounterRng rng(params.seed, StreamTag::VertexCount, 0);
        std::poisson_distribution<std::int64_t> poisson(params.n);
        count = poisson(rng);
    }
    if (count > static_cast<std::int64_t>(std::numeric_limits<VertexId>::max() - 1)) {
        throw ResourceError("cannot index " + std::to_string(count) + " vertices");
    }
    VertexSet out;
    try {
        out.positions.resize(params.d, count);
        out.weights.resize(count);
    } catch (const std::bad_alloc&) {
        throw ResourceError("out of memory allocating " + std::to_string(count) + " vertices");
    }
    for (std::int64_t i = 0; i < count; ++i) {
        CounterRng pos(params.seed, StreamTag::Position, static_cast<std::uint64_t>(i));
        for (int k = 0; k < params.d; ++k) out.positions(k, i) = pos.uniform();
        CounterRng w(params.seed, StreamTag::Weight, static_cast<std::uint64_t>(i));
        out.weights(i) = pareto_quantile(w.uniform(), params.tau);
    }
    return out;
}

std::vector<Edge> sample_edges_naive(const ModelParams& params, const VertexSet& vertices,
                                     std::uint64_t edge_seed, unsigned threads) {
    const std::size_t n = vertices.size();
    std::vector<std::vector<Edge>> rows(n);
    parallel_for(n, threads, [&](std::size_t u) {
        const auto xu = vertices.positions.col(static_cast<Eigen::Index>(u));
        const double wu = vertices.weights(static_cast<Eigen::Index>(u));
        for (std::size_t v = u + 1; v < n; ++v) {
            const double r = dist(xu, vertices.positions.col(static_cast<Eigen::Index>(v)), params.geometry);
            const double p = connection_prob(wu, vertices.weights(static_cast<Eigen::Index>(v)), r, params);
            CounterRng coin(edge_seed, StreamTag::NaiveEdge, u, v);
            if (coin.uniform() < p) rows[u].emplace_back(static_cast<VertexId>(u), static_cast<VertexId>(v));
        }
    });
    std::vector<Edge> out;
    for (auto& row : rows) out.insert(out.end(), row.begin(), row.end());
    return out;
}

Graph sample_graph(const ModelParams& params, SamplerEngine engine, unsigned threads) {
    VertexSet vertices = sample_vertices(params);
    const std::uint64_t edge_seed = splitmix64(params.seed ^ 0x5EED0F5EED0F5EEDULL);
    std::vector<Edge> edges = engine == SamplerEngine::Naive
                                  ? sample_edges_naive(params, vertices, edge_seed, threads)
                                  : sample_edges_grid(params, vertices, edge_seed, threads);
    return Graph(params, std::move(vertices), edges);
}

ComponentLabels giant_component(const Graph& graph) {
    const std::size_t n = graph.size();
    UnionFind uf(n);
    for (VertexId u = 0; u < n; ++u) {
        for (VertexId v : graph.neighbours(u)) {
            if (u < v) uf.unite(u, v);
        }
    }
    ComponentLabels out;
    out.label.assign(n, 0);
    std::vector<std::uint32_t> root_label(n, std::numeric_limits<std::uint32_t>::max());
    for (VertexId v = 0; v < n; ++v) {
        const std::size_t r = uf.find(v);
        if (root_label[r] == std::numeric_limits<std::uint32_t>::max()) {
            root_label[r] = static_cast<std::uint32_t>(out.sizes.size());
            out.sizes.push_back(0);
        }
        out.label[v] = root_label[r];
        ++out.sizes[out.label[v]];
    }
    for (std::uint32_t c = 0; c < out.sizes.size(); ++c) {
        if (out.sizes[c] > out.giant_size) {
            out.giant_size = out.sizes[c];
            out.giant_id = c;
        }
    }
    return out;
}

std::vector<DegreeBucket> degree_stats(const Graph& graph) {
    struct Acc {
        double sum = 0, sum_sq = 0;
        std::size_t count = 0;
    };
    std::map<int, Acc> buckets;
    for (VertexId v = 0; v < graph.size(); ++v) {
        const int e = static_cast<int>(std::floor(std::log2(graph.weight(v))));
        auto& acc = buckets[e];
        const auto deg = static_cast<double>(graph.degree(v));
        acc.sum += deg;
        acc.sum_sq += deg * deg;
        ++acc.count;
    }
    std::vector<DegreeBucket> out;
    for (const auto& [e, acc] : buckets) {
        const double c = static_cast<double>(acc.count);
        const double mean = acc.sum / c;
        const double var = acc.count > 1 ? std::max(0.0, (acc.sum_sq - c * mean * mean) / (c - 1)) : 0.0;
        out.push_back({e, mean, var, acc.count});
    }
    return out;
}

} // namespace girg
