// Cell-grid edge sampler.
//
// The torus is split into a hierarchy of 2^(D*l) cells per level l. Every
// unordered pair of vertices is covered by exactly one cell pair: either two
// touching leaf cells, whose pairs are enumerated one coin at a time, or two
// non-touching cells whose parents touch. For the latter the minimum distance
// between the cells bounds every pair's probability from above, so candidates
// are drawn by geometric skipping over the cell's vertices (heaviest first)
// and thinned to the exact probability.
//
// The min-component geometry is handled with one 1-D engine per coordinate:
// the union of their outputs contains each pair with probability
// 1 - prod(1 - q_j), and a final thinning coin brings that down to max_j q_j.

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <vector>

#include "girg/model.hpp"
#include "girg/parallel.hpp"
#include "girg/rng.hpp"

namespace girg {
namespace {

// Levels at which cell pairs are handed out as independent tasks.
constexpr int kTaskLevelBits = 10;

struct Engine {
    const ModelParams& params;
    const VertexSet& vertices;
    int dims;                   // grid dimension D
    int first_coord;            // coordinates [first_coord, first_coord + dims)
    std::uint64_t seed;

    [[nodiscard]] double coord(std::size_t v, int k) const {
        return vertices.positions(first_coord + k, static_cast<Eigen::Index>(v));
    }
    [[nodiscard]] double weight(std::size_t v) const { return vertices.weights(static_cast<Eigen::Index>(v)); }

    [[nodiscard]] double vol(double r) const {
        // a 1-D engine of the min geometry measures one slab of the d-dim torus
        return volume(r, params.d, dims == params.d ? GeometryKind::EuclideanInf : GeometryKind::MinComponent);
    }

    [[nodiscard]] double prob(std::size_t u, std::size_t v) const {
        double r = 0.0;
        for (int k = 0; k < dims; ++k) r = std::max(r, torus_coord_dist(coord(u, k), coord(v, k)));
        return kernel_from_volume(weight(u), weight(v), vol(r), params.n, params.alpha, params.theta);
    }
};

class CellGrid {
public:
    CellGrid(const Engine& engine) : e_(engine) {
        const std::size_t n = e_.vertices.size();
        const int max_bits = 62 / e_.dims;
        levels_ = n < 2 ? 0 : std::min(max_bits, static_cast<int>(std::floor(std::log2(static_cast<double>(n)) / e_.dims)));

        std::vector<std::uint64_t> leaf(n);
        const double side = std::ldexp(1.0, levels_);
        const auto cells_per_dim = std::uint64_t{1} << levels_;
        for (std::size_t v = 0; v < n; ++v) {
            std::uint64_t code = 0;
            for (int k = 0; k < e_.dims; ++k) {
                const auto c = std::min(cells_per_dim - 1, static_cast<std::uint64_t>(e_.coord(v, k) * side));
                for (int b = 0; b < levels_; ++b) code |= ((c >> b) & 1ULL) << (b * e_.dims + k);
            }
            leaf[v] = code;
        }

        // heaviest first; a stable counting sort per level keeps that order inside each cell
        std::vector<VertexId> by_weight(n);
        std::iota(by_weight.begin(), by_weight.end(), VertexId{0});
        std::stable_sort(by_weight.begin(), by_weight.end(),
                         [&](VertexId a, VertexId b) { return e_.weight(a) > e_.weight(b); });

        order_.resize(levels_ + 1);
        start_.resize(levels_ + 1);
        for (int l = 0; l <= levels_; ++l) {
            const int shift = e_.dims * (levels_ - l);
            const std::size_t cells = std::size_t{1} << (e_.dims * l);
            auto& start = start_[l];
            start.assign(cells + 1, 0);
            for (VertexId v : by_weight) ++start[(leaf[v] >> shift) + 1];
            std::partial_sum(start.begin(), start.end(), start.begin());
            std::vector<std::size_t> fill(start.begin(), start.end() - 1);
            auto& order = order_[l];
            order.resize(n);
            for (VertexId v : by_weight) order[fill[leaf[v] >> shift]++] = v;
        }
    }

    [[nodiscard]] std::vector<Edge> run(unsigned threads) const {
        if (e_.vertices.size() < 2) return {};
        const int task_level = std::min(levels_, std::max(1, kTaskLevelBits / e_.dims));
        std::vector<Task> tasks;
        collect(0, 0, 0, task_level, tasks);
        std::vector<std::vector<Edge>> out(tasks.size());
        parallel_for(tasks.size(), threads, [&](std::size_t i) {
            const Task& t = tasks[i];
            if (t.near) {
                visit(t.level, t.a, t.b, out[i]);
            } else {
                far_pair(t.level, t.a, t.b, out[i]);
            }
        });
        std::size_t total = 0;
        for (const auto& chunk : out) total += chunk.size();
        std::vector<Edge> edges;
        edges.reserve(total);
        for (const auto& chunk : out) edges.insert(edges.end(), chunk.begin(), chunk.end());
        return edges;
    }

private:
    struct Task {
        bool near;
        int level;
        std::uint64_t a, b;
    };

    [[nodiscard]] std::uint64_t cell_coord(std::uint64_t code, int level, int k) const {
        std::uint64_t c = 0;
        for (int b = 0; b < level; ++b) c |= ((code >> (b * e_.dims + k)) & 1ULL) << b;
        return c;
    }

    // Largest per-dimension cell gap on the torus; 0 or 1 means touching.
    [[nodiscard]] std::uint64_t cell_gap(int level, std::uint64_t a, std::uint64_t b) const {
        const std::uint64_t m = std::uint64_t{1} << level;
        std::uint64_t gap = 0;
        for (int k = 0; k < e_.dims; ++k) {
            const std::uint64_t ca = cell_coord(a, level, k);
            const std::uint64_t cb = cell_coord(b, level, k);
            const std::uint64_t diff = ca > cb ? ca - cb : cb - ca;
            gap = std::max(gap, std::min(diff, m - diff));
        }
        return gap;
    }

    [[nodiscard]] std::span<const VertexId> members(int level, std::uint64_t cell) const {
        const auto& s = start_[level];
        return {order_[level].data() + s[cell], order_[level].data() + s[cell + 1]};
    }

    [[nodiscard]] CounterRng stream(int level, std::uint64_t a, std::uint64_t b) const {
        return CounterRng(stream_key(e_.seed, StreamTag::GridEdge, static_cast<std::uint64_t>(level)),
                          StreamTag::GridEdge, a, b);
    }

    template <typename Fn>
    void for_child_pairs(std::uint64_t a, std::uint64_t b, Fn&& fn) const {
        const std::uint64_t fan = std::uint64_t{1} << e_.dims;
        for (std::uint64_t i = 0; i < fan; ++i) {
            for (std::uint64_t j = (a == b ? i : 0); j < fan; ++j) fn((a << e_.dims) | i, (b << e_.dims) | j);
        }
    }

    void collect(int level, std::uint64_t a, std::uint64_t b, int task_level, std::vector<Task>& tasks) const {
        if (level == task_level) {
            tasks.push_back({true, level, a, b});
            return;
        }
        for_child_pairs(a, b, [&](std::uint64_t ca, std::uint64_t cb) {
            if (cell_gap(level + 1, ca, cb) <= 1) {
                collect(level + 1, ca, cb, task_level, tasks);
            } else {
                tasks.push_back({false, level + 1, ca, cb});
            }
        });
    }

    void visit(int level, std::uint64_t a, std::uint64_t b, std::vector<Edge>& out) const {
        if (members(level, a).empty() || members(level, b).empty()) return;
        if (level == levels_) {
            leaf_pair(a, b, out);
            return;
        }
        for_child_pairs(a, b, [&](std::uint64_t ca, std::uint64_t cb) {
            if (cell_gap(level + 1, ca, cb) <= 1) {
                visit(level + 1, ca, cb, out);
            } else {
                far_pair(level + 1, ca, cb, out);
            }
        });
    }

    void emit(VertexId u, VertexId v, std::vector<Edge>& out) const {
        out.emplace_back(std::min(u, v), std::max(u, v));
    }

    void leaf_pair(std::uint64_t a, std::uint64_t b, std::vector<Edge>& out) const {
        const auto va = members(levels_, a);
        const auto vb = members(levels_, b);
        if (va.empty() || vb.empty()) return;
        CounterRng rng = stream(levels_, a, b);
        for (std::size_t i = 0; i < va.size(); ++i) {
            for (std::size_t j = (a == b ? i + 1 : 0); j < vb.size(); ++j) {
                if (rng.uniform() < e_.prob(va[i], vb[j])) emit(va[i], vb[j], out);
            }
        }
    }

    void far_pair(int level, std::uint64_t a, std::uint64_t b, std::vector<Edge>& out) const {
        const auto va = members(level, a);
        const auto vb = members(level, b);
        if (va.empty() || vb.empty()) return;
        const double d_min = static_cast<double>(cell_gap(level, a, b) - 1) * std::ldexp(1.0, -level);
        const double v_min = e_.vol(d_min);
        auto bound = [&](double wu, double wv) {
            return kernel_from_volume(wu, wv, v_min, e_.params.n, e_.params.alpha, e_.params.theta);
        };
        CounterRng rng = stream(level, a, b);
        const std::size_t m = vb.size();
        for (VertexId u : va) {
            const double wu = e_.weight(u);
            double p = bound(wu, e_.weight(vb[0]));
            std::size_t k = 0;
            bool first = true;
            while (p > 0.0) {
                // index of the next proposal, each position proposed with probability p
                std::size_t step = 1;
                if (p < 1.0) {
                    const double skip = std::floor(std::log(rng.uniform_open_zero()) / std::log1p(-p));
                    if (!(skip < static_cast<double>(m))) break;
                    step += static_cast<std::size_t>(skip);
                }
                k = first ? step - 1 : k + step;
                first = false;
                if (k >= m) break;
                const VertexId v = vb[k];
                if (rng.uniform() * p < e_.prob(u, v)) emit(u, v, out);
                if (k + 1 >= m) break;
                p = bound(wu, e_.weight(vb[k + 1]));
            }
        }
    }

    const Engine& e_;
    int levels_ = 0;
    std::vector<std::vector<VertexId>> order_;
    std::vector<std::vector<std::size_t>> start_;
};

} // namespace

std::vector<Edge> sample_edges_grid(const ModelParams& params, const VertexSet& vertices, std::uint64_t edge_seed,
                                    unsigned threads) {
    params.validate();
    if (params.geometry == GeometryKind::EuclideanInf || params.d == 1) {
        const Engine engine{params, vertices, params.d, 0, edge_seed};
        return CellGrid(engine).run(threads);
    }

    std::vector<Edge> candidates;
    for (int j = 0; j < params.d; ++j) {
        const Engine engine{params, vertices, 1, j, stream_key(edge_seed, StreamTag::GridEdge, 1000 + j)};
        auto part = CellGrid(engine).run(threads);
        candidates.insert(candidates.end(), part.begin(), part.end());
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    std::vector<char> keep(candidates.size(), 0);
    parallel_for(candidates.size(), threads, [&](std::size_t i) {
        const auto [u, v] = candidates[i];
        double q_max = 0.0;
        double log_miss = 0.0;
        for (int j = 0; j < params.d; ++j) {
            const double r = torus_coord_dist(vertices.positions(j, u), vertices.positions(j, v));
            const double q = kernel_from_volume(vertices.weights(u), vertices.weights(v),
                                                volume(r, params.d, GeometryKind::MinComponent), params.n,
                                                params.alpha, params.theta);
            q_max = std::max(q_max, q);
            log_miss += std::log1p(-std::min(q, 1.0));
        }
        const double hit = -std::expm1(log_miss);
        CounterRng rng(edge_seed, StreamTag::McdThinning, u, v);
        keep[i] = hit > 0.0 && rng.uniform() * hit < q_max;
    });
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (keep[i]) edges.push_back(candidates[i]);
    }
    return edges;
}

} // namespace girg
