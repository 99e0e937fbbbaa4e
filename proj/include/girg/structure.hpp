#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "girg/model.hpp"
#include "girg/protocol.hpp"

namespace girg {

/// Radius of the ball of volume min(1, w/n), inverted in closed form.
[[nodiscard]] double ball_of_influence_radius(double w, const ModelParams& params);

/// wu * wv >= n * V(|xu - xv|), closed at equality.
[[nodiscard]] bool is_strong_edge(const Vertex& u, const Vertex& v, const ModelParams& params);
[[nodiscard]] bool is_strong_edge(const Graph& graph, VertexId u, VertexId v);

/// Default census exponent, 0.2 / d.
[[nodiscard]] inline double default_census_delta(int d) { return 0.2 / d; }

struct CensusReport {
    double delta = 0;
    std::map<int, std::size_t> counts;  // slowdown level -> number of long edges
    std::size_t total_long_edges = 0;
    std::size_t n_realized = 0;
};

/// Edges of length >= N^-delta bucketed by floor(log2(min endpoint weight)).
[[nodiscard]] CensusReport long_edge_census(const Graph& graph, double delta);

[[nodiscard]] inline int slowdown_level(double wu, double wv) {
    return static_cast<int>(std::floor(std::log2(std::min(wu, wv))));
}

enum class PathMechanism { Direct, ViaLowWeight, Relay3Hop, McdAlt };

[[nodiscard]] std::string_view to_string(PathMechanism m) noexcept;
[[nodiscard]] PathMechanism parse_path_mechanism(std::string_view s);

struct PathConfig {
    double beta = 0.5;
    std::optional<double> eps;  // defaults to a tenth of the feasibility slack
    double target_weight = 0;
    PathMechanism mechanism = PathMechanism::Direct;
    double low_cap = 8.0;       // weight cap of intermediate vertices
    std::size_t max_steps = 64;

    void validate() const;
};

/// Epsilon actually used for (params, cfg).
[[nodiscard]] double resolved_path_eps(const ModelParams& params, const PathConfig& cfg);

struct PathStep {
    VertexId from;
    VertexId to;
    std::vector<VertexId> via;  // intermediates in travel order
    double weight;              // weight of `to`
    double distance;            // |x_from - x_to|
    PathMechanism mechanism;
    int dim = 0;                // plate dimension (1-based) for mcd-alt
};

struct PathResult {
    std::vector<VertexId> vertices;
    std::vector<PathStep> steps;
    bool success = false;
    std::optional<std::size_t> failure_step;
    // search parameters, kept so the result can be re-checked on its own
    PathMechanism mechanism = PathMechanism::Direct;
    double beta = 0;
    double eps = 0;
    double target_weight = 0;
    double low_cap = 0;
};

/// Greedy weight-increasing path from `start` until target_weight is reached
/// or no candidate qualifies. Candidates are scanned by distance, then id.
[[nodiscard]] PathResult greedy_weight_path(const Graph& graph, VertexId start, const PathConfig& cfg);

/// Vertices whose j-th coordinate (1-based) is within scale * W_v / n of v's.
[[nodiscard]] std::vector<VertexId> mcd_plate(const Graph& graph, VertexId v, int j, double scale = 1.0);

/// Alternating plate path for the min-component geometry; uses target_weight,
/// low_cap and max_steps from cfg.
[[nodiscard]] PathResult mcd_alternating_path(const Graph& graph, VertexId start, const PathConfig& cfg);

struct Verdict {
    bool ok = true;
    std::vector<std::string> problems;

    void fail(std::string msg) {
        ok = false;
        problems.push_back(std::move(msg));
    }
};

/// Re-checks a PathResult against the graph: adjacency, bands, annuli, plates.
[[nodiscard]] Verdict verify_path(const Graph& graph, const PathResult& path);

enum class HierarchyMode { Weak, Strong };

[[nodiscard]] std::string_view to_string(HierarchyMode m) noexcept;
[[nodiscard]] HierarchyMode parse_hierarchy_mode(std::string_view s);

struct HierarchyConfig {
    double gamma = 0.9;
    HierarchyMode mode = HierarchyMode::Weak;
    double stop_dist = 4.0;     // rescaled by n^(1/d); must be >= 1
    int r_cap = 8;              // maximal depth
    std::optional<double> eps;  // defaults to a tenth of the slack above the critical gamma
    long long z = 2;            // timeblock length

    void validate() const;
};

[[nodiscard]] double resolved_hierarchy_eps(const ModelParams& params, const HierarchyConfig& cfg);

enum class LeafStatus { Close, DepthCap, Failed };

struct HierarchyNode {
    VertexId y0;
    VertexId y1;
    int level = 0;              // root is level 0
    std::optional<Edge> bridge; // (near y0, near y1) on internal nodes
    int child0 = -1;            // pair (y0, bridge.first)
    int child1 = -1;            // pair (bridge.second, y1)
    LeafStatus status = LeafStatus::Close;
    std::string failure;        // set when status == Failed
};

struct Hierarchy {
    VertexId u = 0;
    VertexId v = 0;
    double gamma = 0;
    double eps = 0;
    HierarchyMode mode = HierarchyMode::Weak;
    double stop_dist = 0;
    int r_cap = 0;
    long long z = 2;
    std::vector<HierarchyNode> nodes;  // nodes[0] is the root

    [[nodiscard]] bool complete() const;
    [[nodiscard]] int depth() const;
    /// Leaf node indices in left-to-right order.
    [[nodiscard]] std::vector<int> gaps() const;
    /// Bridge edges between consecutive gaps, ranked left to right.
    [[nodiscard]] std::vector<Edge> gap_bridges() const;
};

/// Recursive bridge search between u and v. Failure is reported through leaf
/// annotations rather than exceptions.
[[nodiscard]] Hierarchy find_hierarchy(const Graph& graph, VertexId u, VertexId v, const HierarchyConfig& cfg);

/// Independent check of H1 (with the halved lower bound), H2, H4, the tree
/// shape and the weight bands of every bridge.
[[nodiscard]] Verdict verify_hierarchy(const Graph& graph, const Hierarchy& h);

struct TimingReport {
    std::vector<Edge> edges;
    std::vector<bool> passed;  // per edge, in gap order
    bool ok = true;
};

/// Each consecutive-gap bridge of rank j must be selected during
/// [(4j+2)Z, (4j+3)Z].
[[nodiscard]] TimingReport verify_hierarchy_timing(const Hierarchy& h, const SpreadTrace& trace);

/// Every consecutive pair has an endpoint of degree <= k.
[[nodiscard]] bool alternating_check(const Graph& graph, std::span<const VertexId> path, std::size_t k);

} // namespace girg
