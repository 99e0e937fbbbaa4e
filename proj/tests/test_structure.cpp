#include <gtest/gtest.h>

#include <cmath>
#include <iostream>
#include <map>
#include <random>

#include "fixtures.hpp"
#include "girg/errors.hpp"
#include "girg/protocol.hpp"
#include "girg/regimes.hpp"
#include "girg/structure.hpp"

using namespace girg;
using girg::testing::make_graph;

namespace {

struct Placed {
    std::vector<double> coords;  // d per vertex
    double weight;
};

Graph place(ModelParams p, const std::vector<Placed>& pts, const std::vector<Edge>& edges) {
    p.fixed_count = static_cast<std::int64_t>(pts.size());
    VertexSet vs;
    vs.positions.resize(p.d, static_cast<Eigen::Index>(pts.size()));
    vs.weights.resize(static_cast<Eigen::Index>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (int k = 0; k < p.d; ++k) vs.positions(k, static_cast<Eigen::Index>(i)) = pts[i].coords[k];
        vs.weights(static_cast<Eigen::Index>(i)) = pts[i].weight;
    }
    return Graph(p, std::move(vs), edges);
}

ModelParams line_params(double n, double tau, double alpha) {
    ModelParams p;
    p.n = n;
    p.d = 1;
    p.tau = tau;
    p.alpha = alpha;
    return p;
}

// level by repeated doubling, independent of log2
int level_by_doubling(double w) {
    int level = 0;
    double lo = 1.0;
    while (lo * 2.0 <= w) {
        lo *= 2.0;
        ++level;
    }
    return level;
}

} // namespace

TEST(BallOfInfluence, Examples) {
    ModelParams p;
    p.n = 1000;
    p.d = 3;
    EXPECT_NEAR(ball_of_influence_radius(8, p), 0.1, 1e-15);
    EXPECT_DOUBLE_EQ(ball_of_influence_radius(1000, p), 0.5);
    EXPECT_DOUBLE_EQ(ball_of_influence_radius(5000, p), 0.5);
    p.geometry = GeometryKind::MinComponent;
    EXPECT_DOUBLE_EQ(ball_of_influence_radius(1000, p), 0.5);
    for (auto g : {GeometryKind::EuclideanInf, GeometryKind::MinComponent}) {
        ModelParams q;
        q.n = 100;
        q.d = 1;
        q.geometry = g;
        EXPECT_NEAR(ball_of_influence_radius(1, q), 0.005, 1e-15);
    }
}

TEST(BallOfInfluence, InvertsVolume) {
    for (auto g : {GeometryKind::EuclideanInf, GeometryKind::MinComponent}) {
        for (int d = 1; d <= 4; ++d) {
            ModelParams p;
            p.n = 1.0;
            p.d = d;
            p.geometry = g;
            // For the min geometry with d >= 3, dr/dV = 1/(2d(1-2r)^(d-1)) blows up near 1/2 and
            // distinct radii round to the same volume; there the identity is checked up to 0.45
            // and the reverse composition is checked on the full range.
            const double r_max = g == GeometryKind::MinComponent && d >= 3 ? 0.45 : 0.5;
            for (int i = 0; i <= 500; ++i) {
                const double r = 0.5 * i / 500.0;
                const double vol = volume(r, d, g);
                const double back = ball_of_influence_radius(vol * p.n, p);
                if (r <= r_max) EXPECT_NEAR(back, r, 1e-12) << d << " " << r;
                EXPECT_NEAR(volume(back, d, g), vol, 1e-15) << d << " " << r;
            }
        }
    }
}

TEST(StrongEdge, Examples) {
    ModelParams p = line_params(100, 2.5, 2.0);
    Point a(1), b(1);
    a << 0.25;
    b << 0.25;
    EXPECT_TRUE(is_strong_edge({0, a, 1.0}, {1, b, 1.0}, p));
    b << 0.5;
    EXPECT_FALSE(is_strong_edge({0, a, 1.0}, {1, b, 1.0}, p));
    // wu * wv = n * V exactly, with V = 0.5 representable
    EXPECT_TRUE(is_strong_edge({0, a, 5.0}, {1, b, 10.0}, p));
    EXPECT_FALSE(is_strong_edge({0, a, 5.0}, {1, b, std::nextafter(10.0, 0.0)}, p));
}

TEST(Census, NoLongEdges) {
    const Graph g = make_graph(100, {{0, 1}, {1, 2}});
    const auto rep = long_edge_census(g, 0.1);  // cutoff 100^-0.1 ~ 0.63 exceeds every torus distance
    EXPECT_EQ(rep.total_long_edges, 0u);
    EXPECT_TRUE(rep.counts.empty());
    EXPECT_EQ(rep.n_realized, 100u);
    EXPECT_THROW((void)long_edge_census(g, 0.0), UsageError);
}

TEST(Census, LevelOfSingleLongEdge) {
    // vertices 0 and 50 sit 0.5 apart; cutoff 100^-0.5 = 0.1
    std::vector<double> w(100, 1.0);
    w[0] = 3.0;
    w[50] = 100.0;
    const Graph g = make_graph(100, {{0, 50}, {1, 2}}, w);
    const auto rep = long_edge_census(g, 0.5);
    EXPECT_EQ(rep.total_long_edges, 1u);
    ASSERT_EQ(rep.counts.size(), 1u);
    EXPECT_EQ(rep.counts.begin()->first, 1);
    EXPECT_EQ(slowdown_level(3, 100), 1);
    EXPECT_EQ(slowdown_level(1, 1), 0);
    EXPECT_EQ(slowdown_level(4, 4), 2);
}

TEST(Census, MatchesFullRescan) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        ModelParams p = line_params(1024, 2.6, 1.8);
        p.d = seed % 2 ? 1 : 2;
        p.seed = seed;
        const Graph g = sample_graph(p);
        for (const double delta : {default_census_delta(p.d), 0.5}) {
            const auto rep = long_edge_census(g, delta);
            std::map<int, std::size_t> oracle;
            std::size_t total = 0;
            const double cut = std::exp(-delta * std::log(static_cast<double>(g.size())));
            for (const auto& [u, v] : g.edges()) {
                Eigen::VectorXd diff = (g.position(u) - g.position(v)).cwiseAbs();
                diff = diff.cwiseMin(Eigen::VectorXd::Ones(p.d) - diff);
                if (diff.maxCoeff() < cut) continue;
                ++oracle[level_by_doubling(std::min(g.weight(u), g.weight(v)))];
                ++total;
            }
            EXPECT_EQ(rep.counts, oracle);
            EXPECT_EQ(rep.total_long_edges, total);
            std::size_t sum = 0;
            for (const auto& [lvl, c] : rep.counts) sum += c;
            EXPECT_EQ(sum, rep.total_long_edges);
            if (delta == 0.5) EXPECT_GT(total, 0u);
        }
    }
}

TEST(GreedyPath, StartAboveTargetIsTrivial) {
    const Graph g = make_graph(3, {{0, 1}}, {5.0, 1.0, 1.0});
    PathConfig cfg;
    cfg.target_weight = 4.0;
    const auto res = greedy_weight_path(g, 0, cfg);
    EXPECT_TRUE(res.success);
    EXPECT_EQ(res.vertices, std::vector<VertexId>{0});
    EXPECT_TRUE(verify_path(g, res).ok);
    EXPECT_THROW((void)greedy_weight_path(g, 7, cfg), UsageError);
}

namespace {

// start 0 at 0.5 with weight 4; annulus for beta=0.5, eps=0.05, tau=2.5, n=1000
// is [4^2.3/1000, 2x] = [0.02425, 0.0485]; band [8, 16].
Graph direct_fixture(bool link_target) {
    const ModelParams p = line_params(1000, 2.5, 2.0);
    std::vector<Placed> pts = {
        {{0.5}, 4.0},     // 0 start
        {{0.53}, 10.0},   // 1 good
        {{0.525}, 20.0},  // 2 too heavy
        {{0.46}, 9.0},    // 3 good but further
        {{0.501}, 1.0},   // 4 low, inside the ball of influence (r = 0.002)
        {{0.51}, 12.0},   // 5 inside the inner radius
    };
    std::vector<Edge> e = {{0, 2}, {0, 3}, {0, 5}, {0, 4}, {4, 1}};
    if (link_target) e.push_back({0, 1});
    return place(p, pts, e);
}

} // namespace

TEST(GreedyPath, DirectPicksNearestInBandAndAnnulus) {
    const Graph g = direct_fixture(true);
    PathConfig cfg;
    cfg.beta = 0.5;
    cfg.eps = 0.05;
    cfg.target_weight = 10.0;
    const auto res = greedy_weight_path(g, 0, cfg);
    ASSERT_TRUE(res.success);
    EXPECT_EQ(res.vertices, (std::vector<VertexId>{0, 1}));
    EXPECT_EQ(res.steps.at(0).mechanism, PathMechanism::Direct);
    EXPECT_TRUE(verify_path(g, res).ok);

    const Graph unlinked = direct_fixture(false);
    cfg.target_weight = 9.5;  // 3 (weight 9) is reachable but stalls below the target
    const auto miss = greedy_weight_path(unlinked, 0, cfg);
    EXPECT_FALSE(miss.success);
    EXPECT_EQ(miss.vertices, (std::vector<VertexId>{0, 3}));
    EXPECT_EQ(miss.failure_step, 1u);
    EXPECT_TRUE(verify_path(unlinked, miss).ok);
}

TEST(GreedyPath, ViaLowWeightUsesCommonNeighbour) {
    const Graph g = direct_fixture(false);
    PathConfig cfg;
    cfg.beta = 0.5;
    cfg.eps = 0.05;
    cfg.target_weight = 10.0;
    cfg.mechanism = PathMechanism::ViaLowWeight;
    const auto res = greedy_weight_path(g, 0, cfg);
    ASSERT_TRUE(res.success);
    EXPECT_EQ(res.vertices, (std::vector<VertexId>{0, 4, 1}));
    EXPECT_TRUE(verify_path(g, res).ok);
}

TEST(GreedyPath, RelayThroughMidWeightVertex) {
    // w = 16, tau = 2.3, eps = 0.05: relay band [16^0.35, 2x] ~ [2.64, 5.28], target band [64, 128]
    const ModelParams p = line_params(1000, 2.3, 2.0);
    std::vector<Placed> pts = {
        {{0.5}, 16.0},   // 0 start, ball of influence radius 0.008
        {{0.501}, 1.0},  // 1 low common neighbour
        {{0.505}, 4.0},  // 2 relay
        {{0.9}, 100.0},  // 3 target
        {{0.52}, 4.0},   // 4 relay outside the ball
    };
    const Graph g = place(p, pts, {{0, 1}, {1, 2}, {2, 3}, {4, 3}, {0, 4}});
    PathConfig cfg;
    cfg.beta = 0.5;
    cfg.eps = 0.05;
    cfg.target_weight = 64;
    cfg.mechanism = PathMechanism::Relay3Hop;
    const auto res = greedy_weight_path(g, 0, cfg);
    ASSERT_TRUE(res.success);
    EXPECT_EQ(res.vertices, (std::vector<VertexId>{0, 1, 2, 3}));
    EXPECT_TRUE(verify_path(g, res).ok);
}

TEST(GreedyPath, VerifierRejectsTamperedPaths) {
    const Graph g = direct_fixture(true);
    PathConfig cfg;
    cfg.beta = 0.5;
    cfg.eps = 0.05;
    cfg.target_weight = 10.0;
    const auto good = greedy_weight_path(g, 0, cfg);
    ASSERT_TRUE(verify_path(g, good).ok);

    auto bad = good;
    bad.steps[0].to = 2;
    bad.vertices[1] = 2;  // an edge, but outside the band
    EXPECT_FALSE(verify_path(g, bad).ok);

    bad = good;
    bad.steps[0].to = 5;
    bad.vertices[1] = 5;  // in band, inside the inner radius
    bad.steps[0].weight = 12.0;
    bad.steps[0].distance = g.distance(0, 5);
    EXPECT_FALSE(verify_path(g, bad).ok);

    bad = good;
    bad.vertices.push_back(4);  // not chained to any step
    EXPECT_FALSE(verify_path(g, bad).ok);

    bad = good;
    bad.success = false;
    EXPECT_FALSE(verify_path(g, bad).ok);
}

TEST(GreedyPath, SampledWeakRegimeRecordedAndVerified) {
    ModelParams p = line_params(65536, 2.2, 1.2);
    p.seed = 11;
    const Graph g = sample_graph(p);
    const double beta = 0.9 * (1.0 / (p.alpha * (p.tau - 2.0)) - 1.0);
    const double loglog = std::log(std::log(p.n));
    const double target = std::pow(p.n, 1.0 / (p.tau - 1.0)) / 4.0;

    std::vector<VertexId> starts;
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<VertexId> pick(0, static_cast<VertexId>(g.size() - 1));
    while (starts.size() < 50) {
        const VertexId s = pick(rng);
        if (g.weight(s) >= loglog) starts.push_back(s);
    }
    for (auto mech : {PathMechanism::Direct, PathMechanism::ViaLowWeight, PathMechanism::Relay3Hop}) {
        PathConfig cfg;
        cfg.beta = mech == PathMechanism::Relay3Hop ? 0.5 * (1.0 / (p.tau * (p.tau - 2.0)) - 1.0) : beta;
        cfg.target_weight = target;
        cfg.mechanism = mech;
        int ok = 0;
        std::size_t steps = 0;
        for (VertexId s : starts) {
            const auto res = greedy_weight_path(g, s, cfg);
            const auto verdict = verify_path(g, res);
            ASSERT_TRUE(verdict.ok) << to_string(mech) << ": " << verdict.problems.front();
            if (res.success) {
                ++ok;
                steps += res.steps.size();
                for (std::size_t i = 0; i < res.steps.size(); ++i) {
                    const double wf = g.weight(res.steps[i].from);
                    EXPECT_GE(res.steps[i].weight, wf * std::pow(wf, cfg.beta) * (1 - 1e-12));
                }
            }
        }
        std::cout << "[ recorded ] " << to_string(mech) << " success " << ok << "/50, mean steps "
                  << (ok ? static_cast<double>(steps) / ok : 0.0) << "\n";
    }
}

TEST(McdPlate, Basics) {
    ModelParams p;
    p.n = 1000;
    p.d = 2;
    p.geometry = GeometryKind::MinComponent;
    const Graph g = place(p, {{{0.1, 0.1}, 600.0}, {{0.7, 0.2}, 1.0}, {{0.3, 0.9}, 1.0}}, {});
    EXPECT_EQ(mcd_plate(g, 0, 1).size(), 3u);  // half width 0.6 covers the circle
    EXPECT_EQ(mcd_plate(g, 1, 2), std::vector<VertexId>{1});
    EXPECT_THROW((void)mcd_plate(g, 0, 3), UsageError);
    EXPECT_THROW((void)mcd_plate(g, 0, 0), UsageError);
    EXPECT_THROW((void)mcd_plate(g, 0, 1, 0.5), UsageError);
    const Graph euclid = make_graph(3, {});
    EXPECT_THROW((void)mcd_plate(euclid, 0, 1), UsageError);
}

TEST(McdPlate, MatchesCoordinateScan) {
    ModelParams p;
    p.n = 1024;
    p.d = 3;
    p.tau = 2.3;
    p.geometry = GeometryKind::MinComponent;
    p.seed = 4;
    const Graph g = sample_graph(p);
    for (VertexId v = 0; v < g.size(); v += 37) {
        for (int j = 1; j <= 3; ++j) {
            for (double scale : {1.0, 3.5}) {
                std::vector<VertexId> oracle;
                const double h = scale * g.weight(v) / p.n;
                for (VertexId u = 0; u < g.size(); ++u) {
                    const double a = std::abs(g.position(u)(j - 1) - g.position(v)(j - 1));
                    if (std::min(a, 1.0 - a) <= h) oracle.push_back(u);
                }
                EXPECT_EQ(mcd_plate(g, v, j, scale), oracle);
            }
        }
    }
}

TEST(McdPath, SyntheticStepPicksHeaviest) {
    ModelParams p;
    p.n = 1000;
    p.d = 2;
    p.tau = 2.3;
    p.geometry = GeometryKind::MinComponent;
    std::vector<Placed> pts = {
        {{0.5, 0.5}, 50.0},    // 0 start, plate half width 0.05
        {{0.52, 0.1}, 2.0},    // 1 low, in plate 1 of the start
        {{0.9, 0.15}, 200.0},  // 2 heavy, y in its dimension-2 plate (0.05 <= 0.2)
        {{0.2, 0.12}, 100.0},  // 3 lighter alternative
        {{0.7, 0.5}, 1.0},     // 4 low, outside plate 1
        {{0.1, 0.5}, 400.0},   // 5 heaviest, reachable only through 4
    };
    const Graph g = place(p, pts, {{0, 1}, {1, 2}, {1, 3}, {0, 4}, {4, 5}});
    PathConfig cfg;
    cfg.target_weight = 150;
    const auto res = mcd_alternating_path(g, 0, cfg);
    ASSERT_TRUE(res.success);
    EXPECT_EQ(res.vertices, (std::vector<VertexId>{0, 1, 2}));
    EXPECT_EQ(res.steps.at(0).dim, 1);
    EXPECT_TRUE(verify_path(g, res).ok);

    cfg.target_weight = 10;
    EXPECT_EQ(mcd_alternating_path(g, 0, cfg).vertices, std::vector<VertexId>{0});

    ModelParams one = p;
    one.d = 1;
    const Graph line = place(one, {{{0.1}, 2.0}}, {});
    EXPECT_THROW((void)mcd_alternating_path(line, 0, cfg), UsageError);
    EXPECT_THROW((void)mcd_alternating_path(make_graph(2, {}), 0, cfg), UsageError);
}

TEST(McdPath, SampledRunsAlternateAndGrow) {
    ModelParams p;
    p.n = 65536;
    p.d = 2;
    p.tau = 2.3;
    p.alpha = 2.0;
    p.geometry = GeometryKind::MinComponent;
    p.seed = 21;
    const Graph g = sample_graph(p);
    const double loglog = std::log(std::log(p.n));
    const double bound = 2.0 * 2.0 * loglog / std::abs(std::log(p.tau - 2.0));
    PathConfig cfg;
    cfg.target_weight = std::pow(p.n, 1.0 / (p.tau - 1.0)) / 4.0;
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<VertexId> pick(0, static_cast<VertexId>(g.size() - 1));
    int ok = 0, short_enough = 0, runs = 0;
    while (runs < 50) {
        const VertexId s = pick(rng);
        if (g.weight(s) < loglog) continue;
        ++runs;
        const auto res = mcd_alternating_path(g, s, cfg);
        const auto verdict = verify_path(g, res);
        ASSERT_TRUE(verdict.ok) << verdict.problems.front();
        for (std::size_t i = 0; i < res.steps.size(); ++i) {
            EXPECT_EQ(res.steps[i].dim, i % 2 == 0 ? 1 : 2);
            EXPECT_GT(res.steps[i].weight, g.weight(res.steps[i].from));
            EXPECT_LE(g.weight(res.steps[i].via.at(0)), cfg.low_cap);
        }
        if (res.success) {
            ++ok;
            if (static_cast<double>(res.vertices.size() - 1) <= bound) ++short_enough;
        }
    }
    std::cout << "[ recorded ] mcd-alt success " << ok << "/50, within length bound " << short_enough << "\n";
}

TEST(Hierarchy, CloseEndpointsGiveSingleGap) {
    const Graph g = make_graph(100, {{0, 1}});
    HierarchyConfig cfg;
    cfg.stop_dist = 4.0;  // vertices 0 and 3 are 3 rescaled units apart
    const auto h = find_hierarchy(g, 0, 3, cfg);
    ASSERT_EQ(h.nodes.size(), 1u);
    EXPECT_EQ(h.depth(), 1);
    EXPECT_TRUE(h.complete());
    EXPECT_EQ(h.gaps(), std::vector<int>{0});
    EXPECT_TRUE(h.gap_bridges().empty());
    EXPECT_TRUE(verify_hierarchy(g, h).ok);
    EXPECT_THROW((void)find_hierarchy(g, 2, 2, cfg), UsageError);
    cfg.gamma = 1.0;
    EXPECT_THROW((void)find_hierarchy(g, 0, 3, cfg), UsageError);
}

TEST(Hierarchy, DepthCapAndFailureAreData) {
    const Graph g = make_graph(100, {});
    HierarchyConfig cfg;
    cfg.r_cap = 1;
    auto h = find_hierarchy(g, 0, 50, cfg);
    ASSERT_EQ(h.nodes.size(), 1u);
    EXPECT_EQ(h.nodes[0].status, LeafStatus::DepthCap);
    EXPECT_TRUE(verify_hierarchy(g, h).ok);
    cfg.r_cap = 4;
    h = find_hierarchy(g, 0, 50, cfg);  // no edges, so no bridge
    ASSERT_EQ(h.nodes.size(), 1u);
    EXPECT_EQ(h.nodes[0].status, LeafStatus::Failed);
    EXPECT_FALSE(h.complete());
    EXPECT_FALSE(h.nodes[0].failure.empty());
    EXPECT_TRUE(verify_hierarchy(g, h).ok);
}

namespace {

struct HierarchyRun {
    Graph graph;
    std::vector<Hierarchy> found;
};

HierarchyRun sampled_hierarchies(HierarchyMode mode, double tau, double alpha, double gamma, std::uint64_t seed) {
    ModelParams p = line_params(16384, tau, alpha);
    p.seed = seed;
    HierarchyRun run{sample_graph(p), {}};
    const auto giant = giant_component(run.graph);
    std::vector<VertexId> members;
    for (VertexId v = 0; v < run.graph.size(); ++v) {
        if (giant.in_giant(v)) members.push_back(v);
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
    HierarchyConfig cfg;
    cfg.mode = mode;
    cfg.gamma = gamma;
    cfg.r_cap = 6;
    cfg.stop_dist = 8.0;
    for (int i = 0; i < 20; ++i) {
        const VertexId u = members[pick(rng)], v = members[pick(rng)];
        if (u == v) continue;
        run.found.push_back(find_hierarchy(run.graph, u, v, cfg));
    }
    return run;
}

} // namespace

TEST(Hierarchy, SampledWeakAndStrongPassVerifier) {
    std::size_t bridges = 0, complete = 0, total = 0;
    for (auto mode : {HierarchyMode::Weak, HierarchyMode::Strong}) {
        const double tau = 2.4, alpha = 1.5;
        const double gamma = mode == HierarchyMode::Weak ? 0.5 * (gamma_weak(tau, alpha) + 1.0)
                                                         : 0.5 * (gamma_strong(tau) + 1.0);
        const auto run = sampled_hierarchies(mode, tau, alpha, gamma, 3);
        for (const auto& h : run.found) {
            const auto verdict = verify_hierarchy(run.graph, h);
            ASSERT_TRUE(verdict.ok) << verdict.problems.front();
            bridges += h.gap_bridges().size();
            complete += h.complete();
            ++total;
            // H4 by direct counting
            std::map<VertexId, int> seen;
            for (const auto& [a, b] : h.gap_bridges()) {
                EXPECT_EQ(++seen[a], 1);
                EXPECT_EQ(++seen[b], 1);
                EXPECT_TRUE(run.graph.has_edge(a, b));
            }
            EXPECT_EQ(h.gaps().size(), h.gap_bridges().size() + 1);
        }
    }
    std::cout << "[ recorded ] hierarchies " << total << ", complete " << complete << ", bridges " << bridges
              << "\n";
    EXPECT_GT(bridges, 0u);
}

TEST(Hierarchy, VerifierRejectsTamperedTrees) {
    const double tau = 2.4, alpha = 1.5;
    const auto run = sampled_hierarchies(HierarchyMode::Weak, tau, alpha, 0.5 * (gamma_weak(tau, alpha) + 1.0), 3);
    const Hierarchy* with_bridge = nullptr;
    for (const auto& h : run.found) {
        if (!h.gap_bridges().empty()) with_bridge = &h;
    }
    ASSERT_NE(with_bridge, nullptr);
    ASSERT_TRUE(verify_hierarchy(run.graph, *with_bridge).ok);

    Hierarchy bad = *with_bridge;
    std::swap(bad.nodes[0].bridge->first, bad.nodes[0].bridge->second);
    EXPECT_FALSE(verify_hierarchy(run.graph, bad).ok);

    bad = *with_bridge;
    bad.gamma *= 0.5;  // H1 bounds shrink below the realised distances
    EXPECT_FALSE(verify_hierarchy(run.graph, bad).ok);

    bad = *with_bridge;
    const VertexId a = bad.nodes[0].bridge->first;
    for (VertexId x = 0; x < run.graph.size(); ++x) {
        if (!run.graph.has_edge(a, x) && x != a) {
            bad.nodes[0].bridge->second = x;
            break;
        }
    }
    EXPECT_FALSE(verify_hierarchy(run.graph, bad).ok);

    bad = *with_bridge;
    bad.nodes[0].status = LeafStatus::Close;
    bad.nodes[0].bridge.reset();  // orphaned children
    EXPECT_FALSE(verify_hierarchy(run.graph, bad).ok);
}

namespace {

// root (0, 3) bridged by (1, 2); gaps (0, 1) and (2, 3)
Hierarchy hand_hierarchy(long long z) {
    Hierarchy h;
    h.u = 0;
    h.v = 3;
    h.z = z;
    h.nodes = {{0, 3, 0, Edge{1, 2}, 1, 2, LeafStatus::Close, {}},
               {0, 1, 1, std::nullopt, -1, -1, LeafStatus::Close, {}},
               {2, 3, 1, std::nullopt, -1, -1, LeafStatus::Close, {}}};
    return h;
}

SpreadTrace trace_with(std::vector<SelectionEvent> sel) {
    SpreadTrace t;
    t.selections = std::move(sel);
    return t;
}

} // namespace

TEST(Timing, EdgeBlockBoundaries) {
    const auto h = hand_hierarchy(5);
    ASSERT_EQ(h.gap_bridges().size(), 1u);
    // rank 0 edge block is [10, 15]
    EXPECT_TRUE(verify_hierarchy_timing(h, trace_with({{10, 1, 2}})).ok);
    EXPECT_TRUE(verify_hierarchy_timing(h, trace_with({{15, 2, 1}})).ok);
    EXPECT_FALSE(verify_hierarchy_timing(h, trace_with({{5, 1, 2}})).ok);   // (4j+1)Z, gap block
    EXPECT_FALSE(verify_hierarchy_timing(h, trace_with({{16, 1, 2}})).ok);
    EXPECT_FALSE(verify_hierarchy_timing(h, trace_with({{12, 1, 3}})).ok);  // other edge
    EXPECT_THROW((void)verify_hierarchy_timing(h, SpreadTrace{}), UsageError);

    Hierarchy single;
    single.nodes = {{0, 1, 0, std::nullopt, -1, -1, LeafStatus::Close, {}}};
    const auto rep = verify_hierarchy_timing(single, trace_with({{1, 0, 1}}));
    EXPECT_TRUE(rep.ok);
    EXPECT_TRUE(rep.edges.empty());
}

TEST(Timing, RanksFollowGapOrder) {
    // depth 3: root (0, 6) with bridge (2, 3); left (0, 2) bridged by (1, 7); right (3, 6) by (4, 5)
    Hierarchy h;
    h.u = 0;
    h.v = 6;
    h.z = 2;
    h.nodes = {{0, 6, 0, Edge{2, 3}, 1, 2, LeafStatus::Close, {}},
               {0, 2, 1, Edge{1, 7}, 3, 4, LeafStatus::Close, {}},
               {3, 6, 1, Edge{4, 5}, 5, 6, LeafStatus::Close, {}},
               {0, 1, 2, std::nullopt, -1, -1, LeafStatus::Close, {}},
               {7, 2, 2, std::nullopt, -1, -1, LeafStatus::Close, {}},
               {3, 4, 2, std::nullopt, -1, -1, LeafStatus::Close, {}},
               {5, 6, 2, std::nullopt, -1, -1, LeafStatus::Close, {}}};
    const auto bridges = h.gap_bridges();
    ASSERT_EQ(bridges, (std::vector<Edge>{{1, 7}, {2, 3}, {4, 5}}));
    // blocks: rank 0 [4, 6], rank 1 [12, 14], rank 2 [20, 22]
    const auto rep = verify_hierarchy_timing(h, trace_with({{5, 7, 1}, {13, 2, 3}, {21, 4, 5}}));
    EXPECT_TRUE(rep.ok);
    const auto shifted = verify_hierarchy_timing(h, trace_with({{5, 7, 1}, {20, 2, 3}, {21, 4, 5}}));
    EXPECT_EQ(shifted.passed, (std::vector<bool>{true, false, true}));
    EXPECT_FALSE(shifted.ok);
}

TEST(Alternating, Examples) {
    const Graph path = make_graph(4, girg::testing::path_edges(3));
    EXPECT_TRUE(alternating_check(path, std::vector<VertexId>{2}, 1));
    EXPECT_TRUE(alternating_check(path, std::vector<VertexId>{0, 1}, 1));
    EXPECT_FALSE(alternating_check(path, std::vector<VertexId>{0, 1, 2}, 1));
    const Graph tri = make_graph(3, {{0, 1}, {1, 2}, {0, 2}});
    EXPECT_FALSE(alternating_check(tri, std::vector<VertexId>{0, 1, 2}, 1));
    EXPECT_TRUE(alternating_check(tri, std::vector<VertexId>{0, 1, 2}, 2));
    EXPECT_THROW((void)alternating_check(path, std::vector<VertexId>{0, 2}, 5), UsageError);
}

TEST(SlowdownUsage, SelectionFrequencyBelowTwoOverMinDegree) {
    ModelParams p = line_params(300, 2.5, 2.0);
    p.seed = 9;
    const Graph g = sample_graph(p);
    SpreadConfig cfg;
    cfg.stop = StopRule::MaxRounds;
    cfg.max_rounds = 1000;
    cfg.record_selections = true;
    cfg.seed = 77;
    const auto trace = run_spread(g, cfg);
    ASSERT_EQ(trace.rounds_elapsed, 1000u);
    const double rounds = static_cast<double>(trace.rounds_elapsed);

    // distinct rounds in which each edge was selected by either endpoint
    std::map<Edge, std::pair<std::size_t, std::size_t>> used;  // edge -> (count, last round)
    for (const auto& s : trace.selections) {
        const Edge e{std::min(s.chooser, s.chosen), std::max(s.chooser, s.chosen)};
        auto& [count, last] = used[e];
        if (count == 0 || last != s.round) ++count;
        last = s.round;
    }
    ASSERT_FALSE(used.empty());
    for (const auto& [e, cl] : used) {
        const double md = static_cast<double>(std::min(g.degree(e.first), g.degree(e.second)));
        const double bound = std::min(1.0, 2.0 / md);
        const double sigma = std::sqrt(bound * (1.0 - bound) / rounds);
        EXPECT_LE(cl.first / rounds, bound + 4.0 * sigma) << e.first << "-" << e.second;
    }
}
