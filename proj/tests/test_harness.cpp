#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "fixtures.hpp"
#include "girg/errors.hpp"
#include "girg/graph_io.hpp"
#include "girg/harness.hpp"
#include "girg/rng.hpp"

using namespace girg;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.params.d = 1;
    cfg.params.tau = 2.5;
    cfg.params.alpha = 2.0;
    cfg.n_grid = {256, 512};
    cfg.graphs_per_n = 3;
    cfg.trials_per_graph = 2;
    cfg.seed_base = 42;
    return cfg;
}

std::string csv_of(const std::vector<ScalingRow>& rows) {
    std::ostringstream out;
    write_scaling_csv(rows, out);
    return out.str();
}

std::vector<double> grid(int hi = 24, int step = 2) {
    std::vector<double> n;
    for (int e = 8; e <= hi; e += step) n.push_back(std::ldexp(1.0, e));
    return n;
}

} // namespace

TEST(Scaling, SingleCellGivesOneRow) {
    ExperimentConfig cfg = small_config();
    cfg.n_grid = {300};
    cfg.graphs_per_n = 1;
    cfg.trials_per_graph = 1;
    const auto rows = run_scaling_experiment(cfg);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].n, 300.0);
    EXPECT_EQ(rows[0].graph_seed, experiment_graph_seed(42, 0, 0));
    EXPECT_GT(rows[0].giant_size, 0u);
}

TEST(Scaling, TinyFractionNeedsNoRounds) {
    ExperimentConfig cfg = small_config();
    cfg.fraction = 1e-9;
    for (const auto& r : run_scaling_experiment(cfg)) {
        EXPECT_EQ(r.rounds, 0u);
        EXPECT_EQ(r.stop, "fraction");
    }
}

TEST(Scaling, RowsOrderedAndDeterministicAcrossThreads) {
    ExperimentConfig cfg = small_config();
    const auto rows = run_scaling_experiment(cfg);
    ASSERT_EQ(rows.size(), 2u * 3u * 2u);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const std::size_t i = k / 6, g = (k / 2) % 3, t = k % 2;
        EXPECT_EQ(rows[k].n, cfg.n_grid[i]);
        EXPECT_EQ(rows[k].graph_seed, experiment_graph_seed(cfg.seed_base, i, g));
        EXPECT_EQ(rows[k].trial, t);
    }
    const std::string once = csv_of(rows);
    EXPECT_EQ(once, csv_of(run_scaling_experiment(cfg)));
    cfg.threads = 4;
    EXPECT_EQ(once, csv_of(run_scaling_experiment(cfg)));
    EXPECT_EQ(once.substr(0, once.find('\n')), "n,graph_seed,trial,rounds,giant_size,stop");
}

TEST(Scaling, ConfigValidation) {
    ExperimentConfig cfg = small_config();
    cfg.n_grid.clear();
    EXPECT_THROW(cfg.validate(), UsageError);
    cfg = small_config();
    cfg.trials_per_graph = 0;
    EXPECT_THROW(cfg.validate(), UsageError);
    cfg = small_config();
    cfg.params.tau = 1.5;
    EXPECT_THROW(cfg.validate(), UsageError);
}

TEST(Scaling, ConfigJsonRoundTrip) {
    ExperimentConfig cfg = small_config();
    cfg.params.geometry = GeometryKind::MinComponent;
    cfg.params.d = 2;
    cfg.csv_path = "out.csv";
    cfg.engine = SamplerEngine::Naive;
    const auto back = experiment_from_json(to_json(cfg));
    EXPECT_EQ(to_json(back), to_json(cfg));
    EXPECT_EQ(back.params.geometry, GeometryKind::MinComponent);
    EXPECT_THROW((void)experiment_from_json(nlohmann::json{{"n_grid", "oops"}}), ParseError);
    EXPECT_THROW((void)experiment_from_json(nlohmann::json{{"engine", "warp"}}), UsageError);
}

TEST(ScalingCsv, RoundTripAndErrors) {
    std::vector<ScalingRow> rows = {{8192, 123456789012345ULL, 0, 17, 4000, "fraction"},
                                    {0.1, 1, 3, 0, 0, "no_giant"}};
    std::istringstream in(csv_of(rows));
    const auto back = read_scaling_csv(in);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[0].graph_seed, rows[0].graph_seed);
    EXPECT_EQ(back[1].n, 0.1);
    EXPECT_EQ(back[1].stop, "no_giant");

    std::istringstream bad_header("n,seed\n");
    EXPECT_THROW((void)read_scaling_csv(bad_header), ParseError);
    std::istringstream bad_row("n,graph_seed,trial,rounds,giant_size,stop\n1,2,3,4,5,fraction\n1,2,x,4,5,fraction\n");
    try {
        (void)read_scaling_csv(bad_row);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(Fit, PlantedLogLog) {
    std::vector<double> n = grid(), m;
    for (double x : n) m.push_back(2.0 * std::log(std::log(x)));
    const auto f = fit_growth(n, m);
    EXPECT_EQ(f.winner, GrowthModel::LogLog);
    EXPECT_NEAR(f.fit(GrowthModel::LogLog).a, 2.0, 1e-6);
}

TEST(Fit, PlantedPolynomial) {
    std::vector<double> n = grid(), m;
    for (double x : n) m.push_back(std::pow(x, 0.3));
    const auto f = fit_growth(n, m);
    EXPECT_EQ(f.winner, GrowthModel::Polynomial);
    EXPECT_NEAR(f.fit(GrowthModel::Polynomial).exponent, 0.3, 1e-6);
    EXPECT_NEAR(f.fit(GrowthModel::Polynomial).a, 1.0, 1e-6);
}

TEST(Fit, PlantedPolyLog) {
    std::vector<double> n = grid(), m;
    for (double x : n) m.push_back(std::pow(std::log(x), 2.0));
    const auto f = fit_growth(n, m);
    EXPECT_EQ(f.winner, GrowthModel::PolyLog);
    EXPECT_NEAR(f.fit(GrowthModel::PolyLog).exponent, 2.0, 1e-6);
}

// log log n spans little range on small grids, so the polylog slope needs many
// decades before 10% noise leaves it within 0.05
TEST(Fit, NoisyPlantedExponents) {
    const std::vector<double> n = grid(64, 1);
    for (std::uint64_t rep = 0; rep < 20; ++rep) {
        std::vector<double> poly, polylog;
        for (std::size_t i = 0; i < n.size(); ++i) {
            CounterRng rng(rep, StreamTag::Noise, i);
            poly.push_back(std::pow(n[i], 0.3) * (1.0 + 0.1 * (2.0 * rng.uniform() - 1.0)));
            polylog.push_back(std::pow(std::log(n[i]), 2.0) * (1.0 + 0.1 * (2.0 * rng.uniform() - 1.0)));
        }
        EXPECT_NEAR(fit_growth(n, poly).fit(GrowthModel::Polynomial).exponent, 0.3, 0.05);
        EXPECT_NEAR(fit_growth(n, polylog).fit(GrowthModel::PolyLog).exponent, 2.0, 0.05);
    }
}

TEST(Fit, MediansFromRowsAndErrors) {
    std::vector<ScalingRow> rows;
    for (double n : {1e3, 1e4, 1e5}) {
        for (std::size_t t = 0; t < 3; ++t) rows.push_back({n, 1, t, 5 + t, 100, "fraction"});
    }
    rows.push_back({1e5, 9, 0, 0, 0, "no_giant"});
    const auto f = fit_growth(rows);
    EXPECT_EQ(f.medians, (std::vector<double>{6, 6, 6}));
    EXPECT_THROW((void)fit_growth(std::vector<double>{10, 100}, std::vector<double>{1, 2}), UsageError);
    EXPECT_THROW((void)fit_growth(std::vector<double>{10, 10, 100}, std::vector<double>{1, 2, 3}), UsageError);
    EXPECT_DOUBLE_EQ(median({3, 1, 2, 10}), 2.5);
}

TEST(Fit, SlowExponentAttachedOnlyInSlowRegime) {
    std::vector<double> n = grid(), m;
    for (double x : n) m.push_back(std::pow(x, 0.2));
    const auto f = fit_growth(n, m);
    ModelParams p;
    p.tau = 2.8;
    p.alpha = 4.0;
    const auto slow = regime_with_fit(p, f);
    EXPECT_EQ(slow.label, Regime::Slow);
    ASSERT_TRUE(slow.fitted_slow_exponent);
    EXPECT_NEAR(*slow.fitted_slow_exponent, 0.2, 1e-9);
    p.tau = 2.2;
    p.alpha = 1.1;
    EXPECT_FALSE(regime_with_fit(p, f).fitted_slow_exponent);
}

TEST(GraphIo, SampledRoundTrip) {
    for (auto g : {GeometryKind::EuclideanInf, GeometryKind::MinComponent}) {
        ModelParams p;
        p.n = 500;
        p.d = 2;
        p.tau = 2.3;
        p.geometry = g;
        p.seed = 77;
        const Graph graph = sample_graph(p);
        std::stringstream buf;
        save_graph(graph, buf);
        EXPECT_TRUE(load_graph(buf) == graph);
    }
}

TEST(GraphIo, EmptyAndBitExact) {
    const Graph empty = girg::testing::make_graph(0, {});
    std::stringstream a;
    save_graph(empty, a);
    EXPECT_TRUE(load_graph(a) == empty);

    ModelParams p;
    p.n = 1.0 / 3.0;
    p.fixed_count = 2;
    VertexSet vs;
    vs.positions.resize(1, 2);
    vs.positions << 0.1, std::nextafter(1.0, 0.0);
    vs.weights.resize(2);
    vs.weights << std::nextafter(1.0, 2.0), 1e300;
    const Graph g(p, vs, std::vector<Edge>{{0, 1}});
    std::stringstream b;
    save_graph(g, b);
    const Graph back = load_graph(b);
    EXPECT_TRUE(back == g);
    EXPECT_EQ(back.positions()(0, 1), std::nextafter(1.0, 0.0));
    EXPECT_EQ(back.params().n, 1.0 / 3.0);
}

TEST(GraphIo, RejectsMalformedInput) {
    std::istringstream v2("#girg v2\n");
    try {
        (void)load_graph(v2);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("v2"), std::string::npos);
        EXPECT_EQ(e.line(), 1u);
    }
    auto line_of = [](const std::string& text) -> std::size_t {
        std::istringstream in(text);
        try {
            (void)load_graph(in);
        } catch (const ParseError& e) {
            return e.line();
        }
        return 0;
    };
    const std::string head = "#girg v1\nparams n=2 d=1 tau=2.5 alpha=2 theta=1 geom=inf seed=1\nV 2\n";
    EXPECT_EQ(line_of(head + "0 0.5 1\n1 0.25 x\nE 0\n"), 5u);
    EXPECT_EQ(line_of(head + "0 0.5 1\n1 0.25 2\nE 1\n1 0\n"), 7u);
    EXPECT_EQ(line_of(head + "0 0.5 1\n1 0.25 2\nE 1\n0 1\n0 1\n"), 8u);
    EXPECT_EQ(line_of(head + "0 0.5 1\n"), 5u);
    EXPECT_EQ(line_of("#girg v1\nparams n=2 d=1 geom=hyperbolic\n"), 2u);
    EXPECT_EQ(line_of(head + "0 1.5 1\n"), 4u);
    EXPECT_THROW((void)load_graph(std::filesystem::path("/nonexistent/graph.txt")), ParseError);
}
