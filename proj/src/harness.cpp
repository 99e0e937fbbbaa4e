#include "girg/harness.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "girg/errors.hpp"
#include "girg/parallel.hpp"
#include "girg/protocol.hpp"
#include "girg/rng.hpp"

namespace girg {

void ExperimentConfig::validate() const {
    if (n_grid.empty()) throw UsageError("n grid must not be empty");
    for (double n : n_grid) {
        if (!(n > 0.0) || !std::isfinite(n)) throw UsageError("n grid entries must be positive");
    }
    if (graphs_per_n < 1) throw UsageError("graphs per n must be >= 1");
    if (trials_per_graph < 1) throw UsageError("trials per graph must be >= 1");
    if (!(fraction > 0.0 && fraction <= 1.0)) throw UsageError("fraction must lie in (0, 1]");
    if (max_rounds == 0) throw UsageError("max_rounds must be positive");
    ModelParams probe = params;
    probe.n = n_grid.front();
    probe.validate();
}

namespace {

SamplerEngine parse_engine(const std::string& s) {
    if (s == "grid") return SamplerEngine::CellGrid;
    if (s == "naive") return SamplerEngine::Naive;
    throw UsageError("unknown engine '" + s + "' (expected grid|naive)");
}

template <typename T>
void take(const nlohmann::json& j, const char* key, T& into) {
    if (j.contains(key)) into = j.at(key).get<T>();
}

} // namespace

ExperimentConfig experiment_from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    try {
        if (!j.is_object()) throw UsageError("experiment config must be a JSON object");
        if (j.contains("params")) {
            const auto& p = j.at("params");
            take(p, "d", cfg.params.d);
            take(p, "tau", cfg.params.tau);
            take(p, "alpha", cfg.params.alpha);
            take(p, "theta", cfg.params.theta);
            if (p.contains("geometry")) cfg.params.geometry = parse_geometry(p.at("geometry").get<std::string>());
        }
        take(j, "n_grid", cfg.n_grid);
        take(j, "graphs_per_n", cfg.graphs_per_n);
        take(j, "trials_per_graph", cfg.trials_per_graph);
        take(j, "fraction", cfg.fraction);
        take(j, "seed_base", cfg.seed_base);
        take(j, "max_rounds", cfg.max_rounds);
        take(j, "threads", cfg.threads);
        if (j.contains("engine")) cfg.engine = parse_engine(j.at("engine").get<std::string>());
        if (j.contains("output")) {
            const auto& o = j.at("output");
            take(o, "csv", cfg.csv_path);
            take(o, "fit", cfg.fit_path);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("experiment config: ") + e.what());
    }
    return cfg;
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
    return {
        {"params",
         {{"d", cfg.params.d},
          {"tau", cfg.params.tau},
          {"alpha", cfg.params.alpha},
          {"theta", cfg.params.theta},
          {"geometry", std::string(to_string(cfg.params.geometry))}}},
        {"n_grid", cfg.n_grid},
        {"graphs_per_n", cfg.graphs_per_n},
        {"trials_per_graph", cfg.trials_per_graph},
        {"fraction", cfg.fraction},
        {"seed_base", cfg.seed_base},
        {"max_rounds", cfg.max_rounds},
        {"threads", cfg.threads},
        {"engine", cfg.engine == SamplerEngine::CellGrid ? "grid" : "naive"},
        {"output", {{"csv", cfg.csv_path}, {"fit", cfg.fit_path}}},
    };
}

std::uint64_t experiment_graph_seed(std::uint64_t seed_base, std::size_t i, std::size_t g) {
    return stream_key(seed_base, StreamTag::Experiment, i, g);
}

std::vector<ScalingRow> run_scaling_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::size_t jobs = cfg.n_grid.size() * cfg.graphs_per_n;
    std::vector<std::vector<ScalingRow>> parts(jobs);
    parallel_for(jobs, cfg.threads, [&](std::size_t job) {
        const std::size_t i = job / cfg.graphs_per_n, g = job % cfg.graphs_per_n;
        ModelParams p = cfg.params;
        p.n = cfg.n_grid[i];
        p.seed = experiment_graph_seed(cfg.seed_base, i, g);
        const Graph graph = sample_graph(p, cfg.engine);
        const auto giant = giant_component(graph);
        auto& out = parts[job];
        if (giant.giant_size == 0) {
            out.push_back({p.n, p.seed, 0, 0, 0, "no_giant"});
            return;
        }
        for (std::size_t t = 0; t < cfg.trials_per_graph; ++t) {
            SpreadConfig sc;
            sc.fraction = cfg.fraction;
            sc.max_rounds = cfg.max_rounds;
            sc.seed = stream_key(p.seed, StreamTag::Experiment, t, 1);
            const auto trace = run_spread(graph, sc);
            out.push_back({p.n, p.seed, t, trace.rounds_elapsed, giant.giant_size, std::string(to_string(trace.stop))});
        }
    });
    std::vector<ScalingRow> rows;
    for (auto& part : parts) rows.insert(rows.end(), part.begin(), part.end());
    return rows;
}

namespace {

std::string real(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

template <typename T>
T field(std::string_view tok, std::size_t line, const char* what) {
    T value{};
    const auto* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, value);
    if (ec != std::errc() || ptr != end) throw ParseError(std::string("bad ") + what + " '" + std::string(tok) + "'", line);
    return value;
}

} // namespace

void write_scaling_csv(const std::vector<ScalingRow>& rows, std::ostream& out) {
    out << kScalingHeader << "\n";
    for (const auto& r : rows) {
        out << real(r.n) << ',' << r.graph_seed << ',' << r.trial << ',' << r.rounds << ',' << r.giant_size << ','
            << r.stop << "\n";
    }
}

std::vector<ScalingRow> read_scaling_csv(std::istream& in) {
    std::string line;
    std::size_t no = 1;
    if (!std::getline(in, line)) throw ParseError("empty scaling table", 1);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kScalingHeader) throw ParseError("header must be '" + std::string(kScalingHeader) + "'", 1);
    std::vector<ScalingRow> rows;
    while (std::getline(in, line)) {
        ++no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
        if (cells.size() != 6) throw ParseError("expected 6 columns", no);
        rows.push_back({field<double>(cells[0], no, "n"), field<std::uint64_t>(cells[1], no, "graph_seed"),
                        field<std::size_t>(cells[2], no, "trial"), field<std::size_t>(cells[3], no, "rounds"),
                        field<std::size_t>(cells[4], no, "giant_size"), cells[5]});
    }
    return rows;
}

std::string_view to_string(GrowthModel m) noexcept {
    switch (m) {
    case GrowthModel::LogLog: return "loglog";
    case GrowthModel::PolyLog: return "polylog";
    case GrowthModel::Polynomial: return "polynomial";
    }
    return "unknown";
}

double median(std::vector<double> xs) {
    if (xs.empty()) throw UsageError("median of an empty sample");
    std::sort(xs.begin(), xs.end());
    const std::size_t h = xs.size() / 2;
    return xs.size() % 2 ? xs[h] : 0.5 * (xs[h - 1] + xs[h]);
}

FitReport fit_growth(const std::vector<ScalingRow>& rows) {
    std::map<double, std::vector<double>> by_n;
    for (const auto& r : rows) {
        if (r.stop == "no_giant") continue;
        by_n[r.n].push_back(static_cast<double>(r.rounds));
    }
    std::vector<double> ns, meds;
    for (auto& [n, xs] : by_n) {
        ns.push_back(n);
        meds.push_back(median(std::move(xs)));
    }
    return fit_growth(ns, meds);
}

FitReport fit_growth(const std::vector<double>& n, const std::vector<double>& medians) {
    if (n.size() != medians.size()) throw UsageError("fit_growth: n and medians differ in length");
    std::vector<double> sorted = n;
    std::sort(sorted.begin(), sorted.end());
    if (std::unique(sorted.begin(), sorted.end()) - sorted.begin() < 3 || sorted.size() != n.size()) {
        throw UsageError("fit_growth needs at least 3 distinct n values, one median each");
    }
    for (std::size_t i = 0; i < n.size(); ++i) {
        if (!(n[i] > std::exp(1.0))) throw UsageError("fit_growth needs n > e so that log log n > 0");
        if (!(medians[i] > 0.0)) throw UsageError("fit_growth needs positive medians");
    }
    const auto k = static_cast<Eigen::Index>(n.size());
    Eigen::VectorXd ln(k), lln(k), m(k), lm(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        ln(i) = std::log(n[static_cast<std::size_t>(i)]);
        lln(i) = std::log(ln(i));
        m(i) = medians[static_cast<std::size_t>(i)];
        lm(i) = std::log(m(i));
    }

    FitReport rep;
    rep.n = n;
    rep.medians = medians;

    // m = a loglog n, through the origin
    const double a_ll = lln.dot(m) / lln.squaredNorm();
    const double rss_ll = (lm - (a_ll * lln).array().log().matrix()).squaredNorm();
    rep.fits.push_back({GrowthModel::LogLog, a_ll, 1.0, rss_ll});

    auto affine = [&](const Eigen::VectorXd& x, GrowthModel model) {
        Eigen::MatrixXd design(k, 2);
        design.col(0).setOnes();
        design.col(1) = x;
        const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(lm);
        const double rss = (lm - design * coef).squaredNorm();
        rep.fits.push_back({model, std::exp(coef(0)), coef(1), rss});
    };
    affine(lln, GrowthModel::PolyLog);
    affine(ln, GrowthModel::Polynomial);

    for (const auto& f : rep.fits) {
        if (!std::isfinite(f.a) || !std::isfinite(f.exponent)) throw UsageError("fit_growth produced a non-finite coefficient");
    }
    // loglog is polylog with b = 1; an RSS that is only smaller at rounding
    // level does not displace the earlier, simpler model
    auto best = rep.fits.begin();
    for (auto it = rep.fits.begin(); it != rep.fits.end(); ++it) {
        if (it->rss < best->rss * (1.0 - 1e-9) - 1e-24) best = it;
    }
    rep.winner = best->model;
    return rep;
}

RegimeReport regime_with_fit(const ModelParams& params, const FitReport& fit) {
    RegimeReport r = params.geometry == GeometryKind::MinComponent ? classify_mcd(params.tau, params.alpha, params.d)
                                                                   : classify(params.tau, params.alpha);
    if (r.label == Regime::Slow) r.fitted_slow_exponent = fit.fit(GrowthModel::Polynomial).exponent;
    return r;
}

} // namespace girg
