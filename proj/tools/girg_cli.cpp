#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "girg/errors.hpp"
#include "girg/graph_io.hpp"
#include "girg/harness.hpp"
#include "girg/protocol.hpp"
#include "girg/regimes.hpp"
#include "girg/report.hpp"
#include "girg/rng.hpp"
#include "girg/structure.hpp"

using nlohmann::json;
using namespace girg;

namespace {

// A subcommand whose flags are written into a JSON document at fixed keys.
// The document starts from --config (if any), so flags override file values.
class Command {
public:
    Command(CLI::App& parent, const std::string& name, const std::string& about)
        : app_(parent.add_subcommand(name, about)) {
        app_->add_option("--config", config_path_, "JSON config; flags override its keys")->check(CLI::ExistingFile);
    }

    template <typename T>
    CLI::Option* option(const std::string& flag, const std::string& key, const std::string& about) {
        auto value = std::make_shared<T>();
        CLI::Option* opt = app_->add_option(flag, *value, about);
        writers_.push_back([opt, value, key](json& doc) {
            if (opt->count() > 0) doc[json::json_pointer(key)] = *value;
        });
        return opt;
    }

    CLI::Option* flag(const std::string& flag, const std::string& key, const std::string& about) {
        CLI::Option* opt = app_->add_flag(flag, about);
        writers_.push_back([opt, key](json& doc) {
            if (opt->count() > 0) doc[json::json_pointer(key)] = true;
        });
        return opt;
    }

    void common(const std::string& seed_key = "/seed", const std::string& out_key = "/out") {
        option<std::uint64_t>("--seed", seed_key, "base seed");
        option<unsigned>("--threads", "/threads", "worker threads")->check(CLI::Range(1u, 1024u));
        option<std::string>("--out", out_key, "output file (default stdout)");
        flag("--json", "/json", "emit JSON");
    }

    void model_flags() {
        option<double>("--n", "/params/n", "Poisson intensity n");
        option<int>("--d", "/params/d", "dimension");
        option<double>("--tau", "/params/tau", "power-law exponent");
        option<double>("--alpha", "/params/alpha", "long-range decay");
        option<double>("--theta", "/params/theta", "kernel constant");
        option<std::string>("--geometry", "/params/geometry", "inf|min");
        option<std::int64_t>("--fixed", "/params/fixed_count", "exact vertex count instead of Poisson(n)");
        option<std::string>("--engine", "/engine", "grid|naive");
    }

    void graph_input() {
        model_flags();
        option<std::string>("--graph", "/graph", "load this graph file instead of sampling");
    }

    [[nodiscard]] CLI::App* app() const { return app_; }

    [[nodiscard]] json document() const {
        json doc = json::object();
        if (!config_path_.empty()) {
            std::ifstream in(config_path_);
            try {
                doc = json::parse(in);
            } catch (const json::parse_error& e) {
                throw ParseError(config_path_ + ": " + e.what());
            }
            if (!doc.is_object()) throw ParseError(config_path_ + ": config must be a JSON object");
        }
        for (const auto& w : writers_) w(doc);
        return doc;
    }

private:
    CLI::App* app_;
    std::string config_path_;
    std::vector<std::function<void(json&)>> writers_;
};

template <typename T>
T get(const json& doc, const std::string& key, T fallback) {
    const json::json_pointer ptr(key);
    if (!doc.contains(ptr) || doc.at(ptr).is_null()) return fallback;
    try {
        return doc.at(ptr).get<T>();
    } catch (const json::exception& e) {
        throw ParseError("config key " + key + ": " + e.what());
    }
}

template <typename T>
std::optional<T> get_opt(const json& doc, const std::string& key) {
    const json::json_pointer ptr(key);
    if (!doc.contains(ptr) || doc.at(ptr).is_null()) return std::nullopt;
    return get<T>(doc, key, T{});
}

SamplerEngine engine_of(const json& doc) {
    const auto s = get<std::string>(doc, "/engine", "grid");
    if (s == "grid") return SamplerEngine::CellGrid;
    if (s == "naive") return SamplerEngine::Naive;
    throw UsageError("unknown engine '" + s + "' (expected grid|naive)");
}

ModelParams params_of(const json& doc) {
    ModelParams p;
    p.n = get(doc, "/params/n", p.n);
    p.d = get(doc, "/params/d", p.d);
    p.tau = get(doc, "/params/tau", p.tau);
    p.alpha = get(doc, "/params/alpha", p.alpha);
    p.theta = get(doc, "/params/theta", p.theta);
    p.geometry = parse_geometry(get<std::string>(doc, "/params/geometry", std::string(to_string(p.geometry))));
    p.fixed_count = get_opt<std::int64_t>(doc, "/params/fixed_count");
    p.seed = get<std::uint64_t>(doc, "/seed", p.seed);
    p.validate();
    return p;
}

unsigned threads_of(const json& doc) { return get<unsigned>(doc, "/threads", 1u); }

bool want_json(const json& doc) { return get(doc, "/json", false); }

Graph graph_of(const json& doc) {
    if (auto path = get_opt<std::string>(doc, "/graph")) return load_graph(std::filesystem::path(*path));
    return sample_graph(params_of(doc), engine_of(doc), threads_of(doc));
}

void emit(const std::string& text, const std::optional<std::string>& path) {
    if (!path) {
        std::cout << text;
        return;
    }
    std::ofstream out(*path);
    if (!out) throw UsageError("cannot write " + *path);
    out << text;
    if (!out) throw UsageError("write failed for " + *path);
}

void emit(const json& j, const json& doc) { emit(j.dump(2) + "\n", get_opt<std::string>(doc, "/out")); }

VertexId giant_vertex(const Graph& g, std::uint64_t seed) {
    SpreadConfig sc;
    sc.seed = seed;
    return choose_start(g, sc);
}

int cmd_sample(const json& doc) {
    const Graph g = graph_of(doc);
    if (auto out = get_opt<std::string>(doc, "/out")) save_graph(g, std::filesystem::path(*out));
    const json s = graph_summary(g);
    if (want_json(doc)) {
        std::cout << s.dump(2) << "\n";
    } else {
        std::cout << "vertices " << s["vertices"] << "\nedges " << s["edges"] << "\ngiant " << s["giant_size"]
                  << "\ncomponents " << s["components"] << "\n";
    }
    return 0;
}

int cmd_spread(const json& doc) {
    const Graph g = graph_of(doc);
    SpreadConfig sc;
    sc.seed = get<std::uint64_t>(doc, "/spread/seed", get<std::uint64_t>(doc, "/seed", 1));
    sc.threads = threads_of(doc);
    sc.fraction = get(doc, "/spread/fraction", sc.fraction);
    sc.max_rounds = get(doc, "/spread/max_rounds", sc.max_rounds);
    if (auto s = get_opt<VertexId>(doc, "/spread/start")) sc.start = *s;
    if (auto t = get_opt<VertexId>(doc, "/spread/target")) {
        sc.stop = StopRule::Target;
        sc.target = *t;
    }
    const auto trace = run_spread(g, sc);
    if (auto path = get_opt<std::string>(doc, "/spread/trace")) {
        std::ofstream out(*path);
        if (!out) throw UsageError("cannot write " + *path);
        write_trace_jsonl(trace, out);
    }
    if (want_json(doc)) {
        emit(spread_summary(trace), doc);
    } else {
        std::ostringstream s;
        s << "start " << trace.start << "\nrounds " << trace.rounds_elapsed << "\ninformed " << trace.informed_count()
          << "\nstop " << to_string(trace.stop) << "\n";
        emit(s.str(), get_opt<std::string>(doc, "/out"));
    }
    return 0;
}

int cmd_phase(const json& doc) {
    const int d = get(doc, "/params/d", 1);
    const bool mcd = get<std::string>(doc, "/params/geometry", "inf") == "min";
    auto report = [&](double tau, double alpha) { return mcd ? classify_mcd(tau, alpha, d) : classify(tau, alpha); };

    if (get(doc, "/phase/grid", false)) {
        const double t0 = get(doc, "/phase/tau_min", 2.02), t1 = get(doc, "/phase/tau_max", 3.5);
        const double a0 = get(doc, "/phase/alpha_min", 1.02), a1 = get(doc, "/phase/alpha_max", 5.0);
        const int tn = get(doc, "/phase/tau_steps", 60), an = get(doc, "/phase/alpha_steps", 60);
        if (tn < 2 || an < 2) throw UsageError("grid needs at least 2 steps per axis");
        std::ostringstream csv;
        csv << "tau,alpha,label\n";
        csv.precision(17);
        for (int i = 0; i < tn; ++i) {
            const double tau = t0 + (t1 - t0) * i / (tn - 1);
            for (int k = 0; k < an; ++k) {
                const double alpha = a0 + (a1 - a0) * k / (an - 1);
                csv << tau << ',' << alpha << ',' << to_string(report(tau, alpha).label) << "\n";
            }
        }
        emit(csv.str(), get_opt<std::string>(doc, "/out"));
        return 0;
    }
    const auto tau = get_opt<double>(doc, "/params/tau");
    const auto alpha = get_opt<double>(doc, "/params/alpha");
    if (!tau || !alpha) throw UsageError("phase needs --tau and --alpha, or --grid");
    const auto r = report(*tau, *alpha);
    if (want_json(doc)) {
        emit(to_json(r), doc);
    } else {
        std::ostringstream s;
        s << "label " << to_string(r.label) << "\ngamma_weak " << r.gamma_weak << "\ngamma_strong " << r.gamma_strong << "\n";
        if (r.ultrafast_constant) s << "ultrafast_constant " << *r.ultrafast_constant << "\n";
        if (r.mechanism) s << "mechanism " << to_string(*r.mechanism) << "\n";
        emit(s.str(), get_opt<std::string>(doc, "/out"));
    }
    return 0;
}

int cmd_census(const json& doc) {
    const Graph g = graph_of(doc);
    const double delta = get(doc, "/census/delta", default_census_delta(g.dim()));
    emit(to_json(long_edge_census(g, delta)), doc);
    return 0;
}

int cmd_path(const json& doc) {
    const Graph g = graph_of(doc);
    PathConfig cfg;
    cfg.mechanism = parse_path_mechanism(get<std::string>(doc, "/path/mechanism", std::string(to_string(cfg.mechanism))));
    cfg.beta = get(doc, "/path/beta", cfg.beta);
    cfg.eps = get_opt<double>(doc, "/path/eps");
    cfg.target_weight = get(doc, "/path/target_weight", cfg.target_weight);
    cfg.low_cap = get(doc, "/path/low_cap", cfg.low_cap);
    cfg.max_steps = get(doc, "/path/max_steps", cfg.max_steps);
    cfg.validate();
    const auto start = get_opt<VertexId>(doc, "/path/start").value_or(giant_vertex(g, get<std::uint64_t>(doc, "/seed", 1)));
    const auto result = cfg.mechanism == PathMechanism::McdAlt ? mcd_alternating_path(g, start, cfg)
                                                                : greedy_weight_path(g, start, cfg);
    json j = to_json(result);
    j["verdict"] = to_json(verify_path(g, result));
    emit(j, doc);
    return 0;
}

int cmd_hierarchy(const json& doc) {
    const Graph g = graph_of(doc);
    HierarchyConfig cfg;
    cfg.gamma = get(doc, "/hierarchy/gamma", cfg.gamma);
    cfg.mode = parse_hierarchy_mode(get<std::string>(doc, "/hierarchy/mode", std::string(to_string(cfg.mode))));
    cfg.stop_dist = get(doc, "/hierarchy/stop_dist", cfg.stop_dist);
    cfg.r_cap = get(doc, "/hierarchy/r_cap", cfg.r_cap);
    cfg.eps = get_opt<double>(doc, "/hierarchy/eps");
    cfg.z = get(doc, "/hierarchy/z", cfg.z);
    cfg.validate();
    const std::uint64_t seed = get<std::uint64_t>(doc, "/seed", 1);
    const VertexId u = get_opt<VertexId>(doc, "/hierarchy/u").value_or(giant_vertex(g, seed));
    VertexId v = u;
    if (auto given = get_opt<VertexId>(doc, "/hierarchy/v")) {
        v = *given;
    } else {
        for (std::size_t k = 1; v == u && k <= 64; ++k) v = giant_vertex(g, stream_key(seed, StreamTag::StartVertex, k, 0));
        if (v == u) throw UsageError("could not pick a second giant vertex; pass --v");
    }
    const auto h = find_hierarchy(g, u, v, cfg);
    json j = to_json(h);
    j["verdict"] = to_json(verify_hierarchy(g, h));
    emit(j, doc);
    return 0;
}

int cmd_scaling(const json& doc) {
    ExperimentConfig cfg = experiment_from_json(doc);
    cfg.validate();
    const auto rows = run_scaling_experiment(cfg);
    std::ostringstream csv;
    write_scaling_csv(rows, csv);
    const bool js = want_json(doc);
    if (js && cfg.csv_path.empty()) throw UsageError("--json with scaling needs --out for the CSV");
    emit(csv.str(), cfg.csv_path.empty() ? std::nullopt : std::optional<std::string>(cfg.csv_path));

    std::optional<FitReport> fit;
    if (!cfg.fit_path.empty() || js) {
        try {
            fit = fit_growth(rows);
        } catch (const UsageError&) {
            if (!cfg.fit_path.empty()) throw;
        }
    }
    if (!cfg.fit_path.empty()) emit(to_json(*fit).dump(2) + "\n", cfg.fit_path);
    if (js) {
        json j = {{"rows", rows.size()}, {"csv", cfg.csv_path}};
        j["fit"] = fit ? to_json(*fit) : json(nullptr);
        j["regime"] = fit ? to_json(regime_with_fit(cfg.params, *fit)) : json(nullptr);
        std::cout << j.dump(2) << "\n";
    }
    return 0;
}

int cmd_fit(const json& doc) {
    const auto path = get_opt<std::string>(doc, "/fit/in");
    if (!path) throw UsageError("fit needs --in <scaling.csv>");
    std::ifstream in(*path);
    if (!in) throw ParseError("cannot open " + *path);
    const auto report = fit_growth(read_scaling_csv(in));
    if (want_json(doc)) {
        emit(to_json(report), doc);
    } else {
        std::ostringstream s;
        s.precision(6);
        for (const auto& f : report.fits) {
            s << to_string(f.model) << " a=" << f.a << " exponent=" << f.exponent << " rss=" << f.rss << "\n";
        }
        s << "winner " << to_string(report.winner) << "\n";
        emit(s.str(), get_opt<std::string>(doc, "/out"));
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Geometric inhomogeneous random graphs and push-pull rumour spreading"};
    app.require_subcommand(1);
    std::vector<std::pair<std::unique_ptr<Command>, std::function<int(const json&)>>> commands;
    auto add = [&](const std::string& name, const std::string& about, std::function<int(const json&)> run) -> Command& {
        commands.emplace_back(std::make_unique<Command>(app, name, about), std::move(run));
        return *commands.back().first;
    };

    Command& sample = add("sample", "sample a graph; --out writes it in #girg v1 format", cmd_sample);
    sample.common();
    sample.model_flags();

    Command& spread = add("spread", "run push-pull from a start vertex", cmd_spread);
    spread.common();
    spread.graph_input();
    spread.option<VertexId>("--start", "/spread/start", "start vertex (default: uniform in the giant)");
    spread.option<VertexId>("--target", "/spread/target", "stop once this vertex is informed");
    spread.option<double>("--fraction", "/spread/fraction", "stop at this fraction of the giant");
    spread.option<std::size_t>("--max-rounds", "/spread/max_rounds", "round cap");
    spread.option<std::uint64_t>("--spread-seed", "/spread/seed", "protocol seed (default: --seed)");
    spread.option<std::string>("--trace", "/spread/trace", "write per-round JSONL trace here");

    Command& phase = add("phase", "classify (tau, alpha) or emit a label raster", cmd_phase);
    phase.common();
    phase.option<double>("--tau", "/params/tau", "power-law exponent");
    phase.option<double>("--alpha", "/params/alpha", "long-range decay");
    phase.option<int>("--d", "/params/d", "dimension (min geometry only)");
    phase.option<std::string>("--geometry", "/params/geometry", "inf|min");
    phase.flag("--grid", "/phase/grid", "CSV raster of labels");
    phase.option<double>("--tau-min", "/phase/tau_min", "raster tau lower end");
    phase.option<double>("--tau-max", "/phase/tau_max", "raster tau upper end");
    phase.option<double>("--alpha-min", "/phase/alpha_min", "raster alpha lower end");
    phase.option<double>("--alpha-max", "/phase/alpha_max", "raster alpha upper end");
    phase.option<int>("--tau-steps", "/phase/tau_steps", "raster points along tau");
    phase.option<int>("--alpha-steps", "/phase/alpha_steps", "raster points along alpha");

    Command& census = add("census", "count long edges by slowdown level", cmd_census);
    census.common();
    census.graph_input();
    census.option<double>("--delta", "/census/delta", "length cutoff exponent");

    Command& path = add("path", "greedy weight-increasing path from a vertex", cmd_path);
    path.common();
    path.graph_input();
    path.option<std::string>("--mechanism", "/path/mechanism", "direct|via-low-weight|relay3hop|mcd-alt");
    path.option<double>("--beta", "/path/beta", "growth exponent");
    path.option<double>("--eps", "/path/eps", "slack exponent");
    path.option<double>("--target", "/path/target_weight", "stop at this weight");
    path.option<double>("--low-cap", "/path/low_cap", "weight cap for intermediate vertices");
    path.option<std::size_t>("--max-steps", "/path/max_steps", "step cap");
    path.option<VertexId>("--start", "/path/start", "start vertex (default: uniform in the giant)");

    Command& hier = add("hierarchy", "find and verify a bridge hierarchy between two vertices", cmd_hierarchy);
    hier.common();
    hier.graph_input();
    hier.option<double>("--gamma", "/hierarchy/gamma", "level exponent");
    hier.option<std::string>("--mode", "/hierarchy/mode", "weak|strong");
    hier.option<double>("--stop-dist", "/hierarchy/stop_dist", "close-pair distance in rescaled units");
    hier.option<int>("--r-cap", "/hierarchy/r_cap", "depth cap");
    hier.option<double>("--eps", "/hierarchy/eps", "slack exponent");
    hier.option<long long>("--z", "/hierarchy/z", "timeblock length");
    hier.option<VertexId>("--u", "/hierarchy/u", "first endpoint");
    hier.option<VertexId>("--v", "/hierarchy/v", "second endpoint");

    Command& scaling = add("scaling", "rounds-vs-n experiment, CSV rows", cmd_scaling);
    scaling.common("/seed_base", "/output/csv");
    scaling.option<int>("--d", "/params/d", "dimension");
    scaling.option<double>("--tau", "/params/tau", "power-law exponent");
    scaling.option<double>("--alpha", "/params/alpha", "long-range decay");
    scaling.option<double>("--theta", "/params/theta", "kernel constant");
    scaling.option<std::string>("--geometry", "/params/geometry", "inf|min");
    scaling.option<std::string>("--engine", "/engine", "grid|naive");
    scaling.option<std::vector<double>>("--n-grid", "/n_grid", "list of n values")->delimiter(',');
    scaling.option<std::size_t>("--graphs", "/graphs_per_n", "graphs per n");
    scaling.option<std::size_t>("--trials", "/trials_per_graph", "trials per graph");
    scaling.option<double>("--fraction", "/fraction", "stop fraction of the giant");
    scaling.option<std::size_t>("--max-rounds", "/max_rounds", "round cap");
    scaling.option<std::string>("--fit-out", "/output/fit", "write the growth fit JSON here");

    Command& fit = add("fit", "fit growth models to a scaling CSV", cmd_fit);
    fit.common();
    fit.option<std::string>("--in", "/fit/in", "scaling CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        for (auto& [cmd, run] : commands) {
            if (cmd->app()->parsed()) return run(cmd->document());
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ResourceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
