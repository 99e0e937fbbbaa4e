#include "girg/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <json.hpp>

#include "girg/parallel.hpp"
#include "girg/rng.hpp"

namespace girg {

std::string_view to_string(StopCause c) noexcept {
    switch (c) {
    case StopCause::Fraction: return "fraction";
    case StopCause::Target: return "target";
    case StopCause::MaxRounds: return "max_rounds";
    case StopCause::Unreachable: return "unreachable";
    }
    return "unknown";
}

void SpreadConfig::validate() const {
    if (stop == StopRule::Fraction && !(fraction > 0.0 && fraction <= 1.0)) {
        throw UsageError("stop fraction must lie in (0, 1]");
    }
    if (max_rounds == 0) throw UsageError("max_rounds must be positive");
}

void RPrimeConfig::validate() const {
    if (!(c > 0.0) || !std::isfinite(c)) throw UsageError("activation constant c must be positive");
}

std::size_t SpreadTrace::informed_count() const {
    return static_cast<std::size_t>(
        std::count_if(informed_round.begin(), informed_round.end(), [](std::size_t r) { return r != kNever; }));
}

VertexId select_neighbour(const Graph& graph, VertexId v, std::size_t round, std::uint64_t seed) {
    const auto row = graph.neighbours(v);
    CounterRng rng(seed, StreamTag::Selection, v, round);
    return row[rng.below(row.size())];
}

namespace {

bool transmission_less(const Transmission& a, const Transmission& b) {
    return std::tie(a.round, a.to, a.from) < std::tie(b.round, b.to, b.from);
}

bool transmission_eq(const Transmission& a, const Transmission& b) {
    return a.round == b.round && a.to == b.to && a.from == b.from;
}

// Sorts, deduplicates, applies. Returns the distinct newly informed vertices.
std::vector<VertexId> apply_transmissions(std::vector<Transmission>& tx, std::vector<char>& informed) {
    std::sort(tx.begin(), tx.end(), transmission_less);
    tx.erase(std::unique(tx.begin(), tx.end(), transmission_eq), tx.end());
    std::vector<VertexId> fresh;
    for (const auto& t : tx) {
        if (fresh.empty() || fresh.back() != t.to) fresh.push_back(t.to);
    }
    for (VertexId v : fresh) informed[v] = 1;
    return fresh;
}

// Selection outcome of one vertex against the round-start state.
void evaluate(const Graph& graph, const std::vector<char>& informed, VertexId v, std::size_t round,
              std::uint64_t seed, std::vector<Transmission>& tx, std::vector<SelectionEvent>* sel) {
    if (graph.degree(v) == 0) return;
    const VertexId s = select_neighbour(graph, v, round, seed);
    if (sel) sel->push_back({round, v, s});
    if (informed[v] != informed[s]) {
        tx.push_back(informed[v] ? Transmission{round, v, s} : Transmission{round, s, v});
    }
}

} // namespace

RoundEvents push_pull_round(const Graph& graph, std::vector<char>& informed, std::size_t round, std::uint64_t seed,
                            std::span<const VertexId> order) {
    RoundEvents ev;
    if (order.empty()) {
        for (VertexId v = 0; v < graph.size(); ++v) evaluate(graph, informed, v, round, seed, ev.transmissions, &ev.selections);
    } else {
        for (VertexId v : order) evaluate(graph, informed, v, round, seed, ev.transmissions, &ev.selections);
    }
    std::sort(ev.selections.begin(), ev.selections.end(),
              [](const SelectionEvent& a, const SelectionEvent& b) { return a.chooser < b.chooser; });
    ev.newly_informed = apply_transmissions(ev.transmissions, informed);
    return ev;
}

VertexId choose_start(const Graph& graph, const SpreadConfig& cfg) {
    if (graph.size() == 0) throw UsageError("cannot spread on an empty graph");
    if (cfg.start) {
        if (*cfg.start >= graph.size()) throw UsageError("start vertex " + std::to_string(*cfg.start) + " out of range");
        return *cfg.start;
    }
    const auto labels = giant_component(graph);
    for (std::uint64_t attempt = 0;; ++attempt) {
        CounterRng rng(cfg.seed, StreamTag::StartVertex, attempt);
        const auto v = static_cast<VertexId>(rng.below(graph.size()));
        if (labels.in_giant(v)) return v;
    }
}

SpreadTrace run_spread(const Graph& graph, const SpreadConfig& cfg) {
    cfg.validate();
    const std::size_t n = graph.size();
    if (cfg.stop == StopRule::Target && cfg.target >= n) {
        throw UsageError("target vertex " + std::to_string(cfg.target) + " out of range");
    }
    SpreadTrace trace;
    trace.start = choose_start(graph, cfg);
    trace.informed_round.assign(n, kNever);
    trace.informed_round[trace.start] = 0;
    trace.new_per_round.push_back(1);

    const auto labels = giant_component(graph);
    std::size_t needed = 0;
    if (cfg.stop == StopRule::Fraction) {
        needed = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(cfg.fraction * static_cast<double>(labels.giant_size) - 1e-9)));
    }
    const bool unreachable = cfg.stop == StopRule::Target && labels.label[cfg.target] != labels.label[trace.start];

    std::vector<char> informed(n, 0);
    informed[trace.start] = 1;
    std::size_t count = 1;

    auto stopped = [&]() -> bool {
        if (cfg.stop == StopRule::Fraction && count >= needed) {
            trace.stop = StopCause::Fraction;
            return true;
        }
        if (cfg.stop == StopRule::Target && informed[cfg.target]) {
            trace.stop = StopCause::Target;
            return true;
        }
        return false;
    };
    auto exhausted = [&] { trace.stop = unreachable ? StopCause::Unreachable : StopCause::MaxRounds; };

    if (stopped()) return trace;

    auto record = [&](std::size_t t, const std::vector<VertexId>& fresh) {
        for (VertexId v : fresh) trace.informed_round[v] = t;
        count += fresh.size();
        trace.new_per_round.push_back(fresh.size());
        trace.rounds_elapsed = t;
    };

    if (cfg.record_selections) {
        for (std::size_t t = 1; t <= cfg.max_rounds; ++t) {
            RoundEvents ev = push_pull_round(graph, informed, t, cfg.seed);
            trace.transmissions.insert(trace.transmissions.end(), ev.transmissions.begin(), ev.transmissions.end());
            trace.selections.insert(trace.selections.end(), ev.selections.begin(), ev.selections.end());
            record(t, ev.newly_informed);
            if (stopped()) return trace;
        }
        exhausted();
        return trace;
    }

    // Only vertices with a neighbour in the opposite state can transmit.
    std::vector<std::size_t> informed_nbrs(n, 0);
    for (VertexId w : graph.neighbours(trace.start)) ++informed_nbrs[w];
    auto on_boundary = [&](VertexId v) {
        return informed[v] ? informed_nbrs[v] < graph.degree(v) : informed_nbrs[v] > 0;
    };
    std::vector<VertexId> boundary;
    std::vector<std::size_t> stamp(n, 0);
    auto rebuild = [&](std::size_t t, const std::vector<VertexId>& candidates) {
        std::vector<VertexId> next;
        auto consider = [&](VertexId v) {
            if (stamp[v] == t) return;
            stamp[v] = t;
            if (on_boundary(v)) next.push_back(v);
        };
        for (VertexId v : boundary) consider(v);
        for (VertexId v : candidates) {
            consider(v);
            for (VertexId w : graph.neighbours(v)) consider(w);
        }
        boundary = std::move(next);
    };
    rebuild(kNever, {trace.start});

    constexpr std::size_t kChunk = 4096;
    for (std::size_t t = 1; t <= cfg.max_rounds; ++t) {
        if (boundary.empty()) {
            // absorbing state: every later round is empty
            trace.new_per_round.resize(cfg.max_rounds + 1, 0);
            trace.rounds_elapsed = cfg.max_rounds;
            break;
        }
        const std::size_t chunks = (boundary.size() + kChunk - 1) / kChunk;
        std::vector<std::vector<Transmission>> parts(chunks);
        parallel_for(chunks, cfg.threads, [&](std::size_t c) {
            const std::size_t end = std::min(boundary.size(), (c + 1) * kChunk);
            for (std::size_t i = c * kChunk; i < end; ++i) evaluate(graph, informed, boundary[i], t, cfg.seed, parts[c], nullptr);
        });
        std::vector<Transmission> tx;
        for (auto& part : parts) tx.insert(tx.end(), part.begin(), part.end());
        const auto fresh = apply_transmissions(tx, informed);
        trace.transmissions.insert(trace.transmissions.end(), tx.begin(), tx.end());
        for (VertexId v : fresh) {
            for (VertexId w : graph.neighbours(v)) ++informed_nbrs[w];
        }
        record(t, fresh);
        if (stopped()) return trace;
        rebuild(t, fresh);
    }
    exhausted();
    return trace;
}

void write_trace_jsonl(const SpreadTrace& trace, std::ostream& out) {
    using nlohmann::json;
    std::size_t informed = 0;
    std::size_t ti = 0, si = 0;
    for (std::size_t t = 0; t < trace.new_per_round.size(); ++t) {
        informed += trace.new_per_round[t];
        out << json{{"round", t}, {"new", trace.new_per_round[t]}, {"informed", informed}}.dump() << '\n';
        for (; ti < trace.transmissions.size() && trace.transmissions[ti].round == t; ++ti) {
            const auto& e = trace.transmissions[ti];
            out << json{{"round", t}, {"edge", {e.from, e.to}}, {"kind", "transmit"}}.dump() << '\n';
        }
        for (; si < trace.selections.size() && trace.selections[si].round == t; ++si) {
            const auto& e = trace.selections[si];
            out << json{{"round", t}, {"edge", {e.chooser, e.chosen}}, {"kind", "select"}}.dump() << '\n';
        }
    }
}

double activation_probability(const Graph& graph, VertexId v, double c) {
    const double log_n = std::max(1.0, std::log(static_cast<double>(graph.size())));
    const auto deg = static_cast<double>(graph.degree(v));
    return deg == 0 ? 1.0 : std::min(1.0, c * log_n / deg);
}

namespace {

// Both coins of edge {u, v} in `round`; the key does not depend on orientation.
bool edge_activated(const Graph& graph, VertexId u, VertexId v, const RPrimeConfig& cfg, std::size_t round) {
    if (u > v) std::swap(u, v);
    CounterRng rng(cfg.seed, StreamTag::RPrimeCoin, (static_cast<std::uint64_t>(u) << 32) | v, round);
    const bool coin_u = rng.uniform() < activation_probability(graph, u, cfg.c);
    const bool coin_v = rng.uniform() < activation_probability(graph, v, cfg.c);
    return coin_u || coin_v;
}

std::vector<VertexId> spread_over(const std::vector<Edge>& edges, std::vector<char>& informed) {
    std::vector<VertexId> fresh;
    for (const auto& [u, v] : edges) {
        if (informed[u] != informed[v]) fresh.push_back(informed[u] ? v : u);
    }
    std::sort(fresh.begin(), fresh.end());
    fresh.erase(std::unique(fresh.begin(), fresh.end()), fresh.end());
    for (VertexId v : fresh) informed[v] = 1;
    return fresh;
}

std::vector<Edge> activate(const Graph& graph, const RPrimeConfig& cfg, std::size_t round) {
    std::vector<Edge> out;
    for (VertexId u = 0; u < graph.size(); ++u) {
        for (VertexId v : graph.neighbours(u)) {
            if (u < v && edge_activated(graph, u, v, cfg, round)) out.emplace_back(u, v);
        }
    }
    return out;
}

} // namespace

RPrimeRound rprime_round(const Graph& graph, std::vector<char>& informed, const RPrimeConfig& cfg, std::size_t round) {
    cfg.validate();
    RPrimeRound out;
    out.activated = activate(graph, cfg, round);
    out.newly_informed = spread_over(out.activated, informed);
    return out;
}

CoupledRound coupled_round(const Graph& graph, std::vector<char>& rprime_informed, std::vector<char>& r_informed,
                           const RPrimeConfig& cfg, std::size_t round) {
    cfg.validate();
    CoupledRound out;
    const auto activated = activate(graph, cfg, round);

    std::vector<Edge> picked;
    std::vector<VertexId> options;
    for (VertexId v = 0; v < graph.size(); ++v) {
        if (graph.degree(v) == 0) continue;
        options.clear();
        for (VertexId w : graph.neighbours(v)) {
            if (edge_activated(graph, v, w, cfg, round)) options.push_back(w);
        }
        if (options.empty()) {
            out.valid = false;
            continue;
        }
        CounterRng rng(cfg.seed, StreamTag::CouplingPick, v, round);
        const VertexId w = options[rng.below(options.size())];
        picked.emplace_back(std::min(v, w), std::max(v, w));
    }
    out.rprime_new = spread_over(activated, rprime_informed);
    out.r_new = spread_over(picked, r_informed);
    return out;
}

} // namespace girg
