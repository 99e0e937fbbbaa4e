#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "girg/model.hpp"

namespace girg {

inline constexpr std::size_t kNever = std::numeric_limits<std::size_t>::max();

enum class StopRule { Fraction, Target, MaxRounds };

// Why a run ended. Unreachable: the target lies outside the start's component.
enum class StopCause { Fraction, Target, MaxRounds, Unreachable };

[[nodiscard]] std::string_view to_string(StopCause c) noexcept;

struct SpreadConfig {
    std::optional<VertexId> start;   // empty: uniform vertex of the giant
    StopRule stop = StopRule::Fraction;
    double fraction = 0.5;            // of the giant component
    VertexId target = 0;
    std::size_t max_rounds = 100000;  // always enforced
    bool record_selections = false;
    std::uint64_t seed = 1;
    unsigned threads = 1;

    void validate() const;
};

struct Transmission {
    std::size_t round;
    VertexId from;  // informed before the round
    VertexId to;
};

struct SelectionEvent {
    std::size_t round;
    VertexId chooser;
    VertexId chosen;
};

struct SpreadTrace {
    VertexId start = 0;
    std::vector<std::size_t> informed_round;  // kNever if never informed
    std::size_t rounds_elapsed = 0;
    std::vector<std::size_t> new_per_round;   // index t: vertices informed in round t (index 0 is the start)
    std::vector<Transmission> transmissions;  // sorted by (round, to, from)
    std::vector<SelectionEvent> selections;   // sorted by (round, chooser); only with record_selections
    StopCause stop = StopCause::MaxRounds;

    [[nodiscard]] std::size_t informed_count() const;
    [[nodiscard]] bool informed_by(VertexId v, std::size_t round) const { return informed_round[v] <= round; }
};

struct RoundEvents {
    std::vector<VertexId> newly_informed;  // sorted
    std::vector<Transmission> transmissions;
    std::vector<SelectionEvent> selections;
};

/// The neighbour v selects in `round`; the stream depends only on (seed, v, round).
[[nodiscard]] VertexId select_neighbour(const Graph& graph, VertexId v, std::size_t round, std::uint64_t seed);

/// One synchronous push-pull round evaluated over every vertex. `informed` is
/// the round-start state and is updated in place. `order` optionally permutes
/// the iteration order; the result does not depend on it.
RoundEvents push_pull_round(const Graph& graph, std::vector<char>& informed, std::size_t round, std::uint64_t seed,
                            std::span<const VertexId> order = {});

/// Resolves cfg.start, drawing a uniform giant vertex when unset.
[[nodiscard]] VertexId choose_start(const Graph& graph, const SpreadConfig& cfg);

[[nodiscard]] SpreadTrace run_spread(const Graph& graph, const SpreadConfig& cfg);

void write_trace_jsonl(const SpreadTrace& trace, std::ostream& out);

struct RPrimeConfig {
    double c = 3.0;
    std::size_t rounds = 1;
    std::uint64_t seed = 1;

    void validate() const;
};

/// min(1, c log n / deg) with log the natural log of the vertex count, at least 1.
[[nodiscard]] double activation_probability(const Graph& graph, VertexId v, double c);

struct RPrimeRound {
    std::vector<Edge> activated;            // u < v, sorted
    std::vector<VertexId> newly_informed;   // sorted
};

/// One round of independent edge activation. `informed` is updated in place.
RPrimeRound rprime_round(const Graph& graph, std::vector<char>& informed, const RPrimeConfig& cfg, std::size_t round);

struct CoupledRound {
    std::vector<VertexId> rprime_new;
    std::vector<VertexId> r_new;
    bool valid = true;  // every non-isolated vertex had an activated incident edge
};

/// Advances R' and the coupled process R by one round. Each vertex with an
/// activated incident edge picks one of them uniformly and R transmits only
/// over picked edges.
CoupledRound coupled_round(const Graph& graph, std::vector<char>& rprime_informed, std::vector<char>& r_informed,
                           const RPrimeConfig& cfg, std::size_t round);

} // namespace girg
