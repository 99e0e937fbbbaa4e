#include "girg/report.hpp"

#include <string>

namespace girg {

using nlohmann::json;

namespace {

template <typename T>
json optional(const std::optional<T>& x) {
    return x ? json(*x) : json(nullptr);
}

std::string status_name(LeafStatus s) {
    switch (s) {
    case LeafStatus::Close: return "close";
    case LeafStatus::DepthCap: return "depth_cap";
    case LeafStatus::Failed: return "failed";
    }
    return "unknown";
}

} // namespace

json to_json(const ModelParams& p) {
    json j = {{"n", p.n},       {"d", p.d},         {"tau", p.tau},
              {"alpha", p.alpha}, {"theta", p.theta}, {"geometry", std::string(to_string(p.geometry))},
              {"seed", p.seed}};
    if (p.fixed_count) j["fixed_count"] = *p.fixed_count;
    return j;
}

json graph_summary(const Graph& g) {
    const auto giant = giant_component(g);
    json buckets = json::array();
    for (const auto& b : degree_stats(g)) {
        buckets.push_back({{"exponent", b.exponent}, {"mean_degree", b.mean_degree}, {"variance", b.variance}, {"count", b.count}});
    }
    return {{"params", to_json(g.params())},
            {"vertices", g.size()},
            {"edges", g.edge_count()},
            {"giant_size", giant.giant_size},
            {"components", giant.sizes.size()},
            {"degree_by_weight", buckets}};
}

json spread_summary(const SpreadTrace& t) {
    return {{"start", t.start},
            {"rounds", t.rounds_elapsed},
            {"informed", t.informed_count()},
            {"stop", std::string(to_string(t.stop))},
            {"new_per_round", t.new_per_round}};
}

json to_json(const RegimeReport& r) {
    json j = {{"tau", r.tau},
              {"alpha", r.alpha},
              {"label", std::string(to_string(r.label))},
              {"gamma_weak", r.gamma_weak},
              {"gamma_strong", r.gamma_strong},
              {"delta_weak", optional(r.delta_weak)},
              {"delta_strong", optional(r.delta_strong)},
              {"weak_precondition", r.weak_precondition},
              {"strong_precondition", r.strong_precondition},
              {"ultrafast_constant", optional(r.ultrafast_constant)},
              {"min_k", optional(r.min_k)},
              {"sup_beta", optional(r.sup_beta)},
              {"fitted_slow_exponent", optional(r.fitted_slow_exponent)}};
    j["mechanism"] = r.mechanism ? json(std::string(to_string(*r.mechanism))) : json(nullptr);
    return j;
}

json to_json(const CensusReport& r) {
    json counts = json::object();
    for (const auto& [level, c] : r.counts) counts[std::to_string(level)] = c;
    return {{"delta", r.delta}, {"counts", counts}, {"total_long_edges", r.total_long_edges}, {"n_realized", r.n_realized}};
}

json to_json(const PathResult& r) {
    json steps = json::array();
    for (const auto& s : r.steps) {
        json step = {{"from", s.from}, {"to", s.to}, {"via", s.via}, {"weight", s.weight}, {"distance", s.distance},
                     {"mechanism", std::string(to_string(s.mechanism))}};
        if (s.mechanism == PathMechanism::McdAlt) step["dim"] = s.dim;
        steps.push_back(step);
    }
    return {{"vertices", r.vertices},
            {"steps", steps},
            {"success", r.success},
            {"failure_step", optional(r.failure_step)},
            {"mechanism", std::string(to_string(r.mechanism))},
            {"beta", r.beta},
            {"eps", r.eps},
            {"target_weight", r.target_weight},
            {"low_cap", r.low_cap}};
}

json to_json(const Hierarchy& h) {
    json nodes = json::array();
    for (const auto& x : h.nodes) {
        json node = {{"y0", x.y0}, {"y1", x.y1}, {"level", x.level}};
        if (x.bridge) {
            node["bridge"] = {x.bridge->first, x.bridge->second};
            node["children"] = {x.child0, x.child1};
        } else {
            node["status"] = status_name(x.status);
            if (!x.failure.empty()) node["failure"] = x.failure;
        }
        nodes.push_back(node);
    }
    json gaps = json::array();
    for (int i : h.gaps()) gaps.push_back({h.nodes[static_cast<std::size_t>(i)].y0, h.nodes[static_cast<std::size_t>(i)].y1});
    json bridges = json::array();
    for (const auto& [a, b] : h.gap_bridges()) bridges.push_back({a, b});
    return {{"u", h.u},
            {"v", h.v},
            {"gamma", h.gamma},
            {"eps", h.eps},
            {"mode", std::string(to_string(h.mode))},
            {"stop_dist", h.stop_dist},
            {"r_cap", h.r_cap},
            {"z", h.z},
            {"depth", h.depth()},
            {"complete", h.complete()},
            {"nodes", nodes},
            {"gaps", gaps},
            {"gap_bridges", bridges}};
}

json to_json(const Verdict& v) { return {{"ok", v.ok}, {"problems", v.problems}}; }

json to_json(const FitReport& f) {
    json fits = json::array();
    for (const auto& m : f.fits) {
        fits.push_back({{"model", std::string(to_string(m.model))}, {"a", m.a}, {"exponent", m.exponent}, {"rss", m.rss}});
    }
    return {{"n", f.n}, {"medians", f.medians}, {"fits", fits}, {"winner", std::string(to_string(f.winner))}};
}

} // namespace girg
