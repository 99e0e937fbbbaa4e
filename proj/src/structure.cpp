#include "girg/structure.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <unordered_set>

#include "girg/errors.hpp"
#include "girg/regimes.hpp"

namespace girg {

double ball_of_influence_radius(double w, const ModelParams& params) {
    const double vol = std::min(1.0, w / params.n);
    const double d = params.d;
    if (params.geometry == GeometryKind::EuclideanInf) return std::pow(vol, 1.0 / d) / 2.0;
    // 1 - (1 - 2r)^d = vol
    return (1.0 - std::pow(1.0 - vol, 1.0 / d)) / 2.0;
}

bool is_strong_edge(const Vertex& u, const Vertex& v, const ModelParams& params) {
    const double r = dist(u.position, v.position, params.geometry);
    return u.weight * v.weight >= params.n * volume(r, params.d, params.geometry);
}

bool is_strong_edge(const Graph& graph, VertexId u, VertexId v) {
    return is_strong_edge(graph.vertex(u), graph.vertex(v), graph.params());
}

CensusReport long_edge_census(const Graph& graph, double delta) {
    if (!(delta > 0.0)) throw UsageError("census delta must be positive");
    CensusReport rep;
    rep.delta = delta;
    rep.n_realized = graph.size();
    if (graph.size() == 0) return rep;
    const double cutoff = std::pow(static_cast<double>(graph.size()), -delta);
    for (VertexId u = 0; u < graph.size(); ++u) {
        for (VertexId v : graph.neighbours(u)) {
            if (v <= u || graph.distance(u, v) < cutoff) continue;
            ++rep.counts[slowdown_level(graph.weight(u), graph.weight(v))];
            ++rep.total_long_edges;
        }
    }
    return rep;
}

std::string_view to_string(PathMechanism m) noexcept {
    switch (m) {
    case PathMechanism::Direct: return "direct";
    case PathMechanism::ViaLowWeight: return "via-low-weight";
    case PathMechanism::Relay3Hop: return "relay3hop";
    case PathMechanism::McdAlt: return "mcd-alt";
    }
    return "unknown";
}

PathMechanism parse_path_mechanism(std::string_view s) {
    for (auto m : {PathMechanism::Direct, PathMechanism::ViaLowWeight, PathMechanism::Relay3Hop,
                   PathMechanism::McdAlt}) {
        if (s == to_string(m)) return m;
    }
    throw UsageError("unknown path mechanism '" + std::string(s) + "'");
}

void PathConfig::validate() const {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw UsageError("beta must be positive");
    if (eps && !(*eps > 0.0)) throw UsageError("eps must be positive");
    if (!(low_cap >= 1.0)) throw UsageError("low weight cap must be >= 1");
    if (std::isnan(target_weight)) throw UsageError("target weight is NaN");
}

namespace {

double tenth_of_slack(double slack) { return slack > 0.0 ? 0.1 * slack : 0.01; }

} // namespace

double resolved_path_eps(const ModelParams& params, const PathConfig& cfg) {
    if (cfg.eps) return *cfg.eps;
    const double tau = params.tau;
    switch (cfg.mechanism) {
    case PathMechanism::Relay3Hop: return tenth_of_slack(1.0 / (tau * (tau - 2.0)) - (1.0 + cfg.beta));
    case PathMechanism::McdAlt: return tenth_of_slack(1.0 / (tau - 2.0) - 1.0);
    default: return tenth_of_slack(1.0 + params.alpha * (1.0 + cfg.beta) * (2.0 - tau));
    }
}

namespace {

struct Candidate {
    double dist;
    VertexId id;

    friend bool operator<(const Candidate& a, const Candidate& b) {
        return a.dist < b.dist || (a.dist == b.dist && a.id < b.id);
    }
};

struct Band {
    double lo;
    double hi;

    [[nodiscard]] bool contains(double x) const { return x >= lo && x <= hi; }
};

class PathSearch {
public:
    PathSearch(const Graph& g, const PathConfig& cfg)
        : g_(g), cfg_(cfg), eps_(resolved_path_eps(g.params(), cfg)) {}

    PathResult run(VertexId start) {
        PathResult res;
        res.mechanism = cfg_.mechanism;
        res.beta = cfg_.beta;
        res.eps = eps_;
        res.target_weight = cfg_.target_weight;
        res.low_cap = cfg_.low_cap;
        res.vertices.push_back(start);
        on_path_.insert(start);
        VertexId cur = start;
        while (g_.weight(cur) < cfg_.target_weight) {
            if (res.steps.size() >= cfg_.max_steps) {
                res.failure_step = res.steps.size();
                return res;
            }
            std::optional<PathStep> step;
            switch (cfg_.mechanism) {
            case PathMechanism::Direct: step = direct(cur); break;
            case PathMechanism::ViaLowWeight: step = via_low(cur); break;
            case PathMechanism::Relay3Hop: step = relay(cur); break;
            case PathMechanism::McdAlt: throw UsageError("mcd-alt paths come from mcd_alternating_path");
            }
            if (!step) {
                res.failure_step = res.steps.size();
                return res;
            }
            for (VertexId x : step->via) {
                res.vertices.push_back(x);
                on_path_.insert(x);
            }
            res.vertices.push_back(step->to);
            on_path_.insert(step->to);
            cur = step->to;
            res.steps.push_back(std::move(*step));
        }
        res.success = true;
        return res;
    }

private:
    [[nodiscard]] Band next_band(double w) const {
        const double lo = std::pow(w, 1.0 + cfg_.beta);
        return {lo, 2.0 * lo};
    }

    [[nodiscard]] Band annulus(double w) const {
        const auto& p = g_.params();
        const double inner = std::pow(p.n, -1.0 / p.d) *
                             std::pow(w, ((1.0 + cfg_.beta) * (p.tau - 1.0) + eps_) / p.d);
        return {inner, 2.0 * inner};
    }

    [[nodiscard]] bool fresh(VertexId x) const { return !on_path_.contains(x); }

    [[nodiscard]] bool next_ok(VertexId cur, VertexId x, const Band& band) const {
        const double wx = g_.weight(x);
        return fresh(x) && wx > g_.weight(cur) && band.contains(wx);
    }

    // Fresh low-weight common neighbour of a and b inside the ball of influence of `centre`.
    [[nodiscard]] std::optional<VertexId> low_common(VertexId centre, VertexId a, VertexId b) const {
        const double r = ball_of_influence_radius(g_.weight(centre), g_.params());
        std::vector<Candidate> found;
        const auto ra = g_.neighbours(a), rb = g_.neighbours(b);
        auto i = ra.begin();
        auto j = rb.begin();
        while (i != ra.end() && j != rb.end()) {
            if (*i < *j) {
                ++i;
            } else if (*j < *i) {
                ++j;
            } else {
                const VertexId y = *i;
                const double dy = g_.distance(centre, y);
                if (fresh(y) && g_.weight(y) <= cfg_.low_cap && dy <= r) found.push_back({dy, y});
                ++i;
                ++j;
            }
        }
        if (found.empty()) return std::nullopt;
        return std::min_element(found.begin(), found.end())->id;
    }

    [[nodiscard]] std::vector<Candidate> scan(VertexId cur, const std::function<bool(VertexId, double)>& keep) const {
        std::vector<Candidate> out;
        for (VertexId x = 0; x < g_.size(); ++x) {
            const double dx = g_.distance(cur, x);
            if (keep(x, dx)) out.push_back({dx, x});
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    PathStep make_step(VertexId cur, VertexId to, std::vector<VertexId> via) const {
        return {cur, to, std::move(via), g_.weight(to), g_.distance(cur, to), cfg_.mechanism, 0};
    }

    std::optional<PathStep> direct(VertexId cur) const {
        const double w = g_.weight(cur);
        const Band band = next_band(w), ring = annulus(w);
        std::vector<Candidate> cands;
        for (VertexId x : g_.neighbours(cur)) {
            const double dx = g_.distance(cur, x);
            if (next_ok(cur, x, band) && ring.contains(dx)) cands.push_back({dx, x});
        }
        if (cands.empty()) return std::nullopt;
        return make_step(cur, std::min_element(cands.begin(), cands.end())->id, {});
    }

    std::optional<PathStep> via_low(VertexId cur) const {
        const double w = g_.weight(cur);
        const Band band = next_band(w), ring = annulus(w);
        const auto cands = scan(cur, [&](VertexId x, double dx) { return next_ok(cur, x, band) && ring.contains(dx); });
        for (const auto& c : cands) {
            if (auto y = low_common(cur, cur, c.id)) return make_step(cur, c.id, {*y});
        }
        return std::nullopt;
    }

    std::optional<PathStep> relay(VertexId cur) const {
        const double w = g_.weight(cur);
        const Band band = next_band(w);
        const double x_mid = std::pow(w, g_.params().tau - 2.0 + eps_);
        const Band mid{x_mid, 2.0 * x_mid};
        const double r = ball_of_influence_radius(w, g_.params());
        const auto targets = scan(cur, [&](VertexId x, double) { return next_ok(cur, x, band); });
        for (const auto& t : targets) {
            std::vector<Candidate> relays;
            for (VertexId m : g_.neighbours(t.id)) {
                const double dm = g_.distance(cur, m);
                if (m != cur && fresh(m) && mid.contains(g_.weight(m)) && dm <= r) relays.push_back({dm, m});
            }
            std::sort(relays.begin(), relays.end());
            for (const auto& m : relays) {
                if (auto y = low_common(cur, cur, m.id); y && *y != t.id) return make_step(cur, t.id, {*y, m.id});
            }
        }
        return std::nullopt;
    }

    const Graph& g_;
    const PathConfig& cfg_;
    double eps_;
    std::unordered_set<VertexId> on_path_;
};

void require_vertex(const Graph& g, VertexId v) {
    if (v >= g.size()) throw UsageError("vertex " + std::to_string(v) + " does not exist");
}

void require_mcd(const Graph& g) {
    if (g.params().geometry != GeometryKind::MinComponent) {
        throw UsageError("plates are defined for the min-component geometry only");
    }
}

} // namespace

PathResult greedy_weight_path(const Graph& graph, VertexId start, const PathConfig& cfg) {
    require_vertex(graph, start);
    cfg.validate();
    if (cfg.mechanism == PathMechanism::McdAlt) return mcd_alternating_path(graph, start, cfg);
    return PathSearch(graph, cfg).run(start);
}

std::vector<VertexId> mcd_plate(const Graph& graph, VertexId v, int j, double scale) {
    require_mcd(graph);
    require_vertex(graph, v);
    if (j < 1 || j > graph.dim()) throw UsageError("plate dimension out of range");
    if (!(scale >= 1.0)) throw UsageError("plate scale must be >= 1");
    const double half_width = scale * graph.weight(v) / graph.params().n;
    const auto row = graph.positions().row(j - 1);
    const double xv = row(v);
    std::vector<VertexId> out;
    for (VertexId u = 0; u < graph.size(); ++u) {
        if (torus_coord_dist(row(u), xv) <= half_width) out.push_back(u);
    }
    return out;
}

PathResult mcd_alternating_path(const Graph& graph, VertexId start, const PathConfig& cfg) {
    require_mcd(graph);
    if (graph.dim() < 2) throw UsageError("alternating plate paths need d >= 2");
    require_vertex(graph, start);
    if (!(cfg.low_cap >= 1.0)) throw UsageError("low weight cap must be >= 1");

    PathResult res;
    res.mechanism = PathMechanism::McdAlt;
    res.beta = cfg.beta;
    res.target_weight = cfg.target_weight;
    res.low_cap = cfg.low_cap;
    res.vertices.push_back(start);
    std::unordered_set<VertexId> used{start};
    const double n = graph.params().n;
    auto coord = [&](VertexId x, int j) { return graph.positions()(j - 1, x); };

    VertexId cur = start;
    int j = 1;
    while (graph.weight(cur) < cfg.target_weight) {
        if (res.steps.size() >= cfg.max_steps) {
            res.failure_step = res.steps.size();
            return res;
        }
        const int other = 3 - j;
        const double wc = graph.weight(cur);
        std::optional<std::pair<VertexId, VertexId>> best;  // (low, heavy)
        for (VertexId y : graph.neighbours(cur)) {
            if (used.contains(y) || graph.weight(y) > cfg.low_cap) continue;
            if (torus_coord_dist(coord(y, j), coord(cur, j)) > wc / n) continue;
            for (VertexId t : graph.neighbours(y)) {
                const double wt = graph.weight(t);
                if (used.contains(t) || wt <= wc) continue;
                if (torus_coord_dist(coord(y, other), coord(t, other)) > wt / n) continue;
                if (!best) {
                    best = {y, t};
                    continue;
                }
                const double wb = graph.weight(best->second);
                if (wt > wb || (wt == wb && t < best->second) || (t == best->second && y < best->first)) best = {y, t};
            }
        }
        if (!best) {
            res.failure_step = res.steps.size();
            return res;
        }
        const auto [y, t] = *best;
        res.steps.push_back({cur, t, {y}, graph.weight(t), graph.distance(cur, t), PathMechanism::McdAlt, j});
        res.vertices.push_back(y);
        res.vertices.push_back(t);
        used.insert(y);
        used.insert(t);
        cur = t;
        j = other;
    }
    res.success = true;
    return res;
}

Verdict verify_path(const Graph& graph, const PathResult& path) {
    Verdict v;
    const auto& p = graph.params();
    constexpr double tol = 1e-12;
    auto in = [](double x, double lo, double hi) { return x >= lo * (1 - tol) && x <= hi * (1 + tol); };
    auto say = [&](std::size_t i, const std::string& what) { v.fail("step " + std::to_string(i) + ": " + what); };

    if (path.vertices.empty()) {
        v.fail("empty path");
        return v;
    }
    for (VertexId x : path.vertices) {
        if (x >= graph.size()) {
            v.fail("vertex out of range");
            return v;
        }
    }
    std::vector<VertexId> sorted = path.vertices;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) v.fail("path repeats a vertex");
    for (std::size_t i = 0; i + 1 < path.vertices.size(); ++i) {
        if (!graph.has_edge(path.vertices[i], path.vertices[i + 1])) {
            v.fail("hop " + std::to_string(i) + " is not an edge");
        }
    }

    // the vertex list must be the concatenation of the steps
    std::vector<VertexId> rebuilt{path.vertices.front()};
    for (const auto& s : path.steps) {
        if (s.from != rebuilt.back()) v.fail("steps are not chained");
        rebuilt.insert(rebuilt.end(), s.via.begin(), s.via.end());
        rebuilt.push_back(s.to);
    }
    if (rebuilt != path.vertices) v.fail("vertex list disagrees with the steps");

    const double last_w = graph.weight(path.vertices.back());
    if (path.success != (last_w >= path.target_weight)) v.fail("success flag disagrees with the final weight");
    if (path.success == path.failure_step.has_value()) v.fail("success and failure_step disagree");

    for (std::size_t i = 0; i < path.steps.size(); ++i) {
        const auto& s = path.steps[i];
        if (s.mechanism != path.mechanism) say(i, "mechanism differs from the path's");
        const double wf = graph.weight(s.from), wt = graph.weight(s.to);
        if (s.weight != wt) say(i, "recorded weight is wrong");
        if (s.distance != graph.distance(s.from, s.to)) say(i, "recorded distance is wrong");
        if (!(wt > wf)) say(i, "weight does not increase");
        if (wf >= path.target_weight) say(i, "continued past the target weight");

        if (s.mechanism == PathMechanism::McdAlt) {
            if (s.via.size() != 1) {
                say(i, "mcd step needs exactly one low-weight vertex");
                continue;
            }
            const int j = s.dim, other = 3 - j;
            if (j != (i % 2 == 0 ? 1 : 2)) say(i, "plate dimensions do not alternate");
            if (j < 1 || j > 2 || graph.dim() < 2) continue;
            const VertexId y = s.via[0];
            if (graph.weight(y) > path.low_cap) say(i, "intermediate vertex above the cap");
            const double cy = graph.positions()(j - 1, y), cf = graph.positions()(j - 1, s.from);
            if (std::min(std::abs(cy - cf), 1 - std::abs(cy - cf)) * p.n > wf * (1 + tol)) {
                say(i, "low vertex outside the plate of the current vertex");
            }
            const double oy = graph.positions()(other - 1, y), ot = graph.positions()(other - 1, s.to);
            if (std::min(std::abs(oy - ot), 1 - std::abs(oy - ot)) * p.n > wt * (1 + tol)) {
                say(i, "low vertex outside the plate of the next vertex");
            }
            continue;
        }

        const double band_lo = std::exp((1.0 + path.beta) * std::log(wf));
        if (!in(wt, band_lo, 2.0 * band_lo)) say(i, "next weight outside [w^(1+beta), 2w^(1+beta)]");
        // volume of the inner annulus radius in n-units: (n^(1/d) r)^d = w^((1+beta)(tau-1)+eps)
        const double scaled = std::pow(s.distance, p.d) * p.n;
        const double ring = std::exp(((1.0 + path.beta) * (p.tau - 1.0) + path.eps) * std::log(wf));
        const double boi_volume = std::min(1.0, wf / p.n);
        auto in_boi = [&](VertexId x) { return volume(graph.distance(s.from, x), p.d, p.geometry) <= boi_volume * (1 + tol); };

        switch (s.mechanism) {
        case PathMechanism::Direct:
            if (!s.via.empty()) say(i, "direct step has intermediates");
            if (!in(scaled, ring, std::pow(2.0, p.d) * ring)) say(i, "outside the annulus");
            break;
        case PathMechanism::ViaLowWeight:
            if (s.via.size() != 1) {
                say(i, "via step needs one intermediate");
                break;
            }
            if (!in(scaled, ring, std::pow(2.0, p.d) * ring)) say(i, "outside the annulus");
            if (graph.weight(s.via[0]) > path.low_cap) say(i, "intermediate above the cap");
            if (!in_boi(s.via[0])) say(i, "intermediate outside the ball of influence");
            break;
        case PathMechanism::Relay3Hop: {
            if (s.via.size() != 2) {
                say(i, "relay step needs two intermediates");
                break;
            }
            const double mid = std::exp((p.tau - 2.0 + path.eps) * std::log(wf));
            if (graph.weight(s.via[0]) > path.low_cap) say(i, "first intermediate above the cap");
            if (!in(graph.weight(s.via[1]), mid, 2.0 * mid)) say(i, "relay weight outside its band");
            if (!in_boi(s.via[0])) say(i, "first intermediate outside the ball of influence");
            if (!in_boi(s.via[1])) say(i, "relay outside the ball of influence");
            break;
        }
        case PathMechanism::McdAlt: break;
        }
    }
    return v;
}

std::string_view to_string(HierarchyMode m) noexcept { return m == HierarchyMode::Weak ? "weak" : "strong"; }

HierarchyMode parse_hierarchy_mode(std::string_view s) {
    if (s == "weak") return HierarchyMode::Weak;
    if (s == "strong") return HierarchyMode::Strong;
    throw UsageError("unknown hierarchy mode '" + std::string(s) + "' (expected weak|strong)");
}

void HierarchyConfig::validate() const {
    if (!(gamma > 0.0 && gamma < 1.0)) throw UsageError("gamma must lie in (0, 1)");
    if (!(stop_dist >= 1.0)) throw UsageError("stop_dist must be >= 1 in rescaled units");
    if (r_cap < 1 || r_cap > 40) throw UsageError("R_cap must lie in [1, 40]");
    if (eps && !(*eps > 0.0)) throw UsageError("eps must be positive");
    if (z < 2) throw UsageError("Z must be >= 2");
}

double resolved_hierarchy_eps(const ModelParams& params, const HierarchyConfig& cfg) {
    if (cfg.eps) return *cfg.eps;
    const double critical = cfg.mode == HierarchyMode::Weak ? gamma_weak(params.tau, params.alpha)
                                                            : gamma_strong(params.tau);
    return tenth_of_slack(cfg.gamma - critical);
}

bool Hierarchy::complete() const {
    return std::none_of(nodes.begin(), nodes.end(), [](const auto& x) { return !x.bridge && x.status == LeafStatus::Failed; });
}

int Hierarchy::depth() const {
    int d = 0;
    for (const auto& x : nodes) d = std::max(d, x.level + 1);
    return d;
}

namespace {

void in_order(const Hierarchy& h, int i, std::vector<int>& leaves, std::vector<Edge>& bridges) {
    const auto& node = h.nodes[static_cast<std::size_t>(i)];
    if (!node.bridge) {
        leaves.push_back(i);
        return;
    }
    in_order(h, node.child0, leaves, bridges);
    bridges.push_back(*node.bridge);
    in_order(h, node.child1, leaves, bridges);
}

} // namespace

std::vector<int> Hierarchy::gaps() const {
    std::vector<int> leaves;
    std::vector<Edge> bridges;
    if (!nodes.empty()) in_order(*this, 0, leaves, bridges);
    return leaves;
}

std::vector<Edge> Hierarchy::gap_bridges() const {
    std::vector<int> leaves;
    std::vector<Edge> bridges;
    if (!nodes.empty()) in_order(*this, 0, leaves, bridges);
    return bridges;
}

namespace {

class HierarchySearch {
public:
    HierarchySearch(const Graph& g, const HierarchyConfig& cfg, Hierarchy& h)
        : g_(g), cfg_(cfg), h_(h), scale_(std::pow(g.params().n, 1.0 / g.params().d)) {}

    void run() {
        used_ = {h_.u, h_.v};
        root_len_ = scaled(h_.u, h_.v);
        build(h_.u, h_.v, 0);
    }

private:
    [[nodiscard]] double scaled(VertexId a, VertexId b) const { return scale_ * g_.distance(a, b); }

    // Nominal pair length at `level`: L0^(gamma^level).
    [[nodiscard]] double nominal(int level) const { return std::pow(root_len_, std::pow(cfg_.gamma, level)); }

    int build(VertexId y0, VertexId y1, int level) {
        const int id = static_cast<int>(h_.nodes.size());
        h_.nodes.push_back({y0, y1, level, std::nullopt, -1, -1, LeafStatus::Close, {}});
        if (scaled(y0, y1) <= cfg_.stop_dist) return id;
        if (level + 1 >= cfg_.r_cap) {
            h_.nodes[id].status = LeafStatus::DepthCap;
            return id;
        }
        const auto bridge = find_bridge(y0, y1, level);
        if (!bridge) {
            h_.nodes[id].status = LeafStatus::Failed;
            h_.nodes[id].failure = "no bridge edge in the weight and distance bands at level " + std::to_string(level);
            return id;
        }
        used_.insert(bridge->first);
        used_.insert(bridge->second);
        h_.nodes[id].bridge = *bridge;
        const int c0 = build(y0, bridge->first, level + 1);
        const int c1 = build(bridge->second, y1, level + 1);
        h_.nodes[id].child0 = c0;
        h_.nodes[id].child1 = c1;
        return id;
    }

    std::optional<Edge> find_bridge(VertexId y0, VertexId y1, int level) const {
        const auto& p = g_.params();
        const double len = nominal(level);
        const double outer = nominal(level + 1), inner = outer / 2.0;
        const double eps = h_.eps;
        Band low{}, high{};
        if (cfg_.mode == HierarchyMode::Weak) {
            low = {1.0, 2.0 * std::pow(len, eps)};
            const double hi = std::pow(len, p.d * cfg_.gamma / (p.tau - 1.0) - eps);
            high = {hi, 2.0 * hi};
        } else {
            const double w_max = std::pow(len, p.d * cfg_.gamma / (p.tau - 1.0));
            const double w_mid = std::pow(len, p.d) / w_max;
            low = {w_mid, 2.0 * w_mid};
            high = {w_max, 2.0 * w_max};
        }
        std::vector<Candidate> far;
        for (VertexId b = 0; b < g_.size(); ++b) {
            if (used_.contains(b) || !high.contains(g_.weight(b))) continue;
            const double db = scaled(b, y1);
            if (db >= inner && db <= outer) far.push_back({db, b});
        }
        std::sort(far.begin(), far.end());
        for (const auto& b : far) {
            std::vector<Candidate> near;
            for (VertexId a : g_.neighbours(b.id)) {
                if (used_.contains(a) || !low.contains(g_.weight(a))) continue;
                const double da = scaled(a, y0);
                if (da >= inner && da <= outer) near.push_back({da, a});
            }
            if (!near.empty()) return Edge{std::min_element(near.begin(), near.end())->id, b.id};
        }
        return std::nullopt;
    }

    const Graph& g_;
    const HierarchyConfig& cfg_;
    Hierarchy& h_;
    double scale_;
    double root_len_ = 0;
    std::unordered_set<VertexId> used_;
};

} // namespace

Hierarchy find_hierarchy(const Graph& graph, VertexId u, VertexId v, const HierarchyConfig& cfg) {
    require_vertex(graph, u);
    require_vertex(graph, v);
    if (u == v) throw UsageError("hierarchy endpoints must differ");
    cfg.validate();
    Hierarchy h;
    h.u = u;
    h.v = v;
    h.gamma = cfg.gamma;
    h.eps = resolved_hierarchy_eps(graph.params(), cfg);
    h.mode = cfg.mode;
    h.stop_dist = cfg.stop_dist;
    h.r_cap = cfg.r_cap;
    h.z = cfg.z;
    HierarchySearch(graph, cfg, h).run();
    return h;
}

Verdict verify_hierarchy(const Graph& graph, const Hierarchy& h) {
    Verdict out;
    const auto& p = graph.params();
    constexpr double tol = 1e-9;
    if (h.nodes.empty()) {
        out.fail("no nodes");
        return out;
    }
    const std::size_t count = h.nodes.size();
    auto vertex_ok = [&](VertexId x) { return x < graph.size(); };
    const double s = std::pow(p.n, 1.0 / p.d);
    auto length = [&](VertexId a, VertexId b) { return s * graph.distance(a, b); };
    const auto& root = h.nodes[0];
    if (root.y0 != h.u || root.y1 != h.v || root.level != 0) out.fail("root is not the pair (u, v) at level 0");
    if (!vertex_ok(h.u) || !vertex_ok(h.v)) {
        out.fail("endpoint out of range");
        return out;
    }
    const double log_l0 = std::log(length(h.u, h.v));

    // every node reached exactly once from the root
    std::vector<int> seen(count, 0);
    std::vector<std::size_t> stack{0};
    while (!stack.empty()) {
        const std::size_t i = stack.back();
        stack.pop_back();
        if (seen[i]++) {
            out.fail("node " + std::to_string(i) + " reached twice");
            return out;
        }
        const auto& x = h.nodes[i];
        if (!vertex_ok(x.y0) || !vertex_ok(x.y1)) {
            out.fail("node " + std::to_string(i) + " has an out-of-range vertex");
            return out;
        }
        if (!x.bridge) continue;
        for (int c : {x.child0, x.child1}) {
            if (c < 0 || static_cast<std::size_t>(c) >= count) {
                out.fail("node " + std::to_string(i) + " has a dangling child");
                return out;
            }
            stack.push_back(static_cast<std::size_t>(c));
        }
    }
    if (std::count(seen.begin(), seen.end(), 0) != 0) out.fail("unreachable nodes");

    std::map<VertexId, int> incidence;
    const std::string tag = "node ";
    for (std::size_t i = 0; i < count; ++i) {
        const auto& x = h.nodes[i];
        const std::string at = tag + std::to_string(i) + ": ";
        if (x.level + 1 > h.r_cap) out.fail(at + "deeper than R_cap");
        const double len = length(x.y0, x.y1);
        // H1 against the root length, plus the halved lower bound below the root
        const double bound = std::exp(std::pow(h.gamma, x.level) * log_l0);
        if (len > bound * (1 + tol)) out.fail(at + "H1 upper bound violated");
        if (x.level > 0 && len < 0.5 * bound * (1 - tol)) out.fail(at + "H1 lower bound violated");

        if (!x.bridge) {
            if (x.status == LeafStatus::Close && len > h.stop_dist) out.fail(at + "gap marked close but too long");
            if (x.status == LeafStatus::DepthCap && x.level + 1 != h.r_cap) out.fail(at + "depth cap at wrong level");
            if (x.status == LeafStatus::Failed && x.failure.empty()) out.fail(at + "failure without a reason");
            continue;
        }
        if (len <= h.stop_dist) out.fail(at + "split a pair already within stop_dist");
        const auto [a, b] = *x.bridge;
        if (!vertex_ok(a) || !vertex_ok(b)) {
            out.fail(at + "bridge vertex out of range");
            continue;
        }
        if (!graph.has_edge(a, b)) out.fail(at + "H2: bridge is not an edge");
        ++incidence[a];
        ++incidence[b];
        const auto& c0 = h.nodes[static_cast<std::size_t>(x.child0)];
        const auto& c1 = h.nodes[static_cast<std::size_t>(x.child1)];
        if (c0.y0 != x.y0 || c0.y1 != a || c1.y0 != b || c1.y1 != x.y1) out.fail(at + "children do not split at the bridge");
        if (c0.level != x.level + 1 || c1.level != x.level + 1) out.fail(at + "child levels are wrong");

        const double log_len = std::pow(h.gamma, x.level) * log_l0;  // log of the nominal length
        const double wa = graph.weight(a), wb = graph.weight(b);
        auto within = [&](double w, double log_lo) {
            const double lw = std::log(w);
            return lw >= log_lo - tol && lw <= log_lo + std::log(2.0) + tol;
        };
        if (h.mode == HierarchyMode::Weak) {
            if (!(wa >= 1.0 && std::log(wa) <= h.eps * log_len + std::log(2.0) + tol)) {
                out.fail(at + "low endpoint outside [1, 2 L^eps]");
            }
            if (!within(wb, (p.d * h.gamma / (p.tau - 1.0) - h.eps) * log_len)) out.fail(at + "high endpoint outside its band");
        } else {
            const double log_max = p.d * h.gamma / (p.tau - 1.0) * log_len;
            if (!within(wb, log_max)) out.fail(at + "w_max endpoint outside its band");
            if (!within(wa, p.d * log_len - log_max)) out.fail(at + "w_mid endpoint outside its band");
            if (std::log(wa) + std::log(wb) < p.d * log_len - tol) out.fail(at + "w_mid * w_max < L^d");
        }
    }
    for (const auto& [x, c] : incidence) {
        if (c > 1) out.fail("H4: vertex " + std::to_string(x) + " lies on " + std::to_string(c) + " bridges");
    }
    if (incidence.contains(h.u) || incidence.contains(h.v)) out.fail("a bridge touches an endpoint of the root pair");
    return out;
}

TimingReport verify_hierarchy_timing(const Hierarchy& h, const SpreadTrace& trace) {
    if (trace.selections.empty()) throw UsageError("timing check needs a trace recorded with selections");
    TimingReport rep;
    rep.edges = h.gap_bridges();
    for (std::size_t j = 0; j < rep.edges.size(); ++j) {
        const auto [a, b] = rep.edges[j];
        const auto block = edge_block(h.z, j);
        const auto lo = static_cast<std::size_t>(block.lo), hi = static_cast<std::size_t>(block.hi);
        auto it = std::lower_bound(trace.selections.begin(), trace.selections.end(), lo,
                                   [](const SelectionEvent& e, std::size_t r) { return e.round < r; });
        bool hit = false;
        for (; it != trace.selections.end() && it->round <= hi; ++it) {
            if ((it->chooser == a && it->chosen == b) || (it->chooser == b && it->chosen == a)) {
                hit = true;
                break;
            }
        }
        rep.passed.push_back(hit);
        rep.ok = rep.ok && hit;
    }
    return rep;
}

bool alternating_check(const Graph& graph, std::span<const VertexId> path, std::size_t k) {
    for (VertexId x : path) require_vertex(graph, x);
    bool ok = true;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const VertexId a = path[i], b = path[i + 1];
        if (!graph.has_edge(a, b)) {
            throw UsageError("path hop " + std::to_string(i) + " is not an edge");
        }
        if (std::min(graph.degree(a), graph.degree(b)) > k) ok = false;
    }
    return ok;
}

} // namespace girg
