#include "girg/graph_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "girg/errors.hpp"

namespace girg {

namespace {

std::string real(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    // Next line split into whitespace tokens; throws at end of input.
    std::vector<std::string> next(const char* expecting) {
        std::string line;
        if (!std::getline(in_, line)) throw ParseError(std::string("unexpected end of file, expected ") + expecting, line_no_ + 1);
        ++line_no_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ss(line);
        std::vector<std::string> toks;
        for (std::string t; ss >> t;) toks.push_back(t);
        return toks;
    }

    [[nodiscard]] std::size_t line() const { return line_no_; }

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line_no_); }

    template <typename T>
    T number(std::string_view tok, const char* what) const {
        T value{};
        const auto* end = tok.data() + tok.size();
        auto [ptr, ec] = std::from_chars(tok.data(), end, value);
        if (ec != std::errc() || ptr != end) fail(std::string("bad ") + what + " '" + std::string(tok) + "'");
        return value;
    }

private:
    std::istream& in_;
    std::size_t line_no_ = 0;
};

} // namespace

void save_graph(const Graph& graph, std::ostream& out) {
    const auto& p = graph.params();
    out << "#girg v1\n";
    out << "params n=" << real(p.n) << " d=" << p.d << " tau=" << real(p.tau) << " alpha=" << real(p.alpha)
        << " theta=" << real(p.theta) << " geom=" << to_string(p.geometry) << " seed=" << p.seed;
    if (p.fixed_count) out << " fixed=" << *p.fixed_count;
    out << "\n";
    out << "V " << graph.size() << "\n";
    for (VertexId v = 0; v < graph.size(); ++v) {
        out << v;
        for (int k = 0; k < graph.dim(); ++k) out << ' ' << real(graph.positions()(k, v));
        out << ' ' << real(graph.weight(v)) << "\n";
    }
    const auto edges = graph.edges();
    out << "E " << edges.size() << "\n";
    for (const auto& [u, v] : edges) out << u << ' ' << v << "\n";
}

void save_graph(const Graph& graph, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write " + path.string());
    save_graph(graph, out);
    if (!out) throw UsageError("write failed for " + path.string());
}

Graph load_graph(std::istream& in) {
    LineReader r(in);
    auto toks = r.next("header");
    if (toks.size() != 2 || toks[0] != "#girg") r.fail("missing '#girg v1' header");
    if (toks[1] != "v1") r.fail("unsupported graph format version '" + toks[1] + "'");

    toks = r.next("params line");
    if (toks.empty() || toks[0] != "params") r.fail("expected params line");
    ModelParams p;
    bool seen_n = false, seen_d = false;
    for (std::size_t i = 1; i < toks.size(); ++i) {
        const auto eq = toks[i].find('=');
        if (eq == std::string::npos) r.fail("malformed parameter '" + toks[i] + "'");
        const std::string key = toks[i].substr(0, eq);
        const std::string_view val = std::string_view(toks[i]).substr(eq + 1);
        if (key == "n") {
            p.n = r.number<double>(val, "n");
            seen_n = true;
        } else if (key == "d") {
            p.d = r.number<int>(val, "d");
            seen_d = true;
        } else if (key == "tau") {
            p.tau = r.number<double>(val, "tau");
        } else if (key == "alpha") {
            p.alpha = r.number<double>(val, "alpha");
        } else if (key == "theta") {
            p.theta = r.number<double>(val, "theta");
        } else if (key == "geom") {
            try {
                p.geometry = parse_geometry(val);
            } catch (const UsageError& e) {
                r.fail(e.what());
            }
        } else if (key == "seed") {
            p.seed = r.number<std::uint64_t>(val, "seed");
        } else if (key == "fixed") {
            p.fixed_count = r.number<std::int64_t>(val, "fixed count");
        } else {
            r.fail("unknown parameter '" + key + "'");
        }
    }
    if (!seen_n || !seen_d) r.fail("params line needs n and d");
    try {
        p.validate();
    } catch (const UsageError& e) {
        r.fail(e.what());
    }

    toks = r.next("vertex header");
    if (toks.size() != 2 || toks[0] != "V") r.fail("expected 'V <count>'");
    const auto count = r.number<std::size_t>(toks[1], "vertex count");
    if (count >= std::numeric_limits<VertexId>::max()) r.fail("vertex count too large");
    VertexSet vs;
    vs.positions.resize(p.d, static_cast<Eigen::Index>(count));
    vs.weights.resize(static_cast<Eigen::Index>(count));
    for (std::size_t v = 0; v < count; ++v) {
        toks = r.next("vertex line");
        if (toks.size() != static_cast<std::size_t>(p.d) + 2) r.fail("vertex line needs id, d coordinates and a weight");
        if (r.number<std::size_t>(toks[0], "vertex id") != v) r.fail("vertex ids must be 0..V-1 in order");
        for (int k = 0; k < p.d; ++k) {
            const double x = r.number<double>(toks[static_cast<std::size_t>(k) + 1], "coordinate");
            if (!(x >= 0.0 && x < 1.0)) r.fail("coordinate outside [0, 1)");
            vs.positions(k, static_cast<Eigen::Index>(v)) = x;
        }
        const double w = r.number<double>(toks.back(), "weight");
        if (!(w >= 1.0) || !std::isfinite(w)) r.fail("weight must be finite and >= 1");
        vs.weights(static_cast<Eigen::Index>(v)) = w;
    }

    toks = r.next("edge header");
    if (toks.size() != 2 || toks[0] != "E") r.fail("expected 'E <count>'");
    const auto m = r.number<std::size_t>(toks[1], "edge count");
    std::vector<Edge> edges;
    edges.reserve(std::min<std::size_t>(m, 1u << 24));
    for (std::size_t i = 0; i < m; ++i) {
        toks = r.next("edge line");
        if (toks.size() != 2) r.fail("edge line needs two ids");
        const auto u = r.number<VertexId>(toks[0], "vertex id");
        const auto v = r.number<VertexId>(toks[1], "vertex id");
        if (!(u < v)) r.fail("edge endpoints must satisfy u < v");
        if (v >= count) r.fail("edge endpoint out of range");
        if (!edges.empty() && !(edges.back() < Edge{u, v})) r.fail("edges must be sorted and distinct");
        edges.emplace_back(u, v);
    }
    std::size_t line = r.line();
    for (std::string rest; std::getline(in, rest);) {
        ++line;
        if (rest.find_first_not_of(" \t\r") != std::string::npos) throw ParseError("trailing content after edges", line);
    }
    return Graph(p, std::move(vs), edges);
}

Graph load_graph(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    return load_graph(in);
}

} // namespace girg
