// topology.hpp
// Graphs whose edges are labeled by coin index, and their compilation into
// conditional shift operators S = sum_x sum_j |pi_j(x)><x| (x) |j><j|.
//
// Vertex indices are 0-based in memory and 1-based in the text format.

#pragma once

#include "coinspace.hpp"
#include "errors.hpp"
#include "state.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qwprobe {

enum class graph_kind { ring, enhanced, custom };

inline std::string_view to_string(graph_kind k) {
    switch (k) {
    case graph_kind::ring: return "ring";
    case graph_kind::enhanced: return "enhanced";
    case graph_kind::custom: return "custom";
    }
    return "?";
}

class graph {
public:
    using edge_key = std::pair<std::size_t, std::size_t>; // (source, coin index)

    graph(std::size_t n_vertices, std::size_t coin_dim, graph_kind kind,
          std::size_t horizon = 0)
        : n_vertices_(n_vertices), coin_dim_(coin_dim), kind_(kind), horizon_(horizon) {
        if (n_vertices == 0) throw invalid_size("graph needs at least one vertex");
        detail::require_dim(coin_dim);
    }

    std::size_t n_vertices() const noexcept { return n_vertices_; }
    std::size_t coin_dim() const noexcept { return coin_dim_; }
    graph_kind kind() const noexcept { return kind_; }
    /// Number of layers after the root; only meaningful for enhanced graphs.
    std::size_t horizon() const noexcept { return horizon_; }
    const std::map<edge_key, std::size_t>& edges() const noexcept { return edges_; }

    void add_edge(std::size_t source, std::size_t label, std::size_t target) {
        if (label >= coin_dim_)
            throw label_out_of_range("coin index " + std::to_string(label) +
                                     " >= D=" + std::to_string(coin_dim_));
        if (source >= n_vertices_ || target >= n_vertices_)
            throw index_out_of_range("edge endpoint outside [1, " +
                                     std::to_string(n_vertices_) + "]");
        if (!edges_.emplace(edge_key{source, label}, target).second)
            throw duplicate_edge("duplicate edge from vertex " + std::to_string(source + 1) +
                                 " with coin label " +
                                 std::to_string(coin_label(label, coin_dim_)));
    }

    std::optional<std::size_t> target(std::size_t source, std::size_t label) const {
        auto it = edges_.find({source, label});
        if (it == edges_.end()) return std::nullopt;
        return it->second;
    }

    /// A(target, source) counts the edges source -> target.
    Eigen::MatrixXi adjacency_matrix() const {
        const auto n = static_cast<Eigen::Index>(n_vertices_);
        Eigen::MatrixXi a = Eigen::MatrixXi::Zero(n, n);
        for (const auto& [key, tgt] : edges_)
            a(static_cast<Eigen::Index>(tgt), static_cast<Eigen::Index>(key.first)) += 1;
        return a;
    }

    bool operator==(const graph&) const = default;

private:
    std::size_t n_vertices_;
    std::size_t coin_dim_;
    graph_kind kind_;
    std::size_t horizon_;
    std::map<edge_key, std::size_t> edges_;
};

/// Ring of n sites: label -1 (index 0) moves x -> x-1, label +1 moves x -> x+1.
inline graph line_graph(std::size_t n) {
    if (n < 3) throw invalid_size("line graph needs N >= 3, got " + std::to_string(n));
    graph g(n, 2, graph_kind::ring);
    for (std::size_t x = 0; x < n; ++x) {
        g.add_edge(x, 0, (x + n - 1) % n);
        g.add_edge(x, 1, (x + 1) % n);
    }
    return g;
}

/// First vertex of layer `layer` (the root is layer 0).
inline std::size_t enhanced_layer_start(std::size_t layer, std::size_t dim) {
    return layer == 0 ? 0 : 1 + (layer - 1) * dim;
}

/// Layered graph on 1 + horizon * D vertices. Every vertex of layer l sends
/// coin index j to vertex j of layer l + 1, i.e. to 1 + l*D + j. For D = 2
/// this is: odd 1-based label x -> x+1 (coin -1), x+2 (coin +1); even x -> x+2, x+3.
inline graph enhanced_graph(std::size_t dim, std::size_t horizon) {
    detail::require_dim(dim);
    if (horizon < 1) throw invalid_size("enhanced graph needs t_max >= 1");
    graph g(1 + horizon * dim, dim, graph_kind::enhanced, horizon);
    for (std::size_t layer = 0; layer < horizon; ++layer) {
        const std::size_t width = layer == 0 ? 1 : dim;
        for (std::size_t k = 0; k < width; ++k) {
            const std::size_t src = enhanced_layer_start(layer, dim) + k;
            for (std::size_t j = 0; j < dim; ++j)
                g.add_edge(src, j, enhanced_layer_start(layer + 1, dim) + j);
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// Text format
//
//   # comment
//   D=2
//   kind=enhanced      (optional; checked against the layered rule)
//   N=5                (optional; defaults to the largest vertex used)
//   1 -1 2             (source, coin label, target; 1-based vertices)
// ---------------------------------------------------------------------------

namespace detail {

struct line_cursor {
    std::string_view text;
    std::size_t line;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    }
    bool done() {
        skip_ws();
        return pos >= text.size();
    }
    long long integer(const char* what) {
        skip_ws();
        std::size_t start = pos;
        if (pos < text.size() && text[pos] == '+') ++pos;
        long long value = 0;
        auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), value);
        if (ec != std::errc{} || ptr == text.data() + pos)
            throw parse_error(line, start + 1, std::string("expected ") + what);
        pos = static_cast<std::size_t>(ptr - text.data());
        if (pos < text.size() && text[pos] != ' ' && text[pos] != '\t')
            throw parse_error(line, pos + 1, std::string("trailing characters after ") + what);
        return value;
    }
};

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline graph layered_graph_from_edges(std::size_t dim, std::size_t n_vertices,
                                      const std::map<graph::edge_key, std::size_t>& edges) {
    if (n_vertices < 1 + dim || (n_vertices - 1) % dim != 0)
        throw invalid_size("kind=enhanced needs N = 1 + t_max * D vertices");
    auto expected = enhanced_graph(dim, (n_vertices - 1) / dim);
    if (expected.edges() != edges)
        throw invalid_argument("edges do not follow the layered enhanced rule");
    return expected;
}

} // namespace detail

inline graph parse_graph(std::string_view text) {
    std::optional<std::size_t> dim;
    std::optional<std::size_t> declared_n;
    graph_kind kind = graph_kind::custom;
    struct raw_edge {
        std::size_t line;
        std::size_t source, label, target;
    };
    std::vector<raw_edge> raw;
    std::size_t max_vertex = 0;

    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = std::min(text.find('\n', start), text.size());
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;

        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        const auto body = detail::trim(line);
        if (body.empty()) continue;
        const std::size_t col0 = static_cast<std::size_t>(body.data() - line.data()) + 1;

        if (auto eq = body.find('='); eq != std::string_view::npos) {
            const auto key = detail::trim(body.substr(0, eq));
            const auto value = detail::trim(body.substr(eq + 1));
            if (key == "kind") {
                if (value == "enhanced") kind = graph_kind::enhanced;
                else if (value == "custom") kind = graph_kind::custom;
                else throw parse_error(line_no, col0 + eq + 1, "kind must be 'enhanced' or 'custom'");
                continue;
            }
            if (key != "D" && key != "N")
                throw parse_error(line_no, col0, "unknown directive '" + std::string(key) + "'");
            detail::line_cursor cur{value, line_no};
            const auto v = cur.integer(key == "D" ? "coin dimension" : "vertex count");
            if (!cur.done()) throw parse_error(line_no, col0, "trailing characters");
            if (key == "D") {
                if (dim) throw parse_error(line_no, col0, "D declared twice");
                if (v < 2) throw parse_error(line_no, col0 + eq + 1, "D must be >= 2");
                dim = static_cast<std::size_t>(v);
            } else {
                if (v < 1) throw parse_error(line_no, col0 + eq + 1, "N must be >= 1");
                declared_n = static_cast<std::size_t>(v);
            }
            continue;
        }

        if (!dim) throw parse_error(line_no, col0, "edge before the 'D=<int>' header");
        detail::line_cursor cur{line, line_no};
        const auto src = cur.integer("source vertex");
        const auto label = cur.integer("coin label");
        const auto tgt = cur.integer("target vertex");
        if (!cur.done()) throw parse_error(line_no, cur.pos + 1, "expected end of line");
        if (src < 1 || tgt < 1) throw parse_error(line_no, col0, "vertex labels start at 1");

        std::size_t index = 0;
        try {
            index = coin_index(static_cast<int>(label), *dim);
        } catch (const label_out_of_range& e) {
            throw label_out_of_range("line " + std::to_string(line_no) + ": " + e.what());
        }
        raw.push_back({line_no, static_cast<std::size_t>(src - 1), index,
                       static_cast<std::size_t>(tgt - 1)});
        max_vertex = std::max({max_vertex, static_cast<std::size_t>(src),
                               static_cast<std::size_t>(tgt)});
    }
    if (!dim) throw parse_error(line_no, 1, "missing 'D=<int>' header");
    if (declared_n && *declared_n < max_vertex)
        throw invalid_size("N=" + std::to_string(*declared_n) + " but vertex " +
                           std::to_string(max_vertex) + " is used");
    const std::size_t n = declared_n.value_or(std::max<std::size_t>(max_vertex, 1));

    graph g(n, *dim, graph_kind::custom);
    for (const auto& e : raw) {
        try {
            g.add_edge(e.source, e.label, e.target);
        } catch (const duplicate_edge& err) {
            throw duplicate_edge("line " + std::to_string(e.line) + ": " + err.what());
        }
    }
    if (kind == graph_kind::enhanced) return detail::layered_graph_from_edges(*dim, n, g.edges());
    return g;
}

inline std::string to_dsl(const graph& g) {
    std::ostringstream out;
    out << "D=" << g.coin_dim() << '\n';
    if (g.kind() == graph_kind::enhanced) out << "kind=enhanced\n";
    out << "N=" << g.n_vertices() << '\n';
    for (const auto& [key, tgt] : g.edges()) {
        const int label = coin_label(key.second, g.coin_dim());
        out << key.first + 1 << ' ' << (label > 0 ? "+" : "") << label << ' ' << tgt + 1 << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Shift operator
// ---------------------------------------------------------------------------

/// Per-label position maps. perms[j][x] is the target of (x, j), or npos.
/// A vertex is active when every coin label has an edge; amplitude may only
/// be stepped from active vertices.
///
/// Ring and custom graphs must have injective label maps, which makes S an
/// isometry. Enhanced graphs merge: all vertices of a layer send label j to
/// the same vertex. S is then an isometry only on the subspace reachable from
/// the root, in which vertex k of any layer >= 1 carries coin k alone;
/// evolution checks states against that subspace.
struct shift_operator {
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    std::size_t n_positions = 0;
    std::size_t coin_dim = 0;
    graph_kind kind = graph_kind::custom;
    std::size_t horizon = 0;
    std::vector<std::vector<std::size_t>> perms;
    std::vector<bool> active;

    /// Layer of vertex x in an enhanced graph.
    std::size_t layer_of(std::size_t x) const { return x == 0 ? 0 : 1 + (x - 1) / coin_dim; }
};

inline shift_operator shift_from_graph(const graph& g) {
    shift_operator s;
    s.n_positions = g.n_vertices();
    s.coin_dim = g.coin_dim();
    s.kind = g.kind();
    s.horizon = g.horizon();
    s.perms.assign(s.coin_dim, std::vector<std::size_t>(s.n_positions, shift_operator::npos));
    for (const auto& [key, tgt] : g.edges()) s.perms[key.second][key.first] = tgt;

    s.active.assign(s.n_positions, true);
    for (std::size_t x = 0; x < s.n_positions; ++x)
        for (std::size_t j = 0; j < s.coin_dim; ++j)
            if (s.perms[j][x] == shift_operator::npos) s.active[x] = false;

    if (s.kind != graph_kind::enhanced) {
        for (std::size_t j = 0; j < s.coin_dim; ++j) {
            std::vector<std::size_t> source_of(s.n_positions, shift_operator::npos);
            for (std::size_t x = 0; x < s.n_positions; ++x) {
                const auto tgt = s.perms[j][x];
                if (tgt == shift_operator::npos) continue;
                if (source_of[tgt] != shift_operator::npos)
                    throw non_injective_label_map(
                        "vertices " + std::to_string(source_of[tgt] + 1) + " and " +
                        std::to_string(x + 1) + " both send coin label " +
                        std::to_string(coin_label(j, s.coin_dim)) + " to vertex " +
                        std::to_string(tgt + 1));
                source_of[tgt] = x;
            }
        }
    }
    return s;
}

} // namespace qwprobe
