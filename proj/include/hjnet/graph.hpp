#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hjnet/error.hpp"

namespace hjnet {

using VertexId = std::size_t;
using EdgeId = std::size_t;

inline constexpr std::size_t default_path_cap = 1'000'000;

/// The involution e -> -e. Oriented edges of one arc occupy slots 2k (declared
/// orientation) and 2k+1 (synthesized reverse).
constexpr EdgeId opposite(EdgeId e) noexcept { return e ^ EdgeId{1}; }
constexpr bool is_canonical(EdgeId e) noexcept { return (e & EdgeId{1}) == 0; }

/// Finite connected multigraph with a fixed-point-free edge involution.
/// Loops and parallel arcs are allowed. Immutable once built.
class OrientedGraph {
public:
    std::size_t vertex_count() const noexcept { return vertex_names_.size(); }
    std::size_t edge_count() const noexcept { return origin_.size(); }
    std::size_t pair_count() const noexcept { return pair_names_.size(); }

    VertexId origin(EdgeId e) const { return origin_.at(e); }
    VertexId terminal(EdgeId e) const { return origin_.at(opposite(e)); }
    bool is_loop(EdgeId e) const { return origin(e) == terminal(e); }

    const std::string& vertex_name(VertexId v) const { return vertex_names_.at(v); }
    const std::string& pair_name(std::size_t pair) const { return pair_names_.at(pair); }

    /// "e" for the declared orientation, "-e" for its reverse.
    std::string edge_name(EdgeId e) const {
        const auto& base = pair_names_.at(e / 2);
        return is_canonical(e) ? base : "-" + base;
    }

    std::optional<VertexId> find_vertex(std::string_view name) const {
        auto it = vertex_index_.find(std::string(name));
        if (it == vertex_index_.end()) return std::nullopt;
        return it->second;
    }

    std::optional<EdgeId> find_edge(std::string_view name) const {
        bool reversed = !name.empty() && name.front() == '-';
        if (reversed) name.remove_prefix(1);
        auto it = pair_index_.find(std::string(name));
        if (it == pair_index_.end()) return std::nullopt;
        return 2 * it->second + (reversed ? 1 : 0);
    }

    /// In-star -E_x: edges with terminal x, ascending.
    std::span<const EdgeId> in_edges(VertexId x) const { return in_.at(x); }
    /// Edges with origin x, ascending.
    std::span<const EdgeId> out_edges(VertexId x) const { return out_.at(x); }

private:
    friend class GraphBuilder;

    std::vector<std::string> vertex_names_;
    std::unordered_map<std::string, VertexId> vertex_index_;
    std::vector<std::string> pair_names_;
    std::unordered_map<std::string, std::size_t> pair_index_;
    std::vector<VertexId> origin_;
    std::vector<std::vector<EdgeId>> in_;
    std::vector<std::vector<EdgeId>> out_;
};

class GraphBuilder {
public:
    VertexId add_vertex(std::string name) {
        if (name.empty()) throw Error(Errc::graph_invalid, "empty vertex id");
        if (g_.vertex_index_.count(name))
            throw Error(Errc::graph_invalid, "duplicate vertex id '" + name + "'");
        VertexId v = g_.vertex_names_.size();
        g_.vertex_index_.emplace(name, v);
        g_.vertex_names_.push_back(std::move(name));
        return v;
    }

    /// Declares an arc from -> to; its reverse is created alongside.
    /// Returns the id of the declared orientation.
    EdgeId add_edge_pair(std::string name, std::string_view from, std::string_view to) {
        if (name.empty() || name.front() == '-')
            throw Error(Errc::graph_invalid, "edge id must be nonempty and not start with '-': '" + name + "'");
        if (g_.pair_index_.count(name))
            throw Error(Errc::graph_invalid, "duplicate edge id '" + name + "'");
        auto o = g_.find_vertex(from);
        auto t = g_.find_vertex(to);
        if (!o) throw Error(Errc::graph_invalid, "edge '" + name + "' references unknown vertex '" + std::string(from) + "'");
        if (!t) throw Error(Errc::graph_invalid, "edge '" + name + "' references unknown vertex '" + std::string(to) + "'");
        EdgeId e = g_.origin_.size();
        g_.pair_index_.emplace(name, g_.pair_names_.size());
        g_.pair_names_.push_back(std::move(name));
        g_.origin_.push_back(*o);
        g_.origin_.push_back(*t);
        return e;
    }

    /// Validates connectivity and nonempty in-stars.
    OrientedGraph build() && {
        OrientedGraph g = std::move(g_);
        const std::size_t n = g.vertex_count();
        if (n == 0) throw Error(Errc::graph_invalid, "graph has no vertices");
        g.in_.assign(n, {});
        g.out_.assign(n, {});
        for (EdgeId e = 0; e < g.edge_count(); ++e) {
            g.out_[g.origin(e)].push_back(e);
            g.in_[g.terminal(e)].push_back(e);
        }
        for (VertexId v = 0; v < n; ++v) {
            if (g.in_[v].empty())
                throw Error(Errc::graph_invalid, "vertex '" + g.vertex_name(v) + "' belongs to no arc");
        }
        std::vector<bool> seen(n, false);
        std::vector<VertexId> stack{0};
        seen[0] = true;
        while (!stack.empty()) {
            VertexId v = stack.back();
            stack.pop_back();
            for (EdgeId e : g.out_[v]) {
                VertexId w = g.terminal(e);
                if (!seen[w]) {
                    seen[w] = true;
                    stack.push_back(w);
                }
            }
        }
        for (VertexId v = 0; v < n; ++v) {
            if (!seen[v])
                throw Error(Errc::graph_invalid, "graph is not connected: '" + g.vertex_name(v) + "' unreachable");
        }
        return g;
    }

private:
    OrientedGraph g_;
};

/// Nonempty sequence of concatenated oriented edges. Keeps its vertex
/// sequence o(e_1), t(e_1), ..., t(e_M) so it can be manipulated without the graph.
class Path {
public:
    static Path from_edges(const OrientedGraph& g, std::vector<EdgeId> edges) {
        if (edges.empty()) throw Error(Errc::path_invalid, "path must contain at least one edge");
        std::vector<VertexId> vertices;
        vertices.reserve(edges.size() + 1);
        for (EdgeId e : edges) {
            if (e >= g.edge_count()) throw Error(Errc::path_invalid, "edge id out of range");
        }
        vertices.push_back(g.origin(edges.front()));
        for (std::size_t i = 0; i < edges.size(); ++i) {
            if (g.origin(edges[i]) != vertices.back())
                throw Error(Errc::path_invalid, "edges " + g.edge_name(edges[i - 1]) + " and " +
                                                    g.edge_name(edges[i]) + " are not concatenated");
            vertices.push_back(g.terminal(edges[i]));
        }
        return Path(std::move(edges), std::move(vertices));
    }

    std::span<const EdgeId> edges() const noexcept { return edges_; }
    /// Vertex sequence, length size()+1.
    std::span<const VertexId> vertices() const noexcept { return vertices_; }
    std::size_t size() const noexcept { return edges_.size(); }
    EdgeId operator[](std::size_t i) const { return edges_.at(i); }

    VertexId origin() const noexcept { return vertices_.front(); }
    VertexId terminal() const noexcept { return vertices_.back(); }
    bool is_cycle() const noexcept { return origin() == terminal(); }

    /// No repeated vertex except possibly origin == terminal.
    bool is_simple() const {
        std::vector<VertexId> seen(vertices_.begin() + 1, vertices_.end());
        std::sort(seen.begin(), seen.end());
        if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) return false;
        const VertexId o = origin();
        for (std::size_t i = 1; i + 1 < vertices_.size(); ++i) {
            if (vertices_[i] == o) return false;
        }
        return true;
    }

    bool is_circuit() const { return is_cycle() && is_simple(); }

    /// Edges [first, first+count).
    Path subpath(std::size_t first, std::size_t count) const {
        if (count == 0 || first + count > size()) throw Error(Errc::path_invalid, "subpath out of range");
        return Path(std::vector<EdgeId>(edges_.begin() + first, edges_.begin() + first + count),
                    std::vector<VertexId>(vertices_.begin() + first, vertices_.begin() + first + count + 1));
    }

    /// (-e_M, ..., -e_1).
    Path reversed() const {
        std::vector<EdgeId> e(edges_.rbegin(), edges_.rend());
        for (auto& x : e) x = opposite(x);
        return Path(std::move(e), std::vector<VertexId>(vertices_.rbegin(), vertices_.rend()));
    }

    /// The same cycle based at the origin of edge `start`.
    Path rotated(std::size_t start) const {
        if (!is_cycle()) throw Error(Errc::path_invalid, "only cycles can be rotated");
        if (start >= size()) throw Error(Errc::path_invalid, "rotation index out of range");
        std::vector<EdgeId> e;
        std::vector<VertexId> v;
        for (std::size_t i = 0; i < size(); ++i) {
            e.push_back(edges_[(start + i) % size()]);
            v.push_back(vertices_[(start + i) % size()]);
        }
        v.push_back(v.front());
        return Path(std::move(e), std::move(v));
    }

    friend bool operator==(const Path& a, const Path& b) { return a.edges_ == b.edges_; }
    friend bool operator<(const Path& a, const Path& b) { return a.edges_ < b.edges_; }

    friend Path concat(const Path& p, const Path& q);

private:
    Path(std::vector<EdgeId> e, std::vector<VertexId> v) : edges_(std::move(e)), vertices_(std::move(v)) {}

    std::vector<EdgeId> edges_;
    std::vector<VertexId> vertices_;
};

inline Path concat(const Path& p, const Path& q) {
    if (p.terminal() != q.origin()) throw Error(Errc::concat_mismatch, "terminal(p) != origin(q)");
    std::vector<EdgeId> e(p.edges_);
    e.insert(e.end(), q.edges_.begin(), q.edges_.end());
    std::vector<VertexId> v(p.vertices_);
    v.insert(v.end(), q.vertices_.begin() + 1, q.vertices_.end());
    return Path(std::move(e), std::move(v));
}

inline std::string format_path(const OrientedGraph& g, const Path& p) {
    std::string out;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) out += ',';
        out += g.edge_name(p[i]);
    }
    return out;
}

/// Parses "e1,-e2,e3"; throws PathInvalid on unknown ids or broken concatenation.
inline Path parse_path(const OrientedGraph& g, std::string_view text) {
    std::vector<EdgeId> edges;
    while (!text.empty()) {
        auto comma = text.find(',');
        auto token = text.substr(0, comma);
        auto e = g.find_edge(token);
        if (!e) throw Error(Errc::path_invalid, "unknown edge '" + std::string(token) + "'");
        edges.push_back(*e);
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return Path::from_edges(g, std::move(edges));
}

namespace detail {

// Depth-first enumeration of simple paths leaving `origin`, edges tried in
// ascending id order so emission is lexicographic. A path that returns to
// its origin is emitted as a cycle and not extended further.
template <class Visit>
void walk_simple_paths(const OrientedGraph& g, VertexId origin, std::size_t cap, std::size_t& count,
                       Visit&& visit) {
    std::vector<bool> on_path(g.vertex_count(), false);
    std::vector<EdgeId> edges;
    on_path[origin] = true;

    auto emit = [&]() {
        if (++count > cap)
            throw Error(Errc::enumeration_cap_exceeded,
                        "more than " + std::to_string(cap) + " simple paths explored");
        visit(edges);
    };

    auto dfs = [&](auto&& self, VertexId v) -> void {
        for (EdgeId e : g.out_edges(v)) {
            VertexId w = g.terminal(e);
            if (w == origin) {
                edges.push_back(e);
                emit();
                edges.pop_back();
                continue;
            }
            if (on_path[w]) continue;
            edges.push_back(e);
            on_path[w] = true;
            emit();
            self(self, w);
            on_path[w] = false;
            edges.pop_back();
        }
    };
    dfs(dfs, origin);
}

}  // namespace detail

/// Every simple path (any origin) whose terminal vertex is `target`.
inline std::vector<Path> enumerate_simple_paths(const OrientedGraph& g, VertexId target,
                                                std::size_t cap = default_path_cap) {
    std::vector<Path> out;
    std::size_t count = 0;
    for (VertexId o = 0; o < g.vertex_count(); ++o) {
        detail::walk_simple_paths(g, o, cap, count, [&](const std::vector<EdgeId>& edges) {
            if (g.terminal(edges.back()) == target) out.push_back(Path::from_edges(g, edges));
        });
    }
    return out;
}

/// Simple paths from `from` to `to`; when from == to these are the circuits based there.
inline std::vector<Path> enumerate_simple_paths_between(const OrientedGraph& g, VertexId from, VertexId to,
                                                        std::size_t cap = default_path_cap) {
    std::vector<Path> out;
    std::size_t count = 0;
    detail::walk_simple_paths(g, from, cap, count, [&](const std::vector<EdgeId>& edges) {
        if (g.terminal(edges.back()) == to) out.push_back(Path::from_edges(g, edges));
    });
    return out;
}

/// Circuits (simple cycles) based at `base`, in lexicographic order of edge ids.
inline std::vector<Path> enumerate_circuits(const OrientedGraph& g, VertexId base,
                                            std::size_t cap = default_path_cap) {
    return enumerate_simple_paths_between(g, base, base, cap);
}

}  // namespace hjnet
