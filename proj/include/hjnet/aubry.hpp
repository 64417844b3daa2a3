#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hjnet/discrete.hpp"
#include "hjnet/error.hpp"
#include "hjnet/graph.hpp"

namespace hjnet {

inline constexpr double default_eps_aubry = 1e-6;

struct AubryReport {
    std::vector<VertexId> members;
    std::vector<std::optional<Path>> witnesses;  // per vertex; set for members
    std::vector<double> margins;                 // per vertex: min over circuits of |U - beta|
    std::vector<double> epsilon;                 // per vertex tolerance used
    std::vector<EdgeId> removable_loops;         // loops l at x with U(x) < beta(l)

    bool contains(VertexId x) const { return std::find(members.begin(), members.end(), x) != members.end(); }
};

/// Vertices y with |U(y) - beta(zeta)| <= eps * max(1, |U(y)|) for some
/// circuit zeta based at y.
inline AubryReport detect_aubry(const EdgeMapTable& t, const OrientedGraph& g, const std::vector<double>& U,
                                double eps = default_eps_aubry, std::size_t cap = default_path_cap) {
    AubryReport r;
    const std::size_t n = g.vertex_count();
    r.witnesses.assign(n, std::nullopt);
    r.margins.assign(n, std::numeric_limits<double>::infinity());
    r.epsilon.assign(n, 0.0);
    for (VertexId y = 0; y < n; ++y) {
        r.epsilon[y] = eps * std::max(1.0, std::abs(U[y]));
        for (const Path& c : enumerate_circuits(g, y, cap)) {
            double b = beta_cycle(t, c);
            double gap = std::abs(U[y] - b);
            if (gap < r.margins[y]) {
                r.margins[y] = gap;
                r.witnesses[y] = c;
            }
            if (c.size() == 1 && U[y] < b - r.epsilon[y]) r.removable_loops.push_back(c[0]);
        }
        if (r.margins[y] <= r.epsilon[y]) r.members.push_back(y);
        else r.witnesses[y].reset();
    }
    if (r.members.empty()) throw Error(Errc::empty_aubry, "no vertex matches a circuit fixed point within tolerance");
    std::sort(r.removable_loops.begin(), r.removable_loops.end());
    r.removable_loops.erase(std::unique(r.removable_loops.begin(), r.removable_loops.end()), r.removable_loops.end());
    return r;
}

struct SpringCheck {
    bool ok = true;
    std::size_t from = 0;  // violated index pair, when !ok
    std::size_t to = 0;
    std::string diagnostic;
};

/// For a cycle with U(o(xi)) = beta(xi): every rotation has beta equal to U
/// at its base, and U propagates along every sub-path.
inline SpringCheck verify_spring(const EdgeMapTable& t, const std::vector<double>& U, const Path& xi, double tol) {
    SpringCheck out;
    const std::size_t m = xi.size();
    auto v = xi.vertices();
    for (std::size_t j = 0; j < m; ++j) {
        double b = beta_cycle(t, xi.rotated(j));
        if (std::abs(U[v[j]] - b) > tol) {
            out = {false, j, j, "rotation " + std::to_string(j) + ": U = " + std::to_string(U[v[j]]) +
                                    ", beta = " + std::to_string(b)};
            return out;
        }
    }
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t j = k + 1; j <= m; ++j) {
            double r = rho_path(t, xi.subpath(k, j - k), U[v[k]]);
            if (std::abs(U[v[j]] - r) > tol) {
                out = {false, k, j, "sub-path " + std::to_string(k) + ".." + std::to_string(j) +
                                        ": U = " + std::to_string(U[v[j]]) + ", rho = " + std::to_string(r)};
                return out;
            }
        }
    }
    return out;
}

struct AubryRepresentation {
    double value = std::numeric_limits<double>::infinity();
    std::optional<VertexId> source;
    std::optional<Path> path;     // empty when x is a member and the empty path wins
    bool along_path_ok = true;    // U(o(zeta_j)) = rho(U(y), zeta_1..zeta_{j-1}) on the argmin path
};

/// min over members y and simple paths zeta from y to x of rho(U(y), zeta);
/// the empty path contributes U(x) when x is a member.
inline AubryRepresentation aubry_representation(const EdgeMapTable& t, const OrientedGraph& g,
                                                const std::vector<double>& U, const AubryReport& report,
                                                VertexId x, double tol = 1e-8, std::size_t cap = default_path_cap) {
    AubryRepresentation out;
    if (report.contains(x)) {
        out.value = U[x];
        out.source = x;
    }
    for (VertexId y : report.members) {
        if (y == x) continue;
        for (const Path& p : enumerate_simple_paths_between(g, y, x, cap)) {
            double v = rho_path(t, p, U[y]);
            if (v < out.value) {
                out.value = v;
                out.source = y;
                out.path = p;
            }
        }
    }
    if (out.path) {
        auto verts = out.path->vertices();
        double acc = U[*out.source];
        for (std::size_t j = 0; j < out.path->size(); ++j) {
            acc = t.rho((*out.path)[j], acc);
            if (std::abs(U[verts[j + 1]] - acc) > tol) out.along_path_ok = false;
        }
    }
    return out;
}

}  // namespace hjnet
