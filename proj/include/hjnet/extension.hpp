#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "hjnet/arc_solver.hpp"
#include "hjnet/discrete.hpp"
#include "hjnet/error.hpp"
#include "hjnet/graph.hpp"

namespace hjnet {

struct ArcExtension {
    EdgeId edge = 0;  // canonical orientation
    ArcProfile profile;
    double trace_defect = 0.0;  // max(|u(0) - U(o)|, |u(1) - U(t)|)
    Sandwich sandwich{};
    double interior_residual = 0.0;
};

/// Solves every arc as a two-point problem with the vertex values of U.
inline std::vector<ArcExtension> extend(const EdgeMapTable& t, const OrientedGraph& g, const std::vector<double>& U,
                                        double tol_bc = default_tol_bc) {
    std::vector<ArcExtension> out;
    for (EdgeId e = 0; e < g.edge_count(); e += 2) {
        const ArcSolver& fwd = t.solver(e);
        const ArcSolver& bwd = t.solver(opposite(e));
        double alpha = U[g.origin(e)];
        double beta = U[g.terminal(e)];
        ArcExtension x;
        x.edge = e;
        x.profile = solve_dirichlet_pair(fwd, bwd, alpha, beta, tol_bc);
        x.trace_defect = std::max(std::abs(x.profile.front() - alpha), std::abs(x.profile.back() - beta));
        x.sandwich = sandwich_defect(x.profile, fwd.solve_ualpha(alpha), bwd.solve_ualpha(beta), alpha, beta);
        x.interior_residual = fwd.interior_residual(x.profile);
        out.push_back(std::move(x));
    }
    return out;
}

struct VertexWitness {
    VertexId vertex = 0;
    std::optional<EdgeId> edge;
    double deviation = std::numeric_limits<double>::infinity();  // min over in-edges of |U(x) - rho|
};

struct VertexReport {
    std::vector<VertexWitness> vertices;
    bool all_witnessed() const {
        return std::all_of(vertices.begin(), vertices.end(), [](const auto& w) { return w.edge.has_value(); });
    }
};

/// For each vertex, an incoming edge attaining the minimum of the discrete
/// equation within `tol`.
inline VertexReport verify_vertex_conditions(const EdgeMapTable& t, const OrientedGraph& g,
                                             const std::vector<double>& U, double tol) {
    VertexReport r;
    for (VertexId x = 0; x < g.vertex_count(); ++x) {
        VertexWitness w;
        w.vertex = x;
        for (EdgeId e : g.in_edges(x)) {
            double dev = std::abs(U[x] - t.rho(e, U[g.origin(e)]));
            if (dev < w.deviation) {
                w.deviation = dev;
                if (dev <= tol) w.edge = e;
            }
        }
        if (w.deviation > tol) w.edge.reset();
        r.vertices.push_back(w);
    }
    return r;
}

}  // namespace hjnet
