#pragma once

// Independent reference computations shared by the test binaries.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "hjnet/hjnet.hpp"

namespace hjtest {

using namespace hjnet;

// H = |p| - c: u_alpha(s) = c/lambda + (alpha - c/lambda) e^{-lambda s} below saturation.
inline double closed_form_u(double c, double lambda, double alpha, double s) {
    double top = c / lambda;
    if (alpha >= top) return top;
    return top + (alpha - top) * std::exp(-lambda * s);
}

inline double closed_form_rho(double c, double lambda, double alpha) { return closed_form_u(c, lambda, alpha, 1.0); }

inline Hamiltonian abs_minus(double c) { return Hamiltonian::eikonal_power(1.0, SampledFunction(c)); }

inline Network single_pair(const Hamiltonian& h, double lambda = 1.0, std::size_t n = 2000) {
    SolverConfig cfg;
    cfg.lambda = lambda;
    cfg.n = n;
    return NetworkBuilder().vertex("x").vertex("y").edge("e", "x", "y", h).solver(cfg).build();
}

inline OrientedGraph two_vertex_graph() {
    GraphBuilder b;
    b.add_vertex("x");
    b.add_vertex("y");
    b.add_edge_pair("e", "x", "y");
    return std::move(b).build();
}

// Solves the linear system U(x) = a_{e_x} U(o(e_x)) + b_{e_x} for a fixed
// choice of incoming edge per vertex by Gaussian elimination.
inline std::vector<double> solve_policy(const OrientedGraph& g, const std::vector<AffineMap>& maps,
                                        const std::vector<EdgeId>& choice) {
    const std::size_t n = g.vertex_count();
    std::vector<std::vector<double>> m(n, std::vector<double>(n + 1, 0.0));
    for (VertexId x = 0; x < n; ++x) {
        EdgeId e = choice[x];
        m[x][x] += 1.0;
        m[x][g.origin(e)] -= maps[e].a;
        m[x][n] = maps[e].b;
    }
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
        std::swap(m[c], m[piv]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) continue;
            double f = m[r][c] / m[c][c];
            for (std::size_t k = c; k <= n; ++k) m[r][k] -= f * m[c][k];
        }
    }
    std::vector<double> u(n);
    for (std::size_t x = 0; x < n; ++x) u[x] = m[x][n] / m[x][x];
    return u;
}

// The affine DFE solution is the vertexwise minimum over all policies of the
// policy fixed points.
inline std::vector<double> brute_force_affine_dfe(const OrientedGraph& g, const std::vector<AffineMap>& maps) {
    const std::size_t n = g.vertex_count();
    std::vector<std::size_t> idx(n, 0);
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    while (true) {
        std::vector<EdgeId> choice(n);
        for (VertexId x = 0; x < n; ++x) choice[x] = g.in_edges(x)[idx[x]];
        auto u = solve_policy(g, maps, choice);
        for (VertexId x = 0; x < n; ++x) best[x] = std::min(best[x], u[x]);
        std::size_t k = 0;
        while (k < n && ++idx[k] == g.in_edges(k).size()) idx[k++] = 0;
        if (k == n) break;
    }
    return best;
}

// Random connected multigraph with loops and parallel pairs allowed.
inline OrientedGraph random_graph(std::mt19937& rng, std::size_t max_vertices = 6, std::size_t max_pairs = 8) {
    std::uniform_int_distribution<std::size_t> nv(1, max_vertices);
    std::size_t n = nv(rng);
    std::size_t min_pairs = std::max<std::size_t>(n - 1, 1);
    std::uniform_int_distribution<std::size_t> np(min_pairs, std::max(min_pairs, max_pairs));
    std::size_t pairs = np(rng);
    GraphBuilder b;
    for (std::size_t v = 0; v < n; ++v) b.add_vertex("v" + std::to_string(v));
    std::size_t made = 0;
    for (std::size_t v = 1; v < n; ++v) {
        std::uniform_int_distribution<std::size_t> pick(0, v - 1);
        std::size_t u = pick(rng);
        if (rng() % 2) b.add_edge_pair("p" + std::to_string(made++), "v" + std::to_string(u), "v" + std::to_string(v));
        else b.add_edge_pair("p" + std::to_string(made++), "v" + std::to_string(v), "v" + std::to_string(u));
    }
    std::uniform_int_distribution<std::size_t> any(0, n - 1);
    while (made < pairs) {
        std::size_t u = any(rng), v = any(rng);
        b.add_edge_pair("p" + std::to_string(made++), "v" + std::to_string(u), "v" + std::to_string(v));
    }
    return std::move(b).build();
}

inline std::vector<AffineMap> random_affine(std::mt19937& rng, const OrientedGraph& g) {
    std::uniform_real_distribution<double> a(0.05, 0.95);
    std::uniform_real_distribution<double> b(-3.0, 3.0);
    std::vector<AffineMap> out;
    for (EdgeId e = 0; e < g.edge_count(); ++e) out.push_back({a(rng), b(rng)});
    return out;
}

// Random analytic Hamiltonians with nonconstant data.
inline Hamiltonian random_analytic(std::mt19937& rng, bool tilted) {
    std::uniform_real_distribution<double> u(0.2, 1.5);
    std::uniform_real_distribution<double> d(-0.8, 0.8);
    std::vector<double> f{u(rng), u(rng), u(rng)};
    if (tilted) return Hamiltonian::tilted_quadratic(SampledFunction(std::vector<double>{d(rng), d(rng)}),
                                                     SampledFunction(f));
    std::uniform_real_distribution<double> m(1.0, 2.5);
    return Hamiltonian::eikonal_power(m(rng), SampledFunction(f));
}

// Random Hamiltonians whose minimum in p does not depend on s: variable drift
// or exponent data, constant potential.
inline Hamiltonian random_h4(std::mt19937& rng, bool tilted) {
    std::uniform_real_distribution<double> u(0.2, 1.5);
    std::uniform_real_distribution<double> d(-0.8, 0.8);
    if (tilted) return Hamiltonian::tilted_quadratic(SampledFunction(std::vector<double>{d(rng), d(rng), d(rng)}),
                                                     SampledFunction(u(rng)));
    std::uniform_real_distribution<double> m(1.0, 2.5);
    return Hamiltonian::eikonal_power(m(rng), SampledFunction(u(rng)));
}

inline double path_sigma(const Path& p, const std::vector<double>& sigma) {
    double s = 0.0;
    for (EdgeId e : p.edges()) s += sigma[e];
    return s;
}

}  // namespace hjtest
