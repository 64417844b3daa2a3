#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hjnet/aubry.hpp"
#include "hjnet/discrete.hpp"
#include "hjnet/error.hpp"
#include "hjnet/graph.hpp"
#include "hjnet/hamiltonian.hpp"
#include "hjnet/network.hpp"

namespace hjnet {

inline constexpr std::size_t default_quadrature_nodes = 1001;

/// Integral over [0,1] of max{p : H(s,p) <= a}, composite Simpson.
inline double sigma_edge(const Hamiltonian& h, double a, std::size_t nodes = default_quadrature_nodes) {
    if (!h.quasiconvex()) throw Error(Errc::quasiconvexity_required, "eikonal weights need (H3)");
    check_h4(h);
    if (nodes < 3) nodes = 3;
    if (nodes % 2 == 0) ++nodes;
    const std::size_t m = nodes - 1;
    const double dx = 1.0 / static_cast<double>(m);
    double sum = 0.0;
    for (std::size_t i = 0; i <= m; ++i) {
        double w = (i == 0 || i == m) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        sum += w * upper_root(h, static_cast<double>(i) * dx, a);
    }
    return sum * dx / 3.0;
}

inline std::vector<double> sigma_table(const std::vector<Hamiltonian>& per_edge, double a,
                                       std::size_t nodes = default_quadrature_nodes) {
    std::vector<double> out;
    out.reserve(per_edge.size());
    for (const auto& h : per_edge) out.push_back(sigma_edge(h, a, nodes));
    return out;
}

inline std::vector<Hamiltonian> edge_hamiltonians(const Network& net) {
    std::vector<Hamiltonian> out;
    for (EdgeId e = 0; e < net.graph.edge_count(); ++e) out.push_back(net.hamiltonian(e));
    return out;
}

/// Bellman-Ford from a virtual source joined to every vertex; true when some
/// circuit has weight below -slack.
inline bool has_negative_circuit(const OrientedGraph& g, const std::vector<double>& w, double slack = 1e-10) {
    std::vector<double> d(g.vertex_count(), 0.0);
    for (std::size_t round = 0; round <= g.vertex_count(); ++round) {
        bool changed = false;
        for (EdgeId e = 0; e < g.edge_count(); ++e) {
            double cand = d[g.origin(e)] + w[e];
            if (cand < d[g.terminal(e)] - slack) {
                d[g.terminal(e)] = cand;
                changed = true;
            }
        }
        if (!changed) return false;
    }
    return true;
}

inline constexpr double critical_tol = 1e-8;

/// Smallest a >= max_e a_gamma(e) with no negative circuit for sigma_a.
inline double critical_value(const OrientedGraph& g, const std::vector<Hamiltonian>& per_edge,
                             double tol = critical_tol) {
    if (per_edge.size() != g.edge_count()) throw Error(Errc::invalid_argument, "need one Hamiltonian per oriented edge");
    double lo = -std::numeric_limits<double>::infinity();
    for (const auto& h : per_edge) {
        check_h4(h);
        lo = std::max(lo, level_floor(h));
    }
    auto negative = [&](double a) { return has_negative_circuit(g, sigma_table(per_edge, a)); };
    if (!negative(lo)) return lo;
    double step = 1.0;
    double hi = lo + step;
    while (negative(hi)) {
        lo = hi;
        step *= 2.0;
        hi = lo + step;
        if (step > 1e12) throw Error(Errc::no_convergence, "critical value search diverged");
    }
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        (negative(mid) ? lo : hi) = mid;
    }
    return hi;
}

inline double critical_value(const Network& net, double tol = critical_tol) {
    return critical_value(net.graph, edge_hamiltonians(net), tol);
}

struct EikonalAubry {
    std::vector<VertexId> members;
    std::vector<std::optional<Path>> witnesses;  // per vertex
};

inline constexpr double default_sigma_tol = 1e-6;

/// Vertices on some circuit with |sigma| <= tol.
inline EikonalAubry eikonal_aubry(const OrientedGraph& g, const std::vector<double>& sigma,
                                  double tol = default_sigma_tol, std::size_t cap = default_path_cap) {
    EikonalAubry out;
    out.witnesses.assign(g.vertex_count(), std::nullopt);
    for (VertexId y = 0; y < g.vertex_count(); ++y) {
        for (const Path& c : enumerate_circuits(g, y, cap)) {
            double s = 0.0;
            for (EdgeId e : c.edges()) s += sigma[e];
            if (std::abs(s) <= tol) {
                out.members.push_back(y);
                out.witnesses[y] = c;
                break;
            }
        }
    }
    return out;
}

/// All-pairs path minima of sigma (Floyd-Warshall); d[x][x] = 0 for the empty path.
inline std::vector<std::vector<double>> sigma_distances(const OrientedGraph& g, const std::vector<double>& sigma) {
    const std::size_t n = g.vertex_count();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> d(n, std::vector<double>(n, inf));
    for (VertexId x = 0; x < n; ++x) d[x][x] = 0.0;
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        auto& c = d[g.origin(e)][g.terminal(e)];
        c = std::min(c, sigma[e]);
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
    return d;
}

/// V(x) = min over y in the trace domain of trace(y) + sigma-distance(y, x).
inline std::vector<double> solve_eikonal_dfe(const OrientedGraph& g, const std::vector<double>& sigma,
                                             const std::map<VertexId, double>& trace, double tol = 1e-9) {
    if (trace.empty()) throw Error(Errc::invalid_argument, "trace is empty");
    auto d = sigma_distances(g, sigma);
    for (const auto& [y, ty] : trace) {
        for (const auto& [z, tz] : trace) {
            if (tz - ty > d[y][z] + tol)
                throw Error(Errc::trace_incompatible, "trace difference between '" + g.vertex_name(y) + "' and '" +
                                                          g.vertex_name(z) + "' exceeds the path weight");
        }
    }
    std::vector<double> v(g.vertex_count(), std::numeric_limits<double>::infinity());
    for (VertexId x = 0; x < g.vertex_count(); ++x)
        for (const auto& [y, ty] : trace) v[x] = std::min(v[x], ty + d[y][x]);
    return v;
}

/// Largest violation of V(t(e)) <= V(o(e)) + sigma(e).
inline double eikonal_subsolution_defect(const OrientedGraph& g, const std::vector<double>& sigma,
                                         const std::vector<double>& v) {
    double worst = -std::numeric_limits<double>::infinity();
    for (EdgeId e = 0; e < g.edge_count(); ++e)
        worst = std::max(worst, v[g.terminal(e)] - v[g.origin(e)] - sigma[e]);
    return worst;
}

struct EikonalData {
    double critical_value = 0.0;
    std::vector<double> sigma;  // per oriented edge, at the critical level
    EikonalAubry aubry;
};

inline EikonalData eikonal_data(const Network& net, double sigma_tol = default_sigma_tol) {
    EikonalData out;
    auto hams = edge_hamiltonians(net);
    out.critical_value = critical_value(net.graph, hams);
    out.sigma = sigma_table(hams, out.critical_value);
    out.aubry = eikonal_aubry(net.graph, out.sigma, sigma_tol, net.solver.max_paths);
    return out;
}

struct SweepConfig {
    double probe = 0.0;  // alpha_0 for the edge-gap check, on the raw network at level 0
    std::optional<ArcDiscretization> discretization;
    DfeOptions dfe;
    double eps_aubry = default_eps_aubry;
    double sigma_tol = default_sigma_tol;
    double bound_tol = 1e-6;
};

struct EdgeGap {
    EdgeId edge = 0;
    bool admissible = false;  // probe <= alpha_under for this lambda
    double rho = 0.0;
    double gap = 0.0;         // rho(probe) - probe - sigma0(e)
};

struct SweepStep {
    double lambda = 0.0;
    std::vector<double> U;
    double residual = 0.0;
    std::size_t iterations = 0;
    std::vector<VertexId> aubry;
    bool included = false;  // A_lambda inside A
    std::vector<EdgeGap> gaps;
    double scaled_max = 0.0;  // lambda * max |U|
    bool scaled_bound_ok = false;
    double distance_to_v = 0.0;
};

struct SweepReport {
    double critical_value = 0.0;
    std::vector<double> sigma;   // normalized network, level 0
    std::vector<double> sigma0;  // raw network, level 0 (probe gaps); empty when unavailable
    std::vector<VertexId> aubry; // eikonal Aubry set
    std::vector<SweepStep> steps;
    std::optional<double> inclusion_threshold;
    std::vector<VertexId> limit_set;  // A_lambda at the smallest lambda
    std::vector<double> v;            // limit candidate
    double v_defect = 0.0;            // eikonal subsolution defect of v
    std::vector<std::string> warnings;
};

/// Runs the discounted problem on the critically normalized network for each
/// lambda and compares it with the eikonal data.
inline SweepReport lambda_sweep(const Network& raw, std::vector<double> lambdas, const SweepConfig& cfg = {}) {
    if (lambdas.empty()) throw Error(Errc::invalid_argument, "no lambda values");
    for (double l : lambdas)
        if (!(l > 0.0)) throw Error(Errc::invalid_argument, "lambda values must be positive");
    std::sort(lambdas.begin(), lambdas.end(), std::greater<>());

    SweepReport rep;
    const auto& g = raw.graph;
    auto raw_hams = edge_hamiltonians(raw);
    rep.critical_value = critical_value(g, raw_hams);
    Network net = raw.shifted(rep.critical_value);
    auto hams = edge_hamiltonians(net);
    rep.sigma = sigma_table(hams, 0.0);
    rep.aubry = eikonal_aubry(g, rep.sigma, cfg.sigma_tol, raw.solver.max_paths).members;

    bool probe_ok = true;
    for (const auto& h : raw_hams) probe_ok = probe_ok && level_floor(h) <= 1e-12;
    if (probe_ok) rep.sigma0 = sigma_table(raw_hams, 0.0);
    else rep.warnings.push_back("raw network has an edge with a_gamma > 0; edge gaps skipped");

    double sigma_max = 0.0;
    for (double s : rep.sigma) sigma_max = std::max(sigma_max, std::abs(s));

    for (double lambda : lambdas) {
        SweepStep step;
        step.lambda = lambda;
        Network nl = net;
        nl.solver.lambda = lambda;
        auto table = EdgeMapTable::numeric(nl, cfg.discretization);
        auto sol = solve_dfe(table, g, cfg.dfe);
        step.U = sol.U;
        step.residual = sol.residual;
        step.iterations = sol.iterations;
        step.aubry = detect_aubry(table, g, sol.U, cfg.eps_aubry, raw.solver.max_paths).members;
        step.included = std::all_of(step.aubry.begin(), step.aubry.end(), [&](VertexId y) {
            return std::find(rep.aubry.begin(), rep.aubry.end(), y) != rep.aubry.end();
        });
        for (double u : sol.U) step.scaled_max = std::max(step.scaled_max, lambda * std::abs(u));
        step.scaled_bound_ok = step.scaled_max <= 2.0 * lambda * sigma_max + cfg.bound_tol;

        if (probe_ok) {
            Network rl = raw;
            rl.solver.lambda = lambda;
            auto raw_table = EdgeMapTable::numeric(rl, cfg.discretization);
            for (EdgeId e = 0; e < g.edge_count(); ++e) {
                EdgeGap gap;
                gap.edge = e;
                gap.admissible = cfg.probe <= raw_table.solver(e).alpha_under();
                if (gap.admissible) {
                    gap.rho = raw_table.rho(e, cfg.probe);
                    gap.gap = gap.rho - cfg.probe - rep.sigma0[e];
                } else {
                    rep.warnings.push_back("probe above alpha_under on edge " + g.edge_name(e) +
                                           " at lambda " + std::to_string(lambda));
                }
                step.gaps.push_back(gap);
            }
        }
        rep.steps.push_back(std::move(step));
    }

    // Inclusion threshold: largest lambda such that inclusion holds there and
    // at every smaller lambda.
    for (auto it = rep.steps.rbegin(); it != rep.steps.rend() && it->included; ++it)
        rep.inclusion_threshold = it->lambda;

    const SweepStep& last = rep.steps.back();
    rep.limit_set = last.aubry;
    auto d = sigma_distances(g, rep.sigma);
    rep.v.assign(g.vertex_count(), std::numeric_limits<double>::infinity());
    for (VertexId x = 0; x < g.vertex_count(); ++x)
        for (VertexId y : rep.limit_set) rep.v[x] = std::min(rep.v[x], last.U[y] + d[y][x]);
    rep.v_defect = eikonal_subsolution_defect(g, rep.sigma, rep.v);
    for (auto& step : rep.steps) {
        for (VertexId x = 0; x < g.vertex_count(); ++x)
            step.distance_to_v = std::max(step.distance_to_v, std::abs(step.U[x] - rep.v[x]));
    }
    return rep;
}

}  // namespace hjnet
