#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hjnet/arc_solver.hpp"
#include "hjnet/error.hpp"
#include "hjnet/graph.hpp"
#include "hjnet/network.hpp"

namespace hjnet {

/// rho(alpha) = a * alpha + b with 0 < a < 1.
struct AffineMap {
    double a = 0.5;
    double b = 0.0;
};

/// Monotone samples of rho. Linear extrapolation with the first slope below
/// the first sample, constant above the last.
struct SampledMap {
    std::vector<double> alpha;
    std::vector<double> rho;
};

using NumericMap = std::shared_ptr<const ArcSolver>;

class EdgeMap {
public:
    static EdgeMap affine(double a, double b) {
        if (!(a > 0.0 && a < 1.0) || !std::isfinite(b))
            throw Error(Errc::invalid_argument, "affine edge map needs 0 < a < 1");
        return EdgeMap(AffineMap{a, b});
    }

    static EdgeMap sampled(std::vector<double> alpha, std::vector<double> rho) {
        if (alpha.size() < 2 || alpha.size() != rho.size())
            throw Error(Errc::invalid_argument, "sampled edge map needs matching arrays of length >= 2");
        for (std::size_t i = 0; i + 1 < alpha.size(); ++i) {
            double da = alpha[i + 1] - alpha[i];
            double dr = rho[i + 1] - rho[i];
            if (!(da > 0.0)) throw Error(Errc::invalid_argument, "sampled edge map abscissae must increase");
            if (dr < 0.0 || !(dr < da))
                throw Error(Errc::invalid_argument, "sampled edge map slopes must lie in [0,1)");
        }
        return EdgeMap(SampledMap{std::move(alpha), std::move(rho)});
    }

    static EdgeMap numeric(NumericMap solver) { return EdgeMap(std::move(solver)); }

    double operator()(double alpha) const {
        return std::visit([alpha](const auto& m) { return apply(m, alpha); }, rep_);
    }

    /// Unique fixed point of this single map.
    double fixed_point() const;

    /// A level at or below every value where rho(alpha) >= alpha.
    double lower_level() const {
        if (const auto* n = std::get_if<NumericMap>(&rep_)) return (*n)->subsolution_constant();
        return fixed_point() - 1.0;
    }

    /// A level C with rho(alpha) <= C for all alpha <= C.
    double upper_level() const {
        if (const auto* n = std::get_if<NumericMap>(&rep_)) return (*n)->alpha_over();
        return fixed_point();
    }

    const NumericMap* solver() const noexcept { return std::get_if<NumericMap>(&rep_); }
    const AffineMap* affine_params() const noexcept { return std::get_if<AffineMap>(&rep_); }

private:
    using Rep = std::variant<AffineMap, SampledMap, NumericMap>;
    explicit EdgeMap(Rep rep) : rep_(std::move(rep)) {}

    static double apply(const AffineMap& m, double alpha) { return m.a * alpha + m.b; }
    static double apply(const SampledMap& m, double alpha) {
        const auto& x = m.alpha;
        const auto& y = m.rho;
        if (alpha >= x.back()) return y.back();
        if (alpha <= x.front()) return y.front() + (alpha - x.front()) * (y[1] - y[0]) / (x[1] - x[0]);
        std::size_t i = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), alpha) - x.begin()) - 1;
        return y[i] + (alpha - x[i]) * (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
    }
    static double apply(const NumericMap& m, double alpha) { return m->rho(alpha); }

    Rep rep_;
};

namespace detail {

// Root of a strictly decreasing g on [lo, hi] with g(lo) >= 0 >= g(hi);
// Illinois steps with bisection safeguards.
template <class G>
double decreasing_root(G&& g, double lo, double hi, double tol) {
    double glo = g(lo);
    double ghi = g(hi);
    if (glo < 0.0 || ghi > 0.0)
        throw Error(Errc::bracket_failure, "g does not change sign on [" + std::to_string(lo) + ", " +
                                               std::to_string(hi) + "]: " + std::to_string(glo) + ", " +
                                               std::to_string(ghi));
    if (glo == 0.0) return lo;
    if (ghi == 0.0) return hi;
    int side = 0;
    for (int it = 0; it < 400 && hi - lo > tol; ++it) {
        double width = hi - lo;
        double x = lo + glo * (hi - lo) / (glo - ghi);
        if (!(x > lo && x < hi) || it % 4 == 3) x = 0.5 * (lo + hi);
        double gx = g(x);
        if (gx == 0.0) return x;
        if (gx > 0.0) {
            lo = x;
            glo = gx;
            if (side == 1) ghi *= 0.5;
            side = 1;
        } else {
            hi = x;
            ghi = gx;
            if (side == -1) glo *= 0.5;
            side = -1;
        }
        if (hi - lo > 0.5 * width && it % 4 == 2) {
            double mid = 0.5 * (lo + hi);
            double gm = g(mid);
            if (gm == 0.0) return mid;
            (gm > 0.0 ? lo : hi) = mid;
            (gm > 0.0 ? glo : ghi) = gm;
            side = 0;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

inline double EdgeMap::fixed_point() const {
    if (const auto* m = std::get_if<AffineMap>(&rep_)) return m->b / (1.0 - m->a);
    if (const auto* n = std::get_if<NumericMap>(&rep_)) {
        const ArcSolver& s = **n;
        return detail::decreasing_root([&](double a) { return s.rho(a) - a; }, s.subsolution_constant(),
                                       s.alpha_over() + 1.0, 1e-9);
    }
    const auto& m = std::get<SampledMap>(rep_);
    double lo = m.alpha.front();
    double g0 = apply(m, lo) - lo;
    if (g0 < 0.0) {
        double slope = (m.rho[1] - m.rho[0]) / (m.alpha[1] - m.alpha[0]);
        lo -= (-g0) / (1.0 - slope) + 1.0;
    }
    double hi = std::max(m.alpha.back(), m.rho.back()) + 1.0;
    return detail::decreasing_root([&](double a) { return apply(m, a) - a; }, lo, hi, 1e-12);
}

/// Edge maps for every oriented edge, plus the global subsolution level c*.
class EdgeMapTable {
public:
    explicit EdgeMapTable(std::vector<EdgeMap> maps) : maps_(std::move(maps)) {
        if (maps_.empty()) throw Error(Errc::invalid_argument, "edge map table is empty");
        c_star_ = std::numeric_limits<double>::infinity();
        start_ = -std::numeric_limits<double>::infinity();
        for (const auto& m : maps_) {
            c_star_ = std::min(c_star_, m.lower_level());
            start_ = std::max(start_, m.upper_level());
        }
    }

    /// Affine maps listed per oriented edge id.
    static EdgeMapTable affine(const OrientedGraph& g, const std::vector<AffineMap>& maps) {
        if (maps.size() != g.edge_count())
            throw Error(Errc::invalid_argument, "need one affine map per oriented edge");
        std::vector<EdgeMap> out;
        for (const auto& m : maps) out.push_back(EdgeMap::affine(m.a, m.b));
        return EdgeMapTable(std::move(out));
    }

    /// Arc-solver maps for a network; both orientations share a discretization.
    static EdgeMapTable numeric(const Network& net, std::optional<ArcDiscretization> disc = {}) {
        ArcDiscretization d = disc.value_or(net.solver.discretization());
        double lambda = net.solver.lambda;
        double floor = std::numeric_limits<double>::infinity();
        for (EdgeId e = 0; e < net.graph.edge_count(); ++e)
            floor = std::min(floor, -net.hamiltonian(e).max_at_zero_slope() / lambda);
        std::vector<EdgeMap> out(net.graph.edge_count(), EdgeMap::affine(0.5, 0.0));
        for (std::size_t pair = 0; pair < net.graph.pair_count(); ++pair) {
            auto fwd = std::make_shared<ArcSolver>(net.hamiltonians[pair], lambda, d, floor);
            auto bwd = std::make_shared<ArcSolver>(fwd->reversed());
            out[2 * pair] = EdgeMap::numeric(fwd);
            out[2 * pair + 1] = EdgeMap::numeric(bwd);
        }
        return EdgeMapTable(std::move(out));
    }

    std::size_t size() const noexcept { return maps_.size(); }
    const EdgeMap& operator[](EdgeId e) const { return maps_.at(e); }
    double rho(EdgeId e, double alpha) const { return maps_.at(e)(alpha); }

    /// Constant subsolution level c*.
    double c_star() const noexcept { return c_star_; }
    /// Constant supersolution level used to start value iteration.
    double start_level() const noexcept { return start_; }

    /// The arc solver behind an edge; throws for synthetic backends.
    const ArcSolver& solver(EdgeId e) const {
        const auto* s = maps_.at(e).solver();
        if (!s) throw Error(Errc::invalid_argument, "edge map is not backed by an arc solver");
        return **s;
    }

private:
    std::vector<EdgeMap> maps_;
    double c_star_ = 0.0;
    double start_ = 0.0;
};

/// rho(alpha, xi), folded along the path.
inline double rho_path(const EdgeMapTable& t, const Path& xi, double alpha) {
    for (EdgeId e : xi.edges()) alpha = t.rho(e, alpha);
    return alpha;
}

inline constexpr double beta_tol = 1e-9;

/// Unique fixed point of alpha -> rho(alpha, xi) on a cycle.
inline double beta_cycle(const EdgeMapTable& t, const Path& xi) {
    if (!xi.is_cycle()) throw Error(Errc::path_invalid, "beta needs a cycle");
    double hi = -std::numeric_limits<double>::infinity();
    for (EdgeId e : xi.edges()) hi = std::max(hi, t[e].upper_level());
    return detail::decreasing_root([&](double a) { return rho_path(t, xi, a) - a; }, t.c_star(), hi + 1.0,
                                   beta_tol);
}

struct DfeOptions {
    double tol = 1e-10;
    std::size_t max_iterations = 10'000'000;
    bool jacobi = false;
    std::optional<double> initial_level;
};

struct DiscreteSolution {
    std::vector<double> U;
    std::size_t iterations = 0;
    double residual = 0.0;
    double last_change = 0.0;

    double operator[](VertexId x) const { return U.at(x); }
};

/// (T W)(x) = min over e ending at x of rho(W(o(e)), e).
inline double dfe_operator(const EdgeMapTable& t, const OrientedGraph& g, const std::vector<double>& w, VertexId x) {
    double best = std::numeric_limits<double>::infinity();
    for (EdgeId e : g.in_edges(x)) best = std::min(best, t.rho(e, w[g.origin(e)]));
    return best;
}

inline std::vector<double> dfe_apply(const EdgeMapTable& t, const OrientedGraph& g, const std::vector<double>& w) {
    std::vector<double> out(g.vertex_count());
    for (VertexId x = 0; x < g.vertex_count(); ++x) out[x] = dfe_operator(t, g, w, x);
    return out;
}

inline double dfe_residual(const EdgeMapTable& t, const OrientedGraph& g, const std::vector<double>& w) {
    double r = 0.0;
    for (VertexId x = 0; x < g.vertex_count(); ++x) r = std::max(r, std::abs(w[x] - dfe_operator(t, g, w, x)));
    return r;
}

/// Monotone value iteration from a constant supersolution.
inline DiscreteSolution solve_dfe(const EdgeMapTable& t, const OrientedGraph& g, const DfeOptions& opt = {}) {
    if (t.size() != g.edge_count()) throw Error(Errc::invalid_argument, "edge map table does not match the graph");
    DiscreteSolution sol;
    sol.U.assign(g.vertex_count(), opt.initial_level.value_or(t.start_level()));
    std::vector<double> next(g.vertex_count());
    for (sol.iterations = 1; sol.iterations <= opt.max_iterations; ++sol.iterations) {
        double change = 0.0;
        if (opt.jacobi) {
            for (VertexId x = 0; x < g.vertex_count(); ++x) next[x] = dfe_operator(t, g, sol.U, x);
            for (VertexId x = 0; x < g.vertex_count(); ++x) change = std::max(change, std::abs(next[x] - sol.U[x]));
            sol.U.swap(next);
        } else {
            for (VertexId x = 0; x < g.vertex_count(); ++x) {
                double v = dfe_operator(t, g, sol.U, x);
                change = std::max(change, std::abs(v - sol.U[x]));
                sol.U[x] = v;
            }
        }
        sol.last_change = change;
        if (change < opt.tol) {
            sol.residual = dfe_residual(t, g, sol.U);
            if (sol.residual < opt.tol) return sol;
        }
    }
    sol.residual = dfe_residual(t, g, sol.U);
    throw Error(Errc::no_convergence, "value iteration stopped at residual " + std::to_string(sol.residual) +
                                          " after " + std::to_string(opt.max_iterations) + " iterations");
}

inline bool check_subsolution(const EdgeMapTable& t, const OrientedGraph& g, const std::vector<double>& w,
                              double slack = 1e-9) {
    for (VertexId x = 0; x < g.vertex_count(); ++x)
        if (w[x] > dfe_operator(t, g, w, x) + slack) return false;
    return true;
}

inline bool check_supersolution(const EdgeMapTable& t, const OrientedGraph& g, const std::vector<double>& w,
                                double slack = 1e-9) {
    for (VertexId x = 0; x < g.vertex_count(); ++x)
        if (w[x] < dfe_operator(t, g, w, x) - slack) return false;
    return true;
}

/// Minimum of beta over circuits based at x; +inf when there is none.
inline double circuit_f(const EdgeMapTable& t, const OrientedGraph& g, VertexId x,
                        std::size_t cap = default_path_cap) {
    double best = std::numeric_limits<double>::infinity();
    for (const Path& c : enumerate_circuits(g, x, cap)) best = std::min(best, beta_cycle(t, c));
    return best;
}

/// min(f(x), min over simple paths xi ending at x of rho(f(o(xi)), xi)), with
/// f the circuit minimum above: an upper bound for the solution.
inline double representation_U(const EdgeMapTable& t, const OrientedGraph& g, VertexId x,
                                std::size_t cap = default_path_cap) {
    std::vector<double> f(g.vertex_count());
    for (VertexId y = 0; y < g.vertex_count(); ++y) f[y] = circuit_f(t, g, y, cap);
    double best = f[x];
    for (const Path& p : enumerate_simple_paths(g, x, cap)) {
        if (!std::isfinite(f[p.origin()])) continue;
        best = std::min(best, rho_path(t, p, f[p.origin()]));
    }
    return best;
}

}  // namespace hjnet
