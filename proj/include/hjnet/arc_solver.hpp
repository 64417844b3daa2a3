#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hjnet/error.hpp"
#include "hjnet/hamiltonian.hpp"

namespace hjnet {

struct ArcDiscretization {
    std::size_t n = 2000;          // intervals; n + 1 nodes
    double tol = 1e-10;            // sup-norm scheme residual
    std::size_t max_sweeps = 1'000'000;
    double theta = 0.0;            // 0 selects it from the Hamiltonian
    double memo_step = 0.0;        // > 0 enables interpolated rho tables

    double h() const noexcept { return 1.0 / static_cast<double>(n); }
    double s(std::size_t i) const noexcept { return static_cast<double>(i) / static_cast<double>(n); }
};

enum class BoundaryKind { state_constraint, dirichlet_leq, dirichlet_exact };

struct BoundaryCondition {
    BoundaryKind kind = BoundaryKind::state_constraint;
    double value = 0.0;

    static BoundaryCondition state_constraint() { return {}; }
    static BoundaryCondition leq(double v) { return {BoundaryKind::dirichlet_leq, v}; }
    static BoundaryCondition exact(double v) { return {BoundaryKind::dirichlet_exact, v}; }
};

inline std::string_view to_string(BoundaryKind k) noexcept {
    switch (k) {
        case BoundaryKind::state_constraint: return "state_constraint";
        case BoundaryKind::dirichlet_leq: return "dirichlet_leq";
        case BoundaryKind::dirichlet_exact: return "dirichlet_exact";
    }
    return "unknown";
}

struct ArcProfile {
    std::vector<double> values;
    double lambda = 1.0;
    BoundaryCondition bc0;
    BoundaryCondition bc1;
    double residual = 0.0;
    double theta = 0.0;
    std::size_t newton_steps = 0;
    std::size_t sweeps = 0;

    std::size_t intervals() const noexcept { return values.size() - 1; }
    double s(std::size_t i) const noexcept { return static_cast<double>(i) / static_cast<double>(intervals()); }
    double front() const { return values.front(); }
    double back() const { return values.back(); }

    /// Piecewise-linear interpolant.
    double operator()(double s) const {
        double x = std::clamp(s, 0.0, 1.0) * static_cast<double>(intervals());
        std::size_t i = std::min(static_cast<std::size_t>(x), intervals() - 1);
        double w = x - static_cast<double>(i);
        return values[i] + w * (values[i + 1] - values[i]);
    }

    double lipschitz() const {
        double l = 0.0;
        for (std::size_t i = 0; i + 1 < values.size(); ++i)
            l = std::max(l, std::abs(values[i + 1] - values[i]) * static_cast<double>(intervals()));
        return l;
    }
};

namespace detail {

// Lax-Friedrichs discretization of lambda u + H(s,u') = 0 with Godunov-type
// state-constraint rows at the ends, optionally capped by weak Dirichlet data.
class ArcSystem {
public:
    ArcSystem(const Hamiltonian& h, double lambda, double theta, std::size_t n, BoundaryCondition bc0,
              BoundaryCondition bc1)
        : h_(h), lambda_(lambda), theta_(theta), n_(n), inv_h_(static_cast<double>(n)), bc0_(bc0), bc1_(bc1) {}

    double s(std::size_t i) const noexcept { return static_cast<double>(i) / static_cast<double>(n_); }

    // Residual row i and its three partial derivatives (sub, diag, super).
    struct Row {
        double value, sub, diag, super;
    };

    Row row(const std::vector<double>& u, std::size_t i) const {
        if (i == 0) return left(u);
        if (i == n_) return right(u);
        double p = 0.5 * (u[i + 1] - u[i - 1]) * inv_h_;
        double k = 0.5 * theta_ * inv_h_;
        double hp = h_.dp(s(i), p);
        return {lambda_ * u[i] + h_(s(i), p) - k * (u[i + 1] - 2.0 * u[i] + u[i - 1]),
                -0.5 * hp * inv_h_ - k, lambda_ + 2.0 * k, 0.5 * hp * inv_h_ - k};
    }

    void residual(const std::vector<double>& u, std::vector<double>& f) const {
        f.resize(n_ + 1);
        for (std::size_t i = 0; i <= n_; ++i) f[i] = row(u, i).value;
    }

    double pseudo_time_step() const noexcept { return 1.0 / (theta_ * inv_h_ + lambda_ + 1.0); }

private:
    static Row cap(Row g, double u, double data, BoundaryKind kind) {
        if (kind == BoundaryKind::state_constraint) return g;
        double d = u - data;
        if (kind == BoundaryKind::dirichlet_exact || d >= g.value) return {d, 0.0, 1.0, 0.0};
        return g;
    }

    Row left(const std::vector<double>& u) const {
        double p = (u[1] - u[0]) * inv_h_;
        ValueSlope m = h_.half_line_min(0.0, p, HalfLine::below);
        Row g{lambda_ * u[0] + m.value, 0.0, lambda_ - m.slope * inv_h_, m.slope * inv_h_};
        return cap(g, u[0], bc0_.value, bc0_.kind);
    }

    Row right(const std::vector<double>& u) const {
        double p = (u[n_] - u[n_ - 1]) * inv_h_;
        ValueSlope m = h_.half_line_min(1.0, p, HalfLine::above);
        Row g{lambda_ * u[n_] + m.value, -m.slope * inv_h_, lambda_ + m.slope * inv_h_, 0.0};
        return cap(g, u[n_], bc1_.value, bc1_.kind);
    }

    const Hamiltonian& h_;
    double lambda_;
    double theta_;
    std::size_t n_;
    double inv_h_;
    BoundaryCondition bc0_;
    BoundaryCondition bc1_;
};

// Thomas algorithm; a is the sub-diagonal (a[0] unused), c the super-diagonal.
inline void solve_tridiagonal(std::vector<double>& a, std::vector<double>& b, std::vector<double>& c,
                              std::vector<double>& d) {
    const std::size_t n = b.size();
    for (std::size_t i = 1; i < n; ++i) {
        double m = a[i] / b[i - 1];
        b[i] -= m * c[i - 1];
        d[i] -= m * d[i - 1];
    }
    d[n - 1] /= b[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) d[i] = (d[i] - c[i] * d[i + 1]) / b[i];
}

inline double sup_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline double two_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x * x;
    return std::sqrt(m);
}

struct SolveStats {
    double residual = 0.0;
    std::size_t newton_steps = 0;
    std::size_t sweeps = 0;
};

// Semismooth Newton with a backtracking line search on the 2-norm; explicit
// monotone pseudo-time sweeps take over whenever the line search fails.
inline SolveStats solve_system(const ArcSystem& sys, std::vector<double>& u, double tol, std::size_t max_sweeps) {
    const std::size_t n = u.size();
    std::vector<double> f(n), a(n), b(n), c(n), d(n), trial(n), ft(n);
    SolveStats st;
    const double dtau = sys.pseudo_time_step();
    const double row_scale = 1.0 / dtau;
    constexpr std::size_t sweep_batch = 2000;
    constexpr std::size_t max_newton = 500;

    auto floor_tol = [&] {
        double scale = std::max(1.0, sup_norm(u));
        return std::max(tol, 16.0 * std::numeric_limits<double>::epsilon() * row_scale * scale);
    };

    sys.residual(u, f);
    double best = two_norm(f);
    while (true) {
        st.residual = sup_norm(f);
        if (st.residual <= floor_tol()) return st;

        bool stepped = false;
        if (st.newton_steps < max_newton) {
            for (std::size_t i = 0; i < n; ++i) {
                auto r = sys.row(u, i);
                a[i] = r.sub;
                b[i] = r.diag;
                c[i] = r.super;
                d[i] = -r.value;
            }
            solve_tridiagonal(a, b, c, d);
            ++st.newton_steps;
            double t = 1.0;
            for (int k = 0; k < 30; ++k, t *= 0.5) {
                for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + t * d[i];
                sys.residual(trial, ft);
                double norm = two_norm(ft);
                if (std::isfinite(norm) && norm < best) {
                    u.swap(trial);
                    f.swap(ft);
                    best = norm;
                    stepped = true;
                    break;
                }
            }
        }
        if (stepped) continue;

        double before = sup_norm(f);
        for (std::size_t k = 0; k < sweep_batch; ++k) {
            for (std::size_t i = 0; i < n; ++i) u[i] -= dtau * f[i];
            sys.residual(u, f);
            ++st.sweeps;
            if (sup_norm(f) <= floor_tol()) break;
        }
        best = two_norm(f);
        st.residual = sup_norm(f);
        if (st.sweeps >= max_sweeps)
            throw Error(Errc::no_convergence, "arc scheme residual " + std::to_string(st.residual) + " after " +
                                                  std::to_string(st.sweeps) + " sweeps");
        if (!(st.residual < before) && st.residual > floor_tol() && st.newton_steps >= max_newton)
            throw Error(Errc::no_convergence, "arc scheme stalled at residual " + std::to_string(st.residual));
    }
}

// Largest sampled finite-difference |dH/dp| over [0,1] x [-radius, radius].
inline double sampled_slope_bound(const Hamiltonian& h, double radius) {
    constexpr std::size_t ns = 101;
    constexpr std::size_t np = 400;
    double dp = 2.0 * radius / static_cast<double>(np);
    double best = 0.0;
    std::vector<double> svals = uniform_samples(ns);
    for (double s : h.breakpoints()) svals.push_back(s);
    for (double s : svals) {
        double prev = h(s, -radius);
        for (std::size_t k = 1; k <= np; ++k) {
            double p = -radius + dp * static_cast<double>(k);
            double cur = h(s, p);
            best = std::max(best, std::abs(cur - prev) / dp);
            prev = cur;
        }
        best = std::max({best, std::abs(h.dp(s, radius)), std::abs(h.dp(s, -radius))});
    }
    return best;
}

}  // namespace detail

/// Solves the discounted arc equation for one oriented arc. Thread-safe for
/// concurrent const use.
class ArcSolver {
public:
    ArcSolver(Hamiltonian h, double lambda, ArcDiscretization disc = {}, std::optional<double> alpha_floor = {})
        : h_(std::move(h)), lambda_(lambda), disc_(disc) {
        if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error(Errc::invalid_argument, "lambda must be positive");
        if (disc_.n < 2) throw Error(Errc::invalid_argument, "grid needs at least 2 intervals");
        c_sub_ = -h_.max_at_zero_slope() / lambda_;
        c_super_ = -h_.global_min() / lambda_;
        floor_ = alpha_floor.value_or(c_sub_);
        theta_ = disc_.theta > 0.0 ? disc_.theta : theta_for(floor_);
        umax_ = solve(BoundaryCondition::state_constraint(), BoundaryCondition::state_constraint(),
                      std::vector<double>(disc_.n + 1, c_sub_), theta_);
    }

    const Hamiltonian& hamiltonian() const noexcept { return h_; }
    double lambda() const noexcept { return lambda_; }
    const ArcDiscretization& discretization() const noexcept { return disc_; }
    double theta() const noexcept { return theta_; }
    double alpha_floor() const noexcept { return floor_; }

    /// -(1/lambda) max_s H(s,0): every constant at or below it is a subsolution.
    double subsolution_constant() const noexcept { return c_sub_; }

    const ArcProfile& umax() const noexcept { return umax_; }
    double alpha_under() const { return umax_.front(); }
    double alpha_over() const { return umax_.back(); }

    /// Maximal subsolution with u(0) <= alpha and a state constraint at s = 1.
    ArcProfile solve_ualpha(double alpha) const {
        if (!std::isfinite(alpha)) throw Error(Errc::invalid_argument, "alpha must be finite");
        if (alpha >= alpha_under()) {
            ArcProfile p = umax_;
            p.bc0 = BoundaryCondition::leq(alpha);
            return p;
        }
        double theta = alpha < floor_ ? std::max(theta_, theta_for(alpha)) : theta_;
        double slope = coercivity_radius(h_, lambda_ * level_bound(alpha));
        std::vector<double> guess(disc_.n + 1);
        for (std::size_t i = 0; i <= disc_.n; ++i) guess[i] = std::min(umax_.values[i], alpha + slope * disc_.s(i));
        return solve(BoundaryCondition::leq(alpha), BoundaryCondition::state_constraint(), std::move(guess), theta);
    }

    /// rho(alpha) = u_alpha(1).
    double rho(double alpha) const {
        if (alpha >= alpha_under()) return alpha_over();
        if (disc_.memo_step > 0.0) return memo_rho(alpha);
        {
            std::lock_guard lock(cache_->mutex);
            if (auto it = cache_->exact.find(alpha); it != cache_->exact.end()) return it->second;
        }
        double r = solve_ualpha(alpha).back();
        std::lock_guard lock(cache_->mutex);
        cache_->exact.emplace(alpha, r);
        return r;
    }

    /// Solver for the reversed arc with the same discretization and theta.
    ArcSolver reversed() const {
        ArcDiscretization d = disc_;
        d.theta = theta_;
        return ArcSolver(h_.reversed(), lambda_, d, floor_);
    }

    /// Two-point problem with weak Dirichlet data at both ends, on this
    /// solver's grid; the initial guess is the pointwise min of the one-sided
    /// maximal subsolutions.
    ArcProfile solve_two_point(double alpha, double beta, const ArcProfile& forward,
                               const ArcProfile& backward) const {
        std::vector<double> guess(disc_.n + 1);
        for (std::size_t i = 0; i <= disc_.n; ++i)
            guess[i] = std::min(forward.values[i], backward.values[disc_.n - i]);
        double theta = std::max({theta_, forward.theta, backward.theta});
        return solve(BoundaryCondition::leq(alpha), BoundaryCondition::leq(beta), std::move(guess), theta);
    }

    /// Sup-norm of the scheme residual of an arbitrary profile.
    double residual(const ArcProfile& p) const {
        detail::ArcSystem sys(h_, lambda_, p.theta > 0 ? p.theta : theta_, p.intervals(), p.bc0, p.bc1);
        std::vector<double> f;
        sys.residual(p.values, f);
        return detail::sup_norm(f);
    }

    /// Sup-norm of the residual on interior nodes only.
    double interior_residual(const ArcProfile& p) const {
        detail::ArcSystem sys(h_, lambda_, p.theta > 0 ? p.theta : theta_, p.intervals(), p.bc0, p.bc1);
        double m = 0.0;
        for (std::size_t i = 1; i < p.intervals(); ++i) m = std::max(m, std::abs(sys.row(p.values, i).value));
        return m;
    }

private:
    double level_bound(double alpha) const {
        return std::max({std::abs(alpha), std::abs(c_sub_), std::abs(c_super_)});
    }

    double theta_for(double alpha) const {
        double radius = coercivity_radius(h_, lambda_ * level_bound(alpha));
        return 1.05 * std::max(detail::sampled_slope_bound(h_, radius), 1e-3);
    }

    ArcProfile solve(BoundaryCondition bc0, BoundaryCondition bc1, std::vector<double> guess, double theta) const {
        detail::ArcSystem sys(h_, lambda_, theta, disc_.n, bc0, bc1);
        auto st = detail::solve_system(sys, guess, disc_.tol, disc_.max_sweeps);
        ArcProfile p;
        p.values = std::move(guess);
        p.lambda = lambda_;
        p.bc0 = bc0;
        p.bc1 = bc1;
        p.residual = st.residual;
        p.theta = theta;
        p.newton_steps = st.newton_steps;
        p.sweeps = st.sweeps;
        return p;
    }

    // Piecewise-linear interpolation in alpha on a lazily filled grid anchored
    // at alpha_under; nodes are exact solves.
    double memo_rho(double alpha) const {
        double step = disc_.memo_step;
        double k = std::floor((alpha - alpha_under()) / step);
        double a0 = alpha_under() + k * step;
        double a1 = a0 + step;
        auto node = [&](double key, long idx) {
            {
                std::lock_guard lock(cache_->mutex);
                if (auto it = cache_->grid.find(idx); it != cache_->grid.end()) return it->second;
            }
            double r = key >= alpha_under() ? alpha_over() : solve_ualpha(key).back();
            std::lock_guard lock(cache_->mutex);
            cache_->grid.emplace(idx, r);
            return r;
        };
        long i0 = static_cast<long>(k);
        double r0 = node(a0, i0);
        double r1 = node(a1, i0 + 1);
        double w = (alpha - a0) / step;
        return r0 + w * (r1 - r0);
    }

    Hamiltonian h_;
    double lambda_;
    ArcDiscretization disc_;
    double c_sub_ = 0.0;
    double c_super_ = 0.0;
    double floor_ = 0.0;
    double theta_ = 0.0;
    ArcProfile umax_;
    struct Cache {
        std::mutex mutex;
        std::map<double, double> exact;
        std::map<long, double> grid;
    };
    std::unique_ptr<Cache> cache_ = std::make_unique<Cache>();
};

inline ArcProfile solve_umax(const Hamiltonian& h, double lambda, const ArcDiscretization& disc = {}) {
    return ArcSolver(h, lambda, disc).umax();
}

inline ArcProfile solve_ualpha(const Hamiltonian& h, double lambda, double alpha, const ArcDiscretization& disc = {}) {
    return ArcSolver(h, lambda, disc).solve_ualpha(alpha);
}

inline double rho_edge(const Hamiltonian& h, double lambda, double alpha, const ArcDiscretization& disc = {}) {
    return ArcSolver(h, lambda, disc).rho(alpha);
}

inline double alpha_under(const Hamiltonian& h, double lambda, const ArcDiscretization& disc = {}) {
    return ArcSolver(h, lambda, disc).alpha_under();
}

inline double alpha_over(const Hamiltonian& h, double lambda, const ArcDiscretization& disc = {}) {
    return ArcSolver(h, lambda, disc).alpha_over();
}

inline constexpr double default_tol_bc = 1e-6;

/// Unique solution with u(0) = alpha, u(1) = beta; requires the solvability
/// conditions alpha <= rho_{-e}(beta) and beta <= rho_e(alpha).
inline ArcProfile solve_dirichlet_pair(const ArcSolver& forward, const ArcSolver& backward, double alpha,
                                       double beta, double tol_bc = default_tol_bc) {
    ArcProfile ua = forward.solve_ualpha(alpha);
    ArcProfile ub = backward.solve_ualpha(beta);
    if (beta > ua.back() + tol_bc)
        throw Error(Errc::fork_condition_violated, "beta " + std::to_string(beta) + " exceeds rho(alpha) = " +
                                                       std::to_string(ua.back()));
    if (alpha > ub.back() + tol_bc)
        throw Error(Errc::fork_condition_violated, "alpha " + std::to_string(alpha) +
                                                       " exceeds rho of the reversed arc at beta = " +
                                                       std::to_string(ub.back()));
    return forward.solve_two_point(alpha, beta, ua, ub);
}

inline ArcProfile solve_dirichlet_pair(const Hamiltonian& h, double lambda, double alpha, double beta,
                                       const ArcDiscretization& disc = {}, double tol_bc = default_tol_bc) {
    ArcSolver fwd(h, lambda, disc);
    return solve_dirichlet_pair(fwd, fwd.reversed(), alpha, beta, tol_bc);
}

struct Sandwich {
    double lower_defect;  // max over s of (lower bound - u), positive means violated
    double upper_defect;  // max over s of (u - upper bound)
};

/// Checks max(u_b^-(1-s) + alpha - u_b^-(1), u_a(s) + beta - u_a(1)) <= u(s)
/// <= min(u_a(s), u_b^-(1-s)).
inline Sandwich sandwich_defect(const ArcProfile& u, const ArcProfile& ua, const ArcProfile& ub, double alpha,
                                double beta) {
    Sandwich d{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    const std::size_t n = u.intervals();
    for (std::size_t i = 0; i <= n; ++i) {
        double fwd = ua.values[i];
        double bwd = ub.values[n - i];
        double lower = std::max(bwd + alpha - ub.back(), fwd + beta - ua.back());
        double upper = std::min(fwd, bwd);
        d.lower_defect = std::max(d.lower_defect, lower - u.values[i]);
        d.upper_defect = std::max(d.upper_defect, u.values[i] - upper);
    }
    return d;
}

}  // namespace hjnet
