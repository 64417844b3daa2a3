#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "hjnet/arc_solver.hpp"
#include "hjnet/error.hpp"
#include "hjnet/hamiltonian.hpp"

namespace hjnet {

/// Independent value of rho(alpha) for convex Hamiltonians, from the control
/// form of the maximal subsolution: trajectories run backwards from s with
/// ds/dt = -q, pay the Lagrangian L(s,q) = sup_p (pq - H(s,p)) discounted at
/// rate lambda, may exit through s = 0 collecting alpha, and may not cross
/// s = 1. Semi-Lagrangian discretization solved by policy iteration.
inline double sl_oracle_rho(const Hamiltonian& h, double lambda, double alpha, std::size_t cells = 600,
                            std::size_t controls = 201) {
    if (!h.convex()) throw Error(Errc::convexity_required, "the semi-Lagrangian oracle needs a convex Hamiltonian");
    if (!(lambda > 0.0)) throw Error(Errc::invalid_argument, "lambda must be positive");
    if (cells < 2 || controls < 3) throw Error(Errc::invalid_argument, "oracle lattice too small");
    if (controls % 2 == 0) ++controls;

    const double c_sub = -h.max_at_zero_slope() / lambda;
    const double c_super = -h.global_min() / lambda;
    const double level = lambda * std::max({std::abs(alpha), std::abs(c_sub), std::abs(c_super)});
    const double radius = coercivity_radius(h, level);
    const double qmax = std::max(detail::sampled_slope_bound(h, radius), 1e-6);

    const std::size_t m = cells;
    const double dx = 1.0 / static_cast<double>(m);
    const double dt = dx / qmax;
    const double gamma = std::exp(-lambda * dt);
    const double weight = (1.0 - gamma) / lambda;

    std::vector<double> q(controls);
    for (std::size_t k = 0; k < controls; ++k)
        q[k] = -qmax + 2.0 * qmax * static_cast<double>(k) / static_cast<double>(controls - 1);

    // Lagrangian table; the sup over p is attained in |p| <= radius because
    // |q| <= sup |H_p| there.
    std::vector<double> lag((m + 1) * controls);
    for (std::size_t i = 0; i <= m; ++i) {
        double s = static_cast<double>(i) * dx;
        for (std::size_t k = 0; k < controls; ++k) {
            auto neg = [&](double p) { return h(s, p) - p * q[k]; };
            double p = detail::golden_section_min(neg, -2.0 * radius, 2.0 * radius, 1e-12);
            lag[i * controls + k] = -neg(p);
        }
    }

    struct Choice {
        double cost;       // running cost plus exit payoff
        std::size_t left;  // interpolation cell, or npos on exit
        double w_left;     // weight on node `left`, 1 - w_left on left + 1
    };
    constexpr std::size_t exit_cell = std::numeric_limits<std::size_t>::max();

    auto choice = [&](std::size_t i, std::size_t k) -> std::optional<Choice> {
        double s = static_cast<double>(i) * dx;
        double l = lag[i * controls + k];
        double y = s - q[k] * dt;
        if (y > 1.0 + 1e-14) return std::nullopt;
        if (y < 0.0) {
            double tau = s / q[k];
            double g = std::exp(-lambda * tau);
            return Choice{(1.0 - g) / lambda * l + g * alpha, exit_cell, 0.0};
        }
        double x = std::min(y / dx, static_cast<double>(m));
        std::size_t j = std::min(static_cast<std::size_t>(x), m - 1);
        return Choice{weight * l, j, 1.0 - (x - static_cast<double>(j))};
    };
    auto value = [&](const Choice& c, const std::vector<double>& u) {
        if (c.left == exit_cell) return c.cost;
        return c.cost + gamma * (c.w_left * u[c.left] + (1.0 - c.w_left) * u[c.left + 1]);
    };

    const std::size_t zero = controls / 2;
    std::vector<std::size_t> policy(m + 1, zero);
    std::vector<double> u(m + 1), a(m + 1), b(m + 1), c(m + 1), d(m + 1);

    for (std::size_t iter = 0; iter < 100 * (m + 1); ++iter) {
        std::fill(a.begin(), a.end(), 0.0);
        std::fill(c.begin(), c.end(), 0.0);
        for (std::size_t i = 0; i <= m; ++i) {
            Choice ch = *choice(i, policy[i]);
            b[i] = 1.0;
            d[i] = ch.cost;
            if (ch.left == exit_cell) continue;
            auto add = [&](std::size_t j, double w) {
                if (w == 0.0) return;
                if (j == i) b[i] -= gamma * w;
                else if (j + 1 == i) a[i] -= gamma * w;
                else c[i] -= gamma * w;
            };
            add(ch.left, ch.w_left);
            add(ch.left + 1, 1.0 - ch.w_left);
        }
        detail::solve_tridiagonal(a, b, c, d);
        u = d;

        bool changed = false;
        for (std::size_t i = 0; i <= m; ++i) {
            double current = value(*choice(i, policy[i]), u);
            double best = current;
            std::size_t arg = policy[i];
            for (std::size_t k = 0; k < controls; ++k) {
                auto ch = choice(i, k);
                if (!ch) continue;
                double v = value(*ch, u);
                if (v < best - 1e-13 * std::max(1.0, std::abs(best))) {
                    best = v;
                    arg = k;
                }
            }
            if (arg != policy[i]) {
                policy[i] = arg;
                changed = true;
            }
        }
        if (!changed) return u[m];
    }
    throw Error(Errc::no_convergence, "policy iteration did not settle");
}

}  // namespace hjnet
