#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "hjnet/error.hpp"

namespace hjnet {

/// Uniform samples on [0,1] with linear interpolation; one sample is a constant.
class SampledFunction {
public:
    SampledFunction(double constant = 0.0) : samples_{constant} {}  // NOLINT(google-explicit-constructor)

    explicit SampledFunction(std::vector<double> samples) : samples_(std::move(samples)) {
        if (samples_.empty()) throw Error(Errc::invalid_argument, "sampled function needs at least one sample");
        for (double v : samples_) {
            if (!std::isfinite(v)) throw Error(Errc::invalid_argument, "sampled function has a non-finite sample");
        }
    }

    double operator()(double s) const {
        const std::size_t n = samples_.size();
        if (n == 1) return samples_[0];
        double x = std::clamp(s, 0.0, 1.0) * static_cast<double>(n - 1);
        std::size_t i = std::min(static_cast<std::size_t>(x), n - 2);
        double w = x - static_cast<double>(i);
        return samples_[i] + w * (samples_[i + 1] - samples_[i]);
    }

    std::span<const double> samples() const noexcept { return samples_; }
    bool is_constant() const noexcept { return samples_.size() == 1; }
    double max() const { return *std::max_element(samples_.begin(), samples_.end()); }
    double min() const { return *std::min_element(samples_.begin(), samples_.end()); }

    /// s -> f(1-s)
    SampledFunction reversed() const { return SampledFunction(std::vector<double>(samples_.rbegin(), samples_.rend())); }

    SampledFunction negated() const {
        auto v = samples_;
        for (auto& x : v) x = -x;
        return SampledFunction(std::move(v));
    }

    SampledFunction shifted(double c) const {
        auto v = samples_;
        for (auto& x : v) x += c;
        return SampledFunction(std::move(v));
    }

    friend bool operator==(const SampledFunction&, const SampledFunction&) = default;

private:
    std::vector<double> samples_;
};

enum class Family { eikonal_power, tilted_quadratic, tabulated };

constexpr std::string_view to_string(Family f) noexcept {
    switch (f) {
        case Family::eikonal_power: return "eikonal_power";
        case Family::tilted_quadratic: return "tilted_quadratic";
        case Family::tabulated: return "tabulated";
    }
    return "unknown";
}

/// H(s,p) = |p|^m - f(s)
struct EikonalPower {
    double exponent = 1.0;
    SampledFunction potential;
    friend bool operator==(const EikonalPower&, const EikonalPower&) = default;
};

/// H(s,p) = (p - b(s))^2 / 2 - f(s)
struct TiltedQuadratic {
    SampledFunction drift;
    SampledFunction potential;
    friend bool operator==(const TiltedQuadratic&, const TiltedQuadratic&) = default;
};

/// Bilinear table on [0,1] x [-p_max, p_max]; rows are s-nodes, columns p-nodes.
/// Outside the p-range the value grows linearly with `coercive_slope`.
struct HamiltonianTable {
    std::size_t s_count = 0;
    std::size_t p_count = 0;
    double p_max = 1.0;
    std::vector<double> values;  // row-major, s_count * p_count
    double coercive_slope = 1.0;
    bool quasiconvex = false;

    double at(std::size_t row, std::size_t col) const { return values[row * p_count + col]; }
    double p_node(std::size_t col) const {
        return -p_max + 2.0 * p_max * static_cast<double>(col) / static_cast<double>(p_count - 1);
    }
    friend bool operator==(const HamiltonianTable&, const HamiltonianTable&) = default;
};

enum class HalfLine { below, above };

struct ValueSlope {
    double value;
    double slope;
};

/// A continuous, coercive Hamiltonian attached to one orientation of an arc.
class Hamiltonian {
public:
    static Hamiltonian eikonal_power(double exponent, SampledFunction potential) {
        if (!(exponent >= 1.0) || !std::isfinite(exponent))
            throw Error(Errc::invalid_argument, "eikonal_power exponent must be >= 1");
        return Hamiltonian(EikonalPower{exponent, std::move(potential)});
    }

    static Hamiltonian tilted_quadratic(SampledFunction drift, SampledFunction potential) {
        return Hamiltonian(TiltedQuadratic{std::move(drift), std::move(potential)});
    }

    static Hamiltonian tabulated(HamiltonianTable table) {
        if (table.s_count < 1 || table.p_count < 2)
            throw Error(Errc::invalid_argument, "table needs at least one s-row and two p-columns");
        if (table.values.size() != table.s_count * table.p_count)
            throw Error(Errc::invalid_argument, "table value count does not match its shape");
        if (!(table.p_max > 0.0)) throw Error(Errc::invalid_argument, "table p_max must be positive");
        if (!(table.coercive_slope > 0.0))
            throw Error(Errc::not_coercive, "table coercive_slope must be positive");
        for (double v : table.values) {
            if (!std::isfinite(v)) throw Error(Errc::invalid_argument, "table has a non-finite value");
        }
        return Hamiltonian(std::move(table));
    }

    Family family() const noexcept { return static_cast<Family>(rep_.index()); }
    const auto& representation() const noexcept { return rep_; }

    double operator()(double s, double p) const {
        return std::visit([&](const auto& r) { return eval(r, s, p); }, rep_);
    }

    /// An element of the generalized p-derivative (one-sided at kinks).
    double dp(double s, double p) const {
        return std::visit([&](const auto& r) { return slope(r, s, p); }, rep_);
    }

    /// H_rev(s,p) = H(1-s,-p)
    Hamiltonian reversed() const {
        return std::visit([](const auto& r) { return Hamiltonian(reverse_rep(r)); }, rep_);
    }

    /// H - a, realized on the potential (or table values).
    Hamiltonian shifted(double a) const {
        return std::visit([a](const auto& r) { return Hamiltonian(shift_rep(r, a)); }, rep_);
    }

    /// (H3) eligibility.
    bool quasiconvex() const noexcept {
        if (const auto* t = std::get_if<HamiltonianTable>(&rep_)) return t->quasiconvex;
        return true;
    }

    bool convex() const noexcept { return family() != Family::tabulated; }

    /// Argmin of H(s,.) for the closed-form families.
    std::optional<double> closed_form_argmin(double s) const {
        if (std::holds_alternative<EikonalPower>(rep_)) return 0.0;
        if (const auto* q = std::get_if<TiltedQuadratic>(&rep_)) return q->drift(s);
        return std::nullopt;
    }

    /// min over q <= p (below) or q >= p (above) of H(s,q), with a generalized
    /// derivative in p. Used by the state-constraint boundary rows.
    ValueSlope half_line_min(double s, double p, HalfLine side) const {
        if (auto star = closed_form_argmin(s)) {
            bool active = side == HalfLine::below ? p < *star : p > *star;
            double q = active ? p : *star;
            return {(*this)(s, q), active ? dp(s, p) : 0.0};
        }
        const auto& t = std::get<HamiltonianTable>(rep_);
        double best = (*this)(s, p);
        bool at_p = true;
        for (std::size_t k = 0; k < t.p_count; ++k) {
            double pk = t.p_node(k);
            bool admissible = side == HalfLine::below ? pk < p : pk > p;
            if (!admissible) continue;
            double v = (*this)(s, pk);
            if (v < best) {
                best = v;
                at_p = false;
            }
        }
        return {best, at_p ? dp(s, p) : 0.0};
    }

    /// s-positions where every sampled ingredient has a node; between two
    /// consecutive breakpoints H(s,0) is convex in s and min_p H is linear.
    std::vector<double> breakpoints() const {
        std::set<double> pts{0.0, 1.0};
        auto add = [&](std::size_t count) {
            for (std::size_t i = 0; i + 1 < count; ++i)
                pts.insert(static_cast<double>(i) / static_cast<double>(count - 1));
        };
        std::visit(
            [&](const auto& r) {
                using R = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<R, EikonalPower>) {
                    add(r.potential.samples().size());
                } else if constexpr (std::is_same_v<R, TiltedQuadratic>) {
                    add(r.drift.samples().size());
                    add(r.potential.samples().size());
                } else {
                    add(r.s_count);
                }
            },
            rep_);
        return {pts.begin(), pts.end()};
    }

    /// max_s H(s,0), exact for all families.
    double max_at_zero_slope() const {
        double m = -std::numeric_limits<double>::infinity();
        for (double s : breakpoints()) m = std::max(m, (*this)(s, 0.0));
        return m;
    }

    /// min over (s,p) of H, exact for all families.
    double global_min() const {
        return std::visit(
            [](const auto& r) {
                using R = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<R, EikonalPower>) {
                    return -r.potential.max();
                } else if constexpr (std::is_same_v<R, TiltedQuadratic>) {
                    return -r.potential.max();
                } else {
                    return *std::min_element(r.values.begin(), r.values.end());
                }
            },
            rep_);
    }

    friend bool operator==(const Hamiltonian&, const Hamiltonian&) = default;

private:
    using Rep = std::variant<EikonalPower, TiltedQuadratic, HamiltonianTable>;
    explicit Hamiltonian(Rep rep) : rep_(std::move(rep)) {}

    static double eval(const EikonalPower& r, double s, double p) {
        double a = std::abs(p);
        double powered = r.exponent == 1.0 ? a : (r.exponent == 2.0 ? a * a : std::pow(a, r.exponent));
        return powered - r.potential(s);
    }
    static double slope(const EikonalPower& r, double, double p) {
        if (p == 0.0) return 0.0;
        double a = std::abs(p);
        double d = r.exponent == 1.0 ? 1.0 : r.exponent * std::pow(a, r.exponent - 1.0);
        return p > 0 ? d : -d;
    }

    static double eval(const TiltedQuadratic& r, double s, double p) {
        double d = p - r.drift(s);
        return 0.5 * d * d - r.potential(s);
    }
    static double slope(const TiltedQuadratic& r, double s, double p) { return p - r.drift(s); }

    struct TableCell {
        std::size_t row;
        double row_weight;
        std::size_t col;
        double col_weight;
    };
    static TableCell locate(const HamiltonianTable& t, double s, double p) {
        TableCell c{0, 0.0, 0, 0.0};
        if (t.s_count > 1) {
            double x = std::clamp(s, 0.0, 1.0) * static_cast<double>(t.s_count - 1);
            c.row = std::min(static_cast<std::size_t>(x), t.s_count - 2);
            c.row_weight = x - static_cast<double>(c.row);
        }
        double y = (std::clamp(p, -t.p_max, t.p_max) + t.p_max) / (2.0 * t.p_max) * static_cast<double>(t.p_count - 1);
        c.col = std::min(static_cast<std::size_t>(y), t.p_count - 2);
        c.col_weight = y - static_cast<double>(c.col);
        return c;
    }
    static double column_value(const HamiltonianTable& t, const TableCell& c, std::size_t col) {
        double v0 = t.at(c.row, col);
        if (t.s_count == 1) return v0;
        return v0 + c.row_weight * (t.at(c.row + 1, col) - v0);
    }
    static double eval(const HamiltonianTable& t, double s, double p) {
        TableCell c = locate(t, s, p);
        double a = column_value(t, c, c.col);
        double b = column_value(t, c, c.col + 1);
        double inside = a + c.col_weight * (b - a);
        double excess = std::abs(p) - t.p_max;
        return excess > 0 ? inside + t.coercive_slope * excess : inside;
    }
    static double slope(const HamiltonianTable& t, double s, double p) {
        if (p > t.p_max) return t.coercive_slope;
        if (p < -t.p_max) return -t.coercive_slope;
        TableCell c = locate(t, s, p);
        double dpn = 2.0 * t.p_max / static_cast<double>(t.p_count - 1);
        return (column_value(t, c, c.col + 1) - column_value(t, c, c.col)) / dpn;
    }

    static EikonalPower reverse_rep(const EikonalPower& r) { return {r.exponent, r.potential.reversed()}; }
    static TiltedQuadratic reverse_rep(const TiltedQuadratic& r) {
        return {r.drift.reversed().negated(), r.potential.reversed()};
    }
    static HamiltonianTable reverse_rep(const HamiltonianTable& t) {
        HamiltonianTable out = t;
        for (std::size_t i = 0; i < t.s_count; ++i)
            for (std::size_t k = 0; k < t.p_count; ++k)
                out.values[i * t.p_count + k] = t.at(t.s_count - 1 - i, t.p_count - 1 - k);
        return out;
    }

    static EikonalPower shift_rep(const EikonalPower& r, double a) { return {r.exponent, r.potential.shifted(a)}; }
    static TiltedQuadratic shift_rep(const TiltedQuadratic& r, double a) { return {r.drift, r.potential.shifted(a)}; }
    static HamiltonianTable shift_rep(const HamiltonianTable& t, double a) {
        HamiltonianTable out = t;
        for (auto& v : out.values) v -= a;
        return out;
    }

    Rep rep_;
};

inline double eval(const Hamiltonian& h, double s, double p) { return h(s, p); }
inline Hamiltonian reverse(const Hamiltonian& h) { return h.reversed(); }

inline std::vector<double> uniform_samples(std::size_t count) {
    std::vector<double> s(count);
    for (std::size_t i = 0; i < count; ++i) s[i] = static_cast<double>(i) / static_cast<double>(count - 1);
    return s;
}

namespace detail {

// True when H(s,p) > level for every s and |p| >= radius.
inline bool exceeds_beyond(const Hamiltonian& h, double level, double radius) {
    return std::visit(
        [&](const auto& r) {
            using R = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<R, EikonalPower>) {
                double need = level + r.potential.max();
                return need < 0 || std::pow(radius, r.exponent) > need;
            } else if constexpr (std::is_same_v<R, TiltedQuadratic>) {
                double reach = radius - std::max(std::abs(r.drift.max()), std::abs(r.drift.min()));
                if (reach <= 0) return false;
                double need = level + r.potential.max();
                return need < 0 || 0.5 * reach * reach > need;
            } else {
                for (std::size_t row = 0; row < r.s_count; ++row) {
                    double s = r.s_count == 1 ? 0.0 : static_cast<double>(row) / static_cast<double>(r.s_count - 1);
                    if (h(s, radius) <= level || h(s, -radius) <= level) return false;
                    for (std::size_t k = 0; k < r.p_count; ++k) {
                        double pk = r.p_node(k);
                        if (std::abs(pk) >= radius && r.at(row, k) <= level) return false;
                    }
                }
                return true;
            }
        },
        h.representation());
}

template <class F>
double golden_section_min(F&& f, double lo, double hi, double tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return fc <= fd ? c : d;
}

}  // namespace detail

inline constexpr double coercivity_cap = 1e8;

/// Smallest power of two P >= 1 with H(s,p) > level whenever |p| >= P.
inline double coercivity_radius(const Hamiltonian& h, double level) {
    for (double radius = 1.0; radius <= coercivity_cap; radius *= 2.0) {
        if (detail::exceeds_beyond(h, level, radius)) return radius;
    }
    throw Error(Errc::not_coercive, "no coercivity radius below 1e8 for level " + std::to_string(level));
}

struct PMin {
    double argmin;
    double value;
};

/// Global minimum of the quasiconvex map p -> H(s,p): closed form for the
/// analytic families, best node for tables (linear beyond the last node).
inline PMin min_in_p(const Hamiltonian& h, double s) {
    if (!h.quasiconvex())
        throw Error(Errc::quasiconvexity_required, "min_in_p needs a Hamiltonian flagged quasiconvex");
    if (auto star = h.closed_form_argmin(s)) return {*star, h(s, *star)};
    const auto& t = std::get<HamiltonianTable>(h.representation());
    PMin best{0.0, std::numeric_limits<double>::infinity()};
    for (std::size_t k = 0; k < t.p_count; ++k) {
        double v = h(s, t.p_node(k));
        if (v < best.value) best = {t.p_node(k), v};
    }
    return best;
}

/// Largest level a such that some s has min_p H(s,p) = a; below it H(s,.) = a
/// has no solution at that s.
inline double level_floor(const Hamiltonian& h, std::size_t samples = 1001) {
    double best = -std::numeric_limits<double>::infinity();
    for (double s : uniform_samples(samples)) best = std::max(best, min_in_p(h, s).value);
    for (double s : h.breakpoints()) best = std::max(best, min_in_p(h, s).value);
    return best;
}

/// (H4): min_p H(s,p) constant in s within 1e-9 on a 1001-point sample.
inline void check_h4(const Hamiltonian& h) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (double s : uniform_samples(1001)) {
        double v = min_in_p(h, s).value;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi - lo > 1e-9)
        throw Error(Errc::h4_violated, "min_p H(s,p) varies by " + std::to_string(hi - lo) + " across s");
}

namespace detail {

inline double root(const Hamiltonian& h, double s, double a, bool upper) {
    PMin m = min_in_p(h, s);
    double slack = 1e-9 * std::max(1.0, std::abs(a));
    if (a < m.value - slack)
        throw Error(Errc::level_below_min, "level " + std::to_string(a) + " below min_p H = " + std::to_string(m.value));
    if (a <= m.value) return m.argmin;
    double radius = coercivity_radius(h, a);
    double inside = m.argmin;
    double outside = upper ? radius : -radius;
    while (std::abs(outside - inside) > 1e-12) {
        double mid = 0.5 * (inside + outside);
        if (mid == inside || mid == outside) break;
        (h(s, mid) <= a ? inside : outside) = mid;
    }
    return inside;
}

}  // namespace detail

/// max{p : H(s,p) <= a}
inline double upper_root(const Hamiltonian& h, double s, double a) { return detail::root(h, s, a, true); }
/// min{p : H(s,p) <= a}
inline double lower_root(const Hamiltonian& h, double s, double a) { return detail::root(h, s, a, false); }

}  // namespace hjnet
