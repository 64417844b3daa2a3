#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hjnet/hamiltonian.hpp"
#include "support.hpp"

using namespace hjnet;

namespace {

Errc code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::invalid_argument;
}

Hamiltonian flat_table(double value, double slope, bool quasiconvex = false) {
    HamiltonianTable t;
    t.s_count = 2;
    t.p_count = 3;
    t.p_max = 1.0;
    t.values.assign(6, value);
    t.coercive_slope = slope;
    t.quasiconvex = quasiconvex;
    return Hamiltonian::tabulated(t);
}

}  // namespace

TEST(Hamiltonian, Eval) {
    auto h1 = Hamiltonian::eikonal_power(1.0, SampledFunction(1.0));
    EXPECT_DOUBLE_EQ(h1(0.3, 2.0), 1.0);
    auto q = Hamiltonian::tilted_quadratic(SampledFunction(1.0), SampledFunction(0.0));
    EXPECT_DOUBLE_EQ(q(0.5, 1.0), 0.0);
    auto h2 = Hamiltonian::eikonal_power(2.0, SampledFunction(std::vector<double>{0.0, 1.0}));
    EXPECT_DOUBLE_EQ(h2(1.0, -2.0), 3.0);
    EXPECT_DOUBLE_EQ(h2(0.25, 0.0), -0.25);
}

TEST(Hamiltonian, TableExtrapolatesWithDeclaredSlope) {
    auto t = flat_table(-5.0, 1.0);
    EXPECT_DOUBLE_EQ(t(0.5, 0.3), -5.0);
    EXPECT_DOUBLE_EQ(t(0.5, 3.0), -3.0);
    EXPECT_DOUBLE_EQ(t(0.5, -4.0), -2.0);
}

TEST(Hamiltonian, ReverseRewritesParameters) {
    auto h = Hamiltonian::eikonal_power(1.5, SampledFunction(std::vector<double>{1.0, 2.0, 4.0}));
    auto r = h.reversed();
    const auto& rep = std::get<EikonalPower>(r.representation());
    EXPECT_EQ(std::vector<double>(rep.potential.samples().begin(), rep.potential.samples().end()),
              (std::vector<double>{4.0, 2.0, 1.0}));
    auto q = Hamiltonian::tilted_quadratic(SampledFunction(std::vector<double>{0.5, -1.0}), SampledFunction(0.2));
    auto qrev = q.reversed();
    const auto& qr = std::get<TiltedQuadratic>(qrev.representation());
    EXPECT_EQ(qr.drift.samples()[0], 1.0);
    EXPECT_EQ(qr.drift.samples()[1], -0.5);
}

TEST(HamiltonianProperty, ReverseIsPointwiseInvolution) {
    std::mt19937 rng(3);
    std::vector<Hamiltonian> hs{hjtest::random_analytic(rng, false), hjtest::random_analytic(rng, true)};
    HamiltonianTable t;
    t.s_count = 4;
    t.p_count = 5;
    t.p_max = 2.0;
    std::uniform_real_distribution<double> v(-1.0, 1.0);
    for (int i = 0; i < 20; ++i) t.values.push_back(v(rng));
    hs.push_back(Hamiltonian::tabulated(t));
    for (const auto& h : hs) {
        auto r = h.reversed();
        EXPECT_EQ(r.reversed(), h);
        for (int i = 0; i < 100; ++i) {
            for (int k = 0; k < 100; ++k) {
                double s = i / 99.0;
                double p = -5.0 + 10.0 * k / 99.0;
                EXPECT_NEAR(r(s, p), h(1.0 - s, -p), 1e-12);
                EXPECT_EQ(r.reversed()(s, p), h(s, p));
            }
        }
    }
}

TEST(Hamiltonian, CoercivityRadius) {
    auto h = Hamiltonian::eikonal_power(1.0, SampledFunction(1.0));
    double p = coercivity_radius(h, 0.0);
    EXPECT_GT(p, 1.0);
    EXPECT_LE(p, 2.0);
    auto q = Hamiltonian::tilted_quadratic(SampledFunction(0.0), SampledFunction(0.0));
    EXPECT_EQ(coercivity_radius(q, 2.0), 4.0);
    auto t = flat_table(-5.0, 1.0);
    double r = coercivity_radius(t, 0.0);
    EXPECT_GT(t(0.0, r), 0.0);
    EXPECT_GT(t(1.0, -r), 0.0);
    EXPECT_LE(r, 8.0);
    auto steep = flat_table(-5.0, 1e-9);
    EXPECT_EQ(code_of([&] { coercivity_radius(steep, 0.0); }), Errc::not_coercive);
    EXPECT_EQ(code_of([&] { flat_table(0.0, 0.0); }), Errc::not_coercive);
}

TEST(HamiltonianProperty, CoercivityRadiusBoundsLevel) {
    std::mt19937 rng(11);
    for (int i = 0; i < 10; ++i) {
        auto h = hjtest::random_analytic(rng, i % 2 == 0);
        for (double level : {-1.0, 0.0, 3.0, 40.0}) {
            double r = coercivity_radius(h, level);
            for (int k = 0; k <= 50; ++k) {
                double s = k / 50.0;
                EXPECT_GT(h(s, r), level);
                EXPECT_GT(h(s, -r), level);
                EXPECT_GT(h(s, 3.0 * r), level);
            }
        }
    }
}

TEST(Hamiltonian, MinInP) {
    auto h = Hamiltonian::eikonal_power(2.0, SampledFunction(1.0));
    auto m = min_in_p(h, 0.7);
    EXPECT_NEAR(m.argmin, 0.0, 1e-6);
    EXPECT_NEAR(m.value, -1.0, 1e-12);
    auto q = Hamiltonian::tilted_quadratic(SampledFunction(std::vector<double>{0.0, 1.0}), SampledFunction(0.0));
    auto mq = min_in_p(q, 0.5);
    EXPECT_NEAR(mq.argmin, 0.5, 1e-6);
    EXPECT_NEAR(mq.value, 0.0, 1e-12);
    auto lin = Hamiltonian::eikonal_power(1.0, SampledFunction(std::vector<double>{1.0, 2.0}));
    EXPECT_NEAR(level_floor(lin), -1.0, 1e-12);
    EXPECT_EQ(code_of([&] { min_in_p(flat_table(0.0, 1.0), 0.5); }), Errc::quasiconvexity_required);
    EXPECT_NO_THROW(min_in_p(flat_table(0.0, 1.0, true), 0.5));
}

TEST(Hamiltonian, Roots) {
    auto h = Hamiltonian::eikonal_power(1.0, SampledFunction(1.0));
    EXPECT_NEAR(upper_root(h, 0.2, 0.0), 1.0, 1e-11);
    EXPECT_NEAR(lower_root(h, 0.2, 0.0), -1.0, 1e-11);
    auto q = Hamiltonian::tilted_quadratic(SampledFunction(1.0), SampledFunction(0.0));
    EXPECT_NEAR(upper_root(q, 0.5, 0.5), 2.0, 1e-11);
    EXPECT_NEAR(lower_root(q, 0.5, 0.5), 0.0, 1e-11);
    EXPECT_EQ(code_of([&] { upper_root(h, 0.5, -2.0); }), Errc::level_below_min);
}

TEST(HamiltonianProperty, RootsAreLevelCrossingsAndMonotone) {
    std::mt19937 rng(5);
    for (int i = 0; i < 8; ++i) {
        auto h = hjtest::random_analytic(rng, i % 2 == 1);
        for (double s : {0.0, 0.3, 0.77, 1.0}) {
            double base = min_in_p(h, s).value;
            double prev_up = -1e300, prev_lo = 1e300;
            for (int k = 0; k < 20; ++k) {
                double a = base + 0.01 + 0.3 * k;
                double up = upper_root(h, s, a);
                double lo = lower_root(h, s, a);
                EXPECT_NEAR(h(s, up), a, 1e-9);
                EXPECT_NEAR(h(s, lo), a, 1e-9);
                for (int j = 1; j < 10; ++j) EXPECT_LE(h(s, lo + (up - lo) * j / 10.0), a + 1e-12);
                EXPECT_GE(up, prev_up);
                EXPECT_LE(lo, prev_lo);
                prev_up = up;
                prev_lo = lo;
            }
        }
    }
}

TEST(Hamiltonian, H4Check) {
    EXPECT_NO_THROW(check_h4(Hamiltonian::eikonal_power(1.0, SampledFunction(2.0))));
    EXPECT_NO_THROW(check_h4(Hamiltonian::tilted_quadratic(SampledFunction(std::vector<double>{0.0, 1.0}),
                                                           SampledFunction(0.5))));
    EXPECT_EQ(code_of([] { check_h4(Hamiltonian::eikonal_power(1.0, SampledFunction(std::vector<double>{1, 2}))); }),
              Errc::h4_violated);
}

TEST(Hamiltonian, ExactExtremaUseBreakpoints) {
    auto h = Hamiltonian::tilted_quadratic(SampledFunction(std::vector<double>{1.0, -1.0}),
                                           SampledFunction(std::vector<double>{0.0, 0.3, 0.0}));
    // H(s,0) = b^2/2 - f, largest at the ends.
    EXPECT_DOUBLE_EQ(h.max_at_zero_slope(), 0.5);
    EXPECT_DOUBLE_EQ(h.global_min(), -0.3);
    auto t = flat_table(-2.0, 1.0);
    EXPECT_DOUBLE_EQ(t.global_min(), -2.0);
}

TEST(Hamiltonian, HalfLineMinima) {
    auto q = Hamiltonian::tilted_quadratic(SampledFunction(0.5), SampledFunction(0.0));
    EXPECT_DOUBLE_EQ(q.half_line_min(0.0, 0.0, HalfLine::below).value, 0.125);
    EXPECT_DOUBLE_EQ(q.half_line_min(0.0, 2.0, HalfLine::below).value, 0.0);
    EXPECT_DOUBLE_EQ(q.half_line_min(0.0, 2.0, HalfLine::above).value, 1.125);
    EXPECT_DOUBLE_EQ(q.half_line_min(0.0, -1.0, HalfLine::above).value, 0.0);
    HamiltonianTable t;
    t.s_count = 1;
    t.p_count = 3;
    t.p_max = 1.0;
    t.values = {1.0, -1.0, 2.0};
    auto tab = Hamiltonian::tabulated(t);
    EXPECT_DOUBLE_EQ(tab.half_line_min(0.5, 0.5, HalfLine::below).value, -1.0);
    EXPECT_DOUBLE_EQ(tab.half_line_min(0.5, -0.5, HalfLine::below).value, 1.0 + 0.5 * (-2.0));
    EXPECT_DOUBLE_EQ(tab.half_line_min(0.5, 0.5, HalfLine::above).value, 0.5);
}
