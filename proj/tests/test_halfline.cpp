#include <doctest.h>

#include <cmath>

#include "bloch/halfline.hpp"
#include "bloch/potential.hpp"
#include "bloch/transfer.hpp"
#include "oracles.hpp"

using namespace bloch;

TEST_CASE("free half-line has no reflection") {
    auto p = free_potential(1.0);
    for (Complex k : {Complex(0.5), Complex(2.0, 0.3)}) {
        auto r = reflect_halfline(p, 0.3, k);
        CHECK(std::abs(r.Rr_inf) < 1e-14);
        CHECK(std::abs(r.Rl_inf) < 1e-14);
        CHECK(std::abs(s_functions(p, 0.3, k).S) < 1e-14);
        auto m = m_functions(p, 0.3, k);
        CHECK(std::abs(m.m_plus - I * k) < 1e-13);
        CHECK(std::abs(m.m_minus - I * k) < 1e-13);
    }
}

TEST_CASE("S agrees with S_r + S_l from the reflections") {
    auto p = square_potential(1, 1, 0.6);
    for (Complex k : {Complex(0.5), Complex(1.7), Complex(3.0, 0.4)}) {
        auto a = s_functions(p, 0.4, k);
        auto b = s_from_reflections(reflect_halfline(p, 0.4, k));
        CHECK(std::abs(a.S - b.S) < 1e-11);
        CHECK(std::abs(a.Sr - b.Sr) < 1e-11);
        CHECK(std::abs(a.Sl - b.Sl) < 1e-11);
    }
}

TEST_CASE("reflection at small imaginary k against the zero-energy limit") {
    for (auto p : {square_potential(1, 1, 0.6), cosine_potential(0.5, 1, 0.3)}) {
        const double V0 = cell_constants(p).V0;
        for (double x : {0.2, 0.45}) {
            auto r = reflect_halfline(p, x, Complex(0, 1e-4));
            double lim = -std::tanh(0.5 * (p.V(x) - V0));
            CHECK(std::abs(r.Rr_inf - lim) < 1e-3);
        }
    }
}

TEST_CASE("square well in band gives a finite reflection") {
    oracle::Square s;
    auto p = square_potential(s.C, s.L, s.a);
    auto r = reflect_halfline(p, 0.4, Complex(0.5));
    CHECK(std::isfinite(std::abs(r.Rr_inf)));
    // independent closed-form route for the same quantity
    auto ab = oracle::alpha_beta(s, 0.4, 0.5);
    auto m = monodromy(p, 0.5);
    Complex rr = -ab[1] / (1.0 / m.lambda - ab[0]);
    CHECK(std::abs(r.Rr_inf - rr) < 1e-11);
}

TEST_CASE("small k limit of S") {
    auto p = square_potential(1, 1, 0.6);
    const double V0 = cell_constants(p).V0;
    for (double x : {0.3, 0.8}) {
        double s0 = -std::exp(p.V(x) - V0);
        auto S1 = s_functions(p, x, Complex(1e-3)).S - 1.0;
        auto S2 = s_functions(p, x, Complex(2e-3)).S - 1.0;
        CHECK(std::abs(S1 - s0) < 1e-5);
        // O(k^2) remainder
        CHECK(std::abs(S2 - s0) / std::abs(S1 - s0) == doctest::Approx(4.0).epsilon(0.05));
    }
}

TEST_CASE("S_r and S_l swap under k -> -k in a band") {
    auto p = cosine_potential(0.5, 1, 0.3);
    for (double k : {0.4, 1.1, 2.0}) {
        REQUIRE(classify_band(p, k) == BandClass::Band);
        auto a = s_functions(p, 0.25, Complex(k)), b = s_functions(p, 0.25, Complex(-k));
        CHECK(std::abs(a.Sl - b.Sr) < 1e-10);
        CHECK(std::abs(a.Sr - b.Sl) < 1e-10);
    }
}

TEST_CASE("S from the m-functions equals the direct S") {
    auto p = square_potential(1, 1, 0.6);
    for (int i = 1; i <= 20; ++i) {
        double k = 0.1 * i;  // first band
        auto h = halfline_state(p, 0.4, k);
        REQUIRE(h.has_m);
        Complex S = I / (2.0 * k) * (h.m_plus + h.m_minus) + 1.0;
        CHECK(std::abs(S - h.S) < 1e-10);
    }
}

TEST_CASE("Herglotz sign of m_minus") {
    auto p = cosine_potential(0.5, 1, 0.3);
    for (double k : {0.3, 1.0, 2.5, 4.0, 6.5})
        for (double eps : {1e-3, 1e-1}) CHECK(m_functions(p, 0.2, Complex(k, eps)).m_minus.imag() > 0.0);
}

TEST_CASE("m-functions are refused at a jump") {
    auto p = square_potential(1, 1, 0.6);
    CHECK_THROWS_AS(m_functions(p, 0.6, Complex(1.0)), ConfigError);
    CHECK_THROWS_AS(m_functions(p, 0.3, Complex(0.0)), ConfigError);
    auto h = halfline_state(p, 0.6, Complex(1.0));
    CHECK_FALSE(h.has_m);
    CHECK(std::isfinite(std::abs(h.S)));
}

TEST_CASE("reflection stays finite along the real axis") {
    auto p = square_potential(1, 1, 0.6);
    for (int i = 1; i <= 200; ++i) {
        double k = 12.0 * i / 201;
        if (classify_band(p, k) == BandClass::Edge) continue;
        auto r = reflect_halfline(p, 0.4, k);
        CHECK(std::isfinite(std::abs(r.Rr_inf)));
        CHECK(std::isfinite(std::abs(r.Rl_inf)));
    }
}

TEST_CASE("edge quality flag") {
    oracle::Square s;
    auto p = square_potential(s.C, s.L, s.a);
    double k1 = oracle::bisect([&](double k) { return oracle::Y(s, k) + 1.0; }, 1.5, 2.8);
    CHECK(s_functions(p, 0.4, Complex(k1)).quality == Quality::Edge);
    CHECK(s_functions(p, 0.4, Complex(0.5)).quality == Quality::Ok);
}
