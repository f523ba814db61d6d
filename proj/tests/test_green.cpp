#include <doctest.h>

#include <cmath>

#include "bloch/green.hpp"
#include "bloch/iterint.hpp"
#include "bloch/potential.hpp"
#include "oracles.hpp"

using namespace bloch;

namespace {

// G_S(0.4, 0.1; k) for C = 1, L = 1, a = 0.6, from a 50-digit evaluation of
// the closed form approached from Im k > 0
struct Fixture {
    double k, re, im;
};
const Fixture kFixtures[] = {
    {0.5, 0.14943813247359922, -1.5162104709361621},
    {1.5, 0.14498851137041007, -0.58375927597563335},
    {2.5, 0.50915608629688048, 0.0},
    {3.3, 0.2497800459998915, 0.0},
    {6.0, -0.048506307538588763, 0.0},
    {9.0, -0.045043493646726896, 0.0},
};

}  // namespace

TEST_CASE("free Green function") {
    auto p = free_potential(1.0);
    for (Complex k : {Complex(0.3), Complex(2.0), Complex(1.0, 0.5)})
        for (auto [x, y] : {std::pair{0.7, 0.2}, {0.2, 0.7}, {-1.3, 2.4}}) {
            Complex want = std::exp(I * k * std::abs(x - y)) / (2.0 * I * k);
            auto g = green_exact(p, x, y, k);
            CHECK(std::abs(g.G_S - want) < 1e-12 * std::abs(want));
            CHECK(std::abs(g.G_F - want) < 1e-12 * std::abs(want));
        }
}

TEST_CASE("square well against frozen fixtures") {
    SquareWellParams sp;
    auto p = square_well(sp);
    for (const auto& f : kFixtures) {
        CAPTURE(f.k);
        Complex want(f.re, f.im);
        auto g = green_exact(p, 0.4, 0.1, Complex(f.k));
        CHECK(std::abs(g.G_S - want) < 1e-9 * std::abs(want));
        auto o = square_well_oracle(sp, 0.4, 0.1, f.k);
        CHECK(std::abs(o - want) < 1e-12 * std::abs(want));
    }
}

TEST_CASE("gaps give a real Green function") {
    SquareWellParams sp;
    auto p = square_well(sp);
    int gaps = 0;
    for (int i = 1; i <= 120; ++i) {
        double k = 0.1 * i;
        auto m = monodromy(p, k);
        if (m.band != BandClass::Gap) continue;
        ++gaps;
        CHECK(std::abs(green_exact(p, 0.4, 0.1, m).G_S.imag()) < 1e-9);
    }
    CHECK(gaps > 10);
}

TEST_CASE("symmetry, Fokker-Planck factor and the upper half plane") {
    auto p = load_potential(std::string(BLOCH_DATA_DIR) + "/sawtooth.pot");
    for (Complex k : {Complex(0.4), Complex(2.2, 0.3)}) {
        auto a = green_exact(p, 1.5, 0.3, k), b = green_exact(p, 0.3, 1.5, k);
        CHECK(std::abs(a.G_S - b.G_S) < 1e-10 * std::abs(a.G_S));
        CHECK(std::abs(a.G_F - std::exp(-0.5 * (p.V(1.5) - p.V(0.3))) * a.G_S) < 1e-14);
    }
    CHECK_THROWS_AS(green_exact(p, 0.1, 0.2, Complex(0.0)), ConfigError);
    CHECK_THROWS_AS(green_exact(p, 0.1, 0.2, Complex(1.0, -0.1)), ConfigError);
}

TEST_CASE("Green function as a resolvent kernel at complex k") {
    // periodicity of the lattice: G(x + L, y + L) = G(x, y)
    auto p = cosine_potential(0.5, 1, 0.3);
    for (Complex k : {Complex(1.0, 0.2), Complex(3.0)}) {
        auto a = green_exact(p, 0.8, 0.1, k), b = green_exact(p, 1.8, 1.1, k);
        CHECK(std::abs(a.G_S - b.G_S) < 1e-10 * std::abs(a.G_S));
    }
}

TEST_CASE("oracle tends to the free Green function as C -> 0") {
    // at C = 0 exactly the closed form is 0/0
    SquareWellParams sp;
    for (double k : {0.3, 2.5, 7.0}) {
        Complex want = std::exp(I * k * 0.3) / (2.0 * I * k);
        double prev = 1e300;
        for (double C : {1e-2, 1e-3, 1e-4}) {
            sp.C = C;
            double e = std::abs(square_well_oracle(sp, 0.4, 0.1, k) - want);
            CHECK(e < 0.2 * prev);
            prev = e;
        }
        CHECK(prev < 1e-3 * std::abs(want));
    }
    sp.C = 1;
    CHECK_THROWS_AS(square_well_oracle(sp, 0.1, 0.4, 1.0), ConfigError);
    sp.a = 1.5;
    CHECK_THROWS_AS(sp.validate(), ConfigError);
}

TEST_CASE("oracle near k = 0") {
    SquareWellParams sp;
    oracle::Square s;
    double gm1 = 0.5 * std::exp(oracle::V0(s)), g0 = 0.5 * 0.3;
    for (double k : {1e-3, 1e-4}) {
        Complex o = square_well_oracle(sp, 0.4, 0.1, k);
        CHECK(std::abs(o - (gm1 / (I * k) + g0)) < 10 * k);
    }
}

TEST_CASE("series coefficients of the free potential") {
    auto gs = green_series(free_potential(1.0), 0.7, 0.2);
    const double d = 0.5;
    CHECK(gs.gm1 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(gs.g0 == doctest::Approx(d / 2).epsilon(1e-12));
    CHECK(gs.g1 == doctest::Approx(d * d / 4).epsilon(1e-10));
    CHECK(gs.g2 == doctest::Approx(d * d * d / 12).epsilon(1e-9));
    // at x = y the truncated series is exact
    auto g0 = green_series(free_potential(1.0), 0.3, 0.3);
    for (double k : {0.01, 0.1})
        CHECK(std::abs(g0.eval(k) - 1.0 / (2.0 * I * k)) < 1e-10 * std::abs(1.0 / (2.0 * k)));
}

TEST_CASE("series coefficients of the square well") {
    auto p = square_potential(1, 1, 0.6);
    auto c = cell_constants(p);
    auto gs = green_series(p, 0.4, 0.1);
    CHECK(gs.gm1 == doctest::Approx(0.5 * std::exp(c.V0)).epsilon(1e-12));
    CHECK(gs.g0 == doctest::Approx(0.5 * bracket(p, SignWord("+"), 0.1, 0.4)).epsilon(1e-12));
    CHECK(gs.s0x == doctest::Approx(s0_at(p, 0.4)));
    CHECK(gs.s2y == doctest::Approx(s2_at(p, 0.1)).epsilon(1e-10));
    // order k^3 remainder against the exact value
    double e1 = std::abs(gs.eval(0.05) - green_exact(p, 0.4, 0.1, Complex(0.05)).G_S);
    double e2 = std::abs(gs.eval(0.1) - green_exact(p, 0.4, 0.1, Complex(0.1)).G_S);
    CHECK(e2 / e1 == doctest::Approx(8.0).epsilon(0.1));
    CHECK_THROWS_AS(gs.eval(0.1, 3), ConfigError);
}

TEST_CASE("series orders improve at small k") {
    auto p = cosine_potential(0.5, 1, 0.3);
    auto gs = green_series(p, 0.6, 0.1);
    Complex exact = green_exact(p, 0.6, 0.1, Complex(0.02)).G_S;
    double prev = 1e300;
    for (int N = -1; N <= 2; ++N) {
        double e = std::abs(gs.eval(0.02, N) - exact);
        CHECK(e < prev);
        prev = e;
    }
}

TEST_CASE("S integral across gap poles") {
    // integral of S over a full period is x-independent
    auto p = square_potential(1, 1, 0.6);
    for (double k : {2.5, 3.3}) {
        auto m = monodromy(p, k);
        REQUIRE(m.band == BandClass::Gap);
        Complex a = s_integral(p, 0.1, 1.1, m), b = s_integral(p, 0.45, 1.45, m);
        CHECK(std::abs(a - b) < 1e-8);
        // additivity
        Complex c = s_integral(p, 0.1, 0.45, m) + s_integral(p, 0.45, 1.1, m);
        CHECK(std::abs(a - c) < 1e-8);
    }
}
