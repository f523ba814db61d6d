#include <doctest.h>

#include <cmath>
#include <random>

#include "bloch/iterint.hpp"
#include "bloch/potential.hpp"
#include "oracles.hpp"

using namespace bloch;

TEST_CASE("sign words") {
    SignWord w("+-+");
    CHECK(w.size() == 3);
    CHECK(w.signs == std::vector<int>{1, -1, 1});
    CHECK(w.str() == "+-+");
    CHECK_THROWS_AS(SignWord("+x"), ConfigError);
}

TEST_CASE("single bracket of the free potential is the length") {
    auto p = free_potential(1.0);
    CHECK(bracket(p, SignWord("+"), 0.0, 0.73) == doctest::Approx(0.73).epsilon(1e-14));
    // the ordered simplex has volume len^n / n!
    CHECK(bracket(p, SignWord("+-+"), -0.2, 1.3) == doctest::Approx(std::pow(1.5, 3) / 6).epsilon(1e-12));
}

TEST_CASE("square well cell brackets match closed forms") {
    oracle::Square s;
    auto p = square_potential(s.C, s.L, s.a);
    for (double x : {0.1, 0.4, 0.55}) {
        CAPTURE(x);
        CHECK(bracket(p, SignWord("+-"), x - 1, x) == doctest::Approx(oracle::pm(s, x)).epsilon(1e-11));
        CHECK(bracket(p, SignWord("-+"), x - 1, x) == doctest::Approx(oracle::mp_(s, x)).epsilon(1e-11));
        CHECK(bracket(p, SignWord("+-+"), x - 1, x) == doctest::Approx(oracle::pmp(s, x)).epsilon(1e-11));
        CHECK(bracket(p, SignWord("-+-"), x - 1, x) == doctest::Approx(oracle::mpm(s, x)).epsilon(1e-11));
    }
}

TEST_CASE("two-letter cell identities") {
    for (auto p : {square_potential(1, 1, 0.6), cosine_potential(0.5, 1, 0.3)}) {
        auto c = cell_constants(p);
        const double x = 0.3;
        CHECK(bracket(p, SignWord("++"), x - 1, x) == doctest::Approx(c.P * c.P / 2).epsilon(1e-11));
        CHECK(bracket(p, SignWord("--"), x - 1, x) == doctest::Approx(c.M * c.M / 2).epsilon(1e-11));
        double s = bracket(p, SignWord("+-"), x - 1, x) + bracket(p, SignWord("-+"), x - 1, x);
        CHECK(s == doctest::Approx(c.P * c.M).epsilon(1e-11));
    }
}

TEST_CASE("Q of the square well") {
    oracle::Square s;
    // frozen from the closed form
    const double Q = 0.10592548774164748;
    CHECK(oracle::Q(s) == doctest::Approx(Q).epsilon(1e-15));
    CHECK(cell_Q(square_potential(s.C, s.L, s.a)) == doctest::Approx(Q).epsilon(1e-10));
}

TEST_CASE("Q of the free potential") { CHECK(cell_Q(free_potential(1.0)) == doctest::Approx(1.0 / 12).epsilon(1e-12)); }

TEST_CASE("Q does not depend on the window") {
    auto p = load_potential(std::string(BLOCH_DATA_DIR) + "/sawtooth.pot");
    auto sum = [&](double x) {
        return bracket(p, SignWord("-+-+"), x - 2, x) + bracket(p, SignWord("+-+-"), x - 2, x);
    };
    CHECK(sum(0.2) == doctest::Approx(sum(0.7)).epsilon(1e-10));
    CHECK(sum(0.2) == doctest::Approx(sum(1.55)).epsilon(1e-10));
}

TEST_CASE("shuffle rule for one extra letter") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    auto p = load_potential(std::string(BLOCH_DATA_DIR) + "/sawtooth.pot");
    for (const char* wtxt : {"+", "-+", "+-+", "--+"}) {
        for (int sp : {1, -1}) {
            double a = u(rng), b = a + 0.5 + std::abs(u(rng));
            SignWord w(wtxt);
            double lhs = bracket_uncached(p, w, a, b) * bracket_uncached(p, SignWord(std::vector<int>{sp}), a, b);
            double rhs = 0;
            for (std::size_t pos = 0; pos <= w.size(); ++pos) {
                auto s = w.signs;
                s.insert(s.begin() + pos, sp);
                rhs += bracket_uncached(p, SignWord(s), a, b);
            }
            CAPTURE(wtxt);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
        }
    }
}

TEST_CASE("alternating integrals start with one") {
    auto p = square_potential(1, 1, 0.6);
    auto v = alternating_integrals(p, 1, -0.3, 0.4, 3);
    REQUIRE(v.size() == 4);
    CHECK(v[0] == 1.0);
    CHECK(v[1] == doctest::Approx(bracket(p, SignWord("+"), -0.3, 0.4)));
    CHECK(v[3] == doctest::Approx(bracket(p, SignWord("+-+"), -0.3, 0.4)).epsilon(1e-11));
}

TEST_CASE("cache returns stored values") {
    auto p = cosine_potential(0.5, 1, 0.3);
    bracket_cache().clear();
    double a = bracket(p, SignWord("+-"), 0.0, 1.0);
    CHECK(bracket_cache().size() >= 1);
    double b = bracket(p, SignWord("+-"), 0.0, 1.0);
    CHECK(a == b);
    CHECK(a == doctest::Approx(bracket_uncached(p, SignWord("+-"), 0.0, 1.0)).epsilon(1e-13));
}
