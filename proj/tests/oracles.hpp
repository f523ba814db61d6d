#pragma once

// Reference values computed independently of the library: closed forms in
// extended precision and a plain fixed-step integrator.

#include <array>
#include <cmath>
#include <complex>
#include <functional>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

using mp = boost::multiprecision::cpp_bin_float_50;
using cd = std::complex<double>;

struct Square {
    double C = 1.0, L = 1.0, a = 0.6;
    double b() const { return L - a; }
};

inline mp mp_M(const Square& s) { return mp(s.a) + mp(s.b()) * exp(-mp(s.C)); }
inline mp mp_P(const Square& s) { return mp(s.a) + mp(s.b()) * exp(mp(s.C)); }
inline double L0(const Square& s) { return double(sqrt(mp_P(s) * mp_M(s))); }
inline double V0(const Square& s) { return double(log(mp_P(s) / mp_M(s)) / 2); }

inline double A(const Square& s) { return double(-tanh(mp(s.C) / 2)); }

inline double Y(const Square& s, double k) {
    mp A2 = pow(tanh(mp(s.C) / 2), 2), kk = k;
    return double((cos(kk * s.L) - A2 * cos(kk * (s.L - 2 * s.b()))) / (1 - A2));
}

// one-period alpha(k), beta(k) for 0 < x < a
inline std::array<cd, 2> alpha_beta(const Square& s, double x, cd k) {
    const cd i(0, 1);
    double a = A(s), b = s.b(), A2 = a * a;
    cd al = std::exp(-i * k * s.L) * (1.0 - A2 * std::exp(2.0 * i * k * b)) / (1.0 - A2);
    cd be = a / (1.0 - A2) * std::exp(2.0 * i * k * x) * std::exp(-i * k * s.L) * (std::exp(2.0 * i * k * b) - 1.0);
    return {al, be};
}

// brackets over the trailing cell (x - L, x], 0 < x < a
inline double pm(const Square& s, double x) {
    double a = s.a, b = s.b(), C = s.C;
    return 0.5 * (a * a + b * b) + std::exp(-C) * b * (a - x) + std::exp(C) * b * x;
}
inline double mp_(const Square& s, double x) {
    double a = s.a, b = s.b(), C = s.C;
    return 0.5 * (a * a + b * b) + std::exp(C) * b * (a - x) + std::exp(-C) * b * x;
}
inline double pmp(const Square& s, double x) {
    double a = s.a, b = s.b(), C = s.C;
    return a / 6 * (a * a + 3 * b * b) + 2 * b * x * (x - a) * std::sinh(C) + b / 6 * (3 * a * a + b * b) * std::exp(C);
}
inline double mpm(const Square& s, double x) {
    double a = s.a, b = s.b(), C = s.C;
    return a / 6 * (a * a + 3 * b * b) - 2 * b * x * (x - a) * std::sinh(C) + b / 6 * (3 * a * a + b * b) * std::exp(-C);
}
inline double Q(const Square& s) {
    double a = s.a, b = s.b();
    return (a * a * a * a + 6 * a * a * b * b + b * b * b * b) / 12 + a * b / 3 * (a * a + b * b) * std::cosh(s.C);
}

// Fixed-step RK4 for U' = [[-ik, f], [f, ik]] U on a smooth stretch.
inline std::array<cd, 4> rk4_evolve(const std::function<double(double)>& f, double x0, double x1, cd k, int steps) {
    const cd i(0, 1);
    std::array<cd, 4> u{1.0, 0.0, 0.0, 1.0};  // a b / c d
    auto rhs = [&](double x, const std::array<cd, 4>& m) {
        double fx = f(x);
        return std::array<cd, 4>{-i * k * m[0] + fx * m[2], -i * k * m[1] + fx * m[3], fx * m[0] + i * k * m[2],
                                 fx * m[1] + i * k * m[3]};
    };
    double h = (x1 - x0) / steps;
    for (int n = 0; n < steps; ++n) {
        double x = x0 + n * h;
        auto k1 = rhs(x, u);
        std::array<cd, 4> t;
        for (int j = 0; j < 4; ++j) t[j] = u[j] + 0.5 * h * k1[j];
        auto k2 = rhs(x + 0.5 * h, t);
        for (int j = 0; j < 4; ++j) t[j] = u[j] + 0.5 * h * k2[j];
        auto k3 = rhs(x + 0.5 * h, t);
        for (int j = 0; j < 4; ++j) t[j] = u[j] + h * k3[j];
        auto k4 = rhs(x + h, t);
        for (int j = 0; j < 4; ++j) u[j] += h / 6 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
    return u;
}

// plain bisection on a scalar function
inline double bisect(const std::function<double(double)>& g, double lo, double hi) {
    double glo = g(lo);
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
        double m = 0.5 * (lo + hi), gm = g(m);
        if ((gm < 0) == (glo < 0)) {
            lo = m;
            glo = gm;
        } else {
            hi = m;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace oracle
