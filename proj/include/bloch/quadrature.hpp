#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bloch/potential.hpp"

namespace bloch {

// Global adaptive Gauss-Kronrod (G7/K15 pairs from Boost), real or complex
// integrand: the interval with the largest error is bisected until the total
// error estimate meets the tolerance. Unlike Boost's own
// recursion this stops on an absolute floor too, so integrands that are zero
// up to roundoff finish quickly, and segments whose error no longer drops
// under bisection are set aside once that error is at roundoff level.
template <class F>
auto gk_integrate(F&& f, double a, double b, double tol, const char* what = "quadrature", double abs_floor = 0.0) {
    using R = decltype(f(a));
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    if (b == a) return R(0.0);
    struct Seg {
        double a, b;
        R v;
        double err, l1;
        bool operator<(const Seg& o) const { return err < o.err; }
    };
    auto rule = [&](double lo, double hi) {
        Seg s{lo, hi, R(0.0), 0.0, 0.0};
        s.v = GK::integrate(f, lo, hi, 0, 0.0, &s.err, &s.l1);
        return s;
    };
    std::priority_queue<Seg> q;
    q.push(rule(a, b));
    R total = q.top().v;
    double err = q.top().err, l1 = q.top().l1;
    double frozen = 0.0;  // error of segments left alone as roundoff-limited
    const int max_segments = 4000;
    for (int n = 1;; ++n) {
        double ok = std::max({tol * std::max(1.0, l1), 1e-13 * l1, 1e-15 * std::abs(b - a), abs_floor});
        if (err <= ok) return total;
        if (frozen > 1e3 * ok)
            throw NumericError(std::string(what) + " is roundoff-limited on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
        if (n >= max_segments || !std::isfinite(std::abs(total)))
            throw NumericError(std::string(what) + " did not converge on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
        Seg s = q.top();
        q.pop();
        double m = 0.5 * (s.a + s.b);
        if (!(m > s.a && m < s.b)) {  // cannot split further
            if (err - s.err <= ok) return total;
            throw NumericError(std::string(what) + " did not converge on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
        }
        Seg l = rule(s.a, m), r = rule(m, s.b);
        total += l.v + r.v - s.v;
        l1 += l.l1 + r.l1 - s.l1;
        err -= s.err;
        // splitting did not help and the error is at roundoff level: freeze
        const bool noise = l.err + r.err > 0.9 * s.err && l.err + r.err <= 1e-10 * (l.l1 + r.l1);
        for (const Seg* c : {&l, &r}) {
            if (noise) {
                frozen += c->err;
            } else {
                err += c->err;
                q.push(*c);
            }
        }
        if (q.empty()) return total;
    }
}

template <class F>
double integrate_smooth(F&& f, double a, double b, double tol) {
    return gk_integrate(f, a, b, tol);
}

// Integral over [a, b] split at every potential breakpoint; f(piece, x).
template <class F>
double integrate_pieces(const PeriodicPotential& pot, F&& f, double a, double b, double tol) {
    double sign = 1.0;
    if (b < a) {
        std::swap(a, b);
        sign = -1.0;
    }
    double s = 0.0;
    for (const auto& p : pot.path(a, b).pieces) {
        s += integrate_smooth([&](double x) { return f(p, x); }, p.a, p.b, tol);
    }
    return sign * s;
}

}  // namespace bloch
