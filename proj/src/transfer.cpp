#include "bloch/transfer.hpp"

#include <array>
#include <cmath>

#include <boost/math/tools/toms748_solve.hpp>
#include <boost/numeric/odeint.hpp>

#include "bloch/iterint.hpp"

namespace bloch {

namespace {

using State = std::array<double, 8>;

Mat2 exact_linear(double f, Complex k, double h) {
    // A = [[-ik, f], [f, ik]], A^2 = (f^2 - k^2) I
    Complex q2 = f * f - k * k;
    Complex q = std::sqrt(q2);
    Complex ch, sh_q;
    if (std::abs(q * h) < 1e-3) {
        Complex z = q2 * h * h;
        ch = 1.0 + z / 2.0 + z * z / 24.0 + z * z * z / 720.0;
        sh_q = h * (1.0 + z / 6.0 + z * z / 120.0 + z * z * z / 5040.0);
    } else {
        ch = std::cosh(q * h);
        sh_q = std::sinh(q * h) / q;
    }
    return {ch - I * k * sh_q, f * sh_q, f * sh_q, ch + I * k * sh_q};
}

Mat2 integrate_piece(const Piece& pc, Complex k, const EvolveOptions& opt) {
    namespace ode = boost::numeric::odeint;
    const double kr = k.real(), ki = k.imag();
    auto sys = [&](const State& s, State& ds, double x) {
        double f = pc.f(x);
        // -ik * (u + iv) = (ki u + kr v) + i (ki v - kr u)
        for (int col = 0; col < 2; ++col) {
            int top = 2 * col, bot = 4 + 2 * col;
            double ur = s[top], ui = s[top + 1], wr = s[bot], wi = s[bot + 1];
            ds[top] = ki * ur + kr * ui + f * wr;
            ds[top + 1] = ki * ui - kr * ur + f * wi;
            ds[bot] = f * ur - ki * wr - kr * wi;
            ds[bot + 1] = f * ui - ki * wi + kr * wr;
        }
    };
    // layout: a, b (row 0), c, d (row 1)
    State s{1, 0, 0, 0, 0, 0, 1, 0};
    double h = pc.b - pc.a;
    try {
        auto stepper = ode::make_controlled(opt.atol, opt.rtol, ode::runge_kutta_fehlberg78<State>());
        ode::integrate_adaptive(stepper, sys, s, pc.a, pc.b, h / 16.0);
    } catch (const std::exception& e) {
        throw NumericError(std::string("evolve: integrator failed: ") + e.what());
    }
    Mat2 m{{s[0], s[1]}, {s[2], s[3]}, {s[4], s[5]}, {s[6], s[7]}};
    for (double v : s)
        if (!std::isfinite(v)) throw NumericError("evolve: integrator produced non-finite values");
    return m;
}

Mat2 piece_matrix(const Piece& pc, Complex k, const EvolveOptions& opt) {
    double h = pc.b - pc.a;
    if (h <= 0.0) return Mat2::identity();
    if (opt.exact_segments && pc.seg->linear()) {
        if (pc.seg->flat()) return {std::exp(-I * k * h), 0.0, 0.0, std::exp(I * k * h)};
        return exact_linear(pc.f(0.5 * (pc.a + pc.b)), k, h);
    }
    return integrate_piece(pc, k, opt);
}

}  // namespace

Mat2 jump_factor(double dV) {
    double c = std::cosh(0.5 * dV), s = std::sinh(0.5 * dV);
    return {c, -s, -s, c};
}

Mat2 propagate(const PeriodicPotential& pot, double a, double b, Complex k, const EvolveOptions& opt) {
    if (b < a) throw ConfigError("propagate: need a <= b");
    auto path = pot.path(a, b);
    Mat2 m = Mat2::identity();
    for (std::size_t i = 0; i < path.pieces.size(); ++i) {
        m = piece_matrix(path.pieces[i], k, opt) * m;
        if (path.jump_after[i] != 0.0) m = jump_factor(path.jump_after[i]) * m;
    }
    return m;
}

Mat2 matrix_power(const Mat2& M, long long n) {
    if (n < 0) return matrix_power(M.unimodular_inverse(), -n);
    if (n == 0) return Mat2::identity();
    if (n == 1) return M;
    Complex Y = 0.5 * M.trace();
    if (std::abs(1.0 - Y * Y) > 1e-8) {
        Complex lam = Y + std::sqrt(Y * Y - 1.0);
        if (std::abs(lam) < 1.0) lam = 1.0 / lam;
        Complex li = 1.0 / lam;
        Complex ln = std::pow(lam, double(n)), lmn = std::pow(li, double(n));
        Complex den = lam - li;
        return {(lmn * (lam - M.a) - ln * (li - M.a)) / den, M.b * (ln - lmn) / den, M.c * (ln - lmn) / den,
                (ln * (lam - M.a) - lmn * (li - M.a)) / den};
    }
    Mat2 r = Mat2::identity(), base = M;
    while (n > 0) {
        if (n & 1) r = base * r;
        base = base * base;
        n >>= 1;
    }
    return r;
}

EvolutionMatrix evolve(const PeriodicPotential& pot, double x, double xprime, Complex k, const EvolveOptions& opt) {
    if (!std::isfinite(x) || !std::isfinite(xprime)) throw ConfigError("evolve: x and x' must be finite");
    if (k == Complex(0.0)) {
        double d = 0.5 * (pot.V(xprime) - pot.V(x));
        return {std::cosh(d), std::cosh(d), std::sinh(d), std::sinh(d), x, xprime, k};
    }
    if (x < xprime) {
        auto inv = evolve(pot, xprime, x, k, opt).matrix().unimodular_inverse();
        return EvolutionMatrix::from(inv, x, xprime, k);
    }
    const double L = pot.period();
    double span = x - xprime;
    auto n = static_cast<long long>(std::floor(span / L));
    Mat2 m;
    if (n >= 2) {
        double mid = xprime + double(n) * L;
        if (mid > x) mid = x;
        Mat2 cell = propagate(pot, xprime, xprime + L, k, opt);
        m = propagate(pot, mid, x, k, opt) * matrix_power(cell, n);
    } else {
        m = propagate(pot, xprime, x, k, opt);
    }
    return EvolutionMatrix::from(m, x, xprime, k);
}

EvolutionMatrix series_evolution(const PeriodicPotential& pot, double x, double xprime, Complex k, double tol,
                                 int max_terms) {
    if (x < xprime) {
        auto inv = series_evolution(pot, xprime, x, k, tol, max_terms).matrix().unimodular_inverse();
        return EvolutionMatrix::from(inv, x, xprime, k);
    }
    const double Vx = pot.V(x), Vp = pot.V(xprime);
    int nmax = 16;
    for (;;) {
        auto Ip = alternating_integrals(pot, -1, xprime, x, nmax);
        auto Im = alternating_integrals(pot, +1, xprime, x, nmax);
        Complex ap = 0.0, am = 0.0, bp = 0.0, bm = 0.0;  // breve alpha+-, tilde beta+-
        Complex ikp = 1.0;
        double last = 0.0, scale = 1.0;
        for (int m = 0; m <= nmax; ++m) {
            if (m % 2 == 0) {
                ap += ikp * Ip[m];
                am += ikp * Im[m];
            } else {
                bp += ikp * Ip[m];
                bm += ikp * Im[m];
            }
            double t = std::abs(ikp) * std::max(Ip[m], Im[m]);
            scale = std::max(scale, t);
            if (m >= nmax - 1) last = std::max(last, t);
            ikp *= I * k;
        }
        if (last <= tol * scale) {
            ap *= std::exp(-0.5 * (Vx - Vp));
            bp *= std::exp(0.5 * (Vx + Vp));
            am *= std::exp(0.5 * (Vx - Vp));
            bm *= std::exp(-0.5 * (Vx + Vp));
            EvolutionMatrix U;
            U.alpha_plus = 0.5 * (ap + am - bp - bm);
            U.beta_minus = 0.5 * (ap - am - bp + bm);
            U.beta_plus = 0.5 * (ap - am + bp - bm);
            U.alpha_minus = 0.5 * (ap + am + bp + bm);
            U.x = x;
            U.xprime = xprime;
            U.k = k;
            if (scale > 1e8) throw NumericError("series_evolution: terms grow too large; use evolve");
            return U;
        }
        if (nmax >= max_terms) throw NumericError("series_evolution: no convergence; use evolve");
        nmax = std::min(2 * nmax, max_terms);
    }
}

ScatteringCoeffs scattering(const EvolutionMatrix& U) {
    if (U.alpha_plus == Complex(0.0)) throw NumericError("scattering: alpha(k) = 0 (singular interval)");
    return {1.0 / U.alpha_plus, U.beta_plus / U.alpha_plus, -U.beta_minus / U.alpha_plus};
}

GeneralizedScattering generalize(const EvolutionMatrix& U, double W, double Vx) {
    double c = std::cosh(0.5 * (W - Vx)), s = std::sinh(0.5 * (W - Vx));
    Complex ab_p = c * U.alpha_plus - s * U.beta_plus;
    Complex bb_m = c * U.beta_minus - s * U.alpha_minus;
    Complex bb_p = -s * U.alpha_plus + c * U.beta_plus;
    if (ab_p == Complex(0.0)) throw NumericError("generalize: alpha-bar(k) = 0");
    GeneralizedScattering g;
    g.tau_bar = 1.0 / ab_p;
    g.Rr_bar = bb_p / ab_p;
    g.Rl_bar = -bb_m / ab_p;
    g.W = W;
    g.xi = std::tanh(0.5 * (W - Vx));
    return g;
}

const char* band_name(BandClass b) {
    switch (b) {
        case BandClass::Band:
            return "band";
        case BandClass::Gap:
            return "gap";
        case BandClass::Edge:
            return "edge";
    }
    return "?";
}

BandClass classify_Y(Complex Y, double tol) {
    double y2 = Y.real() * Y.real();
    if (y2 < 1.0 - tol) return BandClass::Band;
    if (y2 > 1.0 + tol) return BandClass::Gap;
    return BandClass::Edge;
}

namespace {

Complex z_upper(Complex Y) {
    Complex Z = std::sqrt(1.0 - Y * Y);
    if (std::abs(Y - I * Z) < 1.0) Z = -Z;
    return Z;
}

}  // namespace

Complex z_eps_limit(double k, const std::function<Complex(Complex)>& Y_of_k, const BranchOptions& opt) {
    double eps = opt.eps_scale * std::max(1.0, std::abs(k));
    Complex z1 = z_upper(Y_of_k(Complex(k, eps)));
    Complex z2 = z_upper(Y_of_k(Complex(k, 0.5 * eps)));
    return 2.0 * z2 - z1;
}

Complex select_Z(Complex k, Complex Y, const std::function<Complex(Complex)>& Y_of_k, const BranchOptions& opt) {
    if (k.imag() > 0.0) return z_upper(Y);
    if (k.imag() < 0.0) {
        // oddness of Z carries the branch to the lower half plane
        Complex Yn = Y_of_k(-k);
        return -z_upper(Yn);
    }
    if (k.real() == 0.0) return 0.0;
    switch (classify_Y(Y, opt.edge_tol)) {
        case BandClass::Edge:
            return 0.0;
        case BandClass::Gap: {
            double y = Y.real();
            return I * std::copysign(std::sqrt(y * y - 1.0), y);
        }
        case BandClass::Band: {
            double y = Y.real();
            Complex z = z_eps_limit(k.real(), Y_of_k, opt);
            return std::copysign(std::sqrt(1.0 - y * y), z.real());
        }
    }
    return 0.0;
}

Monodromy monodromy(const PeriodicPotential& pot, Complex k, const EvolveOptions& eo, const BranchOptions& bo) {
    const double x1 = pot.offset() + pot.period();
    const double x0 = pot.offset();
    auto Y_of = [&](Complex kk) {
        if (kk == Complex(0.0)) return Complex(1.0);
        return 0.5 * propagate(pot, x0, x1, kk, eo).trace();
    };
    Monodromy m;
    m.k = k;
    m.U = evolve(pot, x1, x0, k, eo);
    m.Y = 0.5 * (m.U.alpha_plus + m.U.alpha_minus);
    if (k.imag() == 0.0) m.Y = m.Y.real();
    m.Z = select_Z(k, m.Y, Y_of, bo);
    m.band = classify_Y(m.Y, bo.edge_tol);
    if (k.imag() == 0.0 && m.band == BandClass::Edge)
        m.lambda = std::copysign(1.0, m.Y.real());
    else
        m.lambda = m.Y - I * m.Z;
    m.gamma = 1.0 / (m.lambda * m.lambda);
    return m;
}

BandClass classify_band(const PeriodicPotential& pot, double k, double tol) {
    if (k == 0.0) return BandClass::Edge;
    Complex Y = 0.5 * propagate(pot, pot.offset(), pot.offset() + pot.period(), k).trace();
    return classify_Y(Y, tol);
}

std::vector<double> band_edges(const std::function<double(double)>& Y, double kmin, double kmax, int nscan) {
    if (!(kmax > kmin) || nscan < 1) throw ConfigError("band_edges: need kmin < kmax and nscan >= 1");
    auto g = [&](double k) { return std::abs(Y(k)) - 1.0; };
    std::vector<double> edges;
    double k0 = kmin, g0 = g(kmin);
    for (int i = 1; i <= nscan; ++i) {
        double k1 = kmin + (kmax - kmin) * i / nscan, g1 = g(k1);
        if (g0 == 0.0 && k0 > kmin) {
            edges.push_back(k0);
        } else if (g0 != 0.0 && g1 != 0.0 && (g0 < 0.0) != (g1 < 0.0)) {
            boost::uintmax_t it = 200;
            auto r = boost::math::tools::toms748_solve(g, k0, k1, g0, g1, boost::math::tools::eps_tolerance<double>(50), it);
            edges.push_back(0.5 * (r.first + r.second));
        }
        k0 = k1;
        g0 = g1;
    }
    return edges;
}

std::vector<double> band_edges(const PeriodicPotential& pot, double kmin, double kmax, int nscan, const EvolveOptions& eo) {
    const double L = pot.period();
    const double a = pot.offset();
    return band_edges([&](double k) { return 0.5 * evolve(pot, a + L, a, Complex(k, 0.0), eo).matrix().trace().real(); },
                      kmin, kmax, nscan);
}

}  // namespace bloch
