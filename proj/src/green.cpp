#include "bloch/green.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "bloch/chebyshev.hpp"
#include "bloch/halfline.hpp"
#include "bloch/iterint.hpp"
#include "bloch/quadrature.hpp"

namespace bloch {

namespace {

Complex S_at(const PeriodicPotential& pot, double z, const Monodromy& mono, const EvolveOptions& eo) {
    return s_functions(evolve(pot, z, z - pot.period(), mono.k, eo), mono).S;
}

Complex integrate_complex(const std::function<Complex(double)>& f, double a, double b, double tol) {
    return gk_integrate(f, a, b, tol, "S integral");
}

}  // namespace

namespace {

// S on one piece through U(z, z-L) = U(z, b) U(b, b-L) U(z, b)^{-1}, b the piece start
struct PieceS {
    const PeriodicPotential& pot;
    const Monodromy& mono;
    const EvolveOptions& eo;
    double b;
    Mat2 Mb;

    PieceS(const PeriodicPotential& p, const Monodromy& m, const EvolveOptions& e, double start)
        : pot(p), mono(m), eo(e), b(start), Mb(evolve(p, start, start - p.period(), m.k, e).matrix()) {}

    EvolutionMatrix U(double z) const {
        Mat2 T = evolve(pot, z, b, mono.k, eo).matrix();
        return EvolutionMatrix::from(T * Mb * T.unimodular_inverse(), z, z - pot.period(), mono.k);
    }
    Complex operator()(double z) const { return s_functions(U(z), mono).S; }

    // in a gap S = 1 + i sigma; this is 1/sigma, free of the vanishing denominator
    double inv_sigma(double z) const {
        auto u = U(z);
        Complex den = u.alpha_plus - u.alpha_minus + u.beta_plus - u.beta_minus;
        return (den / (2.0 * mono.Z)).real();
    }
};

// zeros of 1/sigma (simple poles of sigma, where a Bloch solution vanishes)
std::vector<double> gap_poles(const PieceS& S, double a, double b) {
    const double L = S.pot.period();
    auto u = [&](double z) { return S.inv_sigma(z); };
    const int n = 64 * static_cast<int>(std::ceil((b - a) / L));
    std::vector<double> poles;
    double z0 = a, u0 = u(a);
    for (int i = 1; i <= n; ++i) {
        double z1 = a + (b - a) * i / n;
        double u1 = u(z1);
        if ((u0 < 0.0) != (u1 < 0.0) && u0 != 0.0 && u1 != 0.0) {
            boost::uintmax_t it = 200;
            auto r = boost::math::tools::toms748_solve(u, z0, z1, u0, u1, boost::math::tools::eps_tolerance<double>(52), it);
            double zr = 0.5 * (r.first + r.second);
            if (zr > a && zr < b) poles.push_back(zr);
        }
        z0 = z1;
        u0 = u1;
    }
    return poles;
}

}  // namespace

Complex s_integral(const PeriodicPotential& pot, double y, double x, const Monodromy& mono, const GreenOptions& opt) {
    if (x < y) return -s_integral(pot, x, y, mono, opt);
    if (x == y) return 0.0;
    const Complex k = mono.k;
    const double L = pot.period();
    const bool gap = k.imag() == 0.0 && mono.band == BandClass::Gap;
    const double ptol = std::max(opt.tol, 1e-10);
    Complex total = 0.0;
    for (const auto& p : pot.path(y, x).pieces) {
        PieceS S(pot, mono, opt.evolve, p.a);
        if (!gap) {
            total += integrate_complex(S, p.a, p.b, opt.tol);
            continue;
        }
        // smooth stretch of V around the piece, so poles just outside are seen too
        double qa = p.a, qb = p.b;
        for (const auto& q : pot.path(p.a - 0.1 * L, p.b + 0.1 * L).pieces)
            if (q.a <= p.a + 1e-12 * L && q.b >= p.b - 1e-12 * L) {
                qa = std::max(q.a, p.a - 0.05 * L);
                qb = std::min(q.b, p.b + 0.05 * L);
            }
        auto poles = gap_poles(S, qa, qb);
        if (poles.empty()) {
            total += integrate_complex(S, p.a, p.b, opt.tol);
            continue;
        }
        // sigma = rho/(z - z0) + smooth near each pole; |rho| = 1/(2k) in theory,
        // taken here from the local fit of 1/sigma so the subtraction is consistent
        const std::size_t np = poles.size();
        std::vector<double> rho(np), half(np);
        const auto& cheb = gauss(32);
        for (std::size_t j = 0; j < np; ++j) {
            double d = std::min({0.05 * L, 0.9 * (poles[j] - qa), 0.9 * (qb - poles[j])});
            if (j > 0) d = std::min(d, 0.5 * (poles[j] - poles[j - 1]));
            if (j + 1 < np) d = std::min(d, 0.5 * (poles[j + 1] - poles[j]));
            half[j] = d;
            std::vector<double> uv(cheb.size());
            for (int q = 0; q < cheb.size(); ++q) uv[q] = S.inv_sigma(poles[j] + d * cheb.nodes()[q]);
            rho[j] = d / cheb.interpolate_derivative(uv, 0.0);
        }
        auto rem = [&](double z) {
            Complex v = S(z);
            for (std::size_t j = 0; j < np; ++j) v -= I * rho[j] / (z - poles[j]);
            return v;
        };
        const double kr = k.real();
        std::unique_ptr<Monodromy> mono_eps;
        double lo = p.a;
        for (std::size_t j = 0; j < np; ++j) {
            const double z0 = poles[j], d = half[j];
            total += I * rho[j] * std::log(std::abs((p.b - z0) / (p.a - z0)));
            if (z0 > p.a && z0 < p.b) {
                // side from Im k > 0: sigma(z0; k + i eps) ~ i rho / eta
                if (!mono_eps)
                    mono_eps = std::make_unique<Monodromy>(
                        monodromy(pot, Complex(kr, 1e-7 * std::max(1.0, kr)), opt.evolve, opt.branch));
                double sig_eps_im = (-I * (PieceS(pot, *mono_eps, opt.evolve, p.a)(z0) - 1.0)).imag();
                double side = (rho[j] > 0.0) == (sig_eps_im > 0.0) ? 1.0 : -1.0;
                total += -M_PI * rho[j] * side;
            }
            const double wa = std::max(p.a, z0 - d), wb = std::min(p.b, z0 + d);
            if (wb <= wa) continue;
            if (wa > lo) total += integrate_complex(rem, lo, wa, ptol);
            // window: interpolate rem on nodes clear of z0, integrate over the part inside the piece
            std::vector<double> re(cheb.size()), im(cheb.size());
            for (int q = 0; q < cheb.size(); ++q) {
                Complex v = rem(z0 + d * cheb.nodes()[q]);
                re[q] = v.real();
                im[q] = v.imag();
            }
            const double ta = (wa - z0) / d, tb = (wb - z0) / d;
            auto fr = [&](double t) { return cheb.interpolate(re, t); };
            auto fi = [&](double t) { return cheb.interpolate(im, t); };
            using GL = boost::math::quadrature::gauss<double, 30>;
            total += d * Complex(GL::integrate(fr, ta, tb), GL::integrate(fi, ta, tb));
            lo = wb;
        }
        if (p.b > lo) total += integrate_complex(rem, lo, p.b, ptol);
    }
    return total;
}

GreenValue green_exact(const PeriodicPotential& pot, double x, double y, Complex k, const GreenOptions& opt) {
    if (k == Complex(0.0)) throw ConfigError("green_exact: k must be nonzero");
    if (k.imag() < 0.0) throw ConfigError("green_exact: Im k must be >= 0");
    return green_exact(pot, x, y, monodromy(pot, k, opt.evolve, opt.branch), opt);
}

GreenValue green_exact(const PeriodicPotential& pot, double x, double y, const Monodromy& mono, const GreenOptions& opt) {
    const Complex k = mono.k;
    if (k == Complex(0.0)) throw ConfigError("green_exact: k must be nonzero");
    if (k.imag() < 0.0) throw ConfigError("green_exact: Im k must be >= 0");
    const double hi = std::max(x, y), lo = std::min(x, y);
    const Complex Sx = S_at(pot, hi, mono, opt.evolve);
    const Complex Sy = hi == lo ? Sx : S_at(pot, lo, mono, opt.evolve);
    const Complex integral = s_integral(pot, lo, hi, mono, opt);
    // product of principal roots, the boundary value from Im k > 0
    const Complex root = std::sqrt(1.0 - Sx) * std::sqrt(1.0 - Sy);
    GreenValue g;
    g.G_S = std::exp(I * k * (hi - lo) - I * k * integral) / (2.0 * I * k * root);
    g.G_F = std::exp(-0.5 * (pot.V(x) - pot.V(y))) * g.G_S;
    g.x = x;
    g.y = y;
    g.k = k;
    if (k.imag() == 0.0) {
        g.band_class = mono.band;
        g.edge = mono.band == BandClass::Edge;
    }
    if (!std::isfinite(std::abs(g.G_S))) throw NumericError("green_exact: non-finite value (band edge?)");
    return g;
}

void SquareWellParams::validate() const {
    if (!(L > 0.0) || !(a > 0.0 && a < L)) throw ConfigError("square well needs 0 < a < L");
    if (!std::isfinite(C)) throw ConfigError("square well height must be finite");
}

PeriodicPotential square_well(const SquareWellParams& p) {
    p.validate();
    return square_potential(p.C, p.L, p.a);
}

Complex square_well_Y(const SquareWellParams& p, Complex k) {
    const double A2 = p.A() * p.A();
    return (std::cos(k * p.L) - A2 * std::cos(k * (p.L - 2.0 * p.b()))) / (1.0 - A2);
}

Complex square_well_oracle(const SquareWellParams& p, double x, double y, Complex k, const BranchOptions& bo) {
    p.validate();
    if (!(0.0 < y && y <= x && x < p.a)) throw ConfigError("square_well_oracle: needs 0 < y <= x < a");
    if (k == Complex(0.0)) throw ConfigError("square_well_oracle: k must be nonzero");
    const double A = p.A(), A2 = A * A, L = p.L, b = p.b();
    auto Yk = [&](Complex q) { return square_well_Y(p, q); };
    const Complex Z = select_Z(k, Yk(k), Yk, bo);
    const Complex K = std::sin(k * L) - A2 * std::sin(k * (L - 2.0 * b)) - (1.0 - A2) * Z;
    const Complex skb = std::sin(k * b);
    const Complex n1 = 2.0 * A * std::exp(2.0 * I * k * x) * std::exp(-I * k * (L - b)) * skb - K;
    const Complex n2 = 2.0 * A * std::exp(-2.0 * I * k * y) * std::exp(I * k * (L - b)) * skb - K;
    const Complex den = 2.0 * I * k * std::exp(I * k * (x - y)) * (4.0 * A2 * skb * skb - K * K);
    return n1 * n2 / den;
}

double s0_at(const PeriodicPotential& pot, double x, double tol) {
    auto cc = cell_constants(pot, tol);
    return -std::exp(pot.V(x) - cc.V0);
}

namespace {

double s2_value(const PeriodicPotential& pot, double Vz, double z, const CellConstants& cc, double Q, double tol,
                bool cached) {
    const double L = pot.period();
    const SignWord w("+-+");
    double pmp = cached ? bracket(pot, w, z - L, z, tol) : bracket_uncached(pot, w, z - L, z, tol);
    return std::exp(Vz - cc.V0) / cc.L0 * (std::exp(-cc.V0) * pmp - (std::pow(cc.L0, 4) / 4.0 + Q) / (2.0 * cc.L0));
}

}  // namespace

double s2_at(const PeriodicPotential& pot, double x, double tol) {
    auto cc = cell_constants(pot, tol);
    return s2_value(pot, pot.V(x), x, cc, cell_Q(pot, tol), tol, true);
}

Complex GreenSeries::eval(Complex k, int order) const {
    if (order < -1 || order > 2) throw ConfigError("GreenSeries::eval: order must be in [-1, 2]");
    const Complex ik = I * k;
    Complex g = gm1 / ik;
    if (order >= 0) g += g0;
    if (order >= 1) g += ik * g1;
    if (order >= 2) g += ik * ik * g2;
    return g;
}

GreenSeries green_series(const PeriodicPotential& pot, double x, double y, double tol) {
    if (x < y) std::swap(x, y);
    const double L = pot.period();
    auto cc = cell_constants(pot, tol);
    const double Q = cell_Q(pot, tol);
    const double L0 = cc.L0, V0 = cc.V0;
    const double Vx = pot.V(x), Vy = pot.V(y);
    const double pre = 0.5 * std::exp(-0.5 * (Vx + Vy));
    const double plus = bracket(pot, SignWord("+"), y, x, tol);
    const double pmp_x = bracket(pot, SignWord("+-+"), x - L, x, tol);
    const double pmp_y = bracket(pot, SignWord("+-+"), y - L, y, tol);
    // s2 is a difference of O(scale) terms; below that roundoff level it is zero
    const double scale = std::exp(-cc.V0) / L0 * (std::pow(L0, 4) / 4.0 + Q) / (2.0 * L0) * std::exp(std::abs(Vx) + std::abs(Vy));
    double int_s2 = 0.0;
    for (const auto& p : pot.path(y, x).pieces)
        int_s2 += gk_integrate([&](double z) { return s2_value(pot, p.V(z), z, cc, Q, tol, false); }, p.a, p.b,
                               std::max(tol, 1e-11), "s2 integral", 1e-13 * scale * (p.b - p.a));
    GreenSeries s;
    s.x = x;
    s.y = y;
    s.gm1 = pre * std::exp(V0);
    s.g0 = pre * plus;
    s.g1 = pre / (2.0 * L0) *
           (pmp_x + pmp_y + L0 * std::exp(-V0) * plus * plus - std::exp(V0) / L0 * (std::pow(L0, 4) / 4.0 + Q));
    s.g2 = std::exp(-V0) * plus * s.g1 - (std::exp(-3.0 * V0) / 3.0 * plus * plus * plus + int_s2) * s.gm1;
    s.q1 = std::exp(-V0) * plus;
    s.q3 = -int_s2;
    s.s0x = -std::exp(Vx - V0);
    s.s0y = -std::exp(Vy - V0);
    s.s2x = s2_value(pot, Vx, x, cc, Q, tol, true);
    s.s2y = s2_value(pot, Vy, y, cc, Q, tol, true);
    return s;
}

}  // namespace bloch
