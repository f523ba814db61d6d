#include "bloch/halfline.hpp"

#include <cmath>

namespace bloch {

namespace {

Quality quality_of(const Monodromy& mono) {
    if (mono.k.imag() == 0.0 && std::abs(1.0 - mono.Y * mono.Y) < 1e-10) return Quality::Edge;
    return Quality::Ok;
}

EvolutionMatrix period_at(const PeriodicPotential& pot, double x, Complex k) {
    return evolve(pot, x, x - pot.period(), k);
}

}  // namespace

Reflections reflect_halfline(const EvolutionMatrix& U, const Monodromy& mono) {
    Complex den = 1.0 / mono.lambda - U.alpha_plus;
    if (den == Complex(0.0) || !std::isfinite(std::abs(den)))
        throw NumericError("reflect_halfline: 1/lambda = alpha(k)");
    Reflections r;
    r.Rr_inf = -U.beta_plus / den;
    r.Rl_inf = U.beta_minus / den;
    r.quality = quality_of(mono);
    return r;
}

SFunctions s_functions(const EvolutionMatrix& U, const Monodromy& mono) {
    const Complex dA = U.alpha_plus - U.alpha_minus;
    const Complex den = dA + U.beta_plus - U.beta_minus;
    if (den == Complex(0.0)) throw NumericError("s_functions: singular denominator");
    const Complex iZ2 = 2.0 * I * mono.Z;
    SFunctions s;
    s.Sr = 2.0 * U.beta_plus / (dA + 2.0 * U.beta_plus - iZ2);
    s.Sl = -2.0 * U.beta_minus / (dA - 2.0 * U.beta_minus - iZ2);
    s.S = 1.0 + iZ2 / den;
    s.quality = quality_of(mono);
    return s;
}

Reflections reflect_halfline(const PeriodicPotential& pot, double x, Complex k) {
    return reflect_halfline(period_at(pot, x, k), monodromy(pot, k));
}

SFunctions s_functions(const PeriodicPotential& pot, double x, Complex k) {
    return s_functions(period_at(pot, x, k), monodromy(pot, k));
}

SFunctions s_from_reflections(const Reflections& r) {
    SFunctions s;
    s.Sr = r.Rr_inf / (1.0 + r.Rr_inf);
    s.Sl = r.Rl_inf / (1.0 + r.Rl_inf);
    s.S = s.Sr + s.Sl;
    s.quality = r.quality;
    return s;
}

MFunctions m_functions(const PeriodicPotential& pot, double x, Complex k) {
    auto e = pot.eval(x);
    if (e.has_jump) throw ConfigError("m_functions: x is a jump point of V; f(x) is undefined");
    if (k == Complex(0.0)) throw ConfigError("m_functions: k must be nonzero");
    auto s = s_functions(pot, x, k);
    MFunctions m;
    m.m_minus = -2.0 * I * k * (s.Sr - 0.5) - e.f;
    m.m_plus = -2.0 * I * k * (s.Sl - 0.5) + e.f;
    m.quality = s.quality;
    return m;
}

HalflineState halfline_state(const PeriodicPotential& pot, double x, Complex k) {
    auto U = period_at(pot, x, k);
    auto mono = monodromy(pot, k);
    auto r = reflect_halfline(U, mono);
    auto s = s_functions(U, mono);
    HalflineState h;
    h.Rr_inf = r.Rr_inf;
    h.Rl_inf = r.Rl_inf;
    h.Sr = s.Sr;
    h.Sl = s.Sl;
    h.S = s.S;
    h.x = x;
    h.k = k;
    h.quality = s.quality;
    auto e = pot.eval(x);
    if (!e.has_jump && k != Complex(0.0)) {
        h.m_minus = -2.0 * I * k * (s.Sr - 0.5) - e.f;
        h.m_plus = -2.0 * I * k * (s.Sl - 0.5) + e.f;
        h.has_m = true;
    }
    return h;
}

}  // namespace bloch
