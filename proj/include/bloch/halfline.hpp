#pragma once

#include "bloch/transfer.hpp"

namespace bloch {

enum class Quality { Ok, Edge };

struct HalflineState {
    Complex Rr_inf, Rl_inf;
    Complex Sr, Sl, S;
    Complex m_plus, m_minus;
    bool has_m = false;  // false at jump points
    double x = 0.0;
    Complex k;
    Quality quality = Quality::Ok;
};

struct Reflections {
    Complex Rr_inf, Rl_inf;
    Quality quality = Quality::Ok;
};

struct SFunctions {
    Complex Sr, Sl, S;
    Quality quality = Quality::Ok;
};

struct MFunctions {
    Complex m_plus, m_minus;
    Quality quality = Quality::Ok;
};

// U is the one-period matrix U(x, x - L; k), mono the monodromy at the same k.
Reflections reflect_halfline(const EvolutionMatrix& U, const Monodromy& mono);
SFunctions s_functions(const EvolutionMatrix& U, const Monodromy& mono);

Reflections reflect_halfline(const PeriodicPotential& pot, double x, Complex k);
SFunctions s_functions(const PeriodicPotential& pot, double x, Complex k);
MFunctions m_functions(const PeriodicPotential& pot, double x, Complex k);

// Sr, Sl, S via S = R / (1 + R).
SFunctions s_from_reflections(const Reflections& r);

HalflineState halfline_state(const PeriodicPotential& pot, double x, Complex k);

}  // namespace bloch
