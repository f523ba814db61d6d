#pragma once

#include <cmath>

#include "bloch/transfer.hpp"

namespace bloch {

struct GreenOptions {
    double tol = 1e-12;  // quadrature of the S line integral
    EvolveOptions evolve;
    BranchOptions branch;
};

struct GreenValue {
    Complex G_S, G_F;
    double x = 0.0, y = 0.0;  // as given by the caller
    Complex k;
    BandClass band_class = BandClass::Band;  // real k only
    bool edge = false;
};

// Schrodinger and Fokker-Planck Green functions for Im k >= 0, k != 0.
GreenValue green_exact(const PeriodicPotential& pot, double x, double y, Complex k, const GreenOptions& opt = {});

// Same, reusing a monodromy already computed at k.
GreenValue green_exact(const PeriodicPotential& pot, double x, double y, const Monodromy& mono,
                       const GreenOptions& opt = {});

// integral of S(z, k) over [y, x], split at the breakpoints of V
Complex s_integral(const PeriodicPotential& pot, double y, double x, const Monodromy& mono,
                   const GreenOptions& opt = {});

struct SquareWellParams {
    double C = 1.0, L = 1.0, a = 0.6;
    double b() const { return L - a; }
    double A() const { return -std::tanh(0.5 * C); }
    void validate() const;
};

// the potential 0 on (0, a), C on (a, L)
PeriodicPotential square_well(const SquareWellParams& p);

// closed-form Y(k) and G_S for 0 < y <= x < a
Complex square_well_Y(const SquareWellParams& p, Complex k);
Complex square_well_oracle(const SquareWellParams& p, double x, double y, Complex k, const BranchOptions& bo = {});

// G_S ~ g_{-1}/(ik) + g0 + ik g1 + (ik)^2 g2
struct GreenSeries {
    double gm1 = 0.0, g0 = 0.0, g1 = 0.0, g2 = 0.0;
    double q1 = 0.0, q3 = 0.0;
    double s0x = 0.0, s0y = 0.0, s2x = 0.0, s2y = 0.0;
    double x = 0.0, y = 0.0;  // ordered, x >= y

    // terms through (ik)^order, order in {-1, 0, 1, 2}
    Complex eval(Complex k, int order = 2) const;
};

GreenSeries green_series(const PeriodicPotential& pot, double x, double y, double tol = 1e-11);

// s0 and s2 at x
double s0_at(const PeriodicPotential& pot, double x, double tol = 1e-12);
double s2_at(const PeriodicPotential& pot, double x, double tol = 1e-12);

}  // namespace bloch
