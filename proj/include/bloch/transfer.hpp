#pragma once

#include <functional>
#include <vector>

#include "bloch/potential.hpp"
#include "bloch/types.hpp"

namespace bloch {

struct EvolveOptions {
    double rtol = 1e-13;  // 1e-11 leaves det U - 1 near 1e-11
    double atol = 1e-16;
    // closed-form propagators on const and linear segments
    bool exact_segments = true;
};

// U(x, x'; k) = [[alpha(k), beta(-k)], [beta(k), alpha(-k)]]
struct EvolutionMatrix {
    Complex alpha_plus{1.0}, alpha_minus{1.0}, beta_plus{0.0}, beta_minus{0.0};
    double x = 0.0, xprime = 0.0;
    Complex k{0.0};

    Mat2 matrix() const { return {alpha_plus, beta_minus, beta_plus, alpha_minus}; }
    static EvolutionMatrix from(const Mat2& m, double x, double xprime, Complex k) {
        return {m.a, m.d, m.c, m.b, x, xprime, k};
    }
    Complex det() const { return alpha_plus * alpha_minus - beta_plus * beta_minus; }
};

// Product of segment propagators and jump factors over [a, b], a <= b.
Mat2 propagate(const PeriodicPotential& pot, double a, double b, Complex k, const EvolveOptions& opt = {});

// Exact factor for crossing a jump of height dV.
Mat2 jump_factor(double dV);

EvolutionMatrix evolve(const PeriodicPotential& pot, double x, double xprime, Complex k,
                       const EvolveOptions& opt = {});

// The same matrix from the iterated-integral power series in k.
EvolutionMatrix series_evolution(const PeriodicPotential& pot, double x, double xprime, Complex k,
                                 double tol = 1e-15, int max_terms = 400);

struct ScatteringCoeffs {
    Complex tau, R_r, R_l;
};
ScatteringCoeffs scattering(const EvolutionMatrix& U);

struct GeneralizedScattering {
    Complex tau_bar, Rr_bar, Rl_bar;
    double W = 0.0;
    double xi = 0.0;
};
GeneralizedScattering generalize(const EvolutionMatrix& U, double W, double Vx);

enum class BandClass { Band, Gap, Edge };
const char* band_name(BandClass b);

struct BranchOptions {
    double eps_scale = 1e-7;  // eps = eps_scale * max(1, |k|)
    double edge_tol = 1e-10;  // on Y^2
};

struct Monodromy {
    Complex Y, Z, lambda, gamma;
    Complex k;
    BandClass band = BandClass::Band;  // meaningful for real k
    EvolutionMatrix U;                 // one period ending at offset + L
};

// Z with |Y - iZ| > 1 for Im k > 0, and the boundary limit for real k.
// Y_of_k evaluates Y off the real axis for the eps rule.
Complex select_Z(Complex k, Complex Y, const std::function<Complex(Complex)>& Y_of_k, const BranchOptions& opt = {});

// The raw eps rule: Z(k + i eps) and Z(k + i eps/2) extrapolated to eps = 0.
Complex z_eps_limit(double k, const std::function<Complex(Complex)>& Y_of_k, const BranchOptions& opt = {});

BandClass classify_Y(Complex Y, double tol = 1e-10);

Monodromy monodromy(const PeriodicPotential& pot, Complex k, const EvolveOptions& eo = {},
                    const BranchOptions& bo = {});

BandClass classify_band(const PeriodicPotential& pot, double k, double tol = 1e-10);

// M^n for a unimodular 2x2 matrix.
Mat2 matrix_power(const Mat2& M, long long n);

// Real k in (kmin, kmax] where |Y| crosses 1, found on a scan of nscan
// intervals and refined by bracketing. Touching points are not reported.
std::vector<double> band_edges(const std::function<double(double)>& Y, double kmin, double kmax, int nscan = 2000);
std::vector<double> band_edges(const PeriodicPotential& pot, double kmin, double kmax, int nscan = 2000,
                               const EvolveOptions& eo = {});

}  // namespace bloch
