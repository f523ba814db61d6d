#pragma once

#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "bloch/mesh.hpp"
#include "bloch/potential.hpp"

namespace bloch {

struct WGridSpec {
    int n_w = 25;            // odd, so W = V0 is a node; more nodes amplify roundoff through B
    int x_order = 20;        // Lobatto nodes per x panel
    int min_panels = 4;
    double resolve_tol = 1e-14;
    double decay_tol = 1e-8;  // W-interpolant tail check in op_B
    double mean_tol = 1e-6;   // zero-mean check in op_A_inv, relative to the largest column mass
};

// Tensor grid: piecewise Chebyshev panels over the cell [x0 - L, x0] times
// Chebyshev nodes in t = tanh((W - V0)/2), which covers the whole W line.
class WGrid {
public:
    WGrid(const PeriodicPotential& pot, double x0, const WGridSpec& spec = {});

    const PeriodicPotential& potential() const { return pot_; }
    const WGridSpec& spec() const { return spec_; }
    const CellConstants& cell() const { return cc_; }
    const PanelMesh& mesh() const { return mesh_; }
    const ChebNodes& tnodes() const { return *tn_; }
    double x0() const { return x0_; }
    double period() const { return pot_.period(); }
    int nx() const { return mesh_.size(); }
    int nw() const { return tn_->size(); }
    int w_center() const { return nw() / 2; }
    double t(int j) const { return tn_->nodes()[j]; }
    double W(int j) const { return W_[j]; }
    const std::vector<double>& W_nodes() const { return W_; }
    double x(int i) const { return mesh_.nodes()[i]; }
    double V(int i) const { return Vx_[i]; }
    double f(int i) const { return fx_[i]; }

    static double t_of_W(double W, double V0) { return std::tanh(0.5 * (W - V0)); }

private:
    PeriodicPotential pot_;
    WGridSpec spec_;
    double x0_;
    CellConstants cc_;
    PanelMesh mesh_;
    const ChebNodes* tn_;
    std::vector<double> W_, Vx_, fx_;
};

// h(x, W) sampled on a WGrid, plus optional delta components in x: a
// delta at the start of panel p carries weights over W. Values at panel
// ends are one-sided limits.
struct WGridFunction {
    std::shared_ptr<const WGrid> grid;
    std::vector<double> values;                // values[i * nw + j]
    std::map<int, std::vector<double>> deltas;  // panel index -> weights
    bool periodic = true;

    WGridFunction() = default;
    explicit WGridFunction(std::shared_ptr<const WGrid> g);

    double& at(int i, int j) { return values[i * grid->nw() + j]; }
    double at(int i, int j) const { return values[i * grid->nw() + j]; }
    std::vector<double> row(int i) const;  // over W at x node i
    std::vector<double> col(int j) const;  // over x at W node j

    // interpolated value; x is reduced into the cell, right limits at panel ends
    double eval(double x, double W) const;

    WGridFunction& operator+=(const WGridFunction& o);
    WGridFunction& operator*=(double s);
    double max_abs() const;
};

WGridFunction operator+(WGridFunction a, const WGridFunction& b);
WGridFunction operator-(WGridFunction a, const WGridFunction& b);
WGridFunction operator*(double s, WGridFunction a);

std::shared_ptr<const WGrid> make_wgrid(const PeriodicPotential& pot, double x0, const WGridSpec& spec = {});

// Samples h(x, V(x), W) where V is the one-sided potential value at the node.
WGridFunction sample(std::shared_ptr<const WGrid> g, const std::function<double(double x, double V, double W)>& h);

// xi = tanh((W - V(x))/2)
WGridFunction xi_function(std::shared_ptr<const WGrid> g);

WGridFunction op_A(const WGridFunction& h);
WGridFunction op_B(const WGridFunction& h);
WGridFunction op_D(const WGridFunction& h);
WGridFunction op_A_inv(const WGridFunction& g);
WGridFunction op_L(const WGridFunction& h);  // 2 A^{-1} B

// I_{s,s'} g: double integral of e^{s V(z) + s' V(z')} g(z) over the trailing window.
WGridFunction op_I(int sigma, int sigmap, const WGridFunction& g);
// K_{s,s'} g = s'/sinh(V0 - W) D e^{s' W} J_s g, with J_s = e^{s W}(1 + s d/dW).
WGridFunction op_K(int sigma, int sigmap, const WGridFunction& g);
// L through the I/K factorisation, (1/2L0) sum I_{s,s'} K_{-s,-s'}.
WGridFunction op_L_IK(const WGridFunction& h);

// Cell integral over x of h at every W node.
std::vector<double> cell_integral(const WGridFunction& h);

struct ExpansionSeries {
    int order = 0;
    std::vector<WGridFunction> rbar;  // r_0 .. r_N
    std::vector<double> a;            // a_0 .. a_N at the requested x
    std::vector<double> s;            // s_0 .. s_N (odd entries are zero)
    double x = 0.0;
};

inline constexpr int kMaxRbarOrder = 4;

// r_n = L^n (r_0 + xi) on a grid over the cell (x0 - L, x0].
ExpansionSeries rbar_numeric(const PeriodicPotential& pot, int n, double x0, const WGridSpec& spec = {});
ExpansionSeries rbar_numeric(const PeriodicPotential& pot, int n, std::shared_ptr<const WGrid> grid);

double rbar_closed(const PeriodicPotential& pot, double x, double W, int n, double tol = 1e-12);

// a_n and s_n at x; orders above 2 use the numeric pipeline and the W -> -inf limit.
ExpansionSeries expansion_coeffs(const PeriodicPotential& pot, double x, int N, const WGridSpec& spec = {});

// the W -> -inf limit of e^{-W + V(x)} r(x, W) / 4 from samples at W = V0 - {8, 12, 16}
double minus_infinity_limit(const WGridFunction& r, double x, double Vx, double tol = 1e-6);

}  // namespace bloch
