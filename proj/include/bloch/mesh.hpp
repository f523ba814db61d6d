#pragma once

#include <vector>

#include "bloch/chebyshev.hpp"
#include "bloch/potential.hpp"

namespace bloch {

struct Panel {
    double a = 0.0, b = 0.0;
    Piece piece;
    double jump_after = 0.0;  // potential jump at b
};

// Piecewise Chebyshev-Lobatto mesh over [a, b], split at every potential
// breakpoint and refined until e^{+-V} is resolved on each panel.
// Nodes are stored panel by panel; panel ends are duplicated so that
// one-sided values at jumps are kept.
class PanelMesh {
public:
    PanelMesh(const PeriodicPotential& pot, double a, double b, int order = 20, double resolve_tol = 1e-14,
              int min_panels = 1);

    double a() const { return a_; }
    double b() const { return b_; }
    int order() const { return p_; }
    int panel_count() const { return static_cast<int>(panels_.size()); }
    int size() const { return panel_count() * p_; }
    const std::vector<Panel>& panels() const { return panels_; }
    const std::vector<double>& nodes() const { return x_; }
    const ChebNodes& cheb() const { return *cheb_; }

    // f(piece, x) sampled at all nodes
    template <class F>
    std::vector<double> sample(F&& f) const {
        std::vector<double> v(size());
        for (int i = 0; i < panel_count(); ++i)
            for (int j = 0; j < p_; ++j) v[i * p_ + j] = f(panels_[i].piece, x_[i * p_ + j]);
        return v;
    }
    std::vector<double> exp_V(double sigma) const;
    std::vector<double> V_values() const;

    // running integral from a; continuous across panels
    std::vector<double> cumulative(const std::vector<double>& f) const;
    double integral(const std::vector<double>& f) const;
    // panel-wise derivative
    std::vector<double> derivative(const std::vector<double>& f) const;
    // interpolant at x; at a panel end the panel to the right is used unless left is set
    double interpolate(const std::vector<double>& f, double x, bool left = false) const;
    int panel_of(double x, bool left = false) const;

private:
    double a_, b_;
    int p_;
    const ChebNodes* cheb_;
    std::vector<Panel> panels_;
    std::vector<double> x_;
};

}  // namespace bloch
